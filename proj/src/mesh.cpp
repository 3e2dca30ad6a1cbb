#include "flexsim/mesh.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace flexsim {

Issues validate(const MeshConfig& config) {
  Issues issues;
  if (config.n_space < kMinSpaceIntervals)
    issues.push_back({"n_space", "must be >= " + std::to_string(kMinSpaceIntervals) + ", got " +
                                     std::to_string(config.n_space)});
  if (config.n_time < kMinTimeSteps)
    issues.push_back({"n_time", "must be >= " + std::to_string(kMinTimeSteps) + ", got " +
                                    std::to_string(config.n_time)});
  if (!(std::isfinite(config.length) && config.length > 0.0))
    issues.push_back({"length", "must be a finite value > 0"});
  if (!(std::isfinite(config.final_time) && config.final_time > 0.0))
    issues.push_back({"final_time", "must be a finite value > 0"});
  return issues;
}

Mesh build_mesh(const MeshConfig& config) {
  if (auto issues = validate(config); !issues.empty()) throw ValidationError(std::move(issues));
  return Mesh(config);
}

double node_position(const Mesh& mesh, std::size_t i) {
  if (i > mesh.n_space())
    throw std::out_of_range("node index " + std::to_string(i) + " outside [0, " +
                            std::to_string(mesh.n_space()) + "]");
  return mesh.x(i);
}

double level_time(const Mesh& mesh, std::size_t j) {
  if (j > mesh.n_time())
    throw std::out_of_range("time index " + std::to_string(j) + " outside [0, " +
                            std::to_string(mesh.n_time()) + "]");
  return mesh.t(j);
}

}  // namespace flexsim
