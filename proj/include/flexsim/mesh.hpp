#pragma once

#include <cstddef>

#include "flexsim/error.hpp"

namespace flexsim {

/// Uniform space/time discretization request.
struct MeshConfig {
  std::size_t n_space{50};   ///< spatial intervals N (nodes 0..N)
  std::size_t n_time{10000}; ///< time steps T (levels 0..T)
  double length{1.0};        ///< L [m]
  double final_time{1.0};    ///< t_f [s]

  friend bool operator==(const MeshConfig&, const MeshConfig&) = default;
};

/// The fourth-difference stencil needs i-2..i+2 and the recursion two history
/// levels, hence the lower bounds.
inline constexpr std::size_t kMinSpaceIntervals = 4;
inline constexpr std::size_t kMinTimeSteps = 2;

/// Returns every violated invariant; empty when the config is usable.
Issues validate(const MeshConfig& config);

class Mesh {
 public:
  const MeshConfig& config() const noexcept { return config_; }
  double h() const noexcept { return h_; }
  double k() const noexcept { return k_; }
  std::size_t n_space() const noexcept { return config_.n_space; }
  std::size_t n_time() const noexcept { return config_.n_time; }
  std::size_t n_nodes() const noexcept { return config_.n_space + 1; }
  std::size_t n_levels() const noexcept { return config_.n_time + 1; }
  double length() const noexcept { return config_.length; }
  double final_time() const noexcept { return config_.final_time; }

  /// x_i = i*h without bounds checks; hot loops use this.
  double x(std::size_t i) const noexcept { return static_cast<double>(i) * h_; }
  /// t_j = j*k without bounds checks.
  double t(std::size_t j) const noexcept { return static_cast<double>(j) * k_; }

  friend bool operator==(const Mesh&, const Mesh&) = default;

 private:
  friend Mesh build_mesh(const MeshConfig& config);
  explicit Mesh(const MeshConfig& config)
      : config_(config),
        h_(config.length / static_cast<double>(config.n_space)),
        k_(config.final_time / static_cast<double>(config.n_time)) {}

  MeshConfig config_;
  double h_;
  double k_;
};

/// Throws ValidationError naming the first offending field.
Mesh build_mesh(const MeshConfig& config);

/// Physical position of node i. Throws std::out_of_range for i > N.
double node_position(const Mesh& mesh, std::size_t i);

/// Physical time of level j. Throws std::out_of_range for j > T.
double level_time(const Mesh& mesh, std::size_t j);

}  // namespace flexsim
