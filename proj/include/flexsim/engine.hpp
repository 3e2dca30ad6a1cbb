#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flexsim/control.hpp"
#include "flexsim/error.hpp"
#include "flexsim/mesh.hpp"
#include "flexsim/models.hpp"
#include "flexsim/stability.hpp"

namespace flexsim {

/// Everything needed to reproduce one run.
struct Scenario {
  std::string label;
  ModelSpec model{TimoshenkoParams{}};
  MeshConfig mesh;
  ControllerSpec controller;
  std::vector<DisturbanceSpec> disturbances;
  double divergence_threshold{kDefaultDivergenceThreshold};
  Storage storage{Storage::Full};
  /// Free-form annotations (value provenance and the like); not used by the engine.
  std::map<std::string, std::string> notes;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Full validation; paths are absolute scenario keys ("controller.pd_gains.k2").
Issues validate(const Scenario& scenario);

struct SimulationResult {
  Scenario scenario;
  Mesh mesh;
  FieldHistory history;
  std::vector<double> tip_w;    ///< w(N, j) for j = 0..steps_completed
  std::vector<double> tip_phi;  ///< phi(N, j), Timoshenko only
  std::optional<StabilityReport> a_priori;
  DivergenceVerdict verdict;
  std::chrono::duration<double> wall_time{};
  std::size_t steps_completed{0};

  /// Time levels holding simulation output: 0..steps_completed.
  std::size_t valid_levels() const noexcept { return steps_completed + 1; }
};

struct RunOptions {
  /// Upper bound on history memory; larger requests fail before allocation.
  std::size_t memory_cap_bytes{std::size_t{2} << 30};
  /// Invoked with (levels done, levels total) roughly every 1% of the run.
  std::function<void(std::size_t, std::size_t)> progress;
  /// Runs the interior update before the boundary updates. Interior nodes only
  /// read levels j-1 and j-2, so results must not change.
  bool interior_first{false};
};

/// Thrown when a history would exceed RunOptions::memory_cap_bytes.
class MemoryCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The a-priori predicate matching the model: the closed-form heat and beam
/// conditions, or the wave-speed heuristic for the Timoshenko beam and string.
StabilityReport a_priori_stability(const Scenario& scenario);

/// Largest characteristic wave speed, used by the heuristic.
double max_wave_speed(const ModelSpec& model, double length);

/// Marches the scenario from levels 0,1 to level T, stopping at the first
/// diverged level. Throws ValidationError or MemoryCapExceeded.
SimulationResult run(const Scenario& scenario, const RunOptions& options = {});

/// Mean of |series| over the last `fraction` of levels 0..n_time (indices
/// j >= ceil((1 - fraction) * n_time)), restricted to the levels present.
double window_mean_abs(std::span<const double> series, std::size_t n_time, double fraction = 0.1);

/// Gain names accepted by with_gain/gain_sweep for the scenario's controller.
std::vector<std::string> gain_names(ControllerKind kind);
/// Copy of the scenario with one controller gain replaced.
Scenario with_gain(const Scenario& base, std::string_view gain_name, double value);

struct SweepEntry {
  double value{0.0};
  DivergenceVerdict verdict;
  double final_tip_magnitude{0.0};
  double tip_window_mean{0.0};  ///< window_mean_abs of the tip displacement
  std::size_t steps_completed{0};
};

/// One run per value, up to `jobs` in parallel; results keep the input order.
std::vector<SweepEntry> gain_sweep(const Scenario& base, std::string_view gain_name,
                                   std::span<const double> values, std::size_t jobs = 1,
                                   const RunOptions& options = {});

}  // namespace flexsim
