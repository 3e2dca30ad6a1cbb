#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace flexsim {

/// Outcome of an a-priori stability predicate.
struct StabilityReport {
  std::string criterion_name;
  double lhs_value{0.0};
  double threshold{0.0};
  bool predicted_stable{false};
  double margin{0.0};  ///< threshold - lhs
  /// True for heuristics that are not closed-form conditions of the scheme.
  bool advisory{false};
};

enum class DivergenceReason { None, ThresholdExceeded, NonFiniteValue };

std::string_view to_string(DivergenceReason reason);

struct DivergenceVerdict {
  bool diverged{false};
  std::optional<std::size_t> first_bad_step;
  double peak_magnitude{0.0};
  DivergenceReason reason{DivergenceReason::None};

  friend bool operator==(const DivergenceVerdict&, const DivergenceVerdict&) = default;
};

inline constexpr double kDefaultDivergenceThreshold = 1e6;

/// Explicit heat scheme: r = alpha*k/h^2, stable iff r < 1/2 (strict).
StabilityReport heat_stability(double alpha, double h, double k);

/// Explicit damped, tensioned beam scheme:
/// lhs = 4k^2 EI/(rho h^4) + k^2 T/(rho h^2), stable iff lhs <= 1.
StabilityReport beam_stability(double ei, double rho, double tension, double h, double k);

/// Non-closed-form CFL-style check k*c_max <= h for wave-like systems where
/// no dedicated predicate exists. Always flagged advisory.
StabilityReport wave_speed_heuristic(double max_wave_speed, double h, double k);

/// Folds one time level into the verdict. Once diverged, the verdict is
/// returned unchanged.
DivergenceVerdict monitor_step(std::span<const double> field_slice, double threshold,
                               std::size_t step_index, const DivergenceVerdict& verdict);

}  // namespace flexsim
