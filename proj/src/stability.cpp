#include "flexsim/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flexsim/error.hpp"

namespace flexsim {
namespace {

void require_positive(const char* name, double value) {
  if (!(std::isfinite(value) && value > 0.0)) throw ValidationError(name, "must be > 0");
}

void require_non_negative(const char* name, double value) {
  if (!(std::isfinite(value) && value >= 0.0)) throw ValidationError(name, "must be >= 0");
}

// Decimal inputs such as h = 0.1 are not representable, so a left-hand side
// that is exactly on the threshold in real arithmetic can land a few ulps to
// either side. Such values count as equal to the threshold.
constexpr double kBoundaryUlps = 8.0;

bool on_threshold(double lhs, double threshold) {
  return std::abs(lhs - threshold) <= kBoundaryUlps * std::numeric_limits<double>::epsilon() * threshold;
}

}  // namespace

std::string_view to_string(DivergenceReason reason) {
  switch (reason) {
    case DivergenceReason::None: return "none";
    case DivergenceReason::ThresholdExceeded: return "threshold_exceeded";
    case DivergenceReason::NonFiniteValue: return "non_finite_value";
  }
  return "unknown";
}

StabilityReport heat_stability(double alpha, double h, double k) {
  require_positive("alpha", alpha);
  require_positive("h", h);
  require_positive("k", k);
  StabilityReport report;
  report.criterion_name = "heat_explicit";
  report.lhs_value = alpha * k / (h * h);
  report.threshold = 0.5;
  report.predicted_stable =
      report.lhs_value < report.threshold && !on_threshold(report.lhs_value, report.threshold);
  report.margin = report.threshold - report.lhs_value;
  return report;
}

StabilityReport beam_stability(double ei, double rho, double tension, double h, double k) {
  require_non_negative("ei", ei);
  require_positive("rho", rho);
  require_non_negative("tension", tension);
  require_positive("h", h);
  require_positive("k", k);
  const double k2 = k * k;
  const double h2 = h * h;
  StabilityReport report;
  report.criterion_name = "beam_explicit";
  report.lhs_value = 4.0 * k2 * ei / (rho * h2 * h2) + k2 * tension / (rho * h2);
  report.threshold = 1.0;
  report.predicted_stable =
      report.lhs_value <= report.threshold || on_threshold(report.lhs_value, report.threshold);
  report.margin = report.threshold - report.lhs_value;
  return report;
}

StabilityReport wave_speed_heuristic(double max_wave_speed, double h, double k) {
  require_non_negative("max_wave_speed", max_wave_speed);
  require_positive("h", h);
  require_positive("k", k);
  StabilityReport report;
  report.criterion_name = "wave_speed_heuristic (non-paper)";
  report.lhs_value = k * max_wave_speed / h;
  report.threshold = 1.0;
  report.predicted_stable = report.lhs_value <= report.threshold;
  report.margin = report.threshold - report.lhs_value;
  report.advisory = true;
  return report;
}

DivergenceVerdict monitor_step(std::span<const double> field_slice, double threshold,
                               std::size_t step_index, const DivergenceVerdict& verdict) {
  if (verdict.diverged) return verdict;
  DivergenceVerdict next = verdict;
  double level_peak = 0.0;
  bool non_finite = false;
  for (double v : field_slice) {
    if (!std::isfinite(v)) {
      non_finite = true;
      continue;
    }
    level_peak = std::max(level_peak, std::abs(v));
  }
  next.peak_magnitude = std::max(next.peak_magnitude, level_peak);
  if (non_finite) {
    next.diverged = true;
    next.reason = DivergenceReason::NonFiniteValue;
    next.first_bad_step = step_index;
    next.peak_magnitude = std::numeric_limits<double>::infinity();
  } else if (level_peak > threshold) {
    next.diverged = true;
    next.reason = DivergenceReason::ThresholdExceeded;
    next.first_bad_step = step_index;
  }
  return next;
}

}  // namespace flexsim
