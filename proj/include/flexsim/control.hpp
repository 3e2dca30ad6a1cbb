#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "flexsim/error.hpp"
#include "flexsim/mesh.hpp"
#include "flexsim/models.hpp"

namespace flexsim {

enum class ControllerKind { None, PD, ExactModel };

std::string_view to_string(ControllerKind kind);
std::optional<ControllerKind> parse_controller_kind(std::string_view name);

/// u = -k1 w(L) - k2 w_t(L),  tau = -k3 phi(L) - k4 phi_t(L).
struct PdGains {
  double k1{100.0};
  double k2{10.0};
  double k3{100.0};
  double k4{10.0};

  friend bool operator==(const PdGains&, const PdGains&) = default;
};

/// Gains of u = T0(L) w_x - M w_xt - k1 w_t - k2 w_x - sgn(w_t + w_x) dbar.
struct ExactModelGains {
  double k1{1.0};
  double k2{1.0};

  friend bool operator==(const ExactModelGains&, const ExactModelGains&) = default;
};

/// sup |d(t)| of the string tip disturbance, 1 + 0.2 + 0.3 + 0.5.
inline constexpr double kDefaultDisturbanceBound = 1.0 + 0.2 + 0.3 + 0.5;

struct ControllerSpec {
  ControllerKind kind{ControllerKind::None};
  PdGains pd;
  ExactModelGains exact_model;
  double disturbance_bound{kDefaultDisturbanceBound};

  friend bool operator==(const ControllerSpec&, const ControllerSpec&) = default;
};

/// Gain and bound constraints; paths are relative to the controller object.
Issues validate(const ControllerSpec& controller);
bool controller_compatible(ModelKind model, ControllerKind controller);

/// sgn with sgn(0) = 0.
double signum(double v) noexcept;

/// Uncontrolled tip update at level j from levels j-1, j-2. Writes node N of
/// every field for the Timoshenko beam and the string; the heat and
/// Euler-Bernoulli models keep their pinned tip and are left untouched.
void tip_update_no_control(const ModelSpec& model, const Mesh& mesh,
                           const DisturbanceSet& disturbances, FieldHistory& history,
                           std::size_t j);

/// Timoshenko tip under PD force and torque, both read from level j-1 with
/// backward time differences for the rates.
void tip_update_pd(const TimoshenkoParams& params, const PdGains& gains, const Mesh& mesh,
                   const DisturbanceSet& disturbances, FieldHistory& history, std::size_t j);

/// String tip under exact-model control.
void tip_update_exact_model(const StringParams& params, const ExactModelGains& gains,
                            double disturbance_bound, const Mesh& mesh,
                            const DisturbanceSet& disturbances, FieldHistory& history,
                            std::size_t j);

/// Exact-model control force evaluated on levels j-1, j-2 (exposed for tests).
struct ExactModelForce {
  double total{0.0};
  double robust{0.0};  ///< the -sgn(w_t + w_x) * dbar part
};
ExactModelForce exact_model_force(const StringParams& params, const ExactModelGains& gains,
                                  double disturbance_bound, const Mesh& mesh,
                                  const FieldHistory& history, std::size_t j);

/// Dispatches on the controller kind.
void apply_tip_update(const ModelSpec& model, const ControllerSpec& controller, const Mesh& mesh,
                      const DisturbanceSet& disturbances, FieldHistory& history, std::size_t j);

}  // namespace flexsim
