#include "flexsim/control.hpp"

#include <cmath>
#include <stdexcept>
#include <variant>

namespace flexsim {

std::string_view to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::None: return "none";
    case ControllerKind::PD: return "pd";
    case ControllerKind::ExactModel: return "exact_model";
  }
  return "unknown";
}

std::optional<ControllerKind> parse_controller_kind(std::string_view name) {
  for (auto kind : {ControllerKind::None, ControllerKind::PD, ControllerKind::ExactModel})
    if (to_string(kind) == name) return kind;
  return std::nullopt;
}

Issues validate(const ControllerSpec& controller) {
  Issues issues;
  auto gain = [&](const char* path, double v) {
    if (!(std::isfinite(v) && v >= 0.0)) issues.push_back({path, "gain must be >= 0"});
  };
  gain("pd_gains.k1", controller.pd.k1);
  gain("pd_gains.k2", controller.pd.k2);
  gain("pd_gains.k3", controller.pd.k3);
  gain("pd_gains.k4", controller.pd.k4);
  gain("em_gains.k1", controller.exact_model.k1);
  gain("em_gains.k2", controller.exact_model.k2);
  if (!(std::isfinite(controller.disturbance_bound) && controller.disturbance_bound >= 0.0))
    issues.push_back({"disturbance_bound", "must be >= 0"});
  return issues;
}

bool controller_compatible(ModelKind model, ControllerKind controller) {
  switch (controller) {
    case ControllerKind::None: return true;
    case ControllerKind::PD: return model == ModelKind::Timoshenko;
    case ControllerKind::ExactModel: return model == ModelKind::String;
  }
  return false;
}

double signum(double v) noexcept { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

namespace {

struct TimoshenkoTip {
  double w;
  double phi;
};

// Payload balance with u = tau = 0:
//   w(N,j)   = 2w - w' + k^2 K/M phi(N) + k^2/M d - k^2 K/(M h) [w(N) - w(N-1)]
//   phi(N,j) = 2phi - phi' - k^2 EI/(J h) [phi(N) - phi(N-1)] + k^2/J theta
TimoshenkoTip timoshenko_uncontrolled(const TimoshenkoParams& p, const Mesh& mesh,
                                      const DisturbanceSet& disturbances,
                                      const FieldHistory& history, std::size_t j) {
  const auto w1 = history.w.row(j - 1);
  const auto w2 = history.w.row(j - 2);
  const auto p1 = history.phi->row(j - 1);
  const auto p2 = history.phi->row(j - 2);
  const std::size_t n = mesh.n_space();
  const double h = mesh.h();
  const double k2 = mesh.k() * mesh.k();
  const auto dist =
      disturbances.eval(DisturbanceKind::TimoshenkoTip, mesh.length(), mesh.t(j), mesh.length());
  const double m = p.payload_mass;
  const double jj = p.payload_inertia;

  TimoshenkoTip tip{};
  tip.w = 2.0 * w1[n] - w2[n] + k2 * p.shear_k / m * p1[n] + k2 / m * dist.primary -
          k2 * p.shear_k / (m * h) * (w1[n] - w1[n - 1]);
  tip.phi = 2.0 * p1[n] - p2[n] - k2 * p.ei / (jj * h) * (p1[n] - p1[n - 1]) +
            k2 / jj * dist.secondary;
  return tip;
}

// Payload balance with u = 0:
//   w(N,j) = 2w - w' - k^2 T(N)/(M h) [dw] - k^2 lambda(L)/(M h^3) [dw]^3 + k^2/M d
double string_uncontrolled(const StringParams& p, const Mesh& mesh,
                           const DisturbanceSet& disturbances, const FieldHistory& history,
                           std::size_t j) {
  const auto w1 = history.w.row(j - 1);
  const auto w2 = history.w.row(j - 2);
  const std::size_t n = mesh.n_space();
  const double h = mesh.h();
  const double k2 = mesh.k() * mesh.k();
  const double length = mesh.length();
  const double m = p.payload_mass;
  const double dw = w1[n] - w1[n - 1];
  const double tension = string_tension(p, length, dw / h);
  const double d = disturbances.eval(DisturbanceKind::StringTip, length, mesh.t(j), length).primary;
  return 2.0 * w1[n] - w2[n] - k2 * tension / (m * h) * dw -
         k2 * p.lambda(length) / (m * h * h * h) * dw * dw * dw + k2 / m * d;
}

}  // namespace

void tip_update_no_control(const ModelSpec& model, const Mesh& mesh,
                           const DisturbanceSet& disturbances, FieldHistory& history,
                           std::size_t j) {
  const std::size_t n = mesh.n_space();
  if (const auto* p = std::get_if<TimoshenkoParams>(&model)) {
    const auto tip = timoshenko_uncontrolled(*p, mesh, disturbances, history, j);
    history.w.row(j)[n] = tip.w;
    history.phi->row(j)[n] = tip.phi;
  } else if (const auto* s = std::get_if<StringParams>(&model)) {
    history.w.row(j)[n] = string_uncontrolled(*s, mesh, disturbances, history, j);
  }
}

void tip_update_pd(const TimoshenkoParams& params, const PdGains& gains, const Mesh& mesh,
                   const DisturbanceSet& disturbances, FieldHistory& history, std::size_t j) {
  const auto w1 = history.w.row(j - 1);
  const auto w2 = history.w.row(j - 2);
  const auto p1 = history.phi->row(j - 1);
  const auto p2 = history.phi->row(j - 2);
  const std::size_t n = mesh.n_space();
  const double k = mesh.k();
  const double k2 = k * k;
  const double m = params.payload_mass;
  const double jj = params.payload_inertia;

  const auto tip = timoshenko_uncontrolled(params, mesh, disturbances, history, j);
  history.w.row(j)[n] =
      tip.w - k2 * gains.k1 / m * w1[n] - k * gains.k2 / m * (w1[n] - w2[n]);
  history.phi->row(j)[n] =
      tip.phi - k2 * gains.k3 / jj * p1[n] - k * gains.k4 / jj * (p1[n] - p2[n]);
}

ExactModelForce exact_model_force(const StringParams& params, const ExactModelGains& gains,
                                  double disturbance_bound, const Mesh& mesh,
                                  const FieldHistory& history, std::size_t j) {
  const auto w1 = history.w.row(j - 1);
  const auto w2 = history.w.row(j - 2);
  const std::size_t n = mesh.n_space();
  const double h = mesh.h();
  const double k = mesh.k();

  const double wx = (w1[n] - w1[n - 1]) / h;
  const double wx_prev = (w2[n] - w2[n - 1]) / h;
  const double wt = (w1[n] - w2[n]) / k;
  const double wxt = (wx - wx_prev) / k;

  ExactModelForce force;
  force.robust = -signum(wt + wx) * disturbance_bound;
  force.total = params.base_tension(mesh.length()) * wx - params.payload_mass * wxt -
                gains.k1 * wt - gains.k2 * wx + force.robust;
  return force;
}

void tip_update_exact_model(const StringParams& params, const ExactModelGains& gains,
                            double disturbance_bound, const Mesh& mesh,
                            const DisturbanceSet& disturbances, FieldHistory& history,
                            std::size_t j) {
  const double k2 = mesh.k() * mesh.k();
  const double base = string_uncontrolled(params, mesh, disturbances, history, j);
  const auto force = exact_model_force(params, gains, disturbance_bound, mesh, history, j);
  history.w.row(j)[mesh.n_space()] = base + k2 / params.payload_mass * force.total;
}

void apply_tip_update(const ModelSpec& model, const ControllerSpec& controller, const Mesh& mesh,
                      const DisturbanceSet& disturbances, FieldHistory& history, std::size_t j) {
  switch (controller.kind) {
    case ControllerKind::None:
      tip_update_no_control(model, mesh, disturbances, history, j);
      return;
    case ControllerKind::PD:
      if (const auto* p = std::get_if<TimoshenkoParams>(&model)) {
        tip_update_pd(*p, controller.pd, mesh, disturbances, history, j);
        return;
      }
      break;
    case ControllerKind::ExactModel:
      if (const auto* s = std::get_if<StringParams>(&model)) {
        tip_update_exact_model(*s, controller.exact_model, controller.disturbance_bound, mesh,
                               disturbances, history, j);
        return;
      }
      break;
  }
  throw std::invalid_argument(std::string("controller '") + std::string(to_string(controller.kind)) +
                              "' is not defined for model '" +
                              std::string(to_string(kind_of(model))) + "'");
}

}  // namespace flexsim
