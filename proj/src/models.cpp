#include "flexsim/models.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "flexsim/stencils.hpp"

namespace flexsim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kPi = std::numbers::pi;

bool positive(double v) { return std::isfinite(v) && v > 0.0; }
bool non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

void check_positive(Issues& issues, const char* name, double v) {
  if (!positive(v)) issues.push_back({name, "must be > 0"});
}
void check_non_negative(Issues& issues, const char* name, double v) {
  if (!non_negative(v)) issues.push_back({name, "must be >= 0"});
}
void check_mode(Issues& issues, int mode) {
  if (mode < 1) issues.push_back({"initial_mode", "must be >= 1"});
}
void check_finite(Issues& issues, const char* name, double v) {
  if (!std::isfinite(v)) issues.push_back({name, "must be finite"});
}

double sine_profile(double amplitude, int mode, double x, double length) {
  return amplitude * std::sin(static_cast<double>(mode) * kPi * x / length);
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Heat: return "heat";
    case ModelKind::EBBeam: return "eb_beam";
    case ModelKind::Timoshenko: return "timoshenko";
    case ModelKind::String: return "string";
  }
  return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
  for (auto kind : {ModelKind::Heat, ModelKind::EBBeam, ModelKind::Timoshenko, ModelKind::String})
    if (to_string(kind) == name) return kind;
  return std::nullopt;
}

ModelKind kind_of(const ModelSpec& model) {
  return std::visit(overloaded{
                        [](const HeatParams&) { return ModelKind::Heat; },
                        [](const EBBeamParams&) { return ModelKind::EBBeam; },
                        [](const TimoshenkoParams&) { return ModelKind::Timoshenko; },
                        [](const StringParams&) { return ModelKind::String; },
                    },
                    model);
}

Issues validate(const ModelSpec& model, double length) {
  Issues issues;
  std::visit(overloaded{
                 [&](const HeatParams& p) {
                   check_positive(issues, "alpha", p.alpha);
                   check_mode(issues, p.initial_mode);
                   check_finite(issues, "initial_amplitude", p.initial_amplitude);
                 },
                 [&](const EBBeamParams& p) {
                   check_positive(issues, "rho", p.rho);
                   check_non_negative(issues, "ei", p.ei);
                   check_non_negative(issues, "tension", p.tension);
                   check_non_negative(issues, "damping", p.damping);
                   check_mode(issues, p.initial_mode);
                   check_finite(issues, "initial_amplitude", p.initial_amplitude);
                 },
                 [&](const TimoshenkoParams& p) {
                   check_positive(issues, "rho", p.rho);
                   check_positive(issues, "i_rho", p.i_rho);
                   check_positive(issues, "ei", p.ei);
                   check_positive(issues, "shear_k", p.shear_k);
                   check_positive(issues, "payload_mass", p.payload_mass);
                   check_positive(issues, "payload_inertia", p.payload_inertia);
                 },
                 [&](const StringParams& p) {
                   check_positive(issues, "payload_mass", p.payload_mass);
                   check_finite(issues, "tension_scale", p.tension_scale);
                   check_finite(issues, "tension_offset", p.tension_offset);
                   check_non_negative(issues, "lambda_coeff", p.lambda_coeff);
                   check_finite(issues, "rho", p.rho);
                   check_finite(issues, "rho_slope", p.rho_slope);
                   // Both profiles are affine, so positivity at the two ends
                   // covers the whole interval.
                   if (!(p.base_tension(0.0) > 0.0 && p.base_tension(length) > 0.0))
                     issues.push_back({"tension_scale", "base tension T0(x) must be > 0 on [0, L]"});
                   if (!(p.density(0.0) > 0.0 && p.density(length) > 0.0))
                     issues.push_back({"rho", "density rho(x) must be > 0 on [0, L]"});
                 },
             },
             model);
  return issues;
}

double string_tension(const StringParams& params, double x, double wx) {
  return params.base_tension(x) + params.lambda(x) * wx * wx;
}

// ---------------------------------------------------------------------------

std::string_view to_string(DisturbanceKind kind) {
  switch (kind) {
    case DisturbanceKind::None: return "none";
    case DisturbanceKind::TimoshenkoTip: return "timoshenko_tip";
    case DisturbanceKind::TimoshenkoDistributed: return "timoshenko_distributed";
    case DisturbanceKind::StringTip: return "string_tip";
    case DisturbanceKind::StringDistributed: return "string_distributed";
  }
  return "unknown";
}

std::optional<DisturbanceKind> parse_disturbance_kind(std::string_view name) {
  for (auto kind : {DisturbanceKind::None, DisturbanceKind::TimoshenkoTip,
                    DisturbanceKind::TimoshenkoDistributed, DisturbanceKind::StringTip,
                    DisturbanceKind::StringDistributed})
    if (to_string(kind) == name) return kind;
  return std::nullopt;
}

bool is_distributed(DisturbanceKind kind) {
  return kind == DisturbanceKind::TimoshenkoDistributed ||
         kind == DisturbanceKind::StringDistributed;
}

bool disturbance_compatible(ModelKind model, DisturbanceKind kind) {
  switch (kind) {
    case DisturbanceKind::None: return true;
    case DisturbanceKind::TimoshenkoTip: return model == ModelKind::Timoshenko;
    case DisturbanceKind::StringTip: return model == ModelKind::String;
    case DisturbanceKind::TimoshenkoDistributed:
      return model == ModelKind::Timoshenko || model == ModelKind::EBBeam;
    case DisturbanceKind::StringDistributed:
      return model == ModelKind::String || model == ModelKind::EBBeam;
  }
  return false;
}

DisturbanceValue eval_disturbance(const DisturbanceSpec& spec, double x, double t, double length) {
  if (!spec.enabled) return {};
  switch (spec.kind) {
    case DisturbanceKind::None: return {};
    case DisturbanceKind::TimoshenkoTip: {
      const double a = kPi * x * t;
      const double waves = std::sin(a) + std::sin(2.0 * a) + std::sin(3.0 * a);
      return {1.0 + waves, waves};
    }
    case DisturbanceKind::TimoshenkoDistributed: {
      const double a = kPi * x * t;
      return {(x / (1000.0 * length)) *
              (1.0 + std::sin(0.1 * a) + std::sin(0.2 * a) + std::sin(0.3 * a))};
    }
    case DisturbanceKind::StringTip:
      return {1.0 + 0.2 * std::sin(0.2 * t) + 0.3 * std::sin(0.3 * t) + 0.5 * std::sin(0.5 * t)};
    case DisturbanceKind::StringDistributed: {
      const double a = kPi * x * t;
      return {x * (3.0 + std::sin(a) + std::sin(2.0 * a) + std::sin(3.0 * a))};
    }
  }
  return {};
}

bool DisturbanceSet::active(DisturbanceKind kind) const noexcept {
  for (const auto& s : specs_)
    if (s.kind == kind && s.enabled) return true;
  return false;
}

DisturbanceValue DisturbanceSet::eval(DisturbanceKind kind, double x, double t,
                                      double length) const {
  DisturbanceValue total;
  for (const auto& s : specs_) {
    if (s.kind != kind || !s.enabled) continue;
    const auto v = eval_disturbance(s, x, t, length);
    total.primary += v.primary;
    total.secondary += v.secondary;
  }
  return total;
}

double DisturbanceSet::distributed(double x, double t, double length) const {
  double total = 0.0;
  for (const auto& s : specs_)
    if (s.enabled && is_distributed(s.kind)) total += eval_disturbance(s, x, t, length).primary;
  return total;
}

// ---------------------------------------------------------------------------

Grid::Grid(std::size_t n_nodes, std::size_t n_levels, std::size_t capacity)
    : n_nodes_(n_nodes),
      n_levels_(n_levels),
      capacity_(std::min(capacity, n_levels)),
      data_(n_nodes * std::min(capacity, n_levels), 0.0) {
  if (capacity_ == 0) throw std::invalid_argument("grid capacity must be >= 1");
}

double Grid::at(std::size_t node, std::size_t level) const {
  if (node >= n_nodes_ || level >= n_levels_)
    throw std::out_of_range("grid index (" + std::to_string(node) + ", " + std::to_string(level) +
                            ") out of range");
  return row(level)[node];
}

std::size_t history_bytes(ModelKind kind, const Mesh& mesh, Storage storage) {
  const std::size_t levels =
      storage == Storage::Full ? mesh.n_levels() : std::min(kRollingLevels, mesh.n_levels());
  const std::size_t fields = kind == ModelKind::Timoshenko ? 2 : 1;
  return fields * levels * mesh.n_nodes() * sizeof(double);
}

FieldHistory allocate_history(ModelKind kind, const Mesh& mesh, Storage storage) {
  const std::size_t capacity = storage == Storage::Full ? mesh.n_levels() : kRollingLevels;
  FieldHistory history{Grid(mesh.n_nodes(), mesh.n_levels(), capacity), std::nullopt};
  if (kind == ModelKind::Timoshenko) history.phi = Grid(mesh.n_nodes(), mesh.n_levels(), capacity);
  return history;
}

// ---------------------------------------------------------------------------

void apply_initial_conditions(const ModelSpec& model, const Mesh& mesh, FieldHistory& history) {
  const std::size_t n = mesh.n_space();
  const double length = mesh.length();
  auto w0 = history.w.row(0);
  auto w1 = history.w.row(1);

  std::visit(overloaded{
                 [&](const HeatParams& p) {
                   for (std::size_t i = 0; i <= n; ++i)
                     w0[i] = sine_profile(p.initial_amplitude, p.initial_mode, mesh.x(i), length);
                   w0[0] = 0.0;
                   w0[n] = 0.0;
                   w1[0] = 0.0;
                   w1[n] = 0.0;
                   const double r = p.alpha * mesh.k() / (mesh.h() * mesh.h());
                   heat_interior_step(r, history, 0);
                 },
                 [&](const EBBeamParams& p) {
                   for (std::size_t i = 0; i <= n; ++i)
                     w0[i] = w1[i] =
                         sine_profile(p.initial_amplitude, p.initial_mode, mesh.x(i), length);
                   w0[0] = w1[0] = 0.0;
                   w0[n] = w1[n] = 0.0;
                 },
                 [&](const TimoshenkoParams&) {
                   if (!history.phi) throw std::invalid_argument("timoshenko history needs phi");
                   auto p0 = history.phi->row(0);
                   auto p1 = history.phi->row(1);
                   for (std::size_t i = 0; i <= n; ++i) {
                     w0[i] = w1[i] = mesh.x(i) / 2.0;
                     p0[i] = p1[i] = kPi / 6.0;
                   }
                 },
                 [&](const StringParams&) {
                   for (std::size_t i = 0; i <= n; ++i) w0[i] = w1[i] = mesh.x(i);
                 },
             },
             model);
}

void fixed_end_condition(const ModelSpec& model, FieldHistory& history, std::size_t j) {
  auto w = history.w.row(j);
  w[0] = 0.0;
  if (history.phi) history.phi->row(j)[0] = 0.0;
  const auto kind = kind_of(model);
  if (kind == ModelKind::Heat || kind == ModelKind::EBBeam) w[w.size() - 1] = 0.0;
}

void heat_interior_step(double r, FieldHistory& history, std::size_t j) {
  const auto cur = history.w.row(j);
  auto next = history.w.row(j + 1);
  const std::size_t n = cur.size() - 1;
  for (std::size_t i = 1; i < n; ++i)
    next[i] = r * cur[i + 1] + (1.0 - 2.0 * r) * cur[i] + r * cur[i - 1];
}

void eb_beam_interior_step(const EBBeamParams& params, const Mesh& mesh,
                           const DisturbanceSet& disturbances, FieldHistory& history,
                           std::size_t j) {
  const auto w1 = history.w.row(j - 1);
  const auto w2 = history.w.row(j - 2);
  auto out = history.w.row(j);
  const std::size_t n = mesh.n_space();
  const double h = mesh.h();
  const double k = mesh.k();
  const double k2 = k * k;
  const double tension_coef = k2 * params.tension / (params.rho * h * h);
  const double bending_coef = k2 * params.ei / (params.rho * h * h * h * h);
  const double damping_coef = k * params.damping / params.rho;
  const double load_coef = k2 / params.rho;
  const double t_prev = mesh.t(j - 1);

  for (std::size_t i = 1; i < n; ++i) {
    const double u_m2 = (i >= 2) ? w1[i - 2] : -w1[1];
    const double u_p2 = (i + 2 <= n) ? w1[i + 2] : 2.0 * w1[n] - w1[n - 1];
    const double bending = diff::central4(u_m2, w1[i - 1], w1[i], w1[i + 1], u_p2);
    out[i] = 2.0 * w1[i] - w2[i] + tension_coef * diff::central2(w1, i) - bending_coef * bending -
             damping_coef * (w1[i] - w2[i]) +
             load_coef * disturbances.distributed(mesh.x(i), t_prev, mesh.length());
  }
}

void timoshenko_interior_step(const TimoshenkoParams& params, const Mesh& mesh,
                              const DisturbanceSet& disturbances, FieldHistory& history,
                              std::size_t j) {
  const auto w1 = history.w.row(j - 1);
  const auto w2 = history.w.row(j - 2);
  const auto p1 = history.phi->row(j - 1);
  const auto p2 = history.phi->row(j - 2);
  auto w_out = history.w.row(j);
  auto p_out = history.phi->row(j);
  const std::size_t n = mesh.n_space();
  const double h = mesh.h();
  const double k2 = mesh.k() * mesh.k();
  const double t = mesh.t(j);

  const double w_shear_rot = k2 * params.shear_k / (params.rho * h);
  const double w_shear_disp = k2 * params.shear_k / (params.rho * h * h);
  const double w_load = k2 / params.rho;
  const double p_bending = k2 * params.ei / (params.i_rho * h * h);
  const double p_shear_rot = k2 * params.shear_k / params.i_rho;
  const double p_shear_disp = k2 * params.shear_k / (params.i_rho * h);

  for (std::size_t i = 1; i < n; ++i) {
    const double f = disturbances.eval(DisturbanceKind::TimoshenkoDistributed, mesh.x(i), t,
                                       mesh.length())
                         .primary;
    w_out[i] = 2.0 * w1[i] - w2[i] - w_shear_rot * diff::backward(p1, i) +
               w_shear_disp * diff::central2(w1, i) + w_load * f;
    p_out[i] = 2.0 * p1[i] - p2[i] + p_bending * diff::central2(p1, i) - p_shear_rot * p1[i] +
               p_shear_disp * diff::backward(w1, i);
  }
}

void string_interior_step(const StringParams& params, const Mesh& mesh,
                          const DisturbanceSet& disturbances, FieldHistory& history,
                          std::size_t j) {
  const auto w1 = history.w.row(j - 1);
  const auto w2 = history.w.row(j - 2);
  auto out = history.w.row(j);
  const std::size_t n = mesh.n_space();
  const double h = mesh.h();
  const double h2 = h * h;
  const double k2 = mesh.k() * mesh.k();
  const double t = mesh.t(j);
  const double tension_slope = params.base_tension_slope();
  const double lambda_slope = params.lambda_slope();

  for (std::size_t i = 1; i < n; ++i) {
    const double x = mesh.x(i);
    const double rho = params.density(x);
    const double bd = diff::backward(w1, i);
    const double c2 = diff::central2(w1, i);
    const double tension = string_tension(params, x, bd / h);
    const double f = disturbances.eval(DisturbanceKind::StringDistributed, x, t, mesh.length())
                         .primary;
    out[i] = 2.0 * w1[i] - w2[i] + k2 * tension / (rho * h2) * c2 +
             k2 * tension_slope / (rho * h) * bd + k2 * lambda_slope / (rho * h2 * h) * bd * bd * bd +
             3.0 * k2 * params.lambda(x) / (rho * h2 * h2) * bd * bd * c2 + k2 / rho * f;
  }
}

void interior_step(const ModelSpec& model, const Mesh& mesh, const DisturbanceSet& disturbances,
                   FieldHistory& history, std::size_t j) {
  std::visit(overloaded{
                 [&](const HeatParams& p) {
                   heat_interior_step(p.alpha * mesh.k() / (mesh.h() * mesh.h()), history, j - 1);
                 },
                 [&](const EBBeamParams& p) {
                   eb_beam_interior_step(p, mesh, disturbances, history, j);
                 },
                 [&](const TimoshenkoParams& p) {
                   timoshenko_interior_step(p, mesh, disturbances, history, j);
                 },
                 [&](const StringParams& p) {
                   string_interior_step(p, mesh, disturbances, history, j);
                 },
             },
             model);
}

}  // namespace flexsim
