#include "flexsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace flexsim {

namespace {

void prefix(Issues& out, const Issues& in, const std::string& path) {
  for (const auto& issue : in) out.push_back({path + "." + issue.path, issue.message});
}

double tip_magnitude(const SimulationResult& result) {
  return result.tip_w.empty() ? 0.0 : std::abs(result.tip_w.back());
}

}  // namespace

Issues validate(const Scenario& scenario) {
  Issues issues;
  prefix(issues, validate(scenario.mesh), "mesh");
  const double length = scenario.mesh.length > 0.0 ? scenario.mesh.length : 1.0;
  prefix(issues, validate(scenario.model, length), "model.params");
  prefix(issues, validate(scenario.controller), "controller");

  const auto model_kind = kind_of(scenario.model);
  if (!controller_compatible(model_kind, scenario.controller.kind))
    issues.push_back({"controller.kind", "controller '" +
                                             std::string(to_string(scenario.controller.kind)) +
                                             "' is not available for model '" +
                                             std::string(to_string(model_kind)) + "'"});
  for (std::size_t i = 0; i < scenario.disturbances.size(); ++i) {
    const auto kind = scenario.disturbances[i].kind;
    if (!disturbance_compatible(model_kind, kind))
      issues.push_back({"disturbances." + std::to_string(i) + ".kind",
                        "disturbance '" + std::string(to_string(kind)) +
                            "' is not available for model '" + std::string(to_string(model_kind)) +
                            "'"});
  }
  if (!(std::isfinite(scenario.divergence_threshold) && scenario.divergence_threshold > 0.0))
    issues.push_back({"divergence_threshold", "must be > 0"});
  return issues;
}

double max_wave_speed(const ModelSpec& model, double length) {
  if (const auto* p = std::get_if<TimoshenkoParams>(&model))
    return std::max(std::sqrt(p->shear_k / p->rho), std::sqrt(p->ei / p->i_rho));
  if (const auto* s = std::get_if<StringParams>(&model)) {
    // Affine T0 and rho: the ratio is extremal at an end point.
    const double at0 = s->base_tension(0.0) / s->density(0.0);
    const double atl = s->base_tension(length) / s->density(length);
    return std::sqrt(std::max(at0, atl));
  }
  if (const auto* b = std::get_if<EBBeamParams>(&model)) return std::sqrt(b->tension / b->rho);
  return 0.0;
}

StabilityReport a_priori_stability(const Scenario& scenario) {
  const Mesh mesh = build_mesh(scenario.mesh);
  if (const auto* p = std::get_if<HeatParams>(&scenario.model))
    return heat_stability(p->alpha, mesh.h(), mesh.k());
  if (const auto* b = std::get_if<EBBeamParams>(&scenario.model))
    return beam_stability(b->ei, b->rho, b->tension, mesh.h(), mesh.k());
  return wave_speed_heuristic(max_wave_speed(scenario.model, mesh.length()), mesh.h(), mesh.k());
}

SimulationResult run(const Scenario& scenario, const RunOptions& options) {
  if (auto issues = validate(scenario); !issues.empty()) throw ValidationError(std::move(issues));

  const auto started = std::chrono::steady_clock::now();
  const Mesh mesh = build_mesh(scenario.mesh);
  const auto model_kind = kind_of(scenario.model);
  const std::size_t bytes = history_bytes(model_kind, mesh, scenario.storage);
  if (bytes > options.memory_cap_bytes)
    throw MemoryCapExceeded("history needs " + std::to_string(bytes) + " bytes, cap is " +
                            std::to_string(options.memory_cap_bytes) +
                            "; use rolling storage or a coarser mesh");

  SimulationResult result{scenario, mesh, allocate_history(model_kind, mesh, scenario.storage),
                          {}, {}, std::nullopt, {}, {}, 0};
  result.a_priori = a_priori_stability(scenario);

  FieldHistory& history = result.history;
  const DisturbanceSet disturbances(scenario.disturbances);
  const std::size_t n = mesh.n_space();
  const std::size_t total = mesh.n_time();
  const bool has_phi = history.phi.has_value();

  apply_initial_conditions(scenario.model, mesh, history);
  result.tip_w.reserve(total + 1);
  for (std::size_t j = 0; j < 2; ++j) {
    result.tip_w.push_back(history.w.row(j)[n]);
    if (has_phi) result.tip_phi.push_back(history.phi->row(j)[n]);
  }

  const std::size_t report_every = std::max<std::size_t>(1, total / 100);
  DivergenceVerdict verdict;
  std::size_t j = 2;
  for (; j <= total; ++j) {
    if (options.interior_first) {
      interior_step(scenario.model, mesh, disturbances, history, j);
      apply_tip_update(scenario.model, scenario.controller, mesh, disturbances, history, j);
      fixed_end_condition(scenario.model, history, j);
    } else {
      fixed_end_condition(scenario.model, history, j);
      apply_tip_update(scenario.model, scenario.controller, mesh, disturbances, history, j);
      interior_step(scenario.model, mesh, disturbances, history, j);
    }

    verdict = monitor_step(history.w.row(j), scenario.divergence_threshold, j, verdict);
    if (has_phi)
      verdict = monitor_step(history.phi->row(j), scenario.divergence_threshold, j, verdict);

    result.tip_w.push_back(history.w.row(j)[n]);
    if (has_phi) result.tip_phi.push_back(history.phi->row(j)[n]);

    if (verdict.diverged) break;
    if (options.progress && j % report_every == 0) options.progress(j, total);
  }

  result.verdict = verdict;
  result.steps_completed = verdict.diverged ? *verdict.first_bad_step : total;
  if (options.progress) options.progress(result.steps_completed, total);
  result.wall_time = std::chrono::steady_clock::now() - started;
  return result;
}

double window_mean_abs(std::span<const double> series, std::size_t n_time, double fraction) {
  const auto first = static_cast<std::size_t>(std::ceil((1.0 - fraction) * static_cast<double>(n_time)));
  if (first >= series.size()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (std::size_t j = first; j < series.size(); ++j) sum += std::abs(series[j]);
  return sum / static_cast<double>(series.size() - first);
}

std::vector<std::string> gain_names(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::PD: return {"k1", "k2", "k3", "k4"};
    case ControllerKind::ExactModel: return {"k1", "k2", "disturbance_bound"};
    case ControllerKind::None: return {};
  }
  return {};
}

Scenario with_gain(const Scenario& base, std::string_view gain_name, double value) {
  Scenario s = base;
  auto& c = s.controller;
  if (c.kind == ControllerKind::PD) {
    if (gain_name == "k1") return c.pd.k1 = value, s;
    if (gain_name == "k2") return c.pd.k2 = value, s;
    if (gain_name == "k3") return c.pd.k3 = value, s;
    if (gain_name == "k4") return c.pd.k4 = value, s;
  } else if (c.kind == ControllerKind::ExactModel) {
    if (gain_name == "k1") return c.exact_model.k1 = value, s;
    if (gain_name == "k2") return c.exact_model.k2 = value, s;
    if (gain_name == "disturbance_bound") return c.disturbance_bound = value, s;
  }
  throw ValidationError("controller", "unknown gain '" + std::string(gain_name) +
                                          "' for controller '" +
                                          std::string(to_string(c.kind)) + "'");
}

std::vector<SweepEntry> gain_sweep(const Scenario& base, std::string_view gain_name,
                                   std::span<const double> values, std::size_t jobs,
                                   const RunOptions& options) {
  std::vector<Scenario> scenarios;
  scenarios.reserve(values.size());
  for (double v : values) scenarios.push_back(with_gain(base, gain_name, v));
  for (const auto& s : scenarios)
    if (auto issues = validate(s); !issues.empty()) throw ValidationError(std::move(issues));

  std::vector<SweepEntry> entries(values.size());
  std::vector<std::exception_ptr> errors(values.size());
  RunOptions quiet = options;
  quiet.progress = nullptr;

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      try {
        // Tip trajectory is all a sweep reports.
        Scenario s = scenarios[i];
        s.storage = Storage::Rolling;
        const auto result = run(s, quiet);
        entries[i] = {values[i], result.verdict, tip_magnitude(result),
                      window_mean_abs(result.tip_w, result.mesh.n_time()), result.steps_completed};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(1, values.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return entries;
}

}  // namespace flexsim
