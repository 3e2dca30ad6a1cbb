#include "flexsim/catalog.hpp"

#include <array>

namespace flexsim {

namespace {

struct ParamRule {
  std::string_view name;
  std::string_view type;
  std::string_view constraint;
  std::string_view description;
};

std::span<const ParamRule> param_rules(ModelKind kind) {
  static constexpr std::array heat{
      ParamRule{"alpha", "real", "> 0", "diffusivity"},
      ParamRule{"initial_mode", "integer", ">= 1", "sine mode of the initial profile"},
      ParamRule{"initial_amplitude", "real", "finite", "amplitude of the initial profile"},
  };
  static constexpr std::array eb{
      ParamRule{"rho", "real", "> 0", "mass per unit length"},
      ParamRule{"ei", "real", ">= 0", "bending stiffness EI"},
      ParamRule{"tension", "real", ">= 0", "axial tension T"},
      ParamRule{"damping", "real", ">= 0", "viscous damping c"},
      ParamRule{"initial_mode", "integer", ">= 1", "sine mode of the initial profile"},
      ParamRule{"initial_amplitude", "real", "finite", "amplitude of the initial profile"},
  };
  static constexpr std::array timoshenko{
      ParamRule{"rho", "real", "> 0", "mass per unit length"},
      ParamRule{"i_rho", "real", "> 0", "rotary inertia I_rho"},
      ParamRule{"ei", "real", "> 0", "bending stiffness EI"},
      ParamRule{"shear_k", "real", "> 0", "shear stiffness K = kGA"},
      ParamRule{"payload_mass", "real", "> 0", "tip mass M"},
      ParamRule{"payload_inertia", "real", "> 0", "tip inertia J"},
  };
  static constexpr std::array string{
      ParamRule{"payload_mass", "real", "> 0", "tip mass M"},
      ParamRule{"tension_scale", "real", "T0(x) > 0 on [0, L]", "a in T0(x) = a (x + b)"},
      ParamRule{"tension_offset", "real", "finite", "b in T0(x) = a (x + b)"},
      ParamRule{"lambda_coeff", "real", ">= 0", "c in lambda(x) = c x"},
      ParamRule{"rho", "real", "rho(x) > 0 on [0, L]", "density at x = 0"},
      ParamRule{"rho_slope", "real", "finite", "density slope in rho(x) = rho + rho_slope x"},
  };
  switch (kind) {
    case ModelKind::Heat: return heat;
    case ModelKind::EBBeam: return eb;
    case ModelKind::Timoshenko: return timoshenko;
    case ModelKind::String: return string;
  }
  return {};
}

ModelSpec default_params(ModelKind kind) {
  switch (kind) {
    case ModelKind::Heat: return HeatParams{};
    case ModelKind::EBBeam: return EBBeamParams{};
    case ModelKind::Timoshenko: return TimoshenkoParams{};
    case ModelKind::String: return StringParams{};
  }
  return TimoshenkoParams{};
}

std::string_view title(ModelKind kind) {
  switch (kind) {
    case ModelKind::Heat: return "Heat equation";
    case ModelKind::EBBeam: return "Euler-Bernoulli beam";
    case ModelKind::Timoshenko: return "Timoshenko beam with tip payload";
    case ModelKind::String: return "Non-uniform string with tip payload";
  }
  return "";
}

Json controller_entry(ControllerKind kind) {
  Json entry;
  entry["kind"] = std::string(to_string(kind));
  const ControllerSpec defaults;
  if (kind == ControllerKind::PD) {
    entry["gains"] = Json::array({
        {{"name", "k1"}, {"key", "controller.pd_gains.k1"}, {"default", defaults.pd.k1}},
        {{"name", "k2"}, {"key", "controller.pd_gains.k2"}, {"default", defaults.pd.k2}},
        {{"name", "k3"}, {"key", "controller.pd_gains.k3"}, {"default", defaults.pd.k3}},
        {{"name", "k4"}, {"key", "controller.pd_gains.k4"}, {"default", defaults.pd.k4}},
    });
  } else if (kind == ControllerKind::ExactModel) {
    entry["gains"] = Json::array({
        {{"name", "k1"}, {"key", "controller.em_gains.k1"}, {"default", defaults.exact_model.k1}},
        {{"name", "k2"}, {"key", "controller.em_gains.k2"}, {"default", defaults.exact_model.k2}},
        {{"name", "disturbance_bound"},
         {"key", "controller.disturbance_bound"},
         {"default", defaults.disturbance_bound}},
    });
  } else {
    entry["gains"] = Json::array();
  }
  return entry;
}

}  // namespace

std::string_view default_fixture_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Heat: return "heat_analytic.json";
    case ModelKind::EBBeam: return "eb_beam_default.json";
    case ModelKind::Timoshenko: return "timoshenko_pd_stable.json";
    case ModelKind::String: return "string_exact_model.json";
  }
  return "";
}

Json model_catalog(const std::filesystem::path& fixture_dir) {
  Json models = Json::array();
  for (auto kind : {ModelKind::Heat, ModelKind::EBBeam, ModelKind::Timoshenko, ModelKind::String}) {
    Json entry;
    entry["kind"] = std::string(to_string(kind));
    entry["title"] = std::string(title(kind));
    entry["fields"] = kind == ModelKind::Timoshenko ? Json::array({"w", "phi"}) : Json::array({"w"});

    Scenario probe;
    probe.model = default_params(kind);
    const Json defaults = scenario_to_json(probe)["model"]["params"];
    Json params = Json::array();
    for (const auto& rule : param_rules(kind)) {
      params.push_back({{"name", std::string(rule.name)},
                        {"key", "model.params." + std::string(rule.name)},
                        {"type", std::string(rule.type)},
                        {"default", defaults.at(std::string(rule.name))},
                        {"constraint", std::string(rule.constraint)},
                        {"description", std::string(rule.description)}});
    }
    entry["params"] = params;

    Json controllers = Json::array();
    for (auto c : {ControllerKind::None, ControllerKind::PD, ControllerKind::ExactModel})
      if (controller_compatible(kind, c)) controllers.push_back(controller_entry(c));
    entry["controllers"] = controllers;

    Json disturbances = Json::array();
    for (auto d : {DisturbanceKind::TimoshenkoTip, DisturbanceKind::TimoshenkoDistributed,
                   DisturbanceKind::StringTip, DisturbanceKind::StringDistributed})
      if (disturbance_compatible(kind, d)) disturbances.push_back(std::string(to_string(d)));
    entry["disturbances"] = disturbances;

    entry["stability_check"] = kind == ModelKind::Heat     ? "heat_explicit"
                               : kind == ModelKind::EBBeam ? "beam_explicit"
                                                           : "wave_speed_heuristic (non-paper)";

    const auto fixture = fixture_dir / default_fixture_name(kind);
    entry["default_fixture"] = std::string(default_fixture_name(kind));
    try {
      entry["default_scenario"] = scenario_to_json(load_scenario(fixture));
    } catch (const ScenarioError&) {
      entry["default_scenario"] = nullptr;
    }
    models.push_back(entry);
  }

  Json catalog;
  catalog["models"] = models;
  catalog["absent"] = Json::array(
      {{{"kind", "exponential_beam"},
        {"reason", "named as a supported system but no governing equations are available"}}});
  return catalog;
}

}  // namespace flexsim
