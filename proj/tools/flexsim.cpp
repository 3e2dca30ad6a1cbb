// Command-line front end: run, check, sweep, list-models, export.
//
// Exit status: 0 clean, 2 diverged or predicted unstable, 1 usage or
// validation error.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "flexsim/catalog.hpp"
#include "flexsim/engine.hpp"
#include "flexsim/io.hpp"

#ifndef FLEXSIM_FIXTURE_DIR
#define FLEXSIM_FIXTURE_DIR "fixtures"
#endif

namespace fs = std::filesystem;
using namespace flexsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitUnstable = 2;

std::string short_real(double v) {
  if (!std::isfinite(v)) return format_real(v);
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 6);
  return std::string(buf, ptr);
}

struct Options {
  std::string scenario;
  std::vector<std::string> overrides;
  std::string out;
  std::string format{"csv"};
  std::size_t jobs{0};
  std::optional<double> threshold;
  std::size_t stride{1};
  std::string gain;
  std::vector<double> values;
  std::string fixtures{FLEXSIM_FIXTURE_DIR};
  bool json{false};
};

Scenario load(const Options& opt) {
  Scenario s = load_scenario(opt.scenario);
  std::vector<std::string> overrides = opt.overrides;
  if (opt.threshold) overrides.push_back("divergence_threshold=" + format_real(*opt.threshold));
  return apply_overrides(s, overrides);
}

ExportFormats formats_of(const std::string& format) {
  if (format == "csv") return {true, false};
  if (format == "bin") return {false, true};
  return {true, true};
}

void print_report(const StabilityReport& r) {
  std::cout << "criterion=" << r.criterion_name << '\n'
            << "lhs=" << format_real(r.lhs_value) << '\n'
            << "threshold=" << format_real(r.threshold) << '\n'
            << "predicted=" << (r.predicted_stable ? "stable" : "unstable") << '\n'
            << "advisory=" << (r.advisory ? "true" : "false") << '\n';
}

int cmd_run(const Options& opt, bool require_out) {
  if (require_out && opt.out.empty()) throw CLI::ValidationError("--out", "export needs --out DIR");
  const Scenario scenario = load(opt);
  const SimulationResult result = run(scenario);

  const auto& v = result.verdict;
  std::cout << "label=" << scenario.label << '\n'
            << "model=" << to_string(kind_of(scenario.model)) << '\n'
            << "controller=" << to_string(scenario.controller.kind) << '\n'
            << "verdict=" << (v.diverged ? "diverged" : "stable") << '\n';
  if (v.diverged)
    std::cout << "first_bad_step=" << *v.first_bad_step << '\n'
              << "reason=" << to_string(v.reason) << '\n';
  std::cout << "steps_completed=" << result.steps_completed << '\n'
            << "peak=" << format_real(v.peak_magnitude) << '\n'
            << "tip_final=" << format_real(result.tip_w.back()) << '\n'
            << "tip_final_window_mean_abs="
            << format_real(window_mean_abs(result.tip_w, result.mesh.n_time())) << '\n'
            << "wall_time_s=" << short_real(result.wall_time.count()) << '\n';
  if (v.diverged)
    std::cout << "summary=diverged at step " << *v.first_bad_step << ", peak "
              << short_real(v.peak_magnitude) << '\n';
  else
    std::cout << "summary=stable, tip final magnitude " << short_real(std::abs(result.tip_w.back()))
              << '\n';

  if (!opt.out.empty()) {
    const auto bundle = export_result(result, opt.out, formats_of(opt.format), opt.stride);
    std::cout << "bundle=" << bundle.directory.string() << '\n';
  }
  return v.diverged ? kExitUnstable : kExitOk;
}

int cmd_check(const Options& opt) {
  const Scenario scenario = load(opt);
  const StabilityReport r = a_priori_stability(scenario);
  print_report(r);
  const char* verdict = r.predicted_stable ? "stable" : "unstable";
  switch (kind_of(scenario.model)) {
    case ModelKind::Heat:
      std::cout << "summary=r=" << short_real(r.lhs_value) << (r.predicted_stable ? " < " : " >= ")
                << short_real(r.threshold) << ": " << verdict << '\n';
      break;
    case ModelKind::EBBeam:
      std::cout << "summary=lhs=" << short_real(r.lhs_value) << (r.predicted_stable ? " <= " : " > ")
                << short_real(r.threshold) << ": " << verdict << '\n';
      break;
    default:
      std::cout << "summary=heuristic (non-paper): k*c/h=" << short_real(r.lhs_value)
                << (r.predicted_stable ? " <= " : " > ") << short_real(r.threshold) << ": "
                << verdict << '\n';
      break;
  }
  return r.predicted_stable ? kExitOk : kExitUnstable;
}

int cmd_sweep(const Options& opt) {
  const Scenario scenario = load(opt);
  const std::size_t jobs = opt.jobs ? opt.jobs : std::max(1u, std::thread::hardware_concurrency());
  const auto entries = gain_sweep(scenario, opt.gain, opt.values, jobs);
  for (const auto& e : entries) {
    std::cout << "gain=" << opt.gain << " value=" << format_real(e.value)
              << " verdict=" << (e.verdict.diverged ? "diverged" : "stable")
              << " steps_completed=" << e.steps_completed
              << " peak=" << format_real(e.verdict.peak_magnitude)
              << " tip_final=" << format_real(e.final_tip_magnitude)
              << " tip_window_mean_abs=" << format_real(e.tip_window_mean) << '\n';
  }
  return kExitOk;
}

int cmd_list_models(const Options& opt) {
  const Json catalog = model_catalog(opt.fixtures);
  if (opt.json) {
    std::cout << catalog.dump(2) << '\n';
    return kExitOk;
  }
  for (const auto& m : catalog["models"]) {
    std::string params, controllers;
    for (const auto& p : m["params"])
      params += (params.empty() ? "" : ",") + p["name"].get<std::string>() + ":" +
                format_real(p["default"].get<double>());
    for (const auto& c : m["controllers"]) {
      controllers += (controllers.empty() ? "" : ",") + c["kind"].get<std::string>();
      std::string gains;
      for (const auto& g : c["gains"])
        gains += (gains.empty() ? "" : ";") + g["name"].get<std::string>() + ":" +
                 format_real(g["default"].get<double>());
      if (!gains.empty()) controllers += "[" + gains + "]";
    }
    std::cout << "model=" << m["kind"].get<std::string>() << " params=" << params
              << " controllers=" << controllers << '\n';
  }
  for (const auto& a : catalog["absent"])
    std::cout << "absent=" << a["kind"].get<std::string>() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explicit finite-difference simulator for flexible systems"};
  app.require_subcommand(1);
  Options opt;

  auto add_scenario = [&](CLI::App* sub) {
    sub->add_option("--scenario", opt.scenario, "scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--set", opt.overrides, "override KEY=VALUE (repeatable)")->allow_extra_args(false);
    sub->add_option("--threshold", opt.threshold, "divergence threshold");
  };
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--out", opt.out, "bundle directory");
    sub->add_option("--format", opt.format, "grid format")
        ->check(CLI::IsMember({"csv", "bin", "both"}));
    sub->add_option("--stride", opt.stride, "time stride of exported grids")
        ->check(CLI::PositiveNumber);
  };

  auto* run_cmd = app.add_subcommand("run", "run a scenario and print the verdict");
  add_scenario(run_cmd);
  add_output(run_cmd);
  auto* export_cmd = app.add_subcommand("export", "run a scenario and write a result bundle");
  add_scenario(export_cmd);
  add_output(export_cmd);
  auto* check_cmd = app.add_subcommand("check", "evaluate the a-priori stability predicate");
  add_scenario(check_cmd);
  auto* sweep_cmd = app.add_subcommand("sweep", "run one scenario over a list of gain values");
  add_scenario(sweep_cmd);
  sweep_cmd->add_option("--gain", opt.gain, "gain name (k1..k4, or k1, k2, disturbance_bound)")
      ->required();
  sweep_cmd->add_option("--values", opt.values, "gain values")->required()->delimiter(',');
  sweep_cmd->add_option("--jobs", opt.jobs, "parallel runs (default: processors)");
  auto* list_cmd = app.add_subcommand("list-models", "print the model catalog");
  list_cmd->add_option("--fixtures", opt.fixtures, "directory of default scenarios");
  list_cmd->add_flag("--json", opt.json, "print the catalog as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(opt, false);
    if (*export_cmd) return cmd_run(opt, true);
    if (*check_cmd) return cmd_check(opt);
    if (*sweep_cmd) return cmd_sweep(opt);
    if (*list_cmd) return cmd_list_models(opt);
  } catch (const ScenarioError& e) {
    std::cerr << "error=" << to_string(e.kind()) << '\n';
    for (const auto& issue : e.issues())
      std::cerr << "issue=" << issue.path << ": " << issue.message << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error=validation\n";
    for (const auto& issue : e.issues())
      std::cerr << "issue=" << issue.path << ": " << issue.message << '\n';
    return kExitUsage;
  } catch (const CLI::Error& e) {
    std::cerr << "error=usage\nmessage=" << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error=failure\nmessage=" << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
