#include <charconv>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "flexsim/io.hpp"
#include "support.hpp"

using namespace flexsim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

ScenarioError::Kind error_kind(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ScenarioError& e) {
    return e.kind();
  }
  FAIL("expected a ScenarioError");
  return ScenarioError::Kind::Io;
}

Issues error_issues(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ScenarioError& e) {
    return e.issues();
  }
  return {};
}

Json fixture_json(const std::string& name) {
  std::ifstream in(support::fixture(name));
  return Json::parse(in);
}

bool has_path(const Issues& issues, const std::string& path) {
  return std::any_of(issues.begin(), issues.end(), [&](const Issue& i) { return i.path == path; });
}

// Metadata with the measured wall time removed.
std::string metadata_without_timing(const fs::path& dir) {
  std::string out;
  for (const auto& line : lines_of(dir / "metadata.txt"))
    if (line.rfind("wall_time_s=", 0) != 0) out += line + "\n";
  return out;
}

}  // namespace

TEST_CASE("checked-in fixtures load") {
  const Scenario s = load_scenario(support::fixture("timoshenko_pd_stable"));
  CHECK(s.controller.kind == ControllerKind::PD);
  CHECK(s.controller.pd == PdGains{100, 10, 100, 10});
  CHECK(s.mesh.n_space == 50);
  CHECK(s.mesh.n_time == 10000);
  for (const auto& entry : fs::directory_iterator(FLEXSIM_FIXTURE_DIR)) {
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_scenario(entry.path()));
  }
}

TEST_CASE("strict parsing reports distinct error kinds with key paths") {
  SUBCASE("parse error") {
    CHECK(error_kind("{\"schema_version\": 1,") == ScenarioError::Kind::Parse);
  }
  SUBCASE("unknown key") {
    Json j = fixture_json("timoshenko_pd_stable");
    j["colour"] = "red";
    j["model"]["params"]["stiffness"] = 1;
    CHECK(error_kind(j.dump()) == ScenarioError::Kind::UnknownKey);
    const auto issues = error_issues(j.dump());
    CHECK(has_path(issues, "colour"));
    CHECK(has_path(issues, "model.params.stiffness"));
  }
  SUBCASE("negative gain") {
    Json j = fixture_json("timoshenko_pd_stable");
    j["controller"]["pd_gains"]["k2"] = -3;
    CHECK(error_kind(j.dump()) == ScenarioError::Kind::Constraint);
    CHECK(has_path(error_issues(j.dump()), "controller.pd_gains.k2"));
  }
  SUBCASE("wrong type") {
    Json j = fixture_json("timoshenko_pd_stable");
    j["mesh"]["n_space"] = "fifty";
    CHECK(error_kind(j.dump()) == ScenarioError::Kind::Constraint);
    CHECK(has_path(error_issues(j.dump()), "mesh.n_space"));
  }
  SUBCASE("missing required key") {
    Json j = fixture_json("timoshenko_pd_stable");
    j["mesh"].erase("n_time");
    CHECK(has_path(error_issues(j.dump()), "mesh.n_time"));
  }
  SUBCASE("unsupported schema version") {
    Json j = fixture_json("timoshenko_pd_stable");
    j["schema_version"] = 99;
    CHECK(has_path(error_issues(j.dump()), "schema_version"));
  }
  SUBCASE("incompatible controller") {
    Json j = fixture_json("string_exact_model");
    j["controller"]["kind"] = "pd";
    CHECK(has_path(error_issues(j.dump()), "controller.kind"));
  }
  SUBCASE("missing file") {
    try {
      load_scenario("/nonexistent/scenario.json");
      FAIL("expected a ScenarioError");
    } catch (const ScenarioError& e) {
      CHECK(e.kind() == ScenarioError::Kind::Io);
    }
  }
  CHECK(to_string(ScenarioError::Kind::UnknownKey) == "unknown key");
}

TEST_CASE("normalization is idempotent") {
  for (const auto& entry : fs::directory_iterator(FLEXSIM_FIXTURE_DIR)) {
    CAPTURE(entry.path().string());
    const Scenario s = load_scenario(entry.path());
    for (bool full : {false, true}) {
      const Json once = scenario_to_json(s, full);
      const Scenario back = scenario_from_json(once);
      CHECK(back == s);
      CHECK(scenario_to_json(back, full) == once);
    }
  }
  const auto dir = support::scratch_dir("normalize");
  const Scenario s = load_scenario(support::fixture("string_exact_model"));
  save_scenario(s, dir / "a.json");
  save_scenario(load_scenario(dir / "a.json"), dir / "b.json");
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  fs::remove_all(dir);
}

TEST_CASE("overrides") {
  const Scenario base = load_scenario(support::fixture("timoshenko_pd_stable"));
  SUBCASE("numeric and nested keys") {
    const std::vector<std::string> o{"controller.pd_gains.k2=30", "mesh.n_time=500",
                                     "model.params.payload_mass=0.5", "label=changed",
                                     "disturbances.1.enabled=false"};
    const Scenario s = apply_overrides(base, o);
    CHECK(s.controller.pd.k2 == 30.0);
    CHECK(s.mesh.n_time == 500);
    CHECK(std::get<TimoshenkoParams>(s.model).payload_mass == 0.5);
    CHECK(s.label == "changed");
    CHECK_FALSE(s.disturbances[1].enabled);
  }
  SUBCASE("keys absent from the compact file are still settable") {
    Scenario none = base;
    none.controller.kind = ControllerKind::None;
    const std::vector<std::string> o{"controller.kind=pd", "controller.pd_gains.k4=3"};
    const Scenario s = apply_overrides(none, o);
    CHECK(s.controller.kind == ControllerKind::PD);
    CHECK(s.controller.pd.k4 == 3.0);
  }
  SUBCASE("rejections") {
    auto kind_of_failure = [&](std::string o) {
      try {
        apply_overrides(base, std::vector<std::string>{std::move(o)});
      } catch (const ScenarioError& e) {
        return e.kind();
      }
      return ScenarioError::Kind::Io;
    };
    CHECK(kind_of_failure("colour=red") == ScenarioError::Kind::UnknownKey);
    CHECK(kind_of_failure("controller.pd_gains=1") == ScenarioError::Kind::UnknownKey);
    CHECK(kind_of_failure("disturbances.7.enabled=true") == ScenarioError::Kind::UnknownKey);
    CHECK(kind_of_failure("controller.pd_gains.k2=-1") == ScenarioError::Kind::Constraint);
    CHECK(kind_of_failure("mesh.n_space") == ScenarioError::Kind::Parse);
  }
  SUBCASE("override equals the same edit made in the file") {
    Json j = fixture_json("timoshenko_pd_stable");
    j["controller"]["pd_gains"]["k2"] = 30.0;
    const Scenario edited = scenario_from_json(j);
    const Scenario overridden =
        apply_overrides(base, std::vector<std::string>{"controller.pd_gains.k2=30"});
    CHECK(edited == overridden);
  }
}

TEST_CASE("real formatting round-trips") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::uint64_t> bits;
  int checked = 0;
  while (checked < 2000) {
    const double v = std::bit_cast<double>(bits(rng));
    if (!std::isfinite(v)) continue;
    ++checked;
    const std::string text = format_real(v);
    double back = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    CHECK(std::memcmp(&v, &back, sizeof v) == 0);
  }
  CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_real(std::nan("")) == "nan");
}

TEST_CASE("grid files round-trip") {
  const auto dir = support::scratch_dir("grid");
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 1e3);
  const std::size_t rows = 17, cols = 9;
  std::vector<double> values(rows * cols), times(rows);
  for (auto& v : values) v = n(rng);
  for (std::size_t r = 0; r < rows; ++r) times[r] = 0.1 * static_cast<double>(r);

  write_grid_binary(dir / "g.bin", values);
  CHECK(fs::file_size(dir / "g.bin") == rows * cols * 8);
  const auto bin = read_grid_binary(dir / "g.bin", rows, cols);
  CHECK(support::bit_identical(bin.values, values));
  CHECK_THROWS(read_grid_binary(dir / "g.bin", rows + 1, cols));

  // Little-endian on disk regardless of platform.
  const std::string raw = slurp(dir / "g.bin");
  std::uint64_t first = 0;
  for (int b = 7; b >= 0; --b) first = (first << 8) | static_cast<unsigned char>(raw[b]);
  CHECK(first == std::bit_cast<std::uint64_t>(values[0]));

  write_grid_csv(dir / "g.csv", times, values, cols);
  const auto csv = read_grid_csv(dir / "g.csv");
  CHECK(csv.rows == rows);
  CHECK(csv.cols == cols);
  CHECK(support::rel_error(csv.values, values) <= 1e-15);
  CHECK(lines_of(dir / "g.csv")[0] == "t,x_0,x_1,x_2,x_3,x_4,x_5,x_6,x_7,x_8");
  fs::remove_all(dir);
}

TEST_CASE("strided levels") {
  CHECK(strided_levels(10, 1).size() == 11);
  CHECK(strided_levels(10, 3) == std::vector<std::size_t>{0, 3, 6, 9});
  CHECK(strided_levels(10, 100) == std::vector<std::size_t>{0});
  CHECK_THROWS(strided_levels(10, 0));
}

TEST_CASE("zero-run export") {
  Scenario s;
  s.model = HeatParams{1.0, 1, 0.0};
  s.mesh = {10, 40, 1.0, 0.01};
  const auto result = run(s);
  const auto dir = support::scratch_dir("zero");
  export_result(result, dir, {true, true});
  const auto lines = lines_of(dir / "w.csv");
  REQUIRE(lines.size() == 1 + 41);
  for (std::size_t r = 1; r < lines.size(); ++r)
    CHECK(std::count(lines[r].begin(), lines[r].end(), ',') + 1 == 12);
  const auto grid = read_grid_csv(dir / "w.csv");
  CHECK(grid.rows == 41);
  CHECK(grid.cols == 11);
  CHECK(std::all_of(grid.values.begin(), grid.values.end(), [](double v) { return v == 0.0; }));
  const auto meta = read_metadata(dir / "metadata.txt");
  CHECK(meta.at("grid.rows") == "41");
  CHECK(meta.at("grid.cols") == "11");
  CHECK(meta.at("verdict.diverged") == "false");
  CHECK(lines_of(dir / "tip.csv")[0] == "t,w_tip");
  fs::remove_all(dir);
}

TEST_CASE("export and re-import of a full run") {
  const auto result = run(load_scenario(support::fixture("timoshenko_pd_stable")));
  const auto dir = support::scratch_dir("bundle");
  const auto bundle = export_result(result, dir, {true, true});
  CHECK(fs::exists(dir / bundle.metadata));
  for (const auto& f : bundle.files) CHECK(fs::exists(dir / f));

  const auto meta = read_metadata(dir / "metadata.txt");
  CHECK(meta.at("format_version") == "1");
  CHECK(meta.at("model") == "timoshenko");
  CHECK(meta.at("grid.w.bin") == "w.bin");
  CHECK(meta.at("grid.phi.csv") == "phi.csv");
  CHECK(meta.at("scenario") == "scenario.json");
  CHECK(load_scenario(dir / "scenario.json") == result.scenario);

  for (const char* field : {"w", "phi"}) {
    const Grid& g = std::string(field) == "w" ? result.history.w : *result.history.phi;
    const auto bin = read_grid_binary(dir / (std::string(field) + ".bin"),
                                      std::stoul(meta.at("grid.rows")),
                                      std::stoul(meta.at("grid.cols")));
    CHECK(support::bit_identical(bin.values, g.data()));
    const auto csv = read_grid_csv(dir / (std::string(field) + ".csv"));
    CHECK(support::rel_error(csv.values, g.data()) <= 1e-15);
    CHECK(support::bit_identical(load_bundle_grid(dir, field).values, g.data()));
  }
  CHECK(lines_of(dir / "tip_phi.csv")[0] == "t,phi_tip");
  CHECK(lines_of(dir / "tip.csv").size() == 1 + result.tip_w.size());
  fs::remove_all(dir);
}

TEST_CASE("strided export keeps exact row subsets") {
  const auto result = run(load_scenario(support::fixture("eb_beam_default")));
  const auto dir = support::scratch_dir("stride");
  export_result(result, dir, {false, true}, 7);
  const auto levels = strided_levels(result.steps_completed, 7);
  const auto grid = load_bundle_grid(dir, "w");
  CHECK(grid.rows == levels.size());
  CHECK(support::bit_identical(grid.values, gather_rows(result.history.w, levels)));
  CHECK(read_metadata(dir / "metadata.txt").at("grid.stride") == "7");
  fs::remove_all(dir);
}

TEST_CASE("diverged export stops at the first bad step") {
  const auto result = run(load_scenario(support::fixture("timoshenko_pd_unstable")));
  REQUIRE(result.verdict.diverged);
  const std::size_t bad = *result.verdict.first_bad_step;
  const auto dir = support::scratch_dir("diverged");
  export_result(result, dir);
  CHECK(read_grid_csv(dir / "w.csv").rows == bad + 1);
  CHECK(lines_of(dir / "tip.csv").size() == bad + 2);
  const auto meta = read_metadata(dir / "metadata.txt");
  CHECK(meta.at("verdict.diverged") == "true");
  CHECK(meta.at("verdict.first_bad_step") == std::to_string(bad));
  CHECK(meta.at("steps_completed") == std::to_string(bad));
  fs::remove_all(dir);
}

TEST_CASE("rolling runs export only the tip trajectory") {
  Scenario s = load_scenario(support::fixture("string_no_control"));
  s.storage = Storage::Rolling;
  const auto dir = support::scratch_dir("rolling");
  export_result(run(s), dir, {true, true});
  CHECK(fs::exists(dir / "tip.csv"));
  CHECK_FALSE(fs::exists(dir / "w.csv"));
  CHECK_FALSE(fs::exists(dir / "w.bin"));
  CHECK_THROWS(load_bundle_grid(dir, "w"));
  fs::remove_all(dir);
}

TEST_CASE("override bundles equal file-edit bundles") {
  const auto dir = support::scratch_dir("equiv");
  Json j = fixture_json("timoshenko_pd_stable");
  j["controller"]["pd_gains"]["k2"] = 12.5;
  j["mesh"]["n_time"] = 3000;
  j["mesh"]["final_time"] = 3.0;
  const Scenario edited = scenario_from_json(j);
  const Scenario overridden = apply_overrides(
      load_scenario(support::fixture("timoshenko_pd_stable")),
      std::vector<std::string>{"controller.pd_gains.k2=12.5", "mesh.n_time=3000",
                               "mesh.final_time=3"});
  export_result(run(edited), dir / "a", {true, true});
  export_result(run(overridden), dir / "b", {true, true});
  for (const char* f : {"w.bin", "phi.bin", "w.csv", "phi.csv", "tip.csv", "tip_phi.csv",
                        "scenario.json"})
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  CHECK(metadata_without_timing(dir / "a") == metadata_without_timing(dir / "b"));
  fs::remove_all(dir);
}
