#include <set>
#include <string>

#include "doctest.h"
#include "flexsim/catalog.hpp"
#include "support.hpp"

using namespace flexsim;

namespace {

const Json& entry(const Json& catalog, const std::string& kind) {
  for (const auto& m : catalog["models"])
    if (m["kind"] == kind) return m;
  throw std::runtime_error("missing model " + kind);
}

}  // namespace

TEST_CASE("catalog lists exactly the supported models") {
  const Json catalog = model_catalog(FLEXSIM_FIXTURE_DIR);
  std::set<std::string> kinds;
  for (const auto& m : catalog["models"]) kinds.insert(m["kind"].get<std::string>());
  CHECK(kinds == std::set<std::string>{"heat", "eb_beam", "timoshenko", "string"});
  REQUIRE(catalog["absent"].size() == 1);
  CHECK(catalog["absent"][0]["kind"] == "exponential_beam");
}

TEST_CASE("timoshenko entry lists the PD gains with their defaults") {
  const Json catalog = model_catalog(FLEXSIM_FIXTURE_DIR);
  const Json& t = entry(catalog, "timoshenko");
  CHECK(t["fields"] == Json::array({"w", "phi"}));
  const Json* pd = nullptr;
  for (const auto& c : t["controllers"])
    if (c["kind"] == "pd") pd = &c;
  REQUIRE(pd);
  const double expected[] = {100, 10, 100, 10};
  REQUIRE((*pd)["gains"].size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK((*pd)["gains"][i]["name"] == "k" + std::to_string(i + 1));
    CHECK((*pd)["gains"][i]["default"].get<double>() == expected[i]);
  }
}

TEST_CASE("catalog keys are settable overrides and defaults load") {
  const Json catalog = model_catalog(FLEXSIM_FIXTURE_DIR);
  for (const auto& m : catalog["models"]) {
    CAPTURE(m["kind"].get<std::string>());
    REQUIRE_FALSE(m["default_scenario"].is_null());
    const Scenario s = scenario_from_json(m["default_scenario"]);
    CHECK(to_string(kind_of(s.model)) == m["kind"].get<std::string>());
    for (const auto& p : m["params"]) {
      const std::string o = p["key"].get<std::string>() + "=" + format_real(p["default"].get<double>());
      CHECK_NOTHROW(apply_overrides(s, std::vector<std::string>{o}));
    }
    for (const auto& d : m["disturbances"])
      CHECK(disturbance_compatible(kind_of(s.model),
                                   *parse_disturbance_kind(d.get<std::string>())));
  }
}

TEST_CASE("missing fixture directory yields null default scenarios") {
  const Json catalog = model_catalog("/nonexistent");
  for (const auto& m : catalog["models"]) CHECK(m["default_scenario"].is_null());
  CHECK(default_fixture_name(ModelKind::Timoshenko) == "timoshenko_pd_stable.json");
}
