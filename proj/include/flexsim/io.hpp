#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "flexsim/engine.hpp"
#include "flexsim/error.hpp"

namespace flexsim {

using Json = nlohmann::ordered_json;

inline constexpr int kScenarioSchemaVersion = 1;
inline constexpr int kBundleFormatVersion = 1;

/// Scenario loading failure. Every issue carries a dotted key path.
class ScenarioError : public std::runtime_error {
 public:
  enum class Kind { Io, Parse, UnknownKey, Constraint };

  ScenarioError(Kind kind, Issues issues);

  Kind kind() const noexcept { return kind_; }
  const Issues& issues() const noexcept { return issues_; }

 private:
  Kind kind_;
  Issues issues_;
};

std::string_view to_string(ScenarioError::Kind kind);

/// Strict decoding: unknown keys, wrong types and constraint violations are
/// all reported, with key paths, in one ScenarioError.
Scenario scenario_from_json(const Json& document);
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// Normalized document. The compact form writes only the gains used by the
/// controller kind; the full form writes every schema key.
Json scenario_to_json(const Scenario& scenario, bool full = false);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

/// Applies "a.b.c=value" overrides on the full schema tree of the scenario and
/// re-validates. Keys that are not in the schema are rejected. Values parse as
/// JSON where possible; string-typed keys take the raw text.
Scenario apply_overrides(const Scenario& scenario, std::span<const std::string> overrides);

// ---------------------------------------------------------------------------
// Result bundles

struct ExportFormats {
  bool csv{true};
  bool binary{false};
};

/// Files written for one result, relative to `directory`.
struct ResultBundle {
  std::filesystem::path directory;
  std::filesystem::path metadata;
  std::vector<std::filesystem::path> files;
};

/// Writes metadata.txt, scenario.json, one grid file per field and format
/// (rows are time levels 0, stride, 2*stride, ... up to the last valid level),
/// and tip.csv (plus tip_phi.csv for the Timoshenko beam). Rolling-storage
/// results only get the tip files. Throws std::runtime_error on I/O failure.
ResultBundle export_result(const SimulationResult& result, const std::filesystem::path& directory,
                           ExportFormats formats = {}, std::size_t stride = 1);

/// Level indices kept by a stride over levels 0..last_level.
std::vector<std::size_t> strided_levels(std::size_t last_level, std::size_t stride);

/// Row-major copy of the selected levels of a grid.
std::vector<double> gather_rows(const Grid& grid, std::span<const std::size_t> levels);

/// A grid as read back from disk.
struct GridData {
  std::size_t rows{0};
  std::size_t cols{0};
  std::vector<double> times;   ///< CSV only
  std::vector<double> values;  ///< row-major
};

void write_grid_binary(const std::filesystem::path& path, std::span<const double> values);
GridData read_grid_binary(const std::filesystem::path& path, std::size_t rows, std::size_t cols);
void write_grid_csv(const std::filesystem::path& path, std::span<const double> times,
                    std::span<const double> values, std::size_t cols);
GridData read_grid_csv(const std::filesystem::path& path);

/// key=value document.
std::map<std::string, std::string> read_metadata(const std::filesystem::path& path);

/// 17 significant digits: round-trips any double.
std::string format_real(double value);

/// Reads the grid for `field` ("w" or "phi") from a bundle, preferring binary.
GridData load_bundle_grid(const std::filesystem::path& directory, std::string_view field);

}  // namespace flexsim
