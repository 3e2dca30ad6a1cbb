#include "flexsim/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <variant>

namespace flexsim {

namespace fs = std::filesystem;

ScenarioError::ScenarioError(Kind kind, Issues issues)
    : std::runtime_error(std::string(to_string(kind)) + ": " + format_issues(issues)),
      kind_(kind),
      issues_(std::move(issues)) {}

std::string_view to_string(ScenarioError::Kind kind) {
  switch (kind) {
    case ScenarioError::Kind::Io: return "io error";
    case ScenarioError::Kind::Parse: return "parse error";
    case ScenarioError::Kind::UnknownKey: return "unknown key";
    case ScenarioError::Kind::Constraint: return "constraint violation";
  }
  return "error";
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Walks a document, recording unknown keys and type errors with their paths.
class Reader {
 public:
  Issues unknown;
  Issues invalid;

  static std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
  }

  bool expect_object(const Json& node, const std::string& path,
                     std::initializer_list<std::string_view> allowed) {
    if (!node.is_object()) {
      invalid.push_back({path.empty() ? "<root>" : path, "expected an object"});
      return false;
    }
    for (const auto& [key, _] : node.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        unknown.push_back({join(path, key), "unknown key"});
    }
    return true;
  }

  void number(const Json& obj, const std::string& path, std::string_view key, double& out,
              bool required = false) {
    const auto it = obj.find(std::string(key));
    if (it == obj.end()) {
      if (required) invalid.push_back({join(path, key), "required"});
      return;
    }
    if (!it->is_number()) {
      invalid.push_back({join(path, key), "expected a number"});
      return;
    }
    out = it->get<double>();
  }

  template <class Int>
  void integer(const Json& obj, const std::string& path, std::string_view key, Int& out,
               bool required = false) {
    const auto it = obj.find(std::string(key));
    if (it == obj.end()) {
      if (required) invalid.push_back({join(path, key), "required"});
      return;
    }
    if (it->is_number_integer() || it->is_number_unsigned()) {
      const auto v = it->get<std::int64_t>();
      if constexpr (std::is_unsigned_v<Int>) {
        if (v < 0) {
          invalid.push_back({join(path, key), "must be >= 0"});
          return;
        }
      }
      out = static_cast<Int>(v);
      return;
    }
    if (it->is_number_float()) {
      const double v = it->get<double>();
      if (std::floor(v) == v && std::abs(v) < 9e15 && (!std::is_unsigned_v<Int> || v >= 0)) {
        out = static_cast<Int>(v);
        return;
      }
    }
    invalid.push_back({join(path, key), "expected an integer"});
  }

  void boolean(const Json& obj, const std::string& path, std::string_view key, bool& out) {
    const auto it = obj.find(std::string(key));
    if (it == obj.end()) return;
    if (!it->is_boolean()) {
      invalid.push_back({join(path, key), "expected true or false"});
      return;
    }
    out = it->get<bool>();
  }

  bool text(const Json& obj, const std::string& path, std::string_view key, std::string& out,
            bool required = false) {
    const auto it = obj.find(std::string(key));
    if (it == obj.end()) {
      if (required) invalid.push_back({join(path, key), "required"});
      return false;
    }
    if (!it->is_string()) {
      invalid.push_back({join(path, key), "expected a string"});
      return false;
    }
    out = it->get<std::string>();
    return true;
  }
};

ModelSpec read_model(Reader& r, const Json& node) {
  const std::string path = "model";
  if (!r.expect_object(node, path, {"kind", "params"})) return TimoshenkoParams{};
  std::string kind_name;
  if (!r.text(node, path, "kind", kind_name, true)) return TimoshenkoParams{};
  const auto kind = parse_model_kind(kind_name);
  if (!kind) {
    r.invalid.push_back({"model.kind", "unknown model '" + kind_name +
                                           "' (expected heat, eb_beam, timoshenko or string)"});
    return TimoshenkoParams{};
  }
  static const Json empty = Json::object();
  const auto it = node.find("params");
  const Json& params = it == node.end() ? empty : *it;
  const std::string pp = "model.params";

  switch (*kind) {
    case ModelKind::Heat: {
      HeatParams p;
      if (!r.expect_object(params, pp, {"alpha", "initial_mode", "initial_amplitude"})) return p;
      r.number(params, pp, "alpha", p.alpha);
      r.integer(params, pp, "initial_mode", p.initial_mode);
      r.number(params, pp, "initial_amplitude", p.initial_amplitude);
      return p;
    }
    case ModelKind::EBBeam: {
      EBBeamParams p;
      if (!r.expect_object(params, pp,
                           {"rho", "ei", "tension", "damping", "initial_mode", "initial_amplitude"}))
        return p;
      r.number(params, pp, "rho", p.rho);
      r.number(params, pp, "ei", p.ei);
      r.number(params, pp, "tension", p.tension);
      r.number(params, pp, "damping", p.damping);
      r.integer(params, pp, "initial_mode", p.initial_mode);
      r.number(params, pp, "initial_amplitude", p.initial_amplitude);
      return p;
    }
    case ModelKind::Timoshenko: {
      TimoshenkoParams p;
      if (!r.expect_object(params, pp,
                           {"rho", "i_rho", "ei", "shear_k", "payload_mass", "payload_inertia"}))
        return p;
      r.number(params, pp, "rho", p.rho);
      r.number(params, pp, "i_rho", p.i_rho);
      r.number(params, pp, "ei", p.ei);
      r.number(params, pp, "shear_k", p.shear_k);
      r.number(params, pp, "payload_mass", p.payload_mass);
      r.number(params, pp, "payload_inertia", p.payload_inertia);
      return p;
    }
    case ModelKind::String: {
      StringParams p;
      if (!r.expect_object(params, pp,
                           {"payload_mass", "tension_scale", "tension_offset", "lambda_coeff",
                            "rho", "rho_slope"}))
        return p;
      r.number(params, pp, "payload_mass", p.payload_mass);
      r.number(params, pp, "tension_scale", p.tension_scale);
      r.number(params, pp, "tension_offset", p.tension_offset);
      r.number(params, pp, "lambda_coeff", p.lambda_coeff);
      r.number(params, pp, "rho", p.rho);
      r.number(params, pp, "rho_slope", p.rho_slope);
      return p;
    }
  }
  return TimoshenkoParams{};
}

ControllerSpec read_controller(Reader& r, const Json& node) {
  ControllerSpec c;
  const std::string path = "controller";
  if (!r.expect_object(node, path, {"kind", "pd_gains", "em_gains", "disturbance_bound"})) return c;
  std::string kind_name = "none";
  r.text(node, path, "kind", kind_name);
  if (const auto kind = parse_controller_kind(kind_name))
    c.kind = *kind;
  else
    r.invalid.push_back({"controller.kind", "unknown controller '" + kind_name +
                                                "' (expected none, pd or exact_model)"});
  if (const auto it = node.find("pd_gains"); it != node.end()) {
    const std::string gp = "controller.pd_gains";
    if (r.expect_object(*it, gp, {"k1", "k2", "k3", "k4"})) {
      r.number(*it, gp, "k1", c.pd.k1);
      r.number(*it, gp, "k2", c.pd.k2);
      r.number(*it, gp, "k3", c.pd.k3);
      r.number(*it, gp, "k4", c.pd.k4);
    }
  }
  if (const auto it = node.find("em_gains"); it != node.end()) {
    const std::string gp = "controller.em_gains";
    if (r.expect_object(*it, gp, {"k1", "k2"})) {
      r.number(*it, gp, "k1", c.exact_model.k1);
      r.number(*it, gp, "k2", c.exact_model.k2);
    }
  }
  r.number(node, path, "disturbance_bound", c.disturbance_bound);
  return c;
}

std::vector<DisturbanceSpec> read_disturbances(Reader& r, const Json& node) {
  std::vector<DisturbanceSpec> out;
  if (!node.is_array()) {
    r.invalid.push_back({"disturbances", "expected an array"});
    return out;
  }
  for (std::size_t i = 0; i < node.size(); ++i) {
    const std::string path = "disturbances." + std::to_string(i);
    DisturbanceSpec spec;
    if (!r.expect_object(node[i], path, {"kind", "enabled"})) continue;
    std::string kind_name;
    if (r.text(node[i], path, "kind", kind_name, true)) {
      if (const auto kind = parse_disturbance_kind(kind_name))
        spec.kind = *kind;
      else
        r.invalid.push_back({path + ".kind", "unknown disturbance '" + kind_name + "'"});
    }
    r.boolean(node[i], path, "enabled", spec.enabled);
    out.push_back(spec);
  }
  return out;
}

}  // namespace

Scenario scenario_from_json(const Json& document) {
  Reader r;
  Scenario s;
  if (!r.expect_object(document, "",
                       {"schema_version", "label", "notes", "model", "mesh", "controller",
                        "disturbances", "divergence_threshold", "storage"}))
    throw ScenarioError(ScenarioError::Kind::Constraint, r.invalid);

  int version = 0;
  r.integer(document, "", "schema_version", version, true);
  if (document.contains("schema_version") && version != kScenarioSchemaVersion)
    r.invalid.push_back({"schema_version", "unsupported version " + std::to_string(version) +
                                               " (supported: " +
                                               std::to_string(kScenarioSchemaVersion) + ")"});
  r.text(document, "", "label", s.label);

  if (const auto it = document.find("notes"); it != document.end()) {
    if (!it->is_object()) {
      r.invalid.push_back({"notes", "expected an object of strings"});
    } else {
      for (const auto& [key, value] : it->items()) {
        if (value.is_string())
          s.notes[key] = value.get<std::string>();
        else
          r.invalid.push_back({"notes." + key, "expected a string"});
      }
    }
  }

  if (const auto it = document.find("model"); it != document.end())
    s.model = read_model(r, *it);
  else
    r.invalid.push_back({"model", "required"});

  if (const auto it = document.find("mesh"); it != document.end()) {
    if (r.expect_object(*it, "mesh", {"n_space", "n_time", "length", "final_time"})) {
      r.integer(*it, "mesh", "n_space", s.mesh.n_space, true);
      r.integer(*it, "mesh", "n_time", s.mesh.n_time, true);
      r.number(*it, "mesh", "length", s.mesh.length, true);
      r.number(*it, "mesh", "final_time", s.mesh.final_time, true);
    }
  } else {
    r.invalid.push_back({"mesh", "required"});
  }

  if (const auto it = document.find("controller"); it != document.end())
    s.controller = read_controller(r, *it);
  if (const auto it = document.find("disturbances"); it != document.end())
    s.disturbances = read_disturbances(r, *it);
  r.number(document, "", "divergence_threshold", s.divergence_threshold);

  std::string storage = "full";
  if (r.text(document, "", "storage", storage)) {
    if (storage == "full")
      s.storage = Storage::Full;
    else if (storage == "rolling")
      s.storage = Storage::Rolling;
    else
      r.invalid.push_back({"storage", "expected 'full' or 'rolling'"});
  }

  if (!r.unknown.empty()) {
    Issues all = r.unknown;
    all.insert(all.end(), r.invalid.begin(), r.invalid.end());
    throw ScenarioError(ScenarioError::Kind::UnknownKey, std::move(all));
  }
  if (!r.invalid.empty()) throw ScenarioError(ScenarioError::Kind::Constraint, r.invalid);
  if (auto issues = validate(s); !issues.empty())
    throw ScenarioError(ScenarioError::Kind::Constraint, std::move(issues));
  return s;
}

Scenario parse_scenario(std::string_view text) {
  Json document;
  try {
    document = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ScenarioError(ScenarioError::Kind::Parse, {{"<document>", e.what()}});
  }
  return scenario_from_json(document);
}

Scenario load_scenario(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(ScenarioError::Kind::Io, {{path.string(), "cannot open file"}});
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

Json scenario_to_json(const Scenario& s, bool full) {
  Json doc;
  doc["schema_version"] = kScenarioSchemaVersion;
  doc["label"] = s.label;
  if (!s.notes.empty() || full) {
    Json notes = Json::object();
    for (const auto& [k, v] : s.notes) notes[k] = v;
    doc["notes"] = notes;
  }

  Json model;
  model["kind"] = std::string(to_string(kind_of(s.model)));
  Json params;
  std::visit(overloaded{
                 [&](const HeatParams& p) {
                   params["alpha"] = p.alpha;
                   params["initial_mode"] = p.initial_mode;
                   params["initial_amplitude"] = p.initial_amplitude;
                 },
                 [&](const EBBeamParams& p) {
                   params["rho"] = p.rho;
                   params["ei"] = p.ei;
                   params["tension"] = p.tension;
                   params["damping"] = p.damping;
                   params["initial_mode"] = p.initial_mode;
                   params["initial_amplitude"] = p.initial_amplitude;
                 },
                 [&](const TimoshenkoParams& p) {
                   params["rho"] = p.rho;
                   params["i_rho"] = p.i_rho;
                   params["ei"] = p.ei;
                   params["shear_k"] = p.shear_k;
                   params["payload_mass"] = p.payload_mass;
                   params["payload_inertia"] = p.payload_inertia;
                 },
                 [&](const StringParams& p) {
                   params["payload_mass"] = p.payload_mass;
                   params["tension_scale"] = p.tension_scale;
                   params["tension_offset"] = p.tension_offset;
                   params["lambda_coeff"] = p.lambda_coeff;
                   params["rho"] = p.rho;
                   params["rho_slope"] = p.rho_slope;
                 },
             },
             s.model);
  model["params"] = params;
  doc["model"] = model;

  doc["mesh"] = {{"n_space", s.mesh.n_space},
                 {"n_time", s.mesh.n_time},
                 {"length", s.mesh.length},
                 {"final_time", s.mesh.final_time}};

  Json controller;
  controller["kind"] = std::string(to_string(s.controller.kind));
  const auto& c = s.controller;
  if (full || c.kind == ControllerKind::PD)
    controller["pd_gains"] = {{"k1", c.pd.k1}, {"k2", c.pd.k2}, {"k3", c.pd.k3}, {"k4", c.pd.k4}};
  if (full || c.kind == ControllerKind::ExactModel) {
    controller["em_gains"] = {{"k1", c.exact_model.k1}, {"k2", c.exact_model.k2}};
    controller["disturbance_bound"] = c.disturbance_bound;
  }
  doc["controller"] = controller;

  Json disturbances = Json::array();
  for (const auto& d : s.disturbances)
    disturbances.push_back({{"kind", std::string(to_string(d.kind))}, {"enabled", d.enabled}});
  doc["disturbances"] = disturbances;
  doc["divergence_threshold"] = s.divergence_threshold;
  doc["storage"] = s.storage == Storage::Full ? "full" : "rolling";
  return doc;
}

void save_scenario(const Scenario& scenario, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << scenario_to_json(scenario).dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Scenario apply_overrides(const Scenario& scenario, std::span<const std::string> overrides) {
  if (overrides.empty()) return scenario;
  Json tree = scenario_to_json(scenario, /*full=*/true);
  Issues issues;
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ScenarioError(ScenarioError::Kind::Parse,
                          {{item, "override must look like key.path=value"}});
    const std::string key = item.substr(0, eq);
    const std::string raw = item.substr(eq + 1);

    Json* node = &tree;
    bool found = true;
    std::size_t start = 0;
    while (found) {
      const auto dot = key.find('.', start);
      const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
      if (node->is_object() && node->contains(part)) {
        node = &(*node)[part];
      } else if (node->is_array()) {
        std::size_t index = 0;
        const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), index);
        if (ec != std::errc() || ptr != part.data() + part.size() || index >= node->size()) {
          found = false;
          break;
        }
        node = &(*node)[index];
      } else {
        found = false;
        break;
      }
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    if (!found || node->is_object() || node->is_array()) {
      issues.push_back({key, "not a settable key of this scenario"});
      continue;
    }
    if (node->is_string()) {
      *node = raw;
    } else {
      try {
        *node = Json::parse(raw);
      } catch (const Json::parse_error&) {
        *node = raw;
      }
    }
  }
  if (!issues.empty()) throw ScenarioError(ScenarioError::Kind::UnknownKey, std::move(issues));
  return scenario_from_json(tree);
}

// ---------------------------------------------------------------------------

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

namespace {

double parse_real(std::string_view text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::runtime_error("malformed number '" + std::string(text) + "'");
  return v;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed (disk full?): " + path.string());
}

}  // namespace

std::vector<std::size_t> strided_levels(std::size_t last_level, std::size_t stride) {
  if (stride == 0) throw std::invalid_argument("stride must be >= 1");
  std::vector<std::size_t> levels;
  for (std::size_t j = 0; j <= last_level; j += stride) levels.push_back(j);
  return levels;
}

std::vector<double> gather_rows(const Grid& grid, std::span<const std::size_t> levels) {
  std::vector<double> out;
  out.reserve(levels.size() * grid.n_nodes());
  for (auto j : levels) {
    const auto row = grid.row(j);
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

void write_grid_binary(const fs::path& path, std::span<const double> values) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  std::vector<unsigned char> bytes(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  finish(out, path);
}

GridData read_grid_binary(const fs::path& path, std::size_t rows, std::size_t cols) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() != rows * cols * 8)
    throw std::runtime_error(path.string() + ": expected " + std::to_string(rows * cols * 8) +
                             " bytes, found " + std::to_string(bytes.size()));
  GridData grid{rows, cols, {}, std::vector<double>(rows * cols)};
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
    grid.values[i] = std::bit_cast<double>(bits);
  }
  return grid;
}

void write_grid_csv(const fs::path& path, std::span<const double> times,
                    std::span<const double> values, std::size_t cols) {
  auto out = open_out(path);
  out << 't';
  for (std::size_t c = 0; c < cols; ++c) out << ",x_" << c;
  out << '\n';
  std::string line;
  for (std::size_t r = 0; r < times.size(); ++r) {
    line = format_real(times[r]);
    for (std::size_t c = 0; c < cols; ++c) {
      line += ',';
      line += format_real(values[r * cols + c]);
    }
    line += '\n';
    out << line;
  }
  finish(out, path);
}

GridData read_grid_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
  const std::size_t cols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  GridData grid;
  grid.cols = cols;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t start = 0;
    std::size_t field = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const std::string_view cell(line.data() + start,
                                  (comma == std::string::npos ? line.size() : comma) - start);
      if (field == 0)
        grid.times.push_back(parse_real(cell));
      else
        grid.values.push_back(parse_real(cell));
      ++field;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (field != cols + 1)
      throw std::runtime_error(path.string() + ": row " + std::to_string(grid.rows + 1) +
                               " has " + std::to_string(field) + " fields");
    ++grid.rows;
  }
  return grid;
}

std::map<std::string, std::string> read_metadata(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

ResultBundle export_result(const SimulationResult& result, const fs::path& directory,
                           ExportFormats formats, std::size_t stride) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw std::runtime_error("cannot create " + directory.string() + ": " + ec.message());

  ResultBundle bundle{directory, "metadata.txt", {}};
  const Mesh& mesh = result.mesh;
  const std::size_t last = result.steps_completed;
  const bool has_phi = result.history.phi.has_value();
  const bool grids = result.history.w.is_full();

  const auto levels = strided_levels(last, stride);
  std::vector<double> times;
  times.reserve(levels.size());
  for (auto j : levels) times.push_back(mesh.t(j));

  std::vector<std::pair<std::string, const Grid*>> fields{{"w", &result.history.w}};
  if (has_phi) fields.emplace_back("phi", &*result.history.phi);

  std::ostringstream meta;
  meta << "format_version=" << kBundleFormatVersion << '\n';
  meta << "label=" << result.scenario.label << '\n';
  meta << "model=" << to_string(kind_of(result.scenario.model)) << '\n';
  meta << "controller=" << to_string(result.scenario.controller.kind) << '\n';
  meta << "scenario=scenario.json\n";
  meta << "n_space=" << mesh.n_space() << '\n';
  meta << "n_time=" << mesh.n_time() << '\n';
  meta << "length=" << format_real(mesh.length()) << '\n';
  meta << "final_time=" << format_real(mesh.final_time()) << '\n';
  meta << "h=" << format_real(mesh.h()) << '\n';
  meta << "k=" << format_real(mesh.k()) << '\n';
  meta << "storage=" << (grids ? "full" : "rolling") << '\n';
  meta << "steps_completed=" << result.steps_completed << '\n';
  meta << "verdict.diverged=" << (result.verdict.diverged ? "true" : "false") << '\n';
  meta << "verdict.reason=" << to_string(result.verdict.reason) << '\n';
  meta << "verdict.first_bad_step="
       << (result.verdict.first_bad_step ? std::to_string(*result.verdict.first_bad_step) : "")
       << '\n';
  meta << "verdict.peak_magnitude=" << format_real(result.verdict.peak_magnitude) << '\n';
  if (result.a_priori) {
    const auto& a = *result.a_priori;
    meta << "a_priori.criterion=" << a.criterion_name << '\n';
    meta << "a_priori.lhs=" << format_real(a.lhs_value) << '\n';
    meta << "a_priori.threshold=" << format_real(a.threshold) << '\n';
    meta << "a_priori.stable=" << (a.predicted_stable ? "true" : "false") << '\n';
    meta << "a_priori.advisory=" << (a.advisory ? "true" : "false") << '\n';
  }

  if (grids) {
    meta << "grid.stride=" << stride << '\n';
    meta << "grid.rows=" << levels.size() << '\n';
    meta << "grid.cols=" << mesh.n_nodes() << '\n';
    meta << "grid.layout=row_major_time_by_node\n";
    std::string names;
    for (const auto& [name, grid] : fields) {
      names += names.empty() ? name : "," + name;
      const auto values = gather_rows(*grid, levels);
      if (formats.csv) {
        const fs::path file = name + ".csv";
        write_grid_csv(directory / file, times, values, mesh.n_nodes());
        bundle.files.push_back(file);
        meta << "grid." << name << ".csv=" << file.string() << '\n';
      }
      if (formats.binary) {
        const fs::path file = name + ".bin";
        write_grid_binary(directory / file, values);
        bundle.files.push_back(file);
        meta << "grid." << name << ".bin=" << file.string() << '\n';
        meta << "grid." << name << ".dtype=float64le\n";
      }
    }
    meta << "grid.fields=" << names << '\n';
  }

  auto write_tip = [&](const std::string& file, const std::string& column,
                       const std::vector<double>& series) {
    auto out = open_out(directory / file);
    out << "t," << column << '\n';
    for (std::size_t j = 0; j < series.size(); ++j)
      out << format_real(mesh.t(j)) << ',' << format_real(series[j]) << '\n';
    finish(out, directory / file);
    bundle.files.emplace_back(file);
  };
  write_tip("tip.csv", "w_tip", result.tip_w);
  meta << "tip.csv=tip.csv\n";
  if (has_phi) {
    write_tip("tip_phi.csv", "phi_tip", result.tip_phi);
    meta << "tip_phi.csv=tip_phi.csv\n";
  }
  meta << "wall_time_s=" << format_real(result.wall_time.count()) << '\n';

  save_scenario(result.scenario, directory / "scenario.json");
  bundle.files.emplace_back("scenario.json");

  auto out = open_out(directory / bundle.metadata);
  out << meta.str();
  finish(out, directory / bundle.metadata);
  return bundle;
}

GridData load_bundle_grid(const fs::path& directory, std::string_view field) {
  const auto meta = read_metadata(directory / "metadata.txt");
  const std::string prefix = "grid." + std::string(field);
  const auto get = [&](const std::string& key) -> std::string {
    const auto it = meta.find(key);
    return it == meta.end() ? std::string() : it->second;
  };
  const auto rows_text = get("grid.rows");
  const auto cols_text = get("grid.cols");
  if (rows_text.empty() || cols_text.empty())
    throw std::runtime_error(directory.string() + ": bundle has no grids");
  const std::size_t rows = std::stoull(rows_text);
  const std::size_t cols = std::stoull(cols_text);
  if (const auto bin = get(prefix + ".bin"); !bin.empty())
    return read_grid_binary(directory / bin, rows, cols);
  if (const auto csv = get(prefix + ".csv"); !csv.empty()) {
    auto grid = read_grid_csv(directory / csv);
    if (grid.rows != rows || grid.cols != cols)
      throw std::runtime_error(directory.string() + ": grid shape disagrees with metadata");
    return grid;
  }
  throw std::runtime_error(directory.string() + ": no grid for field '" + std::string(field) + "'");
}

}  // namespace flexsim
