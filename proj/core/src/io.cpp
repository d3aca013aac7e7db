#include "selforg/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "json.hpp"
#include "selforg/errors.hpp"

namespace selforg {

using json = nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

const char* units_tag(UnitSystem u) { return u == UnitSystem::dimensionless ? "dimensionless" : "si"; }

json point_json(const std::array<double, 2>& p) { return json::array({p[0], p[1]}); }

}  // namespace

std::string code_version() { return SELFORG_VERSION; }

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ValidationError("expected a number, got an empty value");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) throw ValidationError("'" + text + "' is not a number");
  if (errno == ERANGE && std::isinf(v)) throw ValidationError("'" + text + "' overflows a double");
  return v;
}

std::int64_t parse_int(const std::string& text) {
  const std::string t = trim(text);
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
    throw ValidationError("'" + text + "' is not an integer");
  return v;
}

std::uint64_t parse_uint(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty() || t[0] == '-') throw ValidationError("'" + text + "' is not a non-negative integer");
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size() || errno == ERANGE)
    throw ValidationError("'" + text + "' is not a non-negative integer");
  return v;
}

bool parse_bool(const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw ValidationError("'" + text + "' is not a boolean (true/false)");
}

Config parse_config(const std::string& text) {
  Config c;
  bool have_version = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ValidationError("config line " + std::to_string(lineno) + ": empty key");
    if (key == "schema_version") {
      if (have_version) throw ValidationError("config: duplicate key 'schema_version'");
      have_version = true;
      c.schema_version = static_cast<int>(parse_int(value));
      continue;
    }
    if (!c.values.emplace(key, value).second) throw ValidationError("config: duplicate key '" + key + "'");
  }
  if (!have_version) throw ValidationError("config: missing schema_version");
  if (c.schema_version != kConfigSchemaVersion)
    throw ValidationError("config: unsupported schema_version " + std::to_string(c.schema_version));
  return c;
}

std::string serialize_config(const Config& c) {
  std::string out = "schema_version = " + std::to_string(c.schema_version) + "\n";
  for (const auto& [k, v] : c.values) out += k + " = " + v + "\n";
  return out;
}

void apply_overrides(Config& c, const std::vector<std::string>& assignments) {
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) throw ValidationError("override '" + a + "' is not key=value");
    const std::string key = trim(a.substr(0, eq));
    if (key.empty()) throw ValidationError("override '" + a + "' has an empty key");
    if (key == "schema_version") throw ValidationError("schema_version cannot be overridden");
    c.values[key] = trim(a.substr(eq + 1));
  }
}

Config resolve_config(const Config& c, const std::vector<KeySpec>& schema) {
  Config out;
  out.schema_version = c.schema_version;
  for (const auto& [k, v] : c.values) {
    const bool known = std::any_of(schema.begin(), schema.end(), [&](const KeySpec& s) { return s.name == k; });
    if (!known) throw ValidationError("unknown config key '" + k + "'");
  }
  for (const auto& s : schema) {
    const auto it = c.values.find(s.name);
    out.values[s.name] = it == c.values.end() ? s.default_value : it->second;
  }
  return out;
}

const std::string& ConfigView::text(const std::string& key) const {
  const auto it = config_.values.find(key);
  if (it == config_.values.end()) throw ValidationError("missing config key '" + key + "'");
  return it->second;
}

namespace {

template <class F>
auto keyed(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw ValidationError("config key '" + key + "': " + e.what());
  }
}

}  // namespace

double ConfigView::number(const std::string& key) const {
  return keyed(key, [&] { return parse_double(text(key)); });
}
std::int64_t ConfigView::integer(const std::string& key) const {
  return keyed(key, [&] { return parse_int(text(key)); });
}
std::uint64_t ConfigView::unsigned_integer(const std::string& key) const {
  return keyed(key, [&] { return parse_uint(text(key)); });
}
bool ConfigView::flag(const std::string& key) const {
  return keyed(key, [&] { return parse_bool(text(key)); });
}
std::vector<double> ConfigView::numbers(const std::string& key) const {
  return keyed(key, [&] {
    std::vector<double> out;
    const std::string t = trim(text(key));
    if (t.empty()) return out;
    for (const auto& part : split(t, ',')) out.push_back(parse_double(part));
    return out;
  });
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string manifest_id(const std::string& subcommand, const Config& c, const std::string& code_version,
                        std::uint64_t seed) {
  return fnv1a_hex(subcommand + "\n" + code_version + "\n" + std::to_string(seed) + "\n" + serialize_config(c));
}

std::string manifest_to_json(const RunManifest& m) {
  json j;
  j["id"] = m.id;
  j["subcommand"] = m.subcommand;
  j["code_version"] = m.code_version;
  j["seed"] = m.seed;
  j["threads"] = m.threads;
  json cfg = json::object();
  cfg["schema_version"] = m.config.schema_version;
  for (const auto& [k, v] : m.config.values) cfg[k] = v;
  j["config"] = cfg;
  j["outputs"] = m.outputs;
  json sums = json::object();
  for (const auto& [k, v] : m.checksums) sums[k] = v;
  j["checksums"] = sums;
  j["wall_seconds"] = m.wall_seconds;
  return j.dump();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw IoError("cannot move output into '" + path + "': " + ec.message());
  }
}

void append_line(const std::string& path, const std::string& line) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot open '" + path + "' for appending");
  out << line << '\n';
  if (!out) throw IoError("append to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string to_csv(const CsvTable& t) {
  std::string out = "# manifest_id=" + t.manifest_id + "\n";
  auto row = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  row(t.header);
  for (const auto& r : t.rows) row(r);
  return out;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  const std::string tag = "# manifest_id=";
  while (std::getline(in, line)) {
    if (line.rfind(tag, 0) == 0) {
      t.manifest_id = line.substr(tag.size());
      continue;
    }
    if (!line.empty() && line[0] == '#') continue;
    if (!have_header) {
      t.header = split(line, ',');
      have_header = true;
      continue;
    }
    auto cells = split(line, ',');
    if (cells.size() != t.header.size())
      throw ValidationError("csv row has " + std::to_string(cells.size()) + " cells, header has " +
                            std::to_string(t.header.size()));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

std::string to_json(const EffectiveModel& m) {
  json j;
  j["schema_version"] = kOutputSchemaVersion;
  j["units"] = units_tag(m.units);
  j["alpha_1"] = m.alpha_1;
  j["alpha_2"] = m.alpha_2;
  j["beta"] = m.beta;
  j["gamma_1"] = m.gamma_1;
  j["gamma_2"] = m.gamma_2;
  j["d_1"] = m.d_1;
  j["d_2"] = m.d_2;
  j["friction_1"] = m.g_1;
  j["friction_2"] = m.g_2;
  j["eta_1"] = m.eta_1;
  j["eta_2"] = m.eta_2;
  j["omega_r"] = m.omega_r;
  j["k1"] = m.k1;
  j["k2"] = m.k2;
  j["n_atoms"] = m.n_atoms;
  j["hbar"] = m.hbar;
  j["mass"] = m.mass;
  j["k"] = m.k;
  return j.dump(2) + "\n";
}

std::string to_json(const CavityParams& c) {
  json j;
  j["schema_version"] = kOutputSchemaVersion;
  j["units"] = units_tag(c.units);
  j["delta_1"] = c.delta_1;
  j["delta_2"] = c.delta_2;
  j["kappa_1"] = c.kappa_1;
  j["kappa_2"] = c.kappa_2;
  j["s_1"] = c.s_1;
  j["s_2"] = c.s_2;
  j["n_atoms"] = c.n_atoms;
  j["k"] = c.k;
  j["phi"] = c.phi;
  j["hbar"] = c.hbar;
  j["mass"] = c.mass;
  return j.dump(2) + "\n";
}

CsvTable fixed_points_csv(const std::vector<FixedPoint>& pts, const std::string& id) {
  CsvTable t;
  t.manifest_id = id;
  t.header = {"y_1", "y_2", "g_value", "stability", "residual_norm", "phase"};
  for (const auto& p : pts)
    t.rows.push_back({format_double(p.y_1), format_double(p.y_2), format_double(p.g_value), to_string(p.stability),
                      format_double(p.residual_norm), to_string(label_phase(p.y_1, p.y_2))});
  return t;
}

CsvTable phase_grid_csv(const PhaseDiagram& d, const std::string& id) {
  CsvTable t;
  t.manifest_id = id;
  t.header = {"alpha_1", "alpha_2", "phase", "theta_1", "theta_2", "free_energy"};
  for (const auto& p : d.grid)
    t.rows.push_back({format_double(p.alpha_1), format_double(p.alpha_2), to_string(p.phase),
                      format_double(p.global_min.y_1), format_double(p.global_min.y_2),
                      format_double(p.free_energy)});
  return t;
}

std::string phase_diagram_json(const PhaseDiagram& d, const std::string& id) {
  json j;
  j["schema_version"] = kOutputSchemaVersion;
  j["manifest_id"] = id;
  j["units"] = "dimensionless";
  j["grid"] = {{"alpha_1_range", {d.spec.alpha_1_range.lo, d.spec.alpha_1_range.hi}},
               {"alpha_2_range", {d.spec.alpha_2_range.lo, d.spec.alpha_2_range.hi}},
               {"n_1", d.spec.n_1},
               {"n_2", d.spec.n_2},
               {"beta", d.spec.thermo.beta},
               {"omega_r", d.spec.thermo.omega_r},
               {"hbar", d.spec.thermo.hbar}};
  j["classification_tolerance"] = kClassificationTolerance;
  j["overlays"] = {{"paramagnetic_alpha_1", d.overlays.paramagnetic_alpha_1},
                   {"paramagnetic_alpha_2", d.overlays.paramagnetic_alpha_2},
                   {"alpha_2", d.overlays.alpha_2},
                   {"theta_2", d.overlays.theta_2},
                   {"alpha_1c", d.overlays.alpha_1c},
                   {"alpha_1c_negative", d.overlays.alpha_1c_negative}};
  json tr = json::array();
  for (const auto& a : d.transitions)
    tr.push_back({{"direction", to_string(a.direction)},
                  {"line", a.line},
                  {"index", a.index},
                  {"alpha_1", a.alpha_1},
                  {"alpha_2", a.alpha_2},
                  {"from", to_string(a.from)},
                  {"to", to_string(a.to)},
                  {"jump", a.jump},
                  {"noise", a.noise},
                  {"threshold", a.threshold},
                  {"hysteresis", a.hysteresis},
                  {"insufficient_resolution", a.insufficient_resolution},
                  {"order", to_string(a.order)}});
  j["transitions"] = tr;
  json bd = json::array();
  for (const auto& b : d.boundaries) {
    json pts = json::array();
    for (const auto& p : b.points) pts.push_back(point_json(p));
    bd.push_back({{"a", to_string(b.a)}, {"b", to_string(b.b)}, {"order", to_string(b.order)}, {"points", pts}});
  }
  j["boundaries"] = bd;
  json tc = json::array();
  for (const auto& p : d.triple_cells) tc.push_back(point_json(p));
  j["triple_cells"] = tc;
  j["dropped_seeds"] = d.dropped_seeds;
  return j.dump(2) + "\n";
}

namespace {

Axis axis_from_string(const std::string& s) {
  if (s == "alpha_1") return Axis::alpha_1;
  if (s == "alpha_2") return Axis::alpha_2;
  throw ValidationError("unknown axis '" + s + "'");
}

TransitionOrder order_from_string(const std::string& s) {
  if (s == "first") return TransitionOrder::first;
  if (s == "second") return TransitionOrder::second;
  throw ValidationError("unknown transition order '" + s + "'");
}

std::array<double, 2> point_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

PhaseDiagram phase_diagram_from_outputs(const CsvTable& grid, const std::string& text) {
  PhaseDiagram d;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("phase diagram json: ") + e.what());
  }
  try {
    const auto& g = j.at("grid");
    d.spec.alpha_1_range = {g.at("alpha_1_range").at(0).get<double>(), g.at("alpha_1_range").at(1).get<double>()};
    d.spec.alpha_2_range = {g.at("alpha_2_range").at(0).get<double>(), g.at("alpha_2_range").at(1).get<double>()};
    d.spec.n_1 = g.at("n_1").get<int>();
    d.spec.n_2 = g.at("n_2").get<int>();
    d.spec.thermo = {g.at("beta").get<double>(), g.at("omega_r").get<double>(), g.at("hbar").get<double>()};
    const auto& o = j.at("overlays");
    d.overlays.paramagnetic_alpha_1 = o.at("paramagnetic_alpha_1").get<double>();
    d.overlays.paramagnetic_alpha_2 = o.at("paramagnetic_alpha_2").get<double>();
    d.overlays.alpha_2 = o.at("alpha_2").get<std::vector<double>>();
    d.overlays.theta_2 = o.at("theta_2").get<std::vector<double>>();
    d.overlays.alpha_1c = o.at("alpha_1c").get<std::vector<double>>();
    d.overlays.alpha_1c_negative = o.at("alpha_1c_negative").get<std::vector<double>>();
    for (const auto& a : j.at("transitions")) {
      TransitionAnnotation t;
      t.direction = axis_from_string(a.at("direction").get<std::string>());
      t.line = a.at("line").get<int>();
      t.index = a.at("index").get<int>();
      t.alpha_1 = a.at("alpha_1").get<double>();
      t.alpha_2 = a.at("alpha_2").get<double>();
      t.from = phase_from_string(a.at("from").get<std::string>());
      t.to = phase_from_string(a.at("to").get<std::string>());
      t.jump = a.at("jump").get<double>();
      t.noise = a.at("noise").get<double>();
      t.threshold = a.at("threshold").get<double>();
      t.hysteresis = a.at("hysteresis").get<bool>();
      t.insufficient_resolution = a.at("insufficient_resolution").get<bool>();
      t.order = order_from_string(a.at("order").get<std::string>());
      d.transitions.push_back(t);
    }
    for (const auto& b : j.at("boundaries")) {
      BoundaryPolyline p;
      p.a = phase_from_string(b.at("a").get<std::string>());
      p.b = phase_from_string(b.at("b").get<std::string>());
      p.order = order_from_string(b.at("order").get<std::string>());
      for (const auto& pt : b.at("points")) p.points.push_back(point_from(pt));
      d.boundaries.push_back(std::move(p));
    }
    for (const auto& pt : j.at("triple_cells")) d.triple_cells.push_back(point_from(pt));
    d.dropped_seeds = j.at("dropped_seeds").get<int>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("phase diagram json: ") + e.what());
  }

  const std::vector<std::string> expected = {"alpha_1", "alpha_2", "phase", "theta_1", "theta_2", "free_energy"};
  if (grid.header != expected) throw ValidationError("phase grid csv has an unexpected header");
  for (const auto& r : grid.rows) {
    PhasePoint p;
    p.alpha_1 = parse_double(r[0]);
    p.alpha_2 = parse_double(r[1]);
    p.phase = phase_from_string(r[2]);
    p.global_min.y_1 = parse_double(r[3]);
    p.global_min.y_2 = parse_double(r[4]);
    p.free_energy = parse_double(r[5]);
    d.grid.push_back(p);
  }
  return d;
}

CsvTable trajectory_csv(const TrajectoryRecord& r, const std::string& id) {
  CsvTable t;
  t.manifest_id = id;
  t.header = {"time", "theta_1", "theta_2", "kinetic_temperature", "energy"};
  for (std::size_t i = 0; i < r.times.size(); ++i)
    t.rows.push_back({format_double(r.times[i]), format_double(r.theta_1[i]), format_double(r.theta_2[i]),
                      format_double(r.kinetic_temperature[i]), format_double(r.energy[i])});
  return t;
}

CsvTable histogram_csv(const Histogram& h, const std::string& id) {
  CsvTable t;
  t.manifest_id = id;
  t.header = {"bin_center", "count"};
  for (std::size_t b = 0; b < h.counts.size(); ++b)
    t.rows.push_back({format_double(h.bin_center(b)), std::to_string(h.counts[b])});
  return t;
}

std::string stationarity_json(const StationarityReport& r) {
  json j;
  j["kinetic_temperature"] = r.kinetic_temperature;
  j["kinetic_temperature_se"] = r.kinetic_temperature_se;
  j["temperature_z"] = std::isfinite(r.temperature_z) ? json(r.temperature_z) : json(nullptr);
  j["skewness"] = r.moments.skewness;
  j["skewness_se"] = r.moments.skewness_se;
  j["excess_kurtosis"] = r.moments.excess_kurtosis;
  j["excess_kurtosis_se"] = r.moments.excess_kurtosis_se;
  j["tau_theta_1"] = r.tau_theta_1;
  j["tau_theta_2"] = r.tau_theta_2;
  j["theta_1_mean"] = r.theta_1_mean;
  j["theta_1_se"] = r.theta_1_se;
  j["theta_2_mean"] = r.theta_2_mean;
  j["theta_2_se"] = r.theta_2_se;
  j["samples"] = r.samples;
  j["temperature_se_converged"] = r.temperature_se_converged;
  j["theta_1_se_converged"] = r.theta_1_se_converged;
  j["theta_2_se_converged"] = r.theta_2_se_converged;
  j["zero_diffusion"] = r.zero_diffusion;
  j["temperature_ok"] = r.temperature_ok;
  j["gaussian_ok"] = r.gaussian_ok;
  j["pass"] = r.pass;
  j["diagnosis"] = r.diagnosis;
  return j.dump(2);
}

CsvTable caloric_csv(const std::vector<CaloricPoint>& pts, const std::string& id) {
  CsvTable t;
  t.manifest_id = id;
  t.header = {"epsilon", "T_kin", "T_err", "theta_1", "theta_1_err", "theta_2", "theta_2_err", "energy_drift",
              "status"};
  for (const auto& p : pts)
    t.rows.push_back({format_double(p.epsilon), format_double(p.kinetic_temperature),
                      format_double(p.kinetic_temperature_se), format_double(p.theta_1_avg),
                      format_double(p.theta_1_se), format_double(p.theta_2_avg), format_double(p.theta_2_se),
                      format_double(p.energy_drift), p.ok ? "ok" : "failed"});
  return t;
}

std::string comparison_json(const EnsembleComparison& c, const std::string& id) {
  json j;
  j["schema_version"] = kOutputSchemaVersion;
  j["manifest_id"] = id;
  j["units"] = "dimensionless";
  j["alpha_1"] = c.alpha.alpha_1;
  j["alpha_2"] = c.alpha.alpha_2;
  j["beta"] = c.beta;
  j["canonical"] = {{"phase", to_string(c.canonical.phase)},
                    {"theta_1", c.canonical.global_min.y_1},
                    {"theta_2", c.canonical.global_min.y_2},
                    {"free_energy", c.canonical.free_energy},
                    {"coexistence", c.canonical.coexistence}};
  j["epsilon"] = c.epsilon;
  j["microcanonical"] = {{"kinetic_temperature", c.micro.kinetic_temperature},
                         {"kinetic_temperature_se", c.micro.kinetic_temperature_se},
                         {"theta_1", c.micro.theta_1_avg},
                         {"theta_1_se", c.micro.theta_1_se},
                         {"theta_2", c.micro.theta_2_avg},
                         {"theta_2_se", c.micro.theta_2_se},
                         {"energy_drift", c.micro.energy_drift},
                         {"burn_in_records", c.micro.burn_in_records},
                         {"samples", c.micro.samples}};
  auto finite = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  j["sigma_1"] = finite(c.sigma_1);
  j["sigma_2"] = finite(c.sigma_2);
  j["temperature_sigma"] = finite(c.temperature_sigma);
  j["threshold_sigma"] = kDisagreeSigma;
  j["threshold_absolute"] = kDisagreeMinimum;
  j["verdict"] = c.agree ? "agree" : "disagree";
  return j.dump(2) + "\n";
}

}  // namespace selforg
