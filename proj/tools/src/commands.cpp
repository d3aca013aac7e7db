#include "commands.hpp"

#include <cstdio>
#include <limits>
#include <map>
#include <numbers>

#include "json.hpp"
#include "selforg/equilibrium.hpp"
#include "selforg/errors.hpp"
#include "selforg/langevin.hpp"
#include "selforg/microcanonical.hpp"
#include "selforg/parallel.hpp"
#include "selforg/phase_diagram.hpp"

namespace selforg::cli {

using json = nlohmann::ordered_json;

namespace {

const std::vector<KeySpec> kCavityKeys = {
    {"delta_1", "-1", "pump-cavity detuning of mode 1"},
    {"delta_2", "-1", "pump-cavity detuning of mode 2"},
    {"kappa_1", "1", "loss rate of mode 1"},
    {"kappa_2", "1", "loss rate of mode 2"},
    {"s_1", "0.1", "scattering amplitude of mode 1"},
    {"s_2", "0.1", "scattering amplitude of mode 2"},
    {"n_atoms", "100", "number of atoms"},
    {"k", "1", "optical wavenumber"},
    {"hbar", "1", "reduced Planck constant"},
    {"mass", "1", "atomic mass"},
    {"stationarity_tol", "1e-9", "relative tolerance of the equal-temperature condition"},
};

std::vector<KeySpec> with(std::vector<KeySpec> base, const std::vector<KeySpec>& more) {
  base.insert(base.end(), more.begin(), more.end());
  return base;
}

const std::vector<KeySpec> kSeed = {{"seed", "1", "random seed"}};

const std::vector<KeySpec> kLangevinKeys = with(
    with(kCavityKeys, kSeed),
    {
        {"source", "couplings", "couplings: build the cavity from alpha_1, alpha_2, beta; cavity: use delta_n, kappa_n, s_n"},
        {"alpha_1", "0.5", "coupling of the cos q mode (source = couplings)"},
        {"alpha_2", "0.5", "coupling of the cos 2q mode (source = couplings)"},
        {"beta", "1", "inverse temperature (source = couplings)"},
        {"dt", "0.005", "time step"},
        {"n_steps", "10000", "number of steps"},
        {"record_every", "10", "steps between records"},
        {"burn_in_steps", "0", "steps excluded from histogram and diagnostics"},
        {"init", "thermal", "cold_uniform | cold_nematic | thermal | canonical"},
        {"init_beta", "1", "momentum temperature of the initial state (0 = at rest)"},
        {"jitter", "0.01", "position jitter of cold_nematic"},
        {"include_eta_term", "false", "add the first-order cross-diffusion drift"},
        {"integrator", "yoshida4", "verlet | yoshida4"},
        {"momentum_bound", "1e6", "abort when |p| exceeds this"},
        {"replicas", "1", "independent trajectories with seeds seed, seed+1, ..."},
    });

const std::vector<KeySpec> kMdKeys = with(kSeed, {
    {"alpha_1", "0.5", "coupling of the cos q mode"},
    {"alpha_2", "0.5", "coupling of the cos 2q mode"},
    {"beta_ref", "1", "energy scale, gamma_n = alpha_n / beta_ref"},
    {"n_atoms", "200", "number of atoms"},
    {"dt", "0.002", "time step"},
    {"n_steps", "100000", "number of steps"},
    {"record_every", "50", "steps between records"},
    {"burn_in_records", "-1", "records discarded before averaging (-1 = adaptive)"},
    {"integrator", "yoshida4", "verlet | yoshida4"},
    {"momentum_bound", "1e6", "abort when |p| exceeds this"},
});

const std::map<std::string, std::vector<KeySpec>>& schemas() {
  static const std::map<std::string, std::vector<KeySpec>> s = {
      {"map-params", kCavityKeys},
      {"free-energy",
       {{"alpha_1", "0.5", ""},
        {"alpha_2", "0.5", ""},
        {"beta", "1", ""},
        {"y_1_min", "-1", ""},
        {"y_1_max", "1", ""},
        {"y_2_min", "-1", ""},
        {"y_2_max", "1", ""},
        {"n_y_1", "41", ""},
        {"n_y_2", "41", ""}}},
      {"fixed-points", {{"alpha_1", "0.5", ""}, {"alpha_2", "0.5", ""}, {"beta", "1", ""}}},
      {"phase-diagram",
       {{"alpha_1_min", "0", ""},
        {"alpha_1_max", "2.5", ""},
        {"alpha_2_min", "0", ""},
        {"alpha_2_max", "2.5", ""},
        {"n_1", "101", ""},
        {"n_2", "101", ""},
        {"beta", "1", ""},
        {"refine_depth", "6", "label bisections per boundary edge"},
        {"jump_factor", "5", "first-order threshold in units of the second-difference noise"},
        {"annotate", "true", "compute transition orders and boundaries"}}},
      {"langevin", kLangevinKeys},
      {"md", with(kMdKeys, {{"epsilon", "0.5", "energy per particle"}, {"replicas", "1", ""}})},
      {"caloric", with(kMdKeys, {{"epsilons", "0.25,0.5,1", "comma separated energies per particle"}})},
      {"compare-ensembles", with(kMdKeys, {{"beta", "1", "canonical inverse temperature"}})},
  };
  return s;
}

CavityParams cavity_from(const ConfigView& v) {
  CavityParams c;
  c.delta_1 = v.number("delta_1");
  c.delta_2 = v.number("delta_2");
  c.kappa_1 = v.number("kappa_1");
  c.kappa_2 = v.number("kappa_2");
  c.s_1 = v.number("s_1");
  c.s_2 = v.number("s_2");
  c.n_atoms = static_cast<int>(v.integer("n_atoms"));
  c.k = v.number("k");
  c.hbar = v.number("hbar");
  c.mass = v.number("mass");
  return c;
}

int as_int(std::int64_t x, const char* key) {
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw ValidationError(std::string("config key '") + key + "' is out of range");
  return static_cast<int>(x);
}

std::string csv(const CsvTable& t) { return to_csv(t); }

std::string replica_name(const std::string& stem, int r, int replicas, const std::string& ext) {
  if (replicas == 1) return stem + ext;
  char buf[16];
  std::snprintf(buf, sizeof buf, "_r%03d", r);
  return stem + buf + ext;
}

json config_json(const Config& c) {
  json j = json::object();
  j["schema_version"] = c.schema_version;
  for (const auto& [k, v] : c.values) j[k] = v;
  return j;
}

Outputs map_params(const Invocation& inv, const std::string& id) {
  const ConfigView v(inv.config);
  const EffectiveModel m = map_cavity_to_effective(cavity_from(v), v.number("stationarity_tol"));
  json j;
  j["manifest_id"] = id;
  j.update(json::parse(to_json(m)));
  j["ghmf_delta"] = ghmf_mapping(m.alpha_1, m.alpha_2).delta;
  j["ghmf_reduced_temperature"] = ghmf_mapping(m.alpha_1, m.alpha_2).reduced_temperature;
  j["ghmf_ambiguous"] = true;
  return {{{"effective_model.json", j.dump(2) + "\n"}}};
}

Outputs free_energy_surface(const Invocation& inv, const std::string& id) {
  const ConfigView v(inv.config);
  const Couplings a{v.number("alpha_1"), v.number("alpha_2")};
  const Thermo th{v.number("beta")};
  if (!(th.beta > 0.0)) throw ValidationError("beta must be positive");
  const int n1 = as_int(v.integer("n_y_1"), "n_y_1");
  const int n2 = as_int(v.integer("n_y_2"), "n_y_2");
  if (n1 < 2 || n2 < 2) throw ValidationError("n_y_1 and n_y_2 must be at least 2");
  const double lo1 = v.number("y_1_min"), hi1 = v.number("y_1_max");
  const double lo2 = v.number("y_2_min"), hi2 = v.number("y_2_max");
  std::vector<double> f(static_cast<std::size_t>(n1) * n2);
  parallel_for(f.size(), inv.threads, [&](std::size_t idx) {
    const int i = static_cast<int>(idx / n2), j = static_cast<int>(idx % n2);
    f[idx] = free_energy({lo1 + (hi1 - lo1) * i / (n1 - 1), lo2 + (hi2 - lo2) * j / (n2 - 1)}, a, th);
  });
  CsvTable t;
  t.manifest_id = id;
  t.header = {"y_1", "y_2", "free_energy"};
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      t.rows.push_back({format_double(lo1 + (hi1 - lo1) * i / (n1 - 1)), format_double(lo2 + (hi2 - lo2) * j / (n2 - 1)),
                        format_double(f[static_cast<std::size_t>(i) * n2 + j])});
  return {{{"free_energy.csv", csv(t)}}};
}

Outputs fixed_points(const Invocation& inv, const std::string& id) {
  const ConfigView v(inv.config);
  const Couplings a{v.number("alpha_1"), v.number("alpha_2")};
  const Thermo th{v.number("beta")};
  if (!(th.beta > 0.0)) throw ValidationError("beta must be positive");
  int dropped = 0;
  const auto pts = solve_fixed_points(a, default_seeds(), {}, &dropped);
  const PhasePoint pp = classify_phase(a, th);
  json j;
  j["schema_version"] = kOutputSchemaVersion;
  j["manifest_id"] = id;
  j["units"] = "dimensionless";
  j["alpha_1"] = a.alpha_1;
  j["alpha_2"] = a.alpha_2;
  j["beta"] = th.beta;
  j["phase"] = to_string(pp.phase);
  j["theta_1"] = pp.global_min.y_1;
  j["theta_2"] = pp.global_min.y_2;
  j["free_energy"] = pp.free_energy;
  j["coexistence"] = pp.coexistence;
  j["dropped_seeds"] = dropped;
  return {{{"fixed_points.csv", csv(fixed_points_csv(pts, id))}, {"fixed_points.json", j.dump(2) + "\n"}}};
}

Outputs phase_diagram(const Invocation& inv, const std::string& id) {
  const ConfigView v(inv.config);
  GridSpec g;
  g.alpha_1_range = {v.number("alpha_1_min"), v.number("alpha_1_max")};
  g.alpha_2_range = {v.number("alpha_2_min"), v.number("alpha_2_max")};
  g.n_1 = as_int(v.integer("n_1"), "n_1");
  g.n_2 = as_int(v.integer("n_2"), "n_2");
  g.thermo.beta = v.number("beta");
  DiagramOptions opts;
  opts.refine_depth = as_int(v.integer("refine_depth"), "refine_depth");
  opts.jump_factor = v.number("jump_factor");
  opts.annotate = v.flag("annotate");
  const PhaseDiagram d = sweep_grid(g, inv.threads, opts);
  return {{{"phase_diagram.csv", csv(phase_grid_csv(d, id))}, {"phase_diagram.json", phase_diagram_json(d, id)}}};
}

LangevinConfig langevin_config(const ConfigView& v) {
  LangevinConfig c;
  const std::string source = v.text("source");
  if (source == "couplings") {
    const int n = as_int(v.integer("n_atoms"), "n_atoms");
    c.model = map_cavity_to_effective(EffectiveModel::cavity_for(v.number("alpha_1"), v.number("alpha_2"),
                                                                 v.number("beta"), n));
  } else if (source == "cavity") {
    c.model = map_cavity_to_effective(cavity_from(v), v.number("stationarity_tol"));
  } else {
    throw ValidationError("config key 'source' must be couplings or cavity");
  }
  c.n_atoms = c.model.n_atoms;
  c.dt = v.number("dt");
  c.n_steps = v.integer("n_steps");
  c.record_every = v.integer("record_every");
  c.burn_in_steps = v.integer("burn_in_steps");
  c.init.kind = init_kind_from_string(v.text("init"));
  if (c.init.kind == InitKind::explicit_state) throw ValidationError("init = explicit is not available from a config");
  c.init.beta_0 = v.number("init_beta");
  c.init.jitter = v.number("jitter");
  c.include_eta_term = v.flag("include_eta_term");
  c.integrator = integrator_from_string(v.text("integrator"));
  c.momentum_bound = v.number("momentum_bound");
  return c;
}

Outputs langevin(const Invocation& inv, const std::string& id) {
  const ConfigView v(inv.config);
  const LangevinConfig base = langevin_config(v);
  base.validate();
  const int replicas = as_int(v.integer("replicas"), "replicas");
  if (replicas < 1) throw ValidationError("replicas must be at least 1");
  std::vector<TrajectoryRecord> records(static_cast<std::size_t>(replicas));
  parallel_for(records.size(), inv.threads, [&](std::size_t r) {
    LangevinConfig c = base;
    c.seed = inv.seed + r;
    records[r] = run_trajectory(c);
  });
  Outputs out;
  for (int r = 0; r < replicas; ++r) {
    const TrajectoryRecord& rec = records[static_cast<std::size_t>(r)];
    json head;
    head["schema_version"] = kOutputSchemaVersion;
    head["manifest_id"] = id;
    head["code_version"] = code_version();
    head["units"] = "dimensionless";
    head["seed"] = inv.seed + static_cast<std::uint64_t>(r);
    head["config"] = config_json(inv.config);
    head["model"] = json::parse(to_json(base.model));
    head["final_checksum"] = rec.checksum;
    head["warnings"] = rec.warnings;
    try {
      head["diagnostics"] = json::parse(stationarity_json(stationarity_diagnostics(rec, base.model.beta)));
    } catch (const InsufficientSamples& e) {
      head["diagnostics"] = nullptr;
      head["diagnostics_skipped"] = e.what();
    }
    out.files.push_back({replica_name("trajectory", r, replicas, ".csv"), csv(trajectory_csv(rec, id))});
    out.files.push_back(
        {replica_name("momentum_histogram", r, replicas, ".csv"), csv(histogram_csv(rec.momentum_histogram, id))});
    out.files.push_back({replica_name("trajectory", r, replicas, ".json"), head.dump(2) + "\n"});
  }
  return out;
}

MDConfig md_config(const ConfigView& v, std::uint64_t seed) {
  MDConfig c;
  c.alpha = {v.number("alpha_1"), v.number("alpha_2")};
  c.beta_ref = v.number("beta_ref");
  c.n_atoms = as_int(v.integer("n_atoms"), "n_atoms");
  c.dt = v.number("dt");
  c.n_steps = v.integer("n_steps");
  c.record_every = v.integer("record_every");
  c.burn_in_records = v.integer("burn_in_records");
  c.integrator = integrator_from_string(v.text("integrator"));
  c.momentum_bound = v.number("momentum_bound");
  c.seed = seed;
  return c;
}

Outputs md(const Invocation& inv, const std::string& id) {
  const ConfigView v(inv.config);
  MDConfig base = md_config(v, inv.seed);
  base.energy_per_particle = v.number("epsilon");
  base.validate();
  const int replicas = as_int(v.integer("replicas"), "replicas");
  if (replicas < 1) throw ValidationError("replicas must be at least 1");
  std::vector<TrajectoryRecord> records(static_cast<std::size_t>(replicas));
  parallel_for(records.size(), inv.threads, [&](std::size_t r) {
    MDConfig c = base;
    c.seed = inv.seed + r;
    records[r] = run_md(c);
  });
  Outputs out;
  for (int r = 0; r < replicas; ++r) {
    const TrajectoryRecord& rec = records[static_cast<std::size_t>(r)];
    json head;
    head["schema_version"] = kOutputSchemaVersion;
    head["manifest_id"] = id;
    head["code_version"] = code_version();
    head["units"] = "dimensionless";
    head["seed"] = inv.seed + static_cast<std::uint64_t>(r);
    head["config"] = config_json(inv.config);
    head["final_checksum"] = rec.checksum;
    head["energy_drift"] = relative_energy_drift(rec);
    head["burn_in_records"] = rec.burn_in_records;
    out.files.push_back({replica_name("md_trajectory", r, replicas, ".csv"), csv(trajectory_csv(rec, id))});
    out.files.push_back({replica_name("md_trajectory", r, replicas, ".json"), head.dump(2) + "\n"});
  }
  return out;
}

Outputs caloric(const Invocation& inv, const std::string& id) {
  const ConfigView v(inv.config);
  const MDConfig base = md_config(v, inv.seed);
  const auto eps = v.numbers("epsilons");
  if (eps.empty()) throw ValidationError("config key 'epsilons' needs at least one value");
  const auto pts = caloric_curve(eps, base, inv.threads);
  return {{{"caloric.csv", csv(caloric_csv(pts, id))}}};
}

Outputs compare(const Invocation& inv, const std::string& id) {
  const ConfigView v(inv.config);
  const MDConfig base = md_config(v, inv.seed);
  const EnsembleComparison c = ensemble_compare(base.alpha, v.number("beta"), base);
  return {{{"comparison.json", comparison_json(c, id)}}};
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names = {"map-params", "free-energy", "fixed-points", "phase-diagram",
                                                 "langevin",   "md",          "caloric",      "compare-ensembles"};
  return names;
}

const std::vector<KeySpec>& schema_for(const std::string& sub) {
  const auto it = schemas().find(sub);
  if (it == schemas().end()) throw ValidationError("unknown subcommand '" + sub + "'");
  return it->second;
}

Outputs run_command(const Invocation& inv, const std::string& id) {
  const std::string& s = inv.subcommand;
  if (s == "map-params") return map_params(inv, id);
  if (s == "free-energy") return free_energy_surface(inv, id);
  if (s == "fixed-points") return fixed_points(inv, id);
  if (s == "phase-diagram") return phase_diagram(inv, id);
  if (s == "langevin") return langevin(inv, id);
  if (s == "md") return md(inv, id);
  if (s == "caloric") return caloric(inv, id);
  if (s == "compare-ensembles") return compare(inv, id);
  throw ValidationError("unknown subcommand '" + s + "'");
}

}  // namespace selforg::cli
