#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "selforg/errors.hpp"

namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

bool has_key(const std::vector<selforg::KeySpec>& schema, const std::string& key) {
  for (const auto& k : schema)
    if (k.name == key) return true;
  return false;
}

int run(const std::string& sub, const std::string& config_path, const std::vector<std::string>& sets,
        const std::string& seed_text, const std::string& out_dir, int threads, bool print_config) {
  using namespace selforg;
  const auto& schema = cli::schema_for(sub);
  Config raw;
  if (!config_path.empty()) raw = parse_config(read_file(config_path));
  apply_overrides(raw, sets);
  if (!seed_text.empty()) {
    if (!has_key(schema, "seed")) throw ValidationError("--seed is not used by " + sub);
    raw.values["seed"] = seed_text;
  }
  cli::Invocation inv;
  inv.subcommand = sub;
  inv.config = resolve_config(raw, schema);
  if (print_config) {
    std::cout << serialize_config(inv.config);
    return 0;
  }
  inv.seed = has_key(schema, "seed") ? ConfigView(inv.config).unsigned_integer("seed") : 0;
  if (threads < 1) throw ValidationError("--threads must be at least 1");
  inv.threads = threads;
  inv.out_dir = out_dir;

  const auto start = std::chrono::steady_clock::now();
  RunManifest m;
  m.subcommand = sub;
  m.config = inv.config;
  m.code_version = code_version();
  m.seed = inv.seed;
  m.threads = threads;
  m.id = manifest_id(sub, inv.config, m.code_version, inv.seed);

  const cli::Outputs out = cli::run_command(inv, m.id);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
  for (const auto& [name, content] : out.files) {
    write_file_atomic((std::filesystem::path(out_dir) / name).string(), content);
    m.outputs.push_back(name);
    m.checksums[name] = fnv1a_hex(content);
  }
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  append_line((std::filesystem::path(out_dir) / "manifests.jsonl").string(), manifest_to_json(m));
  for (const auto& [name, content] : out.files) std::cout << (std::filesystem::path(out_dir) / name).string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-field thermodynamics and dynamics of atoms self-organizing in two crossed cavities"};
  app.require_subcommand(1);
  app.set_version_flag("--version", selforg::code_version());

  std::string config_path;
  std::vector<std::string> sets;
  std::string seed_text;
  std::string out_dir = env_or("SELFORG_OUT_DIR", ".");
  int threads = 1;
  try {
    threads = std::stoi(env_or("SELFORG_THREADS", "1"));
  } catch (const std::exception&) {
    std::cerr << "error: SELFORG_THREADS is not an integer\n";
    return 1;
  }
  bool print_config = false;

  app.add_option("-c,--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("-s,--set", sets, "override one key, key=value (repeatable)");
  app.add_option("--seed", seed_text, "random seed (stochastic subcommands)");
  app.add_option("-o,--out", out_dir, "output directory (env SELFORG_OUT_DIR)");
  app.add_option("-j,--threads", threads, "worker threads (env SELFORG_THREADS)");
  app.add_flag("--print-config", print_config, "print the resolved config and exit");

  const std::map<std::string, std::string> help = {
      {"map-params", "map cavity parameters onto couplings and temperature"},
      {"free-energy", "tabulate the free energy over (y_1, y_2)"},
      {"fixed-points", "all self-consistent solutions at one coupling"},
      {"phase-diagram", "sweep the phase over an (alpha_1, alpha_2) grid"},
      {"langevin", "N-atom Langevin trajectory"},
      {"md", "microcanonical N-atom trajectory"},
      {"caloric", "kinetic temperature and order parameters versus energy"},
      {"compare-ensembles", "canonical minimum against microcanonical dynamics at its energy"},
  };
  for (const auto& name : selforg::cli::subcommand_names()) {
    auto* sc = app.add_subcommand(name, help.at(name));
    sc->fallthrough();
    std::string keys = "config keys:\n";
    for (const auto& k : selforg::cli::schema_for(name))
      keys += "  " + k.name + " (default " + k.default_value + ")" + (k.help.empty() ? "" : ": " + k.help) + "\n";
    sc->footer(keys);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    return run(sub, config_path, sets, seed_text, out_dir, threads, print_config);
  } catch (const selforg::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const selforg::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const selforg::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
