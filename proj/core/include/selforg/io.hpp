#pragma once

// Configuration files, run manifests and the CSV/JSON emitters.
//
// Config format: one `key = value` per line, `#` starts a comment line,
// blank lines are ignored. `schema_version` is required and must equal
// kConfigSchemaVersion. Keys are unique.
//
// CSV format: first line `# manifest_id=<id>`, then a header row, then data
// rows; comma separated, '\n' line ends, numbers with 17 significant digits.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "selforg/langevin.hpp"
#include "selforg/microcanonical.hpp"
#include "selforg/phase_diagram.hpp"

namespace selforg {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kOutputSchemaVersion = 1;

/// Library version, recorded in every manifest.
std::string code_version();

/// File-system failure, reported with the offending path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 17 significant digits ("%.17g"), which reads back to the same double.
std::string format_double(double x);
/// Whole-string parse; throws ValidationError on trailing text or overflow.
double parse_double(const std::string& text);
std::int64_t parse_int(const std::string& text);
std::uint64_t parse_uint(const std::string& text);
bool parse_bool(const std::string& text);

struct Config {
  int schema_version = kConfigSchemaVersion;
  std::map<std::string, std::string> values;
  bool operator==(const Config&) const = default;
};

Config parse_config(const std::string& text);
std::string serialize_config(const Config& config);

/// Applies `key=value` overrides (as given on the command line).
void apply_overrides(Config& config, const std::vector<std::string>& assignments);

struct KeySpec {
  std::string name;
  std::string default_value;
  std::string help;
};

/// Every key of `schema` with the config's value or the default. Unknown
/// keys in `config` are a ValidationError.
Config resolve_config(const Config& config, const std::vector<KeySpec>& schema);

/// Typed access to a resolved config; every failure names the key.
class ConfigView {
 public:
  explicit ConfigView(const Config& config) : config_(config) {}
  const std::string& text(const std::string& key) const;
  double number(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  std::uint64_t unsigned_integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;  ///< comma separated

 private:
  const Config& config_;
};

struct RunManifest {
  std::string id;
  std::string subcommand;
  Config config;
  std::string code_version;
  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<std::string> outputs;
  std::map<std::string, std::string> checksums;  ///< output file name -> FNV-1a digest
  double wall_seconds = 0.0;
};

/// Deterministic identifier of (subcommand, config, code version, seed).
/// The worker count is deliberately excluded.
std::string manifest_id(const std::string& subcommand, const Config& config, const std::string& code_version,
                        std::uint64_t seed);

std::string manifest_to_json(const RunManifest& manifest);

/// FNV-1a 64-bit digest of a byte string, 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// Writes through a temporary file in the same directory and renames it into
/// place; the temporary is removed on failure.
void write_file_atomic(const std::string& path, const std::string& content);
/// Appends one line; manifests are never rewritten.
void append_line(const std::string& path, const std::string& line);
std::string read_file(const std::string& path);

struct CsvTable {
  std::string manifest_id;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  bool operator==(const CsvTable&) const = default;
};

std::string to_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);

// Domain emitters. JSON documents carry "schema_version" and, where they hold
// physical quantities, a "units" tag.

std::string to_json(const EffectiveModel& model);
std::string to_json(const CavityParams& cavity);

CsvTable fixed_points_csv(const std::vector<FixedPoint>& points, const std::string& manifest_id);

/// One row per grid point: alpha_1, alpha_2, phase, theta_1, theta_2, free_energy.
CsvTable phase_grid_csv(const PhaseDiagram& diagram, const std::string& manifest_id);
/// Grid spec, overlays, transitions, boundaries and triple cells.
std::string phase_diagram_json(const PhaseDiagram& diagram, const std::string& manifest_id);
/// Rebuilds the emitted parts of a diagram; fields not emitted stay default.
PhaseDiagram phase_diagram_from_outputs(const CsvTable& grid, const std::string& json);

CsvTable trajectory_csv(const TrajectoryRecord& record, const std::string& manifest_id);
CsvTable histogram_csv(const Histogram& histogram, const std::string& manifest_id);
std::string stationarity_json(const StationarityReport& report);

CsvTable caloric_csv(const std::vector<CaloricPoint>& points, const std::string& manifest_id);
std::string comparison_json(const EnsembleComparison& comparison, const std::string& manifest_id);

}  // namespace selforg
