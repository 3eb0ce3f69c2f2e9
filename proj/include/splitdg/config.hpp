#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "splitdg/benchmarks.hpp"

namespace splitdg {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class ConfigType { string_type, int_type, real_type, bool_type, enum_type, real_list, int_list };

struct ConfigKeyInfo {
  std::string name;
  std::string section;
  ConfigType type;
  std::string default_value;
  std::string description;
  std::vector<std::string> enum_values;
};

/// The single source of truth for every config key the code reads.
const std::vector<ConfigKeyInfo>& config_registry();
const ConfigKeyInfo* find_config_key(const std::string& name);
std::string config_reference_markdown();

/// Raw parsed key=value data (sections are cosmetic). Unknown keys are
/// rejected at parse time with their location.
class ConfigMap {
 public:
  static ConfigMap from_file(const std::string& path);
  static ConfigMap from_string(const std::string& text, const std::string& origin = "<string>");
  void apply_override(const std::string& key_equals_value);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get_string(const std::string& key) const;
  long get_int(const std::string& key) const;
  double get_real(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_real_list(const std::string& key) const;
  std::vector<long> get_int_list(const std::string& key) const;

  std::string canonical() const;  // sorted key=value lines, for hashing

 private:
  std::string raw(const std::string& key) const;
  std::string location(const std::string& key) const;
  std::map<std::string, std::string> values_;
  std::map<std::string, std::string> locations_;
  std::string origin_;
};

enum class RunMode {
  single,
  temporal_study,
  spatial_study,
  tgv3d_diagnostics,
  equivalence_check,
  verify
};

/// Fully validated run configuration (parse-validate-freeze).
struct RunConfig {
  RunMode mode = RunMode::single;
  std::string problem = "tgv2d";
  double viscosity = 0.025;
  std::string output_dir = ".";
  int threads = 1;
  int sampling_stride = 1;
  bool verbose_logging = false;
  unsigned seed = 7;

  MeshSpec mesh;
  bool mesh_bounds_set = false;  // else problem defaults apply
  int velocity_degree = 4;

  SchemeConfig scheme;
  double end_time = 1.0;
  double dt = 0.0;   // 0: use cfl
  double cfl = 0.4;

  std::vector<double> dt_sweep;
  std::vector<long> mesh_sweep;

  std::string config_digest;  // hash of the canonical key=value data

  static RunConfig load(const std::string& path, const std::vector<std::string>& overrides);
  static RunConfig from_map(ConfigMap map);
};

}  // namespace splitdg
