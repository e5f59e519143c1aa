#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ks1d {

/// Flat `key = value` scenario description. Optional numeric fields left
/// empty mean "auto" (derived at run time).
struct ScenarioConfig {
  std::string scenario;  // subcritical | critical | blowup | threshold-scan | certificate | inequalities | custom
  std::size_t n_cells = 256;
  double t_end = 20.0;
  double chi = 1.0;
  std::optional<double> eps = 1.0;  // empty: M^{1-q}
  double D = 1.0;
  double gamma = 0.0;
  std::optional<double> alpha = 0.5;
  std::string diffusion_table;  // CSV path; replaces alpha when set
  double q = 5.0;
  std::optional<double> mass = 3.0;  // empty: threshold search
  std::string initial = "constant";  // constant | eq60 | file
  double perturbation = 0.5;         // constant preset: u0 = M(1 + p cos(pi x))
  std::string initial_file;          // CSV with header u,v
  double dt_init = 1e-4;
  double dt_min = 1e-12;
  double dt_max = 1e-2;
  double cfl_safety = 0.4;
  double growth_cap = 0.1;
  std::size_t max_steps = 50'000'000;
  double blowup_threshold = 1e8;
  std::size_t blowup_rejections = 5;
  double blowup_mass_fraction = 0.0;  // 0 disables
  double sample_cadence = 0.05;
  double c_tol = 10.0;
  double phi_u_max_cap = 1e3;
  double search_min = 1.5;
  double search_max = 1e4;
  std::string suite = "all";
  double delta = 1.0 / 24.0;
  std::size_t samples = 1000;
  std::uint64_t seed = 12345;
  std::string output_dir = "ks1d_out";
};

/// Parses key = value lines (# comments, blank lines allowed). `scenario` is
/// required and selects the preset defaults; the remaining keys override them.
/// Throws Config with the offending line number for unknown keys, duplicate
/// keys, malformed or out-of-range values, and missing required keys.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// Preset defaults for a scenario name (Config error when unknown).
ScenarioConfig scenario_defaults(const std::string& scenario);

/// Sets one key from its text form, as parse_config would. `where` prefixes
/// error messages.
void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value,
                   const std::string& where);
/// Cross-field checks (dt ordering, alpha vs table, scenario requirements).
void validate_config(const ScenarioConfig& cfg);

/// Canonical key/value echo in a fixed order (round-trips through parse_config).
std::vector<std::pair<std::string, std::string>> config_entries(const ScenarioConfig& cfg);
std::string to_text(const ScenarioConfig& cfg);

bool is_numeric_key(const std::string& key);

}  // namespace ks1d
