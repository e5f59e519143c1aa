#include "core/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "core/errors.hpp"

namespace ks1d {

namespace {

[[noreturn]] void config_error(const std::string& where, const std::string& what) {
  fail(ErrorCode::Config, where + ": " + what);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& text, const std::string& where) {
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(begin, &end);
  if (text.empty() || end != begin + text.size() || errno == ERANGE || !std::isfinite(x))
    config_error(where, "value of '" + key + "' is not a finite number: '" + text + "'");
  return x;
}

std::uint64_t parse_count(const std::string& key, const std::string& text, const std::string& where) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
    config_error(where, "value of '" + key + "' is not a nonnegative integer: '" + text + "'");
  errno = 0;
  const unsigned long long x = std::strtoull(text.c_str(), nullptr, 10);
  if (errno == ERANGE) config_error(where, "value of '" + key + "' is out of range");
  return x;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

using Check = std::function<bool(double)>;

void range(const std::string& key, double x, const Check& ok, const char* rule, const std::string& where) {
  if (!ok(x)) config_error(where, "value " + fmt(x) + " of '" + key + "' out of range (" + rule + ")");
}

struct Field {
  const char* name;
  bool numeric;
  std::function<void(ScenarioConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

#define KS_REAL(member, check, rule)                                                             \
  Field {                                                                                        \
    #member, true,                                                                               \
        [](ScenarioConfig& c, const std::string& v, const std::string& w) {                      \
          const double x = parse_real(#member, v, w);                                            \
          range(#member, x, check, rule, w);                                                     \
          c.member = x;                                                                          \
        },                                                                                       \
        [](const ScenarioConfig& c) { return fmt(c.member); }                                    \
  }

#define KS_AUTO(member, check, rule)                                                             \
  Field {                                                                                        \
    #member, true,                                                                               \
        [](ScenarioConfig& c, const std::string& v, const std::string& w) {                      \
          if (v == "auto") {                                                                     \
            c.member.reset();                                                                    \
            return;                                                                              \
          }                                                                                      \
          const double x = parse_real(#member, v, w);                                            \
          range(#member, x, check, rule, w);                                                     \
          c.member = x;                                                                          \
        },                                                                                       \
        [](const ScenarioConfig& c) { return c.member ? fmt(*c.member) : std::string("auto"); } \
  }

#define KS_COUNT(member, lo)                                                                     \
  Field {                                                                                        \
    #member, true,                                                                               \
        [](ScenarioConfig& c, const std::string& v, const std::string& w) {                      \
          const auto x = parse_count(#member, v, w);                                             \
          if (static_cast<long double>(x) < (lo)) config_error(w, "value of '" #member "' must be >= " #lo);               \
          c.member = static_cast<decltype(c.member)>(x);                                         \
        },                                                                                       \
        [](const ScenarioConfig& c) { return std::to_string(c.member); }                         \
  }

#define KS_TEXT(member, allowed)                                                                 \
  Field {                                                                                        \
    #member, false,                                                                              \
        [](ScenarioConfig& c, const std::string& v, const std::string& w) {                      \
          const std::vector<std::string> opts = allowed;                                         \
          if (!opts.empty() && std::find(opts.begin(), opts.end(), v) == opts.end())             \
            config_error(w, "'" + v + "' is not a valid value for '" #member "'");               \
          c.member = v;                                                                          \
        },                                                                                       \
        [](const ScenarioConfig& c) { return c.member; }                                         \
  }

#define KS_LIST(...) std::vector<std::string>{__VA_ARGS__}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      KS_TEXT(scenario, KS_LIST("subcritical", "critical", "blowup", "threshold-scan", "certificate",
                                "inequalities", "custom")),
      KS_COUNT(n_cells, 4),
      KS_REAL(t_end, [](double x) { return x >= 0.0; }, ">= 0"),
      KS_REAL(chi, [](double x) { return x >= 0.0; }, ">= 0"),
      KS_AUTO(eps, [](double x) { return x > 0.0; }, "> 0 or auto"),
      KS_REAL(D, [](double x) { return x > 0.0; }, "> 0"),
      KS_REAL(gamma, [](double) { return true; }, "finite"),
      KS_AUTO(alpha, [](double x) { return x >= 0.0; }, ">= 0"),
      KS_TEXT(diffusion_table, KS_LIST()),
      KS_REAL(q, [](double x) { return x > 2.0; }, "> 2"),
      KS_AUTO(mass, [](double x) { return x > 0.0; }, "> 0 or auto"),
      KS_TEXT(initial, KS_LIST("constant", "eq60", "file")),
      KS_REAL(perturbation, [](double x) { return x >= 0.0 && x <= 1.0; }, "in [0, 1]"),
      KS_TEXT(initial_file, KS_LIST()),
      KS_REAL(dt_init, [](double x) { return x > 0.0; }, "> 0"),
      KS_REAL(dt_min, [](double x) { return x > 0.0; }, "> 0"),
      KS_REAL(dt_max, [](double x) { return x > 0.0; }, "> 0"),
      KS_REAL(cfl_safety, [](double x) { return x > 0.0 && x <= 1.0; }, "in (0, 1]"),
      KS_REAL(growth_cap, [](double x) { return x > 0.0; }, "> 0"),
      KS_COUNT(max_steps, 1),
      KS_REAL(blowup_threshold, [](double x) { return x > 0.0; }, "> 0"),
      KS_COUNT(blowup_rejections, 1),
      KS_REAL(blowup_mass_fraction, [](double x) { return x >= 0.0 && x <= 1.0; }, "in [0, 1]"),
      KS_REAL(sample_cadence, [](double x) { return x > 0.0; }, "> 0"),
      KS_REAL(c_tol, [](double x) { return x >= 0.0; }, ">= 0"),
      KS_REAL(phi_u_max_cap, [](double x) { return x > 0.0; }, "> 0"),
      KS_REAL(search_min, [](double x) { return x > 1.0; }, "> 1"),
      KS_REAL(search_max, [](double x) { return x > 1.0; }, "> 1"),
      KS_TEXT(suite, KS_LIST("prop5", "prop6", "sobolev", "lemma4", "cor4", "all")),
      KS_REAL(delta, [](double x) { return x > 0.0; }, "> 0"),
      KS_COUNT(samples, 1),
      KS_COUNT(seed, 0),
      KS_TEXT(output_dir, KS_LIST()),
  };
  return table;
}

const Field* find_field(const std::string& key) {
  for (const auto& f : fields())
    if (key == f.name) return &f;
  return nullptr;
}

}  // namespace

ScenarioConfig scenario_defaults(const std::string& scenario) {
  ScenarioConfig c;
  c.scenario = scenario;
  if (scenario == "subcritical" || scenario == "custom") {
    // base defaults
  } else if (scenario == "critical") {
    c.alpha = 1.0;
    c.mass = 0.9;
    c.t_end = 50.0;
  } else if (scenario == "blowup") {
    c.alpha = 2.0;
    c.mass.reset();
    c.eps.reset();
    c.initial = "eq60";
    c.n_cells = 1024;
    c.t_end = 1.0;
    c.sample_cadence = 1e-4;
    c.dt_init = 1e-8;
    c.dt_max = 1e-4;
  } else if (scenario == "threshold-scan" || scenario == "certificate") {
    c.alpha = 2.0;
    c.mass.reset();
    c.eps.reset();
    c.initial = "eq60";
    c.n_cells = 512;
  } else if (scenario == "inequalities") {
  } else {
    fail(ErrorCode::Config, "unknown scenario '" + scenario + "'");
  }
  return c;
}

void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value, const std::string& where) {
  const Field* f = find_field(key);
  if (!f) config_error(where, "unknown key '" + key + "'");
  f->set(cfg, value, where);
  if (key == "diffusion_table" && !value.empty()) cfg.alpha.reset();
}

bool is_numeric_key(const std::string& key) {
  const Field* f = find_field(key);
  return f && f->numeric;
}

void validate_config(const ScenarioConfig& c) {
  const std::string w = "config";
  if (!(c.dt_min <= c.dt_init && c.dt_init <= c.dt_max))
    config_error(w, "need dt_min <= dt_init <= dt_max");
  if (!(c.search_min < c.search_max)) config_error(w, "need search_min < search_max");
  if (c.scenario == "inequalities") return;
  if (c.alpha && !c.diffusion_table.empty()) config_error(w, "set either alpha or diffusion_table, not both");
  if (!c.alpha && c.diffusion_table.empty()) config_error(w, "missing required key 'alpha' (or 'diffusion_table')");
  if (c.initial == "file" && c.initial_file.empty()) config_error(w, "initial = file needs 'initial_file'");
  const bool sim = c.scenario == "subcritical" || c.scenario == "critical" || c.scenario == "custom";
  if (sim && !c.mass) config_error(w, "scenario '" + c.scenario + "' needs an explicit 'mass'");
  if (sim && !c.eps) config_error(w, "eps = auto is only available for blowup and certificate scenarios");
  if ((c.scenario == "blowup" || c.scenario == "certificate" || c.scenario == "threshold-scan") && !(c.q > 4.0))
    config_error(w, "certificate scenarios need q > 4");
  if (c.scenario == "blowup" && c.initial != "eq60" && !c.mass)
    config_error(w, "mass = auto requires initial = eq60");
}

ScenarioConfig parse_config(const std::string& text) {
  struct Entry {
    std::string value;
    std::size_t line;
  };
  std::vector<std::pair<std::string, Entry>> entries;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    const std::string where = "line " + std::to_string(line);
    if (eq == std::string::npos) config_error(where, "expected 'key = value', got '" + s + "'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) config_error(where, "empty key");
    if (!find_field(key)) config_error(where, "unknown key '" + key + "'");
    for (const auto& e : entries)
      if (e.first == key)
        config_error(where, "duplicate key '" + key + "' (first set on line " + std::to_string(e.second.line) + ")");
    entries.push_back({key, {value, line}});
  }
  const auto sc = std::find_if(entries.begin(), entries.end(), [](const auto& e) { return e.first == "scenario"; });
  if (sc == entries.end()) config_error("line " + std::to_string(line + 1) + " (end of input)", "missing required key 'scenario'");
  ScenarioConfig tmp;
  apply_setting(tmp, "scenario", sc->second.value, "line " + std::to_string(sc->second.line));
  ScenarioConfig cfg = scenario_defaults(tmp.scenario);
  for (const auto& [key, e] : entries) apply_setting(cfg, key, e.value, "line " + std::to_string(e.line));
  validate_config(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::pair<std::string, std::string>> config_entries(const ScenarioConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) {
    if (std::string(f.name) == "alpha" && !cfg.alpha && !cfg.diffusion_table.empty()) continue;
    out.emplace_back(f.name, f.get(cfg));
  }
  return out;
}

std::string to_text(const ScenarioConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : config_entries(cfg))
    if (!v.empty()) out += k + " = " + v + "\n";
  return out;
}

}  // namespace ks1d
