#include "ks1d/ks1d.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include "json.hpp"

#include "core/certificate.hpp"
#include "core/config.hpp"
#include "core/errors.hpp"
#include "core/experiments.hpp"
#include "core/inequality_lab.hpp"

struct ks1d_config {
  ks1d::ScenarioConfig cfg;
};

struct ks1d_model {
  ks1d::DiffusionModel model;
};

namespace {

thread_local std::string g_last_error;

ks1d_status set_error(ks1d_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
ks1d_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return KS1D_OK;
  } catch (const ks1d::Error& e) {
    return set_error(static_cast<ks1d_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(KS1D_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(KS1D_ERR_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

#define KS1D_REQUIRE(ptr)                                                   \
  do {                                                                      \
    if (!(ptr)) return set_error(KS1D_ERR_NULL_ARGUMENT, #ptr " is NULL"); \
  } while (0)

}  // namespace

extern "C" {

const char* ks1d_version(void) { return "0.1.0"; }

const char* ks1d_last_error(void) { return g_last_error.c_str(); }

const char* ks1d_status_name(ks1d_status status) {
  switch (status) {
    case KS1D_OK: return "ok";
    case KS1D_ERR_NULL_ARGUMENT: return "null-argument";
    default:
      if (status >= KS1D_ERR_INPUT_DOMAIN && status <= KS1D_ERR_INTERNAL)
        return ks1d::to_string(static_cast<ks1d::ErrorCode>(static_cast<int>(status)));
      return "unknown";
  }
}

void ks1d_string_free(char* s) { std::free(s); }

ks1d_status ks1d_config_parse(const char* text, ks1d_config** out) {
  KS1D_REQUIRE(text);
  KS1D_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new ks1d_config{ks1d::parse_config(text)}; });
}

ks1d_status ks1d_config_load(const char* path, ks1d_config** out) {
  KS1D_REQUIRE(path);
  KS1D_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new ks1d_config{ks1d::load_config(path)}; });
}

ks1d_status ks1d_config_set(ks1d_config* cfg, const char* key, const char* value) {
  KS1D_REQUIRE(cfg);
  KS1D_REQUIRE(key);
  KS1D_REQUIRE(value);
  return guarded([&] {
    ks1d::ScenarioConfig next = cfg->cfg;
    ks1d::apply_setting(next, key, value, std::string("key '") + key + "'");
    cfg->cfg = next;
  });
}

ks1d_status ks1d_config_to_text(const ks1d_config* cfg, char** out) {
  KS1D_REQUIRE(cfg);
  KS1D_REQUIRE(out);
  return guarded([&] { *out = dup_string(ks1d::to_text(cfg->cfg)); });
}

void ks1d_config_free(ks1d_config* cfg) { delete cfg; }

ks1d_status ks1d_model_power_law(double alpha, ks1d_model** out) {
  KS1D_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new ks1d_model{ks1d::DiffusionModel::power_law(alpha)}; });
}

ks1d_status ks1d_model_load_table(const char* path, ks1d_model** out) {
  KS1D_REQUIRE(path);
  KS1D_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new ks1d_model{ks1d::DiffusionModel::load_csv(path)}; });
}

ks1d_status ks1d_model_eval(const ks1d_model* model, double u, double* out) {
  KS1D_REQUIRE(model);
  KS1D_REQUIRE(out);
  return guarded([&] { *out = ks1d::diffusion_eval(model->model, u); });
}

ks1d_status ks1d_model_tail_mass(const ks1d_model* model, double r, double* out) {
  KS1D_REQUIRE(model);
  KS1D_REQUIRE(out);
  return guarded([&] { *out = ks1d::diffusion_tail_mass(model->model, r); });
}

void ks1d_model_free(ks1d_model* model) { delete model; }

ks1d_status ks1d_run_scenario(const ks1d_config* cfg, int* exit_code, char** summary_json) {
  KS1D_REQUIRE(cfg);
  return guarded([&] {
    const ks1d::RunSummary s = ks1d::run_scenario(cfg->cfg);
    if (exit_code) *exit_code = s.exit_code;
    if (summary_json) *summary_json = dup_string(ks1d::to_json(s, cfg->cfg));
  });
}

ks1d_status ks1d_certify(const ks1d_model* model, double q, double mass, double eps, size_t base_cells,
                         char** report_json) {
  KS1D_REQUIRE(model);
  KS1D_REQUIRE(report_json);
  return guarded([&] {
    const std::size_t n = ks1d::threshold_grid_cells(mass, base_cells ? base_cells : 512);
    const ks1d::EntropyProfile profile(model->model, ks1d::entropy_options_for(mass, n));
    std::optional<double> e;
    if (eps > 0.0) e = eps;
    const auto rep = ks1d::certify(mass, q, model->model, profile, ks1d::GridSpec(n), e);
    *report_json = dup_string(ks1d::to_json(rep));
  });
}

ks1d_status ks1d_search_threshold(const ks1d_model* model, double q, double m_min, double m_max,
                                  size_t base_cells, char** result_json) {
  KS1D_REQUIRE(model);
  KS1D_REQUIRE(result_json);
  return guarded([&] {
    const std::size_t base = base_cells ? base_cells : 512;
    const auto res = ks1d::threshold_search(model->model, q, m_min, m_max, base);
    nlohmann::json j{{"found", res.found},
                     {"M0", res.M0},
                     {"lower", res.lower},
                     {"A_at_M_min", res.A_min},
                     {"A_at_M_max", res.A_max},
                     {"monotone_validated", res.monotone_validated}};
    if (res.found) {
      const std::size_t n = ks1d::threshold_grid_cells(res.M0, base);
      const ks1d::EntropyProfile profile(model->model, ks1d::entropy_options_for(res.M0, n));
      auto rep = ks1d::certify(res.M0, q, model->model, profile, ks1d::GridSpec(n));
      rep.M0_search_trace = res.trace;
      j["certificate"] = nlohmann::json::parse(ks1d::to_json(rep));
    } else {
      nlohmann::json tr = nlohmann::json::array();
      for (const auto& p : res.trace) tr.push_back({{"M", p.M}, {"A", p.A}, {"certified", p.certified}});
      j["M0_search_trace"] = tr;
    }
    *result_json = dup_string(j.dump(2));
  });
}

ks1d_status ks1d_inequalities(const char* suite, double delta, uint64_t seed, const char* csv_path,
                              size_t* violations, char** summary_json) {
  KS1D_REQUIRE(suite);
  return guarded([&] {
    ks1d::SuiteOptions o;
    o.suite = suite;
    o.seed = seed;
    if (delta > 0.0) o.delta = delta;
    const auto res = ks1d::run_inequality_suite(o);
    if (csv_path) {
      std::ofstream out(csv_path, std::ios::binary);
      if (!out) ks1d::fail(ks1d::ErrorCode::Io, std::string("cannot write '") + csv_path + "'");
      ks1d::write_suite_csv(out, res);
    }
    if (violations) *violations = res.violations;
    if (summary_json) {
      nlohmann::json j{{"suite", o.suite}, {"seed", o.seed}, {"rows", res.rows.size()},
                       {"violations", res.violations}};
      if (!res.lemma4.rows.empty())
        j["lemma4"] = {{"delta", o.delta},
                       {"violated", res.lemma4.violated},
                       {"fitted_exponent", res.lemma4.fitted_exponent}};
      *summary_json = dup_string(j.dump(2));
    }
  });
}

ks1d_status ks1d_sweep(const ks1d_config* base, const char* key, const char* const* values, size_t n_values,
                       unsigned jobs, char** index_json) {
  KS1D_REQUIRE(base);
  KS1D_REQUIRE(key);
  if (n_values) KS1D_REQUIRE(values);
  return guarded([&] {
    std::vector<std::string> vals;
    for (size_t i = 0; i < n_values; ++i) {
      if (!values[i]) ks1d::fail(ks1d::ErrorCode::InputDomain, "axis value is NULL");
      vals.emplace_back(values[i]);
    }
    const auto res = ks1d::sweep(base->cfg, key, vals, jobs);
    if (index_json) {
      std::ifstream in(res.index_path);
      std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      *index_json = dup_string(text);
    }
  });
}

ks1d_status ks1d_critical_mass_threshold(double chi, double* out) {
  KS1D_REQUIRE(out);
  return guarded([&] { *out = ks1d::critical_mass_threshold(chi); });
}

}  // extern "C"
