// ks1d command-line front end (links the C API only).
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ks1d/ks1d.h"

namespace {

int report_failure(ks1d_status st) {
  std::fprintf(stderr, "ks1d: %s: %s\n", ks1d_status_name(st), ks1d_last_error());
  return 1;
}

void emit(char* text, const std::string& path) {
  if (path.empty()) {
    std::printf("%s\n", text);
  } else {
    std::ofstream out(path, std::ios::binary);
    out << text << "\n";
  }
  ks1d_string_free(text);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  return out;
}

int exit_from_index(const std::string& text) {
  // 1 if any run errored, else 2 if any flagged violations, else 0.
  int code = 0;
  std::size_t pos = 0;
  const std::string tag = "\"exit_code\": ";
  while ((pos = text.find(tag, pos)) != std::string::npos) {
    pos += tag.size();
    const int c = std::atoi(text.c_str() + pos);
    if (c == 1) return 1;
    if (c == 2) code = 2;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ks1d: 1D quasilinear Keller-Segel experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ks1d_version()));

  auto* run = app.add_subcommand("run", "Run a scenario from a config file");
  std::string config_path, run_out;
  run->add_option("--config", config_path, "Scenario config (key = value)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", run_out, "Override output_dir");

  auto* cert = app.add_subcommand("certify", "Blowup certificate / mass threshold search");
  double alpha = 0.0, q = 5.0, mass = 0.0, eps = 0.0;
  std::string table, search, out_path;
  std::size_t base_cells = 512;
  auto* alpha_opt = cert->add_option("--alpha", alpha, "Power-law exponent: a(u) = (1+u)^-alpha");
  auto* table_opt = cert->add_option("--table", table, "Tabulated diffusion CSV")->check(CLI::ExistingFile);
  alpha_opt->excludes(table_opt);
  cert->add_option("--q", q, "Moment exponent (> 4)")->required();
  auto* mass_opt = cert->add_option("--mass", mass, "Mass M (> 1)");
  auto* search_opt = cert->add_option("--search", search, "Search range min:max");
  mass_opt->excludes(search_opt);
  cert->add_option("--eps", eps, "Override eps (default M^(1-q))");
  cert->add_option("--base-cells", base_cells, "Minimum grid size")->capture_default_str();
  cert->add_option("--out", out_path, "Write JSON here instead of stdout");

  auto* ineq = app.add_subcommand("inequalities", "Functional inequality suites");
  std::string suite = "all", csv_path;
  double delta = 0.0;
  std::uint64_t seed = 12345;
  ineq->add_option("--suite", suite, "prop5|prop6|sobolev|lemma4|cor4|all")
      ->check(CLI::IsMember({"prop5", "prop6", "sobolev", "lemma4", "cor4", "all"}));
  ineq->add_option("--delta", delta, "delta for the lemma4 sweep (default 1/24)");
  ineq->add_option("--seed", seed, "Corpus seed")->capture_default_str();
  ineq->add_option("--csv", csv_path, "Per-sample CSV output");

  auto* sw = app.add_subcommand("sweep", "Sweep one numeric config key");
  std::string sweep_config, axis, sweep_out;
  unsigned jobs = 1;
  sw->add_option("--out", sweep_out, "Override output_dir");
  sw->add_option("--config", sweep_config, "Template config")->required()->check(CLI::ExistingFile);
  sw->add_option("--axis", axis, "key=v1,v2,...")->required();
  sw->add_option("--jobs", jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    ks1d_config* cfg = nullptr;
    ks1d_status st = ks1d_config_load(config_path.c_str(), &cfg);
    if (st == KS1D_OK && !run_out.empty()) st = ks1d_config_set(cfg, "output_dir", run_out.c_str());
    if (st != KS1D_OK) {
      ks1d_config_free(cfg);
      return report_failure(st);
    }
    int code = 0;
    char* summary = nullptr;
    st = ks1d_run_scenario(cfg, &code, &summary);
    ks1d_config_free(cfg);
    if (st != KS1D_OK) return report_failure(st);
    emit(summary, "");
    return code;
  }

  if (*cert) {
    if (alpha_opt->count() == 0 && table_opt->count() == 0) {
      std::fprintf(stderr, "ks1d: certify needs --alpha or --table\n");
      return 1;
    }
    if (mass_opt->count() == 0 && search_opt->count() == 0) {
      std::fprintf(stderr, "ks1d: certify needs --mass or --search\n");
      return 1;
    }
    ks1d_model* model = nullptr;
    ks1d_status st = table.empty() ? ks1d_model_power_law(alpha, &model)
                                   : ks1d_model_load_table(table.c_str(), &model);
    if (st != KS1D_OK) return report_failure(st);
    char* json = nullptr;
    if (mass_opt->count()) {
      st = ks1d_certify(model, q, mass, eps, base_cells, &json);
    } else {
      const auto parts = split(search, ':');
      if (parts.size() != 2) {
        ks1d_model_free(model);
        std::fprintf(stderr, "ks1d: --search expects min:max\n");
        return 1;
      }
      char* e1 = nullptr;
      char* e2 = nullptr;
      const double lo = std::strtod(parts[0].c_str(), &e1);
      const double hi = std::strtod(parts[1].c_str(), &e2);
      if (*e1 || *e2 || parts[0].empty() || parts[1].empty()) {
        ks1d_model_free(model);
        std::fprintf(stderr, "ks1d: --search bounds must be numbers\n");
        return 1;
      }
      st = ks1d_search_threshold(model, q, lo, hi, base_cells, &json);
    }
    ks1d_model_free(model);
    if (st != KS1D_OK) return report_failure(st);
    emit(json, out_path);
    return 0;
  }

  if (*ineq) {
    std::size_t violations = 0;
    char* json = nullptr;
    const ks1d_status st =
        ks1d_inequalities(suite.c_str(), delta, seed, csv_path.empty() ? nullptr : csv_path.c_str(), &violations, &json);
    if (st != KS1D_OK) return report_failure(st);
    emit(json, "");
    return violations ? 2 : 0;
  }

  if (*sw) {
    const auto eq = axis.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "ks1d: --axis expects key=v1,v2,...\n");
      return 1;
    }
    const std::string key = axis.substr(0, eq);
    const auto vals = split(axis.substr(eq + 1), ',');
    std::vector<const char*> ptrs;
    for (const auto& v : vals) ptrs.push_back(v.c_str());
    ks1d_config* cfg = nullptr;
    ks1d_status st = ks1d_config_load(sweep_config.c_str(), &cfg);
    if (st == KS1D_OK && !sweep_out.empty()) st = ks1d_config_set(cfg, "output_dir", sweep_out.c_str());
    if (st != KS1D_OK) {
      ks1d_config_free(cfg);
      return report_failure(st);
    }
    char* index = nullptr;
    st = ks1d_sweep(cfg, key.c_str(), ptrs.data(), ptrs.size(), jobs, &index);
    ks1d_config_free(cfg);
    if (st != KS1D_OK) return report_failure(st);
    const int code = exit_from_index(index);
    emit(index, "");
    return code;
  }
  return 0;
}
