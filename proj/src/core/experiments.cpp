#include "core/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "core/diagnostics.hpp"
#include "core/errors.hpp"

namespace ks1d {

namespace fs = std::filesystem;
using nlohmann::json;

DiffusionModel make_diffusion(const ScenarioConfig& cfg) {
  if (cfg.alpha) return DiffusionModel::power_law(*cfg.alpha);
  if (cfg.diffusion_table.empty()) fail(ErrorCode::Config, "no diffusion given (alpha or diffusion_table)");
  return DiffusionModel::load_csv(cfg.diffusion_table);
}

EntropyTableOptions entropy_options_for(double mass, std::size_t n_cells) {
  EntropyTableOptions o;
  o.upper = std::max(1e8, 4.0 * mass * static_cast<double>(n_cells));
  return o;
}

State constant_initial_data(double mass, double perturbation, const GridSpec& grid) {
  const double pi = std::acos(-1.0);
  const double h = grid.h();
  State s;
  s.u.resize(grid.n_cells());
  s.v.assign(grid.n_cells(), 0.0);
  for (std::size_t i = 0; i < grid.n_cells(); ++i) {
    const double xl = static_cast<double>(i) * h, xr = grid.right_edge(i);
    const double avg_cos = (std::sin(pi * xr) - std::sin(pi * xl)) / (pi * h);
    s.u[i] = mass * (1.0 + perturbation * avg_cos);
  }
  return s;
}

State read_initial_file(const std::string& path, const GridSpec& grid) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open initial data file '" + path + "'");
  std::string line;
  std::getline(in, line);
  if (line.rfind("u,v", 0) != 0) fail(ErrorCode::Validation, "initial data file must start with header 'u,v'");
  State s;
  std::size_t ln = 1;
  while (std::getline(in, line)) {
    ++ln;
    if (line.empty()) continue;
    double u = 0.0, v = 0.0;
    char comma = 0;
    std::istringstream ss(line);
    if (!(ss >> u >> comma >> v) || comma != ',')
      fail(ErrorCode::Validation, path + ": line " + std::to_string(ln) + ": expected 'u,v'");
    s.u.push_back(u);
    s.v.push_back(v);
  }
  if (s.u.size() != grid.n_cells())
    fail(ErrorCode::Validation, "initial data file has " + std::to_string(s.u.size()) + " rows, grid has " +
                                    std::to_string(grid.n_cells()) + " cells");
  return s;
}

State make_initial_state(const ScenarioConfig& cfg, double mass, const GridSpec& grid) {
  if (cfg.initial == "constant") return constant_initial_data(mass, cfg.perturbation, grid);
  if (cfg.initial == "eq60") return blowup_initial_data(mass, grid);
  return read_initial_file(cfg.initial_file, grid);
}

ThresholdResult threshold_search(const DiffusionModel& model, double q, double M_min, double M_max,
                                 std::size_t base_cells, double rel_tol) {
  const auto B = std::make_shared<ConcaveEnvelope>(build_envelope(model));
  const auto profile = std::make_shared<EntropyProfile>(
      model, entropy_options_for(M_max, threshold_grid_cells(M_max, base_cells)));
  return search_mass_threshold(
      [&](double M) {
        const GridSpec grid(threshold_grid_cells(M, base_cells));
        return certify_with(M, q, *B, *profile, grid);
      },
      M_min, M_max, rel_tol);
}

namespace {

void add_extremum(std::vector<Extremum>& out, const char* name, const std::vector<DiagnosticsRecord>& rows,
                  double DiagnosticsRecord::*field) {
  Extremum e{name, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  bool any = false;
  for (const auto& r : rows) {
    const double x = r.*field;
    if (std::isnan(x)) continue;
    any = true;
    e.min = std::min(e.min, x);
    e.max = std::max(e.max, x);
  }
  if (any) out.push_back(e);
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write '" + p.string() + "'");
  out << text;
  if (!out) fail(ErrorCode::Io, "write failed for '" + p.string() + "'");
}

json config_json(const ScenarioConfig& cfg) {
  json j = json::object();
  for (const auto& [k, v] : config_entries(cfg)) {
    if (is_numeric_key(k) && v != "auto") {
      // Keeps integer keys integral in the echo.
      j[k] = nlohmann::json::parse(v, nullptr, false);
      if (j[k].is_discarded()) j[k] = std::strtod(v.c_str(), nullptr);
    } else {
      j[k] = v;
    }
  }
  return j;
}

template <class T>
json opt(const std::optional<T>& x) {
  return x ? json(*x) : json(nullptr);
}

}  // namespace

std::string to_json(const RunSummary& s, const ScenarioConfig& cfg, int indent) {
  json j;
  j["scenario"] = s.scenario;
  j["outcome"] = s.outcome;
  j["reason"] = s.reason;
  j["t_final"] = s.t_final;
  j["t_est"] = s.t_est;
  j["u_max_final"] = s.u_max_final;
  j["mass"] = s.mass;
  j["eps"] = s.eps;
  j["steps"] = s.stats.steps;
  j["rejections"] = s.stats.rejections;
  j["positivity_clips"] = s.stats.positivity_clips;
  j["max_mass_drift"] = s.stats.max_mass_drift;
  j["max_abs_v_mean"] = s.stats.max_abs_v_mean;
  j["min_u"] = s.stats.min_u;
  json ext = json::object();
  for (const auto& e : s.extrema) ext[e.column] = {{"min", e.min}, {"max", e.max}};
  j["extrema"] = ext;
  j["violations"] = {{"dissipation", opt(s.dissipation_violations)},
                     {"monitor_phi", opt(s.phi_violations)},
                     {"inequalities", opt(s.inequality_violations)}};
  j["vt_l2_time_integral"] = s.vt_l2_time_integral;
  if (s.certificate) j["certificate"] = json::parse(to_json(*s.certificate));
  if (s.lemma4_violated) {
    j["lemma4"] = {{"violated", *s.lemma4_violated}, {"fitted_exponent", s.lemma4_fitted_exponent}};
  }
  j["wall_time_s"] = s.wall_time_s;
  j["exit_code"] = s.exit_code;
  j["artifacts"] = s.artifacts;
  j["config"] = config_json(cfg);
  return j.dump(indent);
}

namespace {

void run_inequalities(const ScenarioConfig& cfg, RunSummary& s, const fs::path& dir) {
  SuiteOptions o;
  o.suite = cfg.suite;
  o.seed = cfg.seed;
  o.samples = cfg.samples;
  o.delta = cfg.delta;
  const SuiteResult res = run_inequality_suite(o);
  std::ofstream out(dir / "inequalities.csv", std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write inequalities.csv");
  write_suite_csv(out, res);
  s.artifacts.push_back((dir / "inequalities.csv").string());
  s.outcome = "Completed";
  s.inequality_violations = res.violations;
  if (cfg.suite == "lemma4" || cfg.suite == "all") {
    s.lemma4_violated = res.lemma4.violated;
    s.lemma4_fitted_exponent = res.lemma4.fitted_exponent;
  }
  s.exit_code = res.violations ? 2 : 0;
}

void run_certificate(const ScenarioConfig& cfg, const DiffusionModel& model, RunSummary& s, const fs::path& dir) {
  CertificateReport rep;
  if (cfg.scenario == "certificate" && cfg.mass) {
    const double M = *cfg.mass;
    const std::size_t n = threshold_grid_cells(M, cfg.n_cells);
    const EntropyProfile profile(model, entropy_options_for(M, n));
    rep = certify(M, cfg.q, model, profile, GridSpec(n), cfg.eps);
    s.outcome = rep.certified ? "Certified" : "NotCertified";
  } else {
    const ThresholdResult res = threshold_search(model, cfg.q, cfg.search_min, cfg.search_max, cfg.n_cells);
    const double M = res.found ? res.M0 : cfg.search_max;
    const std::size_t n = threshold_grid_cells(M, cfg.n_cells);
    const EntropyProfile profile(model, entropy_options_for(M, n));
    rep = certify(M, cfg.q, model, profile, GridSpec(n), cfg.eps);
    rep.M0_search_trace = res.trace;
    if (res.found) {
      s.outcome = "ThresholdFound";
      s.reason = res.monotone_validated ? "certified status monotone on the validation masses"
                                        : "certified status NOT monotone on the validation masses";
    } else {
      s.outcome = "Inconclusive";
      s.reason = "no sign change of A on the search range";
    }
  }
  s.mass = rep.M;
  s.eps = rep.eps_choice;
  s.certificate = rep;
  write_text(dir / "certificate.json", to_json(rep) + "\n");
  s.artifacts.push_back((dir / "certificate.json").string());
}

void run_simulation(const ScenarioConfig& cfg, const DiffusionModel& model, RunSummary& s, const fs::path& dir) {
  double M = 0.0;
  if (cfg.mass) {
    M = *cfg.mass;
  } else {
    const ThresholdResult res = threshold_search(model, cfg.q, cfg.search_min, cfg.search_max, cfg.n_cells);
    if (!res.found) fail(ErrorCode::CannotCertify, "mass = auto: no certified mass on the search range");
    M = res.M0;
  }
  const GridSpec grid(cfg.n_cells);
  State init = make_initial_state(cfg, M, grid);
  if (cfg.initial == "file") M = mass(init, grid);

  Params p;
  p.chi = cfg.chi;
  p.eps = cfg.eps ? *cfg.eps : std::pow(M, 1.0 - cfg.q);
  p.D = cfg.D;
  p.gamma = cfg.gamma;
  p.mass = M;
  p.validate();

  auto entropy = std::make_shared<EntropyProfile>(model, entropy_options_for(M, cfg.n_cells));
  std::shared_ptr<ConcaveEnvelope> B;
  if (model.integrable()) B = std::make_shared<ConcaveEnvelope>(build_envelope(model));

  if (B && cfg.initial == "eq60") s.certificate = certify_with(M, cfg.q, *B, *entropy, grid, p.eps);

  RunOptions opt;
  opt.t_end = cfg.t_end;
  opt.sample_cadence = cfg.sample_cadence;
  opt.blowup.threshold = cfg.blowup_threshold;
  opt.blowup.rejection_run = cfg.blowup_rejections;
  opt.blowup.mass_fraction = cfg.blowup_mass_fraction;
  opt.diagnostics.entropy = entropy;
  opt.diagnostics.params = p;
  opt.diagnostics.q = cfg.q;
  if (B) {
    const double q = cfg.q, eps = p.eps;
    opt.diagnostics.a_of_phi = [B, q, M, eps](double phi) { return certificate_A(*B, q, M, eps, phi); };
  }
  StepController ctl;
  ctl.dt_init = cfg.dt_init;
  ctl.dt_min = cfg.dt_min;
  ctl.dt_max = cfg.dt_max;
  ctl.cfl_safety = cfg.cfl_safety;
  ctl.growth_cap = cfg.growth_cap;
  ctl.max_steps = cfg.max_steps;

  const Trajectory traj = run(init, p, model, grid, ctl, opt);

  std::string csv = std::string(kTrajectoryColumns) + "\n";
  for (const auto& r : traj.rows) csv += to_csv_row(r) + "\n";
  write_text(dir / "trajectory.csv", csv);
  s.artifacts.push_back((dir / "trajectory.csv").string());

  s.mass = M;
  s.eps = p.eps;
  s.outcome = to_string(traj.outcome.kind);
  s.reason = traj.outcome.reason;
  s.t_final = traj.final_state.t;
  s.t_est = traj.outcome.t_est;
  s.u_max_final = traj.outcome.u_max_final;
  s.stats = traj.stats;
  using R = DiagnosticsRecord;
  const std::pair<const char*, double R::*> cols[] = {
      {"mass", &R::mass},   {"v_mean", &R::v_mean},           {"u_max", &R::u_max}, {"lambda", &R::lambda},
      {"L_q", &R::L_q},     {"l2", &R::l2},                   {"l3", &R::l3},       {"llogl", &R::llogl},
      {"grad_log_energy", &R::grad_log_energy}, {"vt_l2", &R::vt_l2}, {"phi", &R::phi}, {"a_of_phi", &R::a_of_phi},
      {"l3_plus1", &R::l3_plus1}};
  for (const auto& [name, field] : cols) add_extremum(s.extrema, name, traj.rows, field);
  s.vt_l2_time_integral = vt_l2_time_integral(traj.rows);
  if (p.liapunov_setting()) {
    s.dissipation_violations = dissipation_check(traj.rows, p.eps, M, cfg.c_tol).size();
    if (B) s.phi_violations = monitor_phi(traj.rows, *B, cfg.q, M, p.eps, cfg.phi_u_max_cap, cfg.c_tol).violations.size();
  }
  const std::size_t flagged = s.dissipation_violations.value_or(0) + s.phi_violations.value_or(0);
  s.exit_code = flagged ? 2 : 0;
}

}  // namespace

RunSummary run_scenario(const ScenarioConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_config(cfg);
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create output directory '" + cfg.output_dir + "': " + ec.message());

  RunSummary s;
  s.scenario = cfg.scenario;
  if (cfg.scenario == "inequalities") {
    run_inequalities(cfg, s, dir);
  } else {
    const DiffusionModel model = make_diffusion(cfg);
    if (cfg.scenario == "certificate" || cfg.scenario == "threshold-scan") run_certificate(cfg, model, s, dir);
    else run_simulation(cfg, model, s, dir);
  }
  s.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  s.artifacts.push_back((dir / "summary.json").string());
  write_text(dir / "summary.json", to_json(s, cfg) + "\n");
  return s;
}

SweepResult sweep(const ScenarioConfig& base, const std::string& key, const std::vector<std::string>& values,
                  unsigned jobs) {
  if (values.empty()) fail(ErrorCode::InputDomain, "sweep axis has no values");
  if (!is_numeric_key(key)) fail(ErrorCode::InputDomain, "sweep axis '" + key + "' is not a numeric key");
  if (jobs == 0) fail(ErrorCode::InputDomain, "jobs must be positive");
  SweepResult res;
  res.axis = key;
  res.runs.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    res.runs[i].value = values[i];
    res.runs[i].output_dir = (fs::path(base.output_dir) / (key + "_" + std::to_string(i))).string();
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      SweepEntry& e = res.runs[i];
      try {
        ScenarioConfig cfg = base;
        apply_setting(cfg, key, values[i], "axis value " + values[i]);
        cfg.output_dir = e.output_dir;
        const RunSummary s = run_scenario(cfg);
        e.summary_path = (fs::path(e.output_dir) / "summary.json").string();
        e.outcome = s.outcome;
        e.exit_code = s.exit_code;
      } catch (const std::exception& ex) {
        e.error = ex.what();
        e.exit_code = 1;
      }
    }
  };
  const unsigned n_threads = std::min<unsigned>(jobs, static_cast<unsigned>(values.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  json idx;
  idx["axis"] = key;
  json runs = json::array();
  for (const auto& e : res.runs) {
    json r{{"value", e.value}, {"output_dir", e.output_dir}, {"exit_code", e.exit_code}};
    r["summary"] = e.summary_path.empty() ? json(nullptr) : json(e.summary_path);
    r["outcome"] = e.outcome.empty() ? json(nullptr) : json(e.outcome);
    r["error"] = e.error.empty() ? json(nullptr) : json(e.error);
    runs.push_back(r);
  }
  idx["runs"] = runs;
  std::error_code ec;
  fs::create_directories(base.output_dir, ec);
  res.index_path = (fs::path(base.output_dir) / "index.json").string();
  write_text(res.index_path, idx.dump(2) + "\n");
  return res;
}

}  // namespace ks1d
