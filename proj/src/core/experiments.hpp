#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core/certificate.hpp"
#include "core/config.hpp"
#include "core/inequality_lab.hpp"
#include "core/model.hpp"
#include "core/timestepper.hpp"

namespace ks1d {

DiffusionModel make_diffusion(const ScenarioConfig& cfg);
/// Entropy table covering every reachable cell value (u <= M n).
EntropyTableOptions entropy_options_for(double mass, std::size_t n_cells);
/// Initial state from the configured preset.
State make_initial_state(const ScenarioConfig& cfg, double mass, const GridSpec& grid);
/// u0 = M(1 + p cos(pi x)) as exact cell averages, v0 = 0.
State constant_initial_data(double mass, double perturbation, const GridSpec& grid);
State read_initial_file(const std::string& path, const GridSpec& grid);

/// Threshold search on the ramp data with per-mass grids
/// threshold_grid_cells(M, base_cells).
ThresholdResult threshold_search(const DiffusionModel& model, double q, double M_min, double M_max,
                                 std::size_t base_cells, double rel_tol = 1e-10);

struct Extremum {
  std::string column;
  double min = 0.0;
  double max = 0.0;
};

struct RunSummary {
  std::string scenario;
  std::string outcome;  // Bounded | NumericalBlowup | StepLimit | Completed
  std::string reason;
  double t_final = 0.0;
  double t_est = 0.0;
  double u_max_final = 0.0;
  double mass = 0.0;
  double eps = 0.0;
  RunStats stats;
  std::vector<Extremum> extrema;
  std::optional<std::size_t> dissipation_violations;  // empty: not applicable
  std::optional<std::size_t> phi_violations;
  std::optional<std::size_t> inequality_violations;
  double vt_l2_time_integral = 0.0;
  std::optional<CertificateReport> certificate;
  std::optional<bool> lemma4_violated;
  double lemma4_fitted_exponent = 0.0;
  double wall_time_s = 0.0;
  int exit_code = 0;  // 0 clean, 2 monitors flagged violations
  std::vector<std::string> artifacts;
};

std::string to_json(const RunSummary& s, const ScenarioConfig& cfg, int indent = 2);

/// Runs the scenario, writing artifacts under cfg.output_dir
/// (trajectory.csv, summary.json, certificate.json, inequalities.csv as
/// applicable).
RunSummary run_scenario(const ScenarioConfig& cfg);

struct SweepEntry {
  std::string value;
  std::string output_dir;
  std::string summary_path;
  std::string outcome;
  int exit_code = 1;
  std::string error;
};

struct SweepResult {
  std::string axis;
  std::vector<SweepEntry> runs;
  std::string index_path;
};

/// One run per axis value (key must be numeric), executed on `jobs` worker
/// threads; run i writes to <output_dir>/<key>_<i>. Failures are recorded per
/// run. Writes <output_dir>/index.json.
SweepResult sweep(const ScenarioConfig& base, const std::string& key, const std::vector<std::string>& values,
                  unsigned jobs);

}  // namespace ks1d
