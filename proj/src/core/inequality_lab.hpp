#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "core/model.hpp"

namespace ks1d {

/// Cell-center samples of a function on [0, 1].
struct FunctionSample {
  GridSpec grid{4};
  CellField values;

  double integral() const;
  double abs_integral() const;
  /// sum over interior faces of |f_{i+1} - f_i|^2 / h (face-difference energy).
  double gradient_energy() const;
  /// sum |f_{i+1} - f_i|.
  double total_variation() const;
  /// gradient_energy + int f^2.
  double h12_sq() const;
};

FunctionSample sample_function(const GridSpec& grid, const std::function<double(double)>& f);

struct InequalityReport {
  std::string check;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool ok = true;
  double nu = std::numeric_limits<double>::quiet_NaN();
  double N = std::numeric_limits<double>::quiet_NaN();
  double K = std::numeric_limits<double>::quiet_NaN();
  double delta = std::numeric_limits<double>::quiet_NaN();
  std::vector<InequalityReport> subchecks;
};

/// lhs <= rhs up to 1e-12 (1 + |rhs|).
InequalityReport make_report(std::string check, double lhs, double rhs);

/// int e^{2m} <= ((1+nu)/4)(int e^m)^2 int m_x^2 + (1+1/nu)(int e^m)^2.
/// Throws Range when e^{2m} overflows.
InequalityReport verify_exp_embedding(const FunctionSample& m, double nu);

/// max|m_i| <= int|m_x| + int|m|.
InequalityReport sobolev_embedding_check(const FunctionSample& m);

/// 0 on |s| <= N, 2(|s| - N) on (N, 2N], |s| beyond.
double cutoff_eta(double s, double N);

/// int |w log|w||.
double llogl_abs(const FunctionSample& w);

/// Pinned Gagliardo-Nirenberg constant K for |f|_4^4 <= K |f|_{1,2}^2 |f|_1^2:
/// 1.1 x the largest ratio on the calibration corpus (tests/oracles/gn_calibration).
inline constexpr double kPinnedGNConstant = 1.1298054712196028;
inline constexpr std::uint64_t kCalibrationSeed = 20240611;
inline constexpr std::size_t kCalibrationSamples = 10000;

/// int w^4 <= 64 N^3 |w|_1^4 + 32 K |w|_{1,2}^2 (log N)^-2 |w|_{LlogL}^2, with
/// the intermediate bounds on eta_N(w) as subchecks (gn-cutoff,
/// cutoff-energy, cutoff-l1, cutoff-remainder, split).
InequalityReport verify_llogl_interpolation(const FunctionSample& w, double N, double K);

/// |f|_4^4 / (|f|_{1,2}^2 |f|_1^2); NaN for f == 0.
double gn_ratio(const FunctionSample& f);
FunctionSample apply_cutoff(const FunctionSample& w, double N);

struct CounterexampleResult {
  double eps = 0.0;
  double M = 0.0;
  double mass_quad = 0.0;
  double lhs_quad = 0.0;
  double grad_energy_quad = 0.0;
  double mass_closed = 0.0;
  double lhs_closed = 0.0;
  double grad_energy_closed = 0.0;

  double rhs_at(double delta, double h0) const { return delta * M * M * grad_energy_closed + h0; }
};

/// m_eps with e^{m_eps} = eps(1+eps)M/(x+eps)^2. Quadrature is composite
/// Gauss over the grid cells; needs h <= eps/8 (Resolution otherwise).
CounterexampleResult counterexample_family(double eps, double M, const GridSpec& grid);
double counterexample_m(double eps, double M, double x);
double counterexample_lhs_closed(double eps, double M);
double counterexample_grad_closed(double eps);

struct CounterexampleRow {
  double eps = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
};

struct CounterexampleSweep {
  std::vector<CounterexampleRow> rows;
  bool violated = false;
  /// Least-squares slope of log gap against log(1/eps) over positive gaps;
  /// NaN with fewer than two.
  double fitted_exponent = std::numeric_limits<double>::quiet_NaN();
};

CounterexampleSweep counterexample_sweep(double delta, double M, double h0,
                                         const std::vector<double>& eps_grid);
/// Logarithmically spaced, decreasing.
std::vector<double> log_eps_grid(double eps_hi, double eps_lo, std::size_t count);

/// 2/sqrt(chi) - 1.
double critical_mass_threshold(double chi);

struct CorpusSpec {
  std::uint64_t seed = 12345;
  std::size_t count = 1000;
  std::size_t n_cells = 2048;
  int max_modes = 12;
  double amplitude = 2.0;
};

/// Truncated cosine/sine sums c_0 + sum_{k<=K} a_k cos(k pi x) + b_k sin(k pi x),
/// K uniform in [1, max_modes], coefficients uniform in [-amplitude, amplitude].
std::vector<FunctionSample> fourier_corpus(const CorpusSpec& spec);
/// w = 1 + e^m over a Fourier corpus.
std::vector<FunctionSample> positive_corpus(const CorpusSpec& spec);

struct SuiteRow {
  std::string suite;
  std::size_t sample = 0;
  InequalityReport report;
};

struct SuiteOptions {
  std::string suite = "all";  // prop5 | sobolev | cor4 | prop6 | lemma4 | all
  std::uint64_t seed = 12345;
  std::size_t samples = 1000;       // prop5 / sobolev / cor4
  std::size_t prop6_samples = 200;
  double delta = 1.0 / 24.0;        // lemma4
  double K = kPinnedGNConstant;
  std::size_t n_cells = 2048;
};

struct SuiteResult {
  std::vector<SuiteRow> rows;
  std::size_t violations = 0;
  CounterexampleSweep lemma4;  // filled for suite lemma4 / all
};

SuiteResult run_inequality_suite(const SuiteOptions& options);
void write_suite_csv(std::ostream& out, const SuiteResult& result);

}  // namespace ks1d
