#include "core/inequality_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <sstream>

#include "core/errors.hpp"
#include "core/quadrature.hpp"

namespace ks1d {

double FunctionSample::integral() const {
  double s = 0.0;
  for (double x : values) s += x;
  return grid.h() * s;
}

double FunctionSample::abs_integral() const {
  double s = 0.0;
  for (double x : values) s += std::abs(x);
  return grid.h() * s;
}

double FunctionSample::gradient_energy() const {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const double d = values[i + 1] - values[i];
    s += d * d;
  }
  return s / grid.h();
}

double FunctionSample::total_variation() const {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) s += std::abs(values[i + 1] - values[i]);
  return s;
}

double FunctionSample::h12_sq() const {
  double s = 0.0;
  for (double x : values) s += x * x;
  return gradient_energy() + grid.h() * s;
}

FunctionSample sample_function(const GridSpec& grid, const std::function<double(double)>& f) {
  FunctionSample s{grid, CellField(grid.n_cells())};
  for (std::size_t i = 0; i < grid.n_cells(); ++i) s.values[i] = f(grid.center(i));
  return s;
}

InequalityReport make_report(std::string check, double lhs, double rhs) {
  InequalityReport r;
  r.check = std::move(check);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.ok = r.margin >= -1e-12 * (1.0 + std::abs(rhs));
  return r;
}

namespace {

void require_finite(const FunctionSample& m) {
  require_field(m.values, m.grid, "function sample");
  for (double x : m.values)
    if (!std::isfinite(x)) fail(ErrorCode::NumericState, "function sample has non-finite values");
}

}  // namespace

InequalityReport verify_exp_embedding(const FunctionSample& m, double nu) {
  require_finite(m);
  if (!(nu > 0.0)) fail(ErrorCode::InputDomain, "nu must be positive");
  const double mmax = *std::max_element(m.values.begin(), m.values.end());
  if (2.0 * mmax > 700.0) {
    std::ostringstream os;
    os << "e^{2m} overflows: max m = " << mmax;
    fail(ErrorCode::Range, os.str());
  }
  double e1 = 0.0, e2 = 0.0;
  for (double x : m.values) {
    const double e = std::exp(x);
    e1 += e;
    e2 += e * e;
  }
  const double h = m.grid.h();
  e1 *= h;
  e2 *= h;
  const double rhs = 0.25 * (1.0 + nu) * e1 * e1 * m.gradient_energy() + (1.0 + 1.0 / nu) * e1 * e1;
  auto r = make_report("exp-embedding", e2, rhs);
  r.nu = nu;
  return r;
}

InequalityReport sobolev_embedding_check(const FunctionSample& m) {
  require_finite(m);
  double sup = 0.0;
  for (double x : m.values) sup = std::max(sup, std::abs(x));
  return make_report("sobolev-embedding", sup, m.total_variation() + m.abs_integral());
}

double cutoff_eta(double s, double N) {
  if (!(N > 0.0)) fail(ErrorCode::InputDomain, "cutoff level N must be positive");
  const double a = std::abs(s);
  if (a <= N) return 0.0;
  if (a <= 2.0 * N) return 2.0 * (a - N);
  return a;
}

double llogl_abs(const FunctionSample& w) {
  double s = 0.0;
  for (double x : w.values) {
    const double a = std::abs(x);
    if (a > 0.0) s += std::abs(a * std::log(a));
  }
  return w.grid.h() * s;
}

FunctionSample apply_cutoff(const FunctionSample& w, double N) {
  FunctionSample out{w.grid, CellField(w.values.size())};
  for (std::size_t i = 0; i < w.values.size(); ++i) out.values[i] = cutoff_eta(w.values[i], N);
  return out;
}

double gn_ratio(const FunctionSample& f) {
  double s4 = 0.0;
  for (double x : f.values) s4 += std::pow(x, 4);
  s4 *= f.grid.h();
  const double l1 = f.abs_integral();
  const double den = f.h12_sq() * l1 * l1;
  if (!(den > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return s4 / den;
}

InequalityReport verify_llogl_interpolation(const FunctionSample& w, double N, double K) {
  require_finite(w);
  if (!(N > std::exp(1.0))) fail(ErrorCode::InputDomain, "N must exceed e");
  if (!(K > 0.0)) fail(ErrorCode::InputDomain, "K must be positive");
  const double h = w.grid.h();
  const FunctionSample eta = apply_cutoff(w, N);
  FunctionSample rest{w.grid, CellField(w.values.size())};
  for (std::size_t i = 0; i < w.values.size(); ++i) rest.values[i] = w.values[i] - eta.values[i];

  auto l4 = [h](const FunctionSample& f) {
    double s = 0.0;
    for (double x : f.values) s += std::pow(x, 4);
    return h * s;
  };
  const double w4 = l4(w), eta4 = l4(eta), rest4 = l4(rest);
  const double w1 = w.abs_integral(), eta1 = eta.abs_integral();
  const double w12 = w.h12_sq(), eta12 = eta.h12_sq();
  const double wl = llogl_abs(w);
  const double logN = std::log(N);

  InequalityReport top = make_report(
      "llogl-interpolation", w4, 64.0 * N * N * N * std::pow(w1, 4) + 32.0 * K * w12 * wl * wl / (logN * logN));
  top.N = N;
  top.K = K;
  top.subchecks.push_back(make_report("gn-cutoff", eta4, K * eta12 * eta1 * eta1));
  top.subchecks.push_back(make_report("cutoff-energy", eta12, 4.0 * w12));
  top.subchecks.push_back(make_report("cutoff-l1", eta1, wl / logN));
  top.subchecks.push_back(make_report("cutoff-remainder", rest4, 8.0 * N * N * N * std::pow(w1, 4)));
  top.subchecks.push_back(make_report("split", w4, 8.0 * (rest4 + eta4)));
  for (auto& s : top.subchecks) {
    s.N = N;
    s.K = K;
  }
  return top;
}

double counterexample_m(double eps, double M, double x) {
  return std::log(eps * (1.0 + eps) * M) - 2.0 * std::log(x + eps);
}

double counterexample_lhs_closed(double eps, double M) {
  return M * M / 3.0 * (std::pow(1.0 + eps, 3) - std::pow(eps, 3)) / (eps * (1.0 + eps));
}

double counterexample_grad_closed(double eps) { return 4.0 / (eps * (1.0 + eps)); }

CounterexampleResult counterexample_family(double eps, double M, const GridSpec& grid) {
  if (!(eps > 0.0) || !(eps <= 1.0)) fail(ErrorCode::InputDomain, "eps must lie in (0, 1]");
  if (!(M > 0.0)) fail(ErrorCode::InputDomain, "M must be positive");
  if (grid.h() > eps / 8.0) {
    std::ostringstream os;
    os << "h = " << grid.h() << " does not resolve the boundary layer (need h <= eps/8 = " << eps / 8.0 << ")";
    fail(ErrorCode::Resolution, os.str());
  }
  const double c = eps * (1.0 + eps) * M;
  const std::size_t n = grid.n_cells();
  CounterexampleResult r;
  r.eps = eps;
  r.M = M;
  r.mass_quad = quad::composite_gauss([&](double x) { return c / ((x + eps) * (x + eps)); }, 0.0, 1.0, n);
  r.lhs_quad = quad::composite_gauss([&](double x) { return c * c / std::pow(x + eps, 4); }, 0.0, 1.0, n);
  r.grad_energy_quad = quad::composite_gauss([&](double x) { return 4.0 / ((x + eps) * (x + eps)); }, 0.0, 1.0, n);
  r.mass_closed = M;
  r.lhs_closed = counterexample_lhs_closed(eps, M);
  r.grad_energy_closed = counterexample_grad_closed(eps);
  return r;
}

std::vector<double> log_eps_grid(double eps_hi, double eps_lo, std::size_t count) {
  if (!(eps_hi > eps_lo) || !(eps_lo > 0.0) || count < 2)
    fail(ErrorCode::InputDomain, "eps grid needs eps_hi > eps_lo > 0 and >= 2 points");
  std::vector<double> g(count);
  for (std::size_t k = 0; k < count; ++k)
    g[k] = eps_hi * std::pow(eps_lo / eps_hi, static_cast<double>(k) / static_cast<double>(count - 1));
  return g;
}

CounterexampleSweep counterexample_sweep(double delta, double M, double h0, const std::vector<double>& eps_grid) {
  if (!(delta > 0.0)) fail(ErrorCode::InputDomain, "delta must be positive");
  if (!(M > 0.0)) fail(ErrorCode::InputDomain, "M must be positive");
  for (std::size_t k = 0; k < eps_grid.size(); ++k) {
    if (!(eps_grid[k] > 0.0) || eps_grid[k] > 1.0) fail(ErrorCode::InputDomain, "eps values must lie in (0, 1]");
    if (k && !(eps_grid[k] < eps_grid[k - 1])) fail(ErrorCode::InputDomain, "eps grid must be decreasing");
  }
  CounterexampleSweep out;
  std::vector<double> xs, ys;
  for (double eps : eps_grid) {
    CounterexampleRow row;
    row.eps = eps;
    row.lhs = counterexample_lhs_closed(eps, M);
    row.rhs = delta * M * M * counterexample_grad_closed(eps) + h0;
    row.gap = row.lhs - row.rhs;
    if (row.gap > 0.0) {
      out.violated = true;
      xs.push_back(std::log(1.0 / eps));
      ys.push_back(std::log(row.gap));
    }
    out.rows.push_back(row);
  }
  if (xs.size() >= 2) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    out.fitted_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return out;
}

double critical_mass_threshold(double chi) {
  if (!(chi > 0.0) || !std::isfinite(chi)) fail(ErrorCode::InputDomain, "chi must be positive");
  return 2.0 / std::sqrt(chi) - 1.0;
}

std::vector<FunctionSample> fourier_corpus(const CorpusSpec& spec) {
  if (spec.max_modes < 1 || spec.n_cells < 4) fail(ErrorCode::InputDomain, "corpus needs >= 1 mode and >= 4 cells");
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> modes(1, spec.max_modes);
  std::uniform_real_distribution<double> coef(-spec.amplitude, spec.amplitude);
  const GridSpec grid(spec.n_cells);
  const double pi = std::acos(-1.0);
  std::vector<FunctionSample> out;
  out.reserve(spec.count);
  for (std::size_t s = 0; s < spec.count; ++s) {
    const int K = modes(rng);
    const double c0 = coef(rng);
    std::vector<double> a(K), b(K);
    for (int k = 0; k < K; ++k) {
      a[k] = coef(rng);
      b[k] = coef(rng);
    }
    out.push_back(sample_function(grid, [&](double x) {
      double m = c0;
      for (int k = 0; k < K; ++k) {
        const double w = (k + 1) * pi * x;
        m += a[k] * std::cos(w) + b[k] * std::sin(w);
      }
      return m;
    }));
  }
  return out;
}

std::vector<FunctionSample> positive_corpus(const CorpusSpec& spec) {
  auto out = fourier_corpus(spec);
  for (auto& f : out)
    for (double& x : f.values) x = 1.0 + std::exp(x);
  return out;
}

SuiteResult run_inequality_suite(const SuiteOptions& o) {
  static const char* known[] = {"prop5", "sobolev", "cor4", "prop6", "lemma4", "all"};
  if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return o.suite == k; }) == std::end(known))
    fail(ErrorCode::InputDomain, "unknown inequality suite '" + o.suite + "'");
  const bool all = o.suite == "all";
  SuiteResult res;
  auto add = [&](const char* suite, std::size_t idx, InequalityReport rep) {
    if (!rep.ok) ++res.violations;
    for (const auto& s : rep.subchecks)
      if (!s.ok) ++res.violations;
    res.rows.push_back({suite, idx, std::move(rep)});
  };

  CorpusSpec cs;
  cs.seed = o.seed;
  cs.count = o.samples;
  cs.n_cells = o.n_cells;
  if (all || o.suite == "prop5" || o.suite == "sobolev") {
    const auto corpus = fourier_corpus(cs);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (all || o.suite == "prop5")
        for (double nu : {0.1, 1.0, 10.0}) add("prop5", i, verify_exp_embedding(corpus[i], nu));
      if (all || o.suite == "sobolev") add("sobolev", i, sobolev_embedding_check(corpus[i]));
    }
  }
  if (all || o.suite == "cor4") {
    // m = log(1 + u) for u > 0 of mass 0.9, chi = 1.
    const double M = 0.9, chi = 1.0;
    const double nu = 4.0 * (1.0 - 1e-6) / ((M + 1.0) * (M + 1.0) * chi) - 1.0;
    auto corpus = fourier_corpus(cs);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      auto& f = corpus[i];
      for (double& x : f.values) x = std::exp(x);
      const double scale = M / f.integral();
      for (double& x : f.values) x = std::log1p(scale * x);
      add("cor4", i, verify_exp_embedding(f, nu));
    }
  }
  if (all || o.suite == "prop6") {
    CorpusSpec ps = cs;
    ps.count = o.prop6_samples;
    const auto corpus = positive_corpus(ps);
    for (std::size_t i = 0; i < corpus.size(); ++i)
      for (double N : {std::exp(2.0), 10.0, 100.0}) add("prop6", i, verify_llogl_interpolation(corpus[i], N, o.K));
  }
  if (all || o.suite == "lemma4") {
    res.lemma4 = counterexample_sweep(o.delta, 1.0, 0.0, log_eps_grid(1e-2, 1e-4, 21));
    for (std::size_t i = 0; i < res.lemma4.rows.size(); ++i) {
      const auto& row = res.lemma4.rows[i];
      auto rep = make_report("family-gap", row.lhs, row.rhs);
      rep.delta = o.delta;
      res.rows.push_back({"lemma4", i, std::move(rep)});  // expected to fail: not counted
    }
  }
  return res;
}

void write_suite_csv(std::ostream& out, const SuiteResult& result) {
  out << "suite,check,sample,nu,N,K,delta,lhs,rhs,margin,ok\n";
  char buf[512];
  auto emit = [&](const std::string& suite, std::size_t idx, const InequalityReport& r) {
    std::snprintf(buf, sizeof buf, "%s,%s,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", suite.c_str(),
                  r.check.c_str(), idx, r.nu, r.N, r.K, r.delta, r.lhs, r.rhs, r.margin, r.ok ? 1 : 0);
    out << buf;
  };
  for (const auto& row : result.rows) {
    emit(row.suite, row.sample, row.report);
    for (const auto& s : row.report.subchecks) emit(row.suite, row.sample, s);
  }
}

}  // namespace ks1d
