#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>
#include <sstream>

#include "core/inequality_lab.hpp"
#include "helpers.hpp"

using namespace ks1d;
using boost::math::quadrature::gauss_kronrod;

namespace {
const double kE = std::exp(1.0);

double gk(const std::function<double(double)>& f, double a, double b) {
  return gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-13);
}
}  // namespace

TEST_CASE("function sample functionals") {
  GridSpec g(4);
  const FunctionSample f{g, {1.0, -2.0, 3.0, 0.0}};
  CHECK(f.integral() == doctest::Approx(0.5));
  CHECK(f.abs_integral() == doctest::Approx(1.5));
  CHECK(f.total_variation() == doctest::Approx(3 + 5 + 3));
  CHECK(f.gradient_energy() == doctest::Approx((9 + 25 + 9) * 4.0));
  CHECK(f.h12_sq() == doctest::Approx(172 + 14.0 / 4));
}

TEST_CASE("exponential embedding") {
  GridSpec g(2048);
  // Constant m = c: lhs e^{2c}, rhs (1 + 1/nu) e^{2c}.
  const auto c = sample_function(g, [](double) { return 0.7; });
  auto r = verify_exp_embedding(c, 2.0);
  CHECK(r.lhs == doctest::Approx(std::exp(1.4)).epsilon(1e-13));
  CHECK(r.rhs == doctest::Approx(1.5 * std::exp(1.4)).epsilon(1e-13));
  CHECK(r.ok);
  CHECK(r.nu == 2.0);
  // m = x against closed forms.
  const auto lin = sample_function(g, [](double x) { return x; });
  r = verify_exp_embedding(lin, 1.0);
  const double e1 = kE - 1;
  CHECK(r.lhs == doctest::Approx((kE * kE - 1) / 2).epsilon(1e-6));
  CHECK(r.rhs == doctest::Approx(0.5 * e1 * e1 * (1 - g.h()) + 2 * e1 * e1).epsilon(1e-6));
  CHECK(r.margin == doctest::Approx(r.rhs - r.lhs));
  const auto big = sample_function(g, [](double) { return 400.0; });
  CHECK(code_of([&] { verify_exp_embedding(big, 1.0); }) == code(ErrorCode::Range));
  CHECK(code_of([&] { verify_exp_embedding(c, 0.0); }) == code(ErrorCode::InputDomain));
  auto nan = c;
  nan.values[3] = NAN;
  CHECK(code_of([&] { verify_exp_embedding(nan, 1.0); }) == code(ErrorCode::NumericState));
}

TEST_CASE("report tolerance") {
  CHECK(make_report("x", 1.0, 1.0).ok);
  CHECK(make_report("x", 1.0 + 1e-13, 1.0).ok);
  CHECK_FALSE(make_report("x", 1.0 + 1e-11, 1.0).ok);
  CHECK(make_report("x", 2.0, 3.0).margin == 1.0);
}

TEST_CASE("Sobolev embedding and cutoff") {
  GridSpec g(512);
  const auto c = sample_function(g, [](double) { return -3.0; });
  auto r = sobolev_embedding_check(c);
  CHECK(r.lhs == 3.0);
  CHECK(r.rhs == doctest::Approx(3.0));
  CHECK(r.ok);
  CHECK(sobolev_embedding_check(sample_function(g, [](double x) { return std::sin(20 * x); })).ok);

  CHECK(cutoff_eta(5, 10) == 0.0);
  CHECK(cutoff_eta(10, 10) == 0.0);
  CHECK(cutoff_eta(15, 10) == 10.0);
  CHECK(cutoff_eta(-15, 10) == 10.0);
  CHECK(cutoff_eta(20, 10) == 20.0);
  CHECK(cutoff_eta(25, 10) == 25.0);
  CHECK(code_of([] { cutoff_eta(1, 0); }) == code(ErrorCode::InputDomain));

  CHECK(llogl_abs(sample_function(g, [](double) { return kE; })) == doctest::Approx(kE));
  CHECK(llogl_abs(sample_function(g, [](double) { return 0.0; })) == 0.0);
  CHECK(std::isnan(gn_ratio(sample_function(g, [](double) { return 0.0; }))));
  CHECK(gn_ratio(sample_function(g, [](double) { return 1.0; })) == doctest::Approx(1.0));
}

TEST_CASE("LlogL interpolation on a positive corpus") {
  CorpusSpec cs;
  cs.count = 25;
  cs.n_cells = 1024;
  for (const auto& w : positive_corpus(cs)) {
    for (double x : w.values) CHECK(x >= 1.0);
    for (double N : {std::exp(2.0), 10.0, 100.0}) {
      const auto r = verify_llogl_interpolation(w, N, kPinnedGNConstant);
      CHECK(r.ok);
      REQUIRE(r.subchecks.size() == 5);
      for (const auto& s : r.subchecks) {
        INFO(s.check, " lhs=", s.lhs, " rhs=", s.rhs);
        CHECK(s.ok);
      }
    }
  }
  const auto one = sample_function(GridSpec(64), [](double) { return 1.0; });
  CHECK(code_of([&] { verify_llogl_interpolation(one, 2.0, 1.0); }) == code(ErrorCode::InputDomain));
  CHECK(code_of([&] { verify_llogl_interpolation(one, 10.0, 0.0); }) == code(ErrorCode::InputDomain));
}

TEST_CASE("boundary-layer family closed forms") {
  // eps = 1, M = 1: int m_x^2 = 2 and int e^{2m} = 7/6.
  const auto r = counterexample_family(1.0, 1.0, GridSpec(64));
  CHECK(r.grad_energy_closed == 2.0);
  CHECK(r.lhs_closed == doctest::Approx(7.0 / 6.0).epsilon(1e-15));
  CHECK(std::abs(r.grad_energy_quad - 2.0) < 1e-10);
  CHECK(std::abs(r.lhs_quad - 7.0 / 6.0) < 1e-10);
  CHECK(std::abs(r.mass_quad - 1.0) < 1e-10);
  for (double eps : {0.1, 0.01}) {
    const double M = 2.5;
    const auto s = counterexample_family(eps, M, GridSpec(static_cast<std::size_t>(std::ceil(8 / eps))));
    auto em = [&](double x) { return std::exp(counterexample_m(eps, M, x)); };
    auto split = [&](const std::function<double(double)>& f) { return gk(f, 0, eps) + gk(f, eps, 1); };
    CHECK(split(em) == doctest::Approx(M).epsilon(1e-10));
    CHECK(split([&](double x) { return em(x) * em(x); }) == doctest::Approx(s.lhs_closed).epsilon(1e-10));
    CHECK(split([&](double x) { return 4 / ((x + eps) * (x + eps)); }) ==
          doctest::Approx(s.grad_energy_closed).epsilon(1e-10));
    CHECK(s.lhs_quad == doctest::Approx(s.lhs_closed).epsilon(1e-10));
    CHECK(s.mass_quad == doctest::Approx(M).epsilon(1e-10));
  }
  CHECK(code_of([] { counterexample_family(0.01, 1.0, GridSpec(512)); }) == code(ErrorCode::Resolution));
  CHECK(code_of([] { counterexample_family(0.0, 1.0, GridSpec(512)); }) == code(ErrorCode::InputDomain));
  CHECK(code_of([] { counterexample_family(2.0, 1.0, GridSpec(512)); }) == code(ErrorCode::InputDomain));
}

TEST_CASE("boundary-layer sweep") {
  auto s = counterexample_sweep(1.0 / 24, 1.0, 10.0, {1e-3});
  REQUIRE(s.rows.size() == 1);
  // Leading order (1/3 - 1/6)/eps - 10 = 156.7; the exact gap is 157.5.
  CHECK(s.rows[0].gap == doctest::Approx(156.7).epsilon(0.01));
  CHECK(s.rows[0].gap == doctest::Approx(334.0 - 4.0 / 24 / 1.001e-3 - 10).epsilon(1e-3));
  CHECK(s.violated);
  CHECK(std::isnan(s.fitted_exponent));

  s = counterexample_sweep(1.0 / 24, 1.0, 0.0, log_eps_grid(1e-2, 1e-4, 21));
  CHECK(s.violated);
  CHECK(s.rows.size() == 21);
  CHECK(s.fitted_exponent == doctest::Approx(1.0).epsilon(0.05));
  for (const auto& r : s.rows) CHECK(r.gap > 0.0);

  s = counterexample_sweep(1.0 / 6, 1.0, 0.0, log_eps_grid(1e-2, 1e-4, 9));
  CHECK_FALSE(s.violated);
  CHECK(std::isnan(s.fitted_exponent));

  CHECK(code_of([] { counterexample_sweep(0.1, 1.0, 0.0, {1e-3, 1e-2}); }) == code(ErrorCode::InputDomain));
  CHECK(code_of([] { counterexample_sweep(0.0, 1.0, 0.0, {1e-3}); }) == code(ErrorCode::InputDomain));
  const auto grid = log_eps_grid(1e-2, 1e-4, 3);
  CHECK(grid[0] == doctest::Approx(1e-2));
  CHECK(grid[1] == doctest::Approx(1e-3));
  CHECK(grid[2] == doctest::Approx(1e-4));
  CHECK(code_of([] { log_eps_grid(1e-4, 1e-2, 3); }) == code(ErrorCode::InputDomain));
}

TEST_CASE("critical mass threshold") {
  CHECK(critical_mass_threshold(1.0) == 1.0);
  CHECK(critical_mass_threshold(4.0) == 0.0);
  CHECK(critical_mass_threshold(0.25) == doctest::Approx(3.0));
  CHECK(code_of([] { critical_mass_threshold(0.0); }) == code(ErrorCode::InputDomain));
}

TEST_CASE("Fourier corpus") {
  CorpusSpec cs;
  cs.count = 5;
  cs.n_cells = 64;
  const auto a = fourier_corpus(cs);
  const auto b = fourier_corpus(cs);
  REQUIRE(a.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(a[i].values == b[i].values);
  cs.seed = 1;
  CHECK(fourier_corpus(cs)[0].values != a[0].values);

  // Independent regeneration of the first sample.
  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<int> modes(1, 12);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  const int K = modes(rng);
  const double c0 = coef(rng);
  std::vector<double> ak, bk;
  for (int k = 0; k < K; ++k) {
    ak.push_back(coef(rng));
    bk.push_back(coef(rng));
  }
  const double pi = std::acos(-1.0);
  GridSpec g(64);
  for (std::size_t i = 0; i < 64; ++i) {
    double m = c0;
    for (int k = 0; k < K; ++k)
      m += ak[k] * std::cos((k + 1) * pi * g.center(i)) + bk[k] * std::sin((k + 1) * pi * g.center(i));
    CHECK(a[0].values[i] == doctest::Approx(m).epsilon(1e-14));
  }
  cs.max_modes = 0;
  CHECK(code_of([&] { fourier_corpus(cs); }) == code(ErrorCode::InputDomain));
}

TEST_CASE("suites") {
  SuiteOptions o;
  o.samples = 40;
  o.prop6_samples = 10;
  o.n_cells = 512;
  o.suite = "prop5";
  auto r = run_inequality_suite(o);
  CHECK(r.rows.size() == 120);
  CHECK(r.violations == 0);
  o.suite = "sobolev";
  CHECK(run_inequality_suite(o).rows.size() == 40);
  o.suite = "cor4";
  r = run_inequality_suite(o);
  CHECK(r.rows.size() == 40);
  CHECK(r.violations == 0);
  o.suite = "prop6";
  r = run_inequality_suite(o);
  CHECK(r.rows.size() == 30);
  CHECK(r.violations == 0);
  o.suite = "lemma4";
  r = run_inequality_suite(o);
  CHECK(r.rows.size() == 21);
  CHECK(r.violations == 0);
  CHECK(r.lemma4.violated);
  for (const auto& row : r.rows) CHECK_FALSE(row.report.ok);

  o.suite = "all";
  r = run_inequality_suite(o);
  CHECK(r.rows.size() == 120 + 40 + 40 + 30 + 21);
  std::ostringstream csv;
  write_suite_csv(csv, r);
  const std::string text = csv.str();
  CHECK(text.rfind("suite,check,sample,nu,N,K,delta,lhs,rhs,margin,ok\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 251 + 30 * 5);
  std::ostringstream again;
  write_suite_csv(again, run_inequality_suite(o));
  CHECK(again.str() == text);

  o.suite = "nonsense";
  CHECK(code_of([&] { run_inequality_suite(o); }) == code(ErrorCode::InputDomain));
}
