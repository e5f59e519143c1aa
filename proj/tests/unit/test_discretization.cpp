#include <cmath>
#include <random>

#include "core/discretization.hpp"
#include "helpers.hpp"

using namespace ks1d;

namespace {
const double kPi = std::acos(-1.0);

double linf(const CellField& a, const std::function<double(double)>& f, const GridSpec& g) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - f(g.center(i))));
  return e;
}

State sampled(const GridSpec& g, const std::function<double(double)>& u, const std::function<double(double)>& v) {
  State s;
  for (std::size_t i = 0; i < g.n_cells(); ++i) {
    s.u.push_back(u(g.center(i)));
    s.v.push_back(v(g.center(i)));
  }
  return s;
}

Params with_chi(double chi) {
  Params p;
  p.chi = chi;
  return p;
}
}  // namespace

TEST_CASE("stationary state has zero rates") {
  GridSpec g(32);
  const State s{0.0, CellField(32, 2.5), CellField(32, 0.0)};
  Params p;
  p.mass = 2.5;
  for (double r : assemble_u_rhs(s, p, DiffusionModel::power_law(0.5), g)) CHECK(r == 0.0);
  for (double r : assemble_v_rhs(s, p, g)) CHECK(r == 0.0);
  const State c{0.0, CellField(32, 2.5), CellField(32, 7.0)};
  for (double r : assemble_v_rhs(c, p, g)) CHECK(r == 0.0);
}

TEST_CASE("hand-evaluated four-cell stencil") {
  // F_{3/2} = (4 - 0)/h = 16 is the only nonzero face flux; rates are
  // (F_{i+1/2} - F_{i-1/2})/h = (0, 64, -64, 0).
  GridSpec g(4);
  const State s{0.0, {0, 0, 4, 4}, {0, 0, 0, 0}};
  const auto fa = assemble_u_fluxes(s, with_chi(1.0), DiffusionModel::power_law(0.0), g);
  CHECK(fa.total(0) == 0.0);
  CHECK(fa.total(1) == 16.0);
  CHECK(fa.total(2) == 0.0);
  const auto r = assemble_u_rhs(s, with_chi(1.0), DiffusionModel::power_law(0.0), g);
  CHECK(r[0] == 0.0);
  CHECK(r[1] == 64.0);
  CHECK(r[2] == -64.0);
  CHECK(r[3] == 0.0);
}

TEST_CASE("heat stencil is second order") {
  double prev = 0.0;
  for (std::size_t n : {32, 64, 128, 256}) {
    GridSpec g(n);
    const State s = sampled(g, [](double x) { return std::cos(kPi * x); }, [](double) { return 0.0; });
    const double e = linf(assemble_u_rhs(s, with_chi(0.0), DiffusionModel::power_law(0.0), g),
                          [](double x) { return -kPi * kPi * std::cos(kPi * x); }, g);
    if (prev > 0.0) CHECK(std::log2(prev / e) >= 1.9);
    prev = e;
  }
}

TEST_CASE("nonlinear diffusion stencil is second order") {
  // u = 1 + cos(pi x)/2, a = (1+u)^-1: (a u_x)_x by hand.
  auto u = [](double x) { return 1 + 0.5 * std::cos(kPi * x); };
  auto exact = [&](double x) {
    const double ux = -0.5 * kPi * std::sin(kPi * x), uxx = -0.5 * kPi * kPi * std::cos(kPi * x);
    const double a = 1 / (1 + u(x)), ap = -1 / ((1 + u(x)) * (1 + u(x)));
    return ap * ux * ux + a * uxx;
  };
  double prev = 0.0;
  for (std::size_t n : {32, 64, 128, 256}) {
    GridSpec g(n);
    const State s = sampled(g, u, [](double) { return 0.0; });
    const double e = linf(assemble_u_rhs(s, with_chi(0.0), DiffusionModel::power_law(1.0), g), exact, g);
    if (prev > 0.0) CHECK(std::log2(prev / e) >= 1.9);
    prev = e;
  }
}

TEST_CASE("upwind chemotaxis is first order") {
  auto u = [](double x) { return 1 + 0.5 * std::cos(kPi * x); };
  auto v = [](double x) { return std::cos(kPi * x); };
  auto exact = [&](double x) {  // -(u v_x)_x
    const double ux = -0.5 * kPi * std::sin(kPi * x), vx = -kPi * std::sin(kPi * x);
    const double vxx = -kPi * kPi * std::cos(kPi * x);
    return -(ux * vx + u(x) * vxx);
  };
  double prev = 0.0;
  for (std::size_t n : {64, 128, 256, 512}) {
    GridSpec g(n);
    const State s = sampled(g, u, v);
    const double e = linf(chemotaxis_rates(s, with_chi(1.0), g), exact, g);
    if (prev > 0.0) CHECK(std::log2(prev / e) >= 0.9);
    prev = e;
  }
}

TEST_CASE("conservation and symmetry") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 5.0), V(-2.0, 2.0);
  GridSpec g(64);
  State s;
  for (int i = 0; i < 64; ++i) {
    s.u.push_back(U(rng));
    s.v.push_back(V(rng));
  }
  const auto r = assemble_u_rhs(s, with_chi(1.3), DiffusionModel::power_law(0.7), g);
  double sum = 0.0, scale = 0.0;
  for (double x : r) {
    sum += x;
    scale += std::abs(x);
  }
  CHECK(std::abs(sum * g.h()) <= 1e-14 * scale * g.h() + 1e-300);

  State e;
  for (int i = 0; i < 32; ++i) {
    e.u.push_back(U(rng));
    e.v.push_back(V(rng));
  }
  for (int i = 31; i >= 0; --i) {
    e.u.push_back(e.u[i]);
    e.v.push_back(e.v[i]);
  }
  const auto re = assemble_u_rhs(e, with_chi(1.0), DiffusionModel::power_law(0.5), g);
  for (int i = 0; i < 32; ++i) CHECK(re[i] == doctest::Approx(re[63 - i]).epsilon(1e-12));
}

TEST_CASE("v equation") {
  GridSpec g(128);
  Params p;
  p.eps = 2.0;
  p.mass = 1.5;
  const State s = sampled(g, [](double x) { return 1.5 + std::cos(kPi * x); }, [](double) { return 0.0; });
  CHECK(linf(assemble_v_rhs(s, p, g), [](double x) { return 0.5 * std::cos(kPi * x); }, g) <= 1e-14);
  Params q = p;
  q.gamma = 0.8;
  const State w = sampled(g, [](double) { return 1.5; }, [](double x) { return std::cos(kPi * x) + 0.25; });
  double mean = 0.0;
  for (double x : assemble_v_rhs(w, q, g)) mean += x * g.h();
  CHECK(mean == doctest::Approx(0.8 / 2.0 * 0.25).epsilon(1e-10));
}

TEST_CASE("Neumann Laplacian") {
  GridSpec g(8);
  for (double x : laplacian_neumann(CellField(8, 5.0), g)) CHECK(x == 0.0);
  CellField f;
  for (std::size_t i = 0; i < 8; ++i) f.push_back(g.center(i));
  const auto L = laplacian_neumann(f, g);
  CHECK(L[0] == doctest::Approx(8.0));
  CHECK(L[7] == doctest::Approx(-8.0));
  for (std::size_t i = 1; i < 7; ++i) CHECK(std::abs(L[i]) < 1e-12);
  double prev = 0.0;
  for (std::size_t n : {32, 64, 128}) {
    GridSpec gn(n);
    CellField c;
    for (std::size_t i = 0; i < n; ++i) c.push_back(std::cos(kPi * gn.center(i)));
    const auto Lc = laplacian_neumann(c, gn);
    double sum = 0.0;
    for (double x : Lc) sum += x;
    CHECK(std::abs(sum) < 1e-9);
    const double e = linf(Lc, [](double x) { return -kPi * kPi * std::cos(kPi * x); }, gn);
    if (prev > 0.0) CHECK(std::log2(prev / e) >= 1.9);
    prev = e;
  }
}

TEST_CASE("implicit diffusion solve") {
  GridSpec g(16);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 3.0), C(0.1, 2.0);
  CellField f(16);
  for (double& x : f) x = U(rng);
  const std::vector<double> zero(15, 0.0);
  CHECK(implicit_diffusion_solve(f, zero, 0.7, g) == f);
  const auto c = implicit_diffusion_solve(CellField(16, 4.2), std::vector<double>(15, 1.3), 0.5, g);
  for (double x : c) CHECK(x == doctest::Approx(4.2).epsilon(1e-15));
  std::vector<double> coeff(15);
  for (double& x : coeff) x = C(rng);
  for (double dt : {1e-6, 1e-3, 1.0, 1e3}) {
    const auto x = implicit_diffusion_solve(f, coeff, dt, g);
    CHECK(implicit_residual(x, f, coeff, dt, g) <= 1e-12 * (1 + dt));
    double m0 = 0, m1 = 0;
    for (std::size_t i = 0; i < 16; ++i) {
      m0 += f[i];
      m1 += x[i];
      CHECK(x[i] >= 0.0);
    }
    // Round-off in the elimination grows with r = dt/h^2.
    CHECK(std::abs(m1 - m0) <= 1e-14 * (1 + dt / (g.h() * g.h())) * m0);
  }
  coeff[4] = -1.0;
  CHECK(code_of([&] { implicit_diffusion_solve(f, coeff, 0.1, g); }) == code(ErrorCode::Solver));
}

TEST_CASE("non-finite input names the index") {
  GridSpec g(8);
  State s{0.0, CellField(8, 1.0), CellField(8, 0.0)};
  s.u[5] = NAN;
  try {
    assemble_u_rhs(s, Params{}, DiffusionModel::power_law(0.0), g);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NumericState);
    CHECK(std::string(e.what()).find("index 5") != std::string::npos);
  }
}
