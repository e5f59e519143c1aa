#include "core/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "core/errors.hpp"

namespace ks1d::quad {
namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights belong to the odd-indexed Kronrod abscissae 1, 3, 5, 7.
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Estimate {
  double kronrod;
  double error;
};

Estimate gk15(const Integrand& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  const double fc = f(c);
  double k = kWgk[7] * fc;
  double g = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = r * kXgk[j];
    const double s = f(c - dx) + f(c + dx);
    k += kWgk[j] * s;
    if (j % 2 == 1) g += kWg[j / 2] * s;
  }
  return {k * r, std::abs((k - g) * r)};
}

struct Adaptive {
  const Integrand& f;
  double abs_tol;
  double rel_tol;
  int max_depth;
  double worst_excess = 0.0;

  double recurse(double a, double b, const Estimate& whole, double width_share, int depth) {
    const double tol = std::max(abs_tol * width_share, rel_tol * std::abs(whole.kronrod));
    if (whole.error <= tol || depth >= max_depth || b - a <= 1e-15 * std::max(1.0, std::abs(a))) {
      if (whole.error > tol) worst_excess = std::max(worst_excess, whole.error / std::max(tol, 1e-300));
      return whole.kronrod;
    }
    const double m = 0.5 * (a + b);
    const Estimate left = gk15(f, a, m);
    const Estimate right = gk15(f, m, b);
    return recurse(a, m, left, 0.5 * width_share, depth + 1) +
           recurse(m, b, right, 0.5 * width_share, depth + 1);
  }
};

GaussLegendreRule build_rule(int n) {
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

double gauss_on(const Integrand& f, const GaussLegendreRule& rule, double a, double b) {
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(c + r * rule.nodes[i]);
  return s * r;
}

}  // namespace

double adaptive(const Integrand& f, double a, double b, double abs_tol, double rel_tol,
                int max_depth) {
  if (a == b) return 0.0;
  if (b < a) return -adaptive(f, b, a, abs_tol, rel_tol, max_depth);
  Adaptive state{f, abs_tol, rel_tol, max_depth};
  const double value = state.recurse(a, b, gk15(f, a, b), 1.0, 0);
  if (!std::isfinite(value)) fail(ErrorCode::Solver, "adaptive quadrature produced a non-finite value");
  if (state.worst_excess > 100.0)
    fail(ErrorCode::Solver, "adaptive quadrature did not reach tolerance on [" +
                                std::to_string(a) + ", " + std::to_string(b) + "]");
  return value;
}

const GaussLegendreRule& gauss_legendre(int points) {
  static std::mutex mutex;
  static std::map<int, GaussLegendreRule> cache;
  if (points < 1 || points > 64) fail(ErrorCode::InputDomain, "Gauss-Legendre order must be in [1, 64]");
  std::lock_guard lock(mutex);
  auto it = cache.find(points);
  if (it == cache.end()) it = cache.emplace(points, build_rule(points)).first;
  return it->second;
}

double composite_gauss(const Integrand& f, double a, double b, std::size_t n_pieces, int points,
                       std::span<const double> breaks) {
  if (n_pieces == 0) fail(ErrorCode::InputDomain, "composite_gauss needs at least one piece");
  const GaussLegendreRule& rule = gauss_legendre(points);
  std::vector<double> sorted(breaks.begin(), breaks.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = (b - a) / static_cast<double>(n_pieces);
  double total = 0.0;
  for (std::size_t i = 0; i < n_pieces; ++i) {
    const double lo = a + h * static_cast<double>(i);
    const double hi = (i + 1 == n_pieces) ? b : a + h * static_cast<double>(i + 1);
    double cursor = lo;
    for (double br : sorted) {
      if (br > cursor && br < hi) {
        total += gauss_on(f, rule, cursor, br);
        cursor = br;
      }
    }
    total += gauss_on(f, rule, cursor, hi);
  }
  return total;
}

}  // namespace ks1d::quad
