#pragma once

#include <functional>
#include <span>
#include <vector>

namespace ks1d::quad {

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (7/15) on [a, b]. Subdivides until the local
/// Kronrod-Gauss difference is below max(abs_tol, rel_tol*|I|) scaled to the
/// subinterval width. Throws ks1d::Error(Solver) if max_depth is exhausted
/// with the estimate still above 100x the requested tolerance.
double adaptive(const Integrand& f, double a, double b, double abs_tol = 1e-12,
                double rel_tol = 1e-12, int max_depth = 60);

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (Newton iteration on P_n).
const GaussLegendreRule& gauss_legendre(int points);

/// Composite Gauss-Legendre over `n_pieces` equal pieces of [a, b]. Any piece
/// containing a point of `breaks` is split there, so piecewise-smooth
/// integrands with known kinks are integrated to rule accuracy.
double composite_gauss(const Integrand& f, double a, double b, std::size_t n_pieces,
                       int points = 8, std::span<const double> breaks = {});

}  // namespace ks1d::quad
