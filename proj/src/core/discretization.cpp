#include "core/discretization.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace ks1d {

std::vector<double> face_diffusivity(std::span<const double> u, const DiffusionModel& model) {
  std::vector<double> c(u.size() - 1);
  for (std::size_t i = 0; i + 1 < u.size(); ++i) c[i] = model(std::max(0.5 * (u[i] + u[i + 1]), 0.0));
  return c;
}

FluxAssembly assemble_u_fluxes(const State& state, const Params& params, const DiffusionModel& model,
                               const GridSpec& grid) {
  require_field(state.u, grid, "u");
  require_field(state.v, grid, "v");
  const std::size_t n = grid.n_cells();
  const double inv_h = 1.0 / grid.h();
  FluxAssembly fa;
  fa.diffusive.resize(n - 1);
  fa.chemotactic.resize(n - 1);
  const auto& u = state.u;
  const auto& v = state.v;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = model(std::max(0.5 * (u[i] + u[i + 1]), 0.0));
    fa.diffusive[i] = a * (u[i + 1] - u[i]) * inv_h;
    const double speed = params.chi * (v[i + 1] - v[i]) * inv_h;
    const double upwind = speed > 0.0 ? u[i] : u[i + 1];
    fa.chemotactic[i] = -speed * upwind;
  }
  return fa;
}

CellField flux_divergence(std::span<const double> faces, const GridSpec& grid) {
  const std::size_t n = grid.n_cells();
  const double inv_h = 1.0 / grid.h();
  CellField rate(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double right = (i + 1 < n) ? faces[i] : 0.0;
    const double left = (i > 0) ? faces[i - 1] : 0.0;
    rate[i] = (right - left) * inv_h;
  }
  return rate;
}

CellField assemble_u_rhs(const State& state, const Params& params, const DiffusionModel& model,
                         const GridSpec& grid) {
  const FluxAssembly fa = assemble_u_fluxes(state, params, model, grid);
  std::vector<double> total(fa.diffusive.size());
  for (std::size_t i = 0; i < total.size(); ++i) total[i] = fa.total(i);
  return flux_divergence(total, grid);
}

CellField chemotaxis_rates(const State& state, const Params& params, const GridSpec& grid) {
  const std::size_t n = grid.n_cells();
  const double inv_h = 1.0 / grid.h();
  std::vector<double> faces(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double speed = params.chi * (state.v[i + 1] - state.v[i]) * inv_h;
    faces[i] = -speed * (speed > 0.0 ? state.u[i] : state.u[i + 1]);
  }
  return flux_divergence(faces, grid);
}

CellField laplacian_neumann(std::span<const double> f, const GridSpec& grid) {
  require_field(f, grid, "field");
  const std::size_t n = grid.n_cells();
  const double inv_h2 = 1.0 / (grid.h() * grid.h());
  CellField out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double right = (i + 1 < n) ? f[i + 1] - f[i] : 0.0;
    const double left = (i > 0) ? f[i] - f[i - 1] : 0.0;
    out[i] = (right - left) * inv_h2;
  }
  return out;
}

CellField assemble_v_rhs(const State& state, const Params& params, const GridSpec& grid) {
  require_field(state.u, grid, "u");
  const CellField lap = laplacian_neumann(state.v, grid);
  CellField rate(grid.n_cells());
  for (std::size_t i = 0; i < rate.size(); ++i)
    rate[i] = (params.D * lap[i] + state.u[i] - params.mass + params.gamma * state.v[i]) / params.eps;
  return rate;
}

double max_chemotactic_speed(std::span<const double> v, double chi, const GridSpec& grid) {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) m = std::max(m, std::abs(chi * (v[i + 1] - v[i])));
  return m / grid.h();
}

CellField implicit_diffusion_solve(std::span<const double> f, std::span<const double> coeff_faces,
                                   double dt, const GridSpec& grid) {
  require_field(f, grid, "right-hand side");
  const std::size_t n = grid.n_cells();
  if (coeff_faces.size() != n - 1) fail(ErrorCode::Validation, "implicit solve needs n-1 face coefficients");
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorCode::InputDomain, "implicit solve needs dt > 0");
  const double r = dt / (grid.h() * grid.h());
  // Off-diagonals are -r c; diagonal 1 + r (c_left + c_right).
  std::vector<double> cprime(n);
  CellField x(n);
  auto coeff = [&](std::size_t face) {
    const double c = coeff_faces[face];
    if (!(c >= 0.0) || !std::isfinite(c))
      fail(ErrorCode::Solver, "negative or non-finite diffusion coefficient at face " + std::to_string(face));
    return r * c;
  };
  double lower = 0.0;  // r c_{i-1/2}
  double upper = coeff(0);
  double pivot = 1.0 + upper;
  cprime[0] = upper / pivot;
  x[0] = f[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    lower = upper;
    upper = (i + 1 < n) ? coeff(i) : 0.0;
    pivot = 1.0 + lower + upper - lower * cprime[i - 1];
    if (!(pivot > 0.0)) fail(ErrorCode::Solver, "non-positive pivot in implicit diffusion solve");
    cprime[i] = upper / pivot;
    x[i] = (f[i] + lower * x[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] += cprime[i] * x[i + 1];
  return x;
}

double implicit_residual(std::span<const double> x, std::span<const double> f,
                         std::span<const double> coeff_faces, double dt, const GridSpec& grid) {
  const std::size_t n = grid.n_cells();
  const double r = dt / (grid.h() * grid.h());
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double right = (i + 1 < n) ? coeff_faces[i] * (x[i + 1] - x[i]) : 0.0;
    const double left = (i > 0) ? coeff_faces[i - 1] * (x[i] - x[i - 1]) : 0.0;
    worst = std::max(worst, std::abs(x[i] - r * (right - left) - f[i]));
  }
  return worst;
}

}  // namespace ks1d
