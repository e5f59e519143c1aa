#include "core/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "core/discretization.hpp"
#include "core/errors.hpp"

namespace ks1d {

MomentConfig::MomentConfig(double q_value) : q(q_value) {
  if (!(q_value > 2.0) || !std::isfinite(q_value))
    fail(ErrorCode::InputDomain, "moment exponent q must exceed 2");
}

std::string to_csv_row(const DiagnosticsRecord& r) {
  const double cols[] = {r.t,      r.dt, r.mass,  r.v_mean,          r.u_max, r.lambda, r.L_q,
                         r.l2,     r.l3, r.llogl, r.grad_log_energy, r.vt_l2, r.phi,    r.a_of_phi};
  std::string out;
  char buf[40];
  for (std::size_t i = 0; i < std::size(cols); ++i) {
    if (i) out.push_back(',');
    if (std::isnan(cols[i])) out += "nan";
    else {
      std::snprintf(buf, sizeof buf, "%.17g", cols[i]);
      out += buf;
    }
  }
  return out;
}

double mass(const State& state, const GridSpec& grid) {
  double s = 0.0;
  for (double x : state.u) s += x;
  return grid.h() * s;
}

double v_mean(const State& state, const GridSpec& grid) {
  double s = 0.0;
  for (double x : state.v) s += x;
  return grid.h() * s;
}

double lyapunov(const State& state, const EntropyProfile& entropy, const GridSpec& grid,
                std::size_t* floor_hits) {
  require_field(state.u, grid, "u");
  require_field(state.v, grid, "v");
  std::size_t hits = 0;
  const double h = grid.h();
  double bulk = 0.0;
  for (std::size_t i = 0; i < state.u.size(); ++i)
    bulk += entropy.evaluate_clamped(state.u[i], hits) - state.u[i] * state.v[i];
  double grad = 0.0;
  for (std::size_t i = 0; i + 1 < state.v.size(); ++i) {
    const double g = (state.v[i + 1] - state.v[i]) / h;
    grad += g * g;
  }
  if (floor_hits) *floor_hits += hits;
  return h * bulk + 0.5 * h * grad;
}

double moment_L(std::span<const double> u, double q, const GridSpec& grid) {
  // Trapezoid rule on the edge values U(0) = 0, U(x_{i+1/2}) = F_i.
  const CellField U = cumulative_integral(u, grid);
  double s = 0.0;
  for (std::size_t i = 0; i < U.size(); ++i) {
    const double w = (i + 1 == U.size()) ? 0.5 : 1.0;
    s += w * std::pow(std::abs(U[i]), q);
  }
  return grid.h() * s / q;
}

double moment_L(const State& state, const MomentConfig& q, const GridSpec& grid) {
  return moment_L(state.u, q.q, grid);
}

double lp_norm(std::span<const double> u, double p, const GridSpec& grid) {
  if (!(p >= 1.0)) fail(ErrorCode::InputDomain, "lp_norm needs p >= 1");
  double s = 0.0;
  for (double x : u) s += std::pow(std::abs(x), p);
  return std::pow(grid.h() * s, 1.0 / p);
}

double llogl(std::span<const double> u, const GridSpec& grid) {
  double s = 0.0;
  for (double x : u) s += (x + 1.0) * std::log1p(x);
  return grid.h() * s;
}

double grad_log_energy(std::span<const double> u, const GridSpec& grid) {
  const double h = grid.h();
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const double g = (std::log1p(u[i + 1]) - std::log1p(u[i])) / h;
    s += g * g;
  }
  return h * s;
}

DiagnosticsRecord sample_diagnostics(const State& state, double dt, const DiagnosticsContext& ctx,
                                     const GridSpec& grid) {
  DiagnosticsRecord r;
  r.t = state.t;
  r.dt = dt;
  r.mass = mass(state, grid);
  r.v_mean = v_mean(state, grid);
  r.u_max = state.u.empty() ? 0.0 : *std::max_element(state.u.begin(), state.u.end());
  if (ctx.entropy) r.lambda = lyapunov(state, *ctx.entropy, grid, &r.entropy_floor_hits);
  else r.lambda = std::numeric_limits<double>::quiet_NaN();
  r.L_q = moment_L(state.u, ctx.q, grid);
  r.l2 = lp_norm(state.u, 2.0, grid);
  r.l3 = lp_norm(state.u, 3.0, grid);
  r.llogl = llogl(state.u, grid);
  r.grad_log_energy = grad_log_energy(state.u, grid);
  const CellField vt = assemble_v_rhs(state, ctx.params, grid);
  r.vt_l2 = lp_norm(vt, 2.0, grid);
  const double M = ctx.params.mass;
  r.phi = r.L_q + r.lambda + 0.5 * M * M;
  r.a_of_phi = (ctx.a_of_phi && std::isfinite(r.phi) && r.phi >= 0.0)
                   ? ctx.a_of_phi(r.phi)
                   : std::numeric_limits<double>::quiet_NaN();
  double s3 = 0.0;
  for (double x : state.u) s3 += std::pow(std::abs(x + 1.0), 3.0);
  r.l3_plus1 = std::cbrt(grid.h() * s3);
  return r;
}

std::vector<Violation> dissipation_check(std::span<const DiagnosticsRecord> rows, double eps,
                                         double mass, double c_tol) {
  std::vector<Violation> out;
  const double floor = -0.5 * mass * mass - 1e-8;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].lambda < floor) out.push_back({k, "lambda-lower-bound", rows[k].lambda, floor});
    if (k == 0) continue;
    const auto& a = rows[k - 1];
    const auto& b = rows[k];
    const double span = b.t - a.t;
    if (!(span > 0.0)) continue;
    const double slope = (b.lambda - a.lambda) / span;
    const double vt2 = std::min(a.vt_l2 * a.vt_l2, b.vt_l2 * b.vt_l2);
    const double bound = -eps * vt2 + c_tol * (1.0 + std::abs(a.lambda)) * std::max(a.dt, b.dt);
    if (slope > bound) out.push_back({k, "dissipation", slope, bound});
  }
  return out;
}

double vt_l2_time_integral(std::span<const DiagnosticsRecord> rows) {
  double total = 0.0;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double a = rows[k - 1].vt_l2;
    const double b = rows[k].vt_l2;
    total += 0.5 * (a * a + b * b) * (rows[k].t - rows[k - 1].t);
  }
  return total;
}

}  // namespace ks1d
