#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "core/model.hpp"

namespace ks1d {

struct MomentConfig {
  double q = 5.0;
  explicit MomentConfig(double q_value);
};

/// One sampled row of the monitored functionals.
struct DiagnosticsRecord {
  double t = 0.0;
  double dt = 0.0;
  double mass = 0.0;
  double v_mean = 0.0;
  double u_max = 0.0;
  double lambda = 0.0;
  double L_q = 0.0;
  double l2 = 0.0;
  double l3 = 0.0;
  double llogl = 0.0;
  double grad_log_energy = 0.0;
  double vt_l2 = 0.0;
  double phi = 0.0;       // L_q + lambda + M^2/2
  double a_of_phi = 0.0;  // NaN when no envelope is available
  double l3_plus1 = 0.0;  // |u + 1|_3
  double dissipation_residual = 0.0;
  std::size_t entropy_floor_hits = 0;
};

/// Column order of the trajectory CSV.
inline constexpr const char* kTrajectoryColumns =
    "t,dt,mass,v_mean,u_max,lambda,L_q,l2,l3,llogl,grad_log_energy,vt_l2,phi,a_of_phi";
std::string to_csv_row(const DiagnosticsRecord& r);

struct DiagnosticsContext {
  std::shared_ptr<const EntropyProfile> entropy;
  Params params;
  double q = 5.0;
  /// A_{B,q} evaluated at phi; empty when the diffusion is not integrable.
  std::function<double(double)> a_of_phi;
};

double mass(const State& state, const GridSpec& grid);
double v_mean(const State& state, const GridSpec& grid);
/// h sum [b(u_i) - u_i v_i] + 1/2 sum_faces |(v_{i+1} - v_i)/h|^2 h.
double lyapunov(const State& state, const EntropyProfile& entropy, const GridSpec& grid,
                std::size_t* floor_hits = nullptr);
double moment_L(const State& state, const MomentConfig& q, const GridSpec& grid);
double moment_L(std::span<const double> u, double q, const GridSpec& grid);
double lp_norm(std::span<const double> u, double p, const GridSpec& grid);
double llogl(std::span<const double> u, const GridSpec& grid);
double grad_log_energy(std::span<const double> u, const GridSpec& grid);

DiagnosticsRecord sample_diagnostics(const State& state, double dt, const DiagnosticsContext& ctx,
                                     const GridSpec& grid);

struct Violation {
  std::size_t index = 0;  // row index of the later sample
  std::string kind;
  double value = 0.0;
  double bound = 0.0;
};

/// Flags (lambda_{k+1} - lambda_k)/dt_k > -eps min(vt_l2^2) + c_tol (1+|lambda_k|) dt
/// and lambda_k < -M^2/2 - 1e-8.
std::vector<Violation> dissipation_check(std::span<const DiagnosticsRecord> rows, double eps,
                                         double mass, double c_tol = 10.0);

/// Trapezoid accumulation of vt_l2^2 over sample times.
double vt_l2_time_integral(std::span<const DiagnosticsRecord> rows);

}  // namespace ks1d
