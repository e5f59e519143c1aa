#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/diagnostics.hpp"
#include "core/model.hpp"

namespace ks1d {

struct TailSample {
  double r = 0.0;
  double g = 0.0;
};

/// Samples g(r) = r * int_r^inf a on {0} plus a log grid from 1e-6 upward,
/// stopping once g(r)/r < ratio_stop. Throws DivergentTail for non-integrable
/// models and CannotCertify when the decay is not reached before 1e300.
std::vector<TailSample> sample_tail_function(const DiffusionModel& model, int nodes_per_decade = 100,
                                             double ratio_stop = 1e-6);

/// Piecewise linear concave function through breakpoints (x_0 = 0), continued
/// past the last breakpoint with the last slope.
class ConcaveEnvelope {
 public:
  ConcaveEnvelope(std::vector<double> x, std::vector<double> y);
  /// B == 0.
  static ConcaveEnvelope zero();

  double operator()(double x) const;
  const std::vector<double>& breakpoints_x() const noexcept { return x_; }
  const std::vector<double>& breakpoints_y() const noexcept { return y_; }
  /// Slope of segment k (between breakpoints k and k+1); the last entry is
  /// the tail slope.
  const std::vector<double>& slopes() const noexcept { return slopes_; }
  double tail_slope() const noexcept { return slopes_.back(); }
  bool is_zero() const noexcept { return zero_; }

 private:
  ConcaveEnvelope() = default;
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> slopes_;
  bool zero_ = false;
};

/// Least concave majorant (upper hull) of the samples. Samples must have
/// strictly increasing r starting at r = 0 and g >= 0.
ConcaveEnvelope concave_majorant(std::span<const TailSample> samples);
/// Tail sampling followed by the hull.
ConcaveEnvelope build_envelope(const DiffusionModel& model);

/// B(x)/x.
double beta_eval(const ConcaveEnvelope& B, double x);

/// A_{B,q}(L); L = 0 returns the L -> 0+ limit -M^{q+1}/(q(q+1)).
double certificate_A(const ConcaveEnvelope& B, double q, double M, double eps, double L);

/// Concentrated ramp data: u0 = 2M^3 (x + 1/M - 1) on [1 - 1/M, 1], zero
/// elsewhere; v0 = M x - M/2.
double blowup_u0(double M, double x);
double blowup_v0(double M, double x);
/// Cell averages of u0 (exact ramp integrals), v0 at cell centers.
State blowup_initial_data(double M, const GridSpec& grid);

/// Moments of the continuous data by composite Gauss quadrature split at the
/// support edge.
struct BlowupDataMoments {
  double mass = 0.0;
  double u_l2_sq = 0.0;
  double v_h1_sq = 0.0;  // int v'^2 + int v^2
  double uv = 0.0;
  double L0 = 0.0;       // (1/q) int U^q
};
BlowupDataMoments blowup_data_moments(double M, double q, std::size_t pieces = 256);

struct SearchTracePoint {
  double M = 0.0;
  double A = 0.0;
  bool certified = false;
};

struct CertificateReport {
  double q = 0.0;
  double M = 0.0;
  double eps_choice = 0.0;
  double L0 = 0.0;
  double lambda0 = 0.0;
  double Phi0 = 0.0;
  double A_at_Phi0 = 0.0;
  bool certified = false;
  std::vector<SearchTracePoint> M0_search_trace;
};

std::string to_json(const CertificateReport& r, int indent = 2);

/// Blowup certificate for mass M with the ramp data on `grid`. eps defaults to
/// M^{1-q}. Requires q > 4, M > 1 and an integrable model (for the envelope).
CertificateReport certify(double M, double q, const DiffusionModel& model,
                          const EntropyProfile& profile, const GridSpec& grid,
                          std::optional<double> eps = std::nullopt);
/// Same with a prebuilt envelope (also the B == 0 synthetic route).
CertificateReport certify_with(double M, double q, const ConcaveEnvelope& B,
                               const EntropyProfile& profile, const GridSpec& grid,
                               std::optional<double> eps = std::nullopt);

using CertifyFn = std::function<CertificateReport(double M)>;

struct ThresholdResult {
  bool found = false;   // false: no sign change on the range (inconclusive)
  double M0 = 0.0;      // certified end of the final bracket
  double lower = 0.0;   // uncertified end
  double A_min = 0.0;   // A at the range endpoints
  double A_max = 0.0;
  bool monotone_validated = false;
  std::vector<SearchTracePoint> validation;
  std::vector<SearchTracePoint> trace;
};

/// Bisection in log M for the certified/uncertified switch. Throws
/// InputDomain for an empty or non-positive range.
ThresholdResult search_mass_threshold(const CertifyFn& evaluate, double M_min, double M_max,
                                      double rel_tol = 1e-10, std::size_t validation_points = 16);

/// Smallest power-of-two grid (>= base) that puts >= 16 cells per unit of M
/// (so the data support holds >= 16 cells).
std::size_t threshold_grid_cells(double M, std::size_t base = 512);

struct PhiRow {
  double t = 0.0;
  double phi = 0.0;
  double a_of_phi = 0.0;
  double dphi_dt = 0.0;  // slope to the next row; NaN on the last row
};

struct BlowupMonitor {
  std::vector<PhiRow> rows;
  std::vector<Violation> violations;
};

/// Discrete check of dPhi/dt <= A(Phi) over sampled rows with u_max <= u_max_cap.
/// Slack per interval: c_tol (1 + |Phi_k|) max(dt_k, dt_{k+1}).
BlowupMonitor monitor_phi(std::span<const DiagnosticsRecord> rows, const ConcaveEnvelope& B,
                          double q, double M, double eps, double u_max_cap = 1e3,
                          double c_tol = 10.0);

}  // namespace ks1d
