#include "core/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "core/errors.hpp"
#include "core/quadrature.hpp"

namespace ks1d {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::vector<TailSample> sample_tail_function(const DiffusionModel& model, int nodes_per_decade,
                                             double ratio_stop) {
  if (nodes_per_decade < 1) fail(ErrorCode::InputDomain, "nodes_per_decade must be positive");
  if (!model.integrable()) {
    std::ostringstream os;
    os << "cannot build the envelope: diffusion must be integrable on (0, inf), tail exponent "
       << model.tail_exponent() << " <= 1";
    fail(ErrorCode::DivergentTail, os.str());
  }
  std::vector<TailSample> out{{0.0, 0.0}};
  for (long k = 0;; ++k) {
    const double r = std::pow(10.0, -6.0 + static_cast<double>(k) / nodes_per_decade);
    if (r > 1e300)
      fail(ErrorCode::CannotCertify,
           "g(r)/r does not fall below the decay target before r = 1e300; a must be integrable "
           "with a usable tail");
    const double g = model.tail_mass(r);
    out.push_back({r, g});
    if (g / r < ratio_stop) break;
  }
  return out;
}

ConcaveEnvelope::ConcaveEnvelope(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() < 2 || x_.size() != y_.size())
    fail(ErrorCode::InputDomain, "envelope needs at least two breakpoints");
  if (x_.front() != 0.0) fail(ErrorCode::InputDomain, "envelope must start at x = 0");
  for (std::size_t k = 0; k + 1 < x_.size(); ++k) {
    if (!(x_[k + 1] > x_[k])) fail(ErrorCode::InputDomain, "envelope breakpoints must increase");
    slopes_.push_back((y_[k + 1] - y_[k]) / (x_[k + 1] - x_[k]));
  }
}

ConcaveEnvelope ConcaveEnvelope::zero() {
  ConcaveEnvelope e;
  e.x_ = {0.0, 1.0};
  e.y_ = {0.0, 0.0};
  e.slopes_ = {0.0};
  e.zero_ = true;
  return e;
}

double ConcaveEnvelope::operator()(double x) const {
  if (!(x >= 0.0)) fail(ErrorCode::InputDomain, "envelope evaluated at a negative point");
  if (zero_) return 0.0;
  if (x >= x_.back()) return y_.back() + slopes_.back() * (x - x_.back());
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - x_.begin()) - 1;
  return y_[k] + slopes_[k] * (x - x_[k]);
}

ConcaveEnvelope concave_majorant(std::span<const TailSample> samples) {
  if (samples.size() < 2) fail(ErrorCode::InputDomain, "concave_majorant needs >= 2 samples");
  if (samples.front().r != 0.0) fail(ErrorCode::InputDomain, "samples must start at r = 0");
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (!(samples[k].g >= 0.0) || !std::isfinite(samples[k].g))
      fail(ErrorCode::InputDomain, "samples of g must be finite and nonnegative");
    if (k && !(samples[k].r > samples[k - 1].r))
      fail(ErrorCode::InputDomain, "sample abscissae must be strictly increasing");
  }
  std::vector<TailSample> hull;
  for (const auto& p : samples) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      const double cross = (b.r - a.r) * (p.g - a.g) - (b.g - a.g) * (p.r - a.r);
      if (cross > 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(p);
  }
  // A majorant of g >= 0 on [0, inf) cannot decrease: cut at the maximum and
  // continue flat.
  const auto top = std::max_element(hull.begin(), hull.end(),
                                    [](const TailSample& a, const TailSample& b) { return a.g < b.g; });
  const bool flat_tail = top + 1 != hull.end();
  hull.erase(top + 1, hull.end());
  std::vector<double> x, y;
  for (const auto& p : hull) {
    x.push_back(p.r);
    y.push_back(p.g);
  }
  if (x.size() < 2) {  // g == 0 at every sample
    return ConcaveEnvelope::zero();
  }
  if (flat_tail) {
    x.push_back(2.0 * x.back());
    y.push_back(y.back());
  }
  return ConcaveEnvelope(std::move(x), std::move(y));
}

ConcaveEnvelope build_envelope(const DiffusionModel& model) {
  const auto samples = sample_tail_function(model);
  return concave_majorant(samples);
}

double beta_eval(const ConcaveEnvelope& B, double x) {
  if (!(x > 0.0)) fail(ErrorCode::InputDomain, "beta needs x > 0");
  return B(x) / x;
}

double certificate_A(const ConcaveEnvelope& B, double q, double M, double eps, double L) {
  if (!(q > 2.0)) fail(ErrorCode::InputDomain, "certificate_A needs q > 2");
  if (!(M > 0.0) || !(eps > 0.0)) fail(ErrorCode::InputDomain, "certificate_A needs M, eps > 0");
  if (!(L >= 0.0) || !std::isfinite(L)) fail(ErrorCode::InputDomain, "certificate_A needs L >= 0");
  const double Mq1 = std::pow(M, q + 1.0);
  const double last = Mq1 / (q * (q + 1.0));
  if (L == 0.0) return -last;
  double first = 0.0;
  if (!B.is_zero()) {
    const double e = (q - 2.0) / q;
    const double beta = beta_eval(B, Mq1 / (L * q * (q + 1.0)));
    first = (q - 1.0) * std::pow(B(M), 2.0 / q) * std::pow(Mq1 / (q + 1.0), e) * std::pow(beta, e);
  }
  return first + M * L * (1.0 + eps * std::pow(M, q - 1.0) / (4.0 * q)) - last;
}

double blowup_u0(double M, double x) {
  const double s = 1.0 - 1.0 / M;
  return x >= s ? 2.0 * M * M * M * (x - s) : 0.0;
}

double blowup_v0(double M, double x) { return M * x - 0.5 * M; }

State blowup_initial_data(double M, const GridSpec& grid) {
  if (!(M > 1.0) || !std::isfinite(M)) fail(ErrorCode::InputDomain, "blowup data needs M > 1");
  const std::size_t n = grid.n_cells();
  const double h = grid.h();
  const double s = 1.0 - 1.0 / M;
  std::size_t inside = 0;
  State st;
  st.u.assign(n, 0.0);
  st.v.resize(n);
  const double M3 = M * M * M;
  for (std::size_t i = 0; i < n; ++i) {
    const double xl = static_cast<double>(i) * h;
    const double xr = grid.right_edge(i);
    if (xl >= s) ++inside;
    if (xr > s) {
      const double a = std::max(xl, s);
      st.u[i] = M3 * (xr - a) * (xr + a - 2.0 * s) / h;
    }
    st.v[i] = blowup_v0(M, grid.center(i));
  }
  if (inside < 8) {
    std::ostringstream os;
    os << "grid with " << n << " cells puts only " << inside << " cells on the data support of width 1/"
       << M << " (need 8)";
    fail(ErrorCode::Resolution, os.str());
  }
  return st;
}

BlowupDataMoments blowup_data_moments(double M, double q, std::size_t pieces) {
  if (!(M > 1.0)) fail(ErrorCode::InputDomain, "blowup data needs M > 1");
  const double s = 1.0 - 1.0 / M;
  const double brk[] = {s};
  auto I = [&](const quad::Integrand& f) { return quad::composite_gauss(f, 0.0, 1.0, pieces, 8, brk); };
  BlowupDataMoments m;
  m.mass = I([&](double x) { return blowup_u0(M, x); });
  m.u_l2_sq = I([&](double x) { return std::pow(blowup_u0(M, x), 2); });
  m.v_h1_sq = M * M + I([&](double x) { return std::pow(blowup_v0(M, x), 2); });
  m.uv = I([&](double x) { return blowup_u0(M, x) * blowup_v0(M, x); });
  m.L0 = I([&](double x) {
           const double U = x >= s ? M * M * M * (x - s) * (x - s) : 0.0;
           return std::pow(U, q);
         }) / q;
  return m;
}

std::string to_json(const CertificateReport& r, int indent) {
  nlohmann::json j{{"q", r.q},          {"M", r.M},       {"eps_choice", r.eps_choice},
                   {"L0", r.L0},        {"lambda0", r.lambda0}, {"Phi0", r.Phi0},
                   {"A_at_Phi0", r.A_at_Phi0}, {"certified", r.certified}};
  if (!r.M0_search_trace.empty()) {
    auto& arr = j["M0_search_trace"] = nlohmann::json::array();
    for (const auto& p : r.M0_search_trace) arr.push_back({{"M", p.M}, {"A", p.A}, {"certified", p.certified}});
  }
  return j.dump(indent);
}

CertificateReport certify_with(double M, double q, const ConcaveEnvelope& B,
                               const EntropyProfile& profile, const GridSpec& grid,
                               std::optional<double> eps) {
  if (!(q > 4.0) || !std::isfinite(q)) fail(ErrorCode::InputDomain, "certify needs q > 4");
  if (!(M > 1.0) || !std::isfinite(M)) fail(ErrorCode::InputDomain, "certify needs M > 1");
  CertificateReport rep;
  rep.q = q;
  rep.M = M;
  rep.eps_choice = eps ? *eps : std::pow(M, 1.0 - q);
  if (!(rep.eps_choice > 0.0)) fail(ErrorCode::InputDomain, "certify needs eps > 0");
  const State st = blowup_initial_data(M, grid);
  rep.L0 = moment_L(st.u, q, grid);
  rep.lambda0 = lyapunov(st, profile, grid);
  rep.Phi0 = rep.L0 + rep.lambda0 + 0.5 * M * M;
  if (!(rep.Phi0 >= 0.0)) {
    std::ostringstream os;
    os << "Phi(0) = " << rep.Phi0 << " is negative; the data is not resolved";
    fail(ErrorCode::Resolution, os.str());
  }
  rep.A_at_Phi0 = certificate_A(B, q, M, rep.eps_choice, rep.Phi0);
  rep.certified = rep.A_at_Phi0 < 0.0;
  return rep;
}

CertificateReport certify(double M, double q, const DiffusionModel& model, const EntropyProfile& profile,
                          const GridSpec& grid, std::optional<double> eps) {
  return certify_with(M, q, build_envelope(model), profile, grid, eps);
}

ThresholdResult search_mass_threshold(const CertifyFn& evaluate, double M_min, double M_max,
                                      double rel_tol, std::size_t validation_points) {
  if (!(M_min > 0.0) || !std::isfinite(M_max) || !(M_max > M_min))
    fail(ErrorCode::InputDomain, "mass range must satisfy 0 < M_min < M_max");
  if (!(rel_tol > 0.0)) fail(ErrorCode::InputDomain, "rel_tol must be positive");
  ThresholdResult res;
  auto probe = [&](double M, std::vector<SearchTracePoint>& into) {
    const CertificateReport r = evaluate(M);
    into.push_back({M, r.A_at_Phi0, r.certified});
    return into.back();
  };
  const auto lo_pt = probe(M_min, res.trace);
  const auto hi_pt = probe(M_max, res.trace);
  res.A_min = lo_pt.A;
  res.A_max = hi_pt.A;
  res.lower = M_min;
  res.M0 = M_max;
  if (lo_pt.certified || !hi_pt.certified) return res;

  double lo = M_min, hi = M_max;
  while (hi - lo > rel_tol * hi) {
    const double mid = std::sqrt(lo * hi);
    if (mid <= lo || mid >= hi) break;
    if (probe(mid, res.trace).certified) hi = mid;
    else lo = mid;
  }
  res.found = true;
  res.M0 = hi;
  res.lower = lo;
  res.monotone_validated = true;
  for (std::size_t k = 1; k <= validation_points; ++k) {
    const double M = hi * std::pow(M_max / hi, static_cast<double>(k) / validation_points);
    if (!probe(M, res.validation).certified) res.monotone_validated = false;
  }
  return res;
}

std::size_t threshold_grid_cells(double M, std::size_t base) {
  std::size_t n = base;
  while (static_cast<double>(n) < 16.0 * M) n *= 2;
  return n;
}

BlowupMonitor monitor_phi(std::span<const DiagnosticsRecord> rows, const ConcaveEnvelope& B, double q,
                          double M, double eps, double u_max_cap, double c_tol) {
  BlowupMonitor mon;
  const double half_m2 = 0.5 * M * M;
  std::size_t end = 0;
  while (end < rows.size() && rows[end].u_max <= u_max_cap) ++end;
  for (std::size_t k = 0; k < end; ++k) {
    PhiRow row;
    row.t = rows[k].t;
    row.phi = rows[k].L_q + rows[k].lambda + half_m2;
    row.a_of_phi = row.phi >= 0.0 ? certificate_A(B, q, M, eps, row.phi) : kNaN;
    row.dphi_dt = kNaN;
    mon.rows.push_back(row);
  }
  for (std::size_t k = 0; k < mon.rows.size(); ++k) {
    auto& a = mon.rows[k];
    if (!(a.phi >= -1e-8)) mon.violations.push_back({k, "phi-negative", a.phi, 0.0});
    if (k + 1 == mon.rows.size()) break;
    const auto& b = mon.rows[k + 1];
    const double span = b.t - a.t;
    if (!(span > 0.0)) continue;
    a.dphi_dt = (b.phi - a.phi) / span;
    if (std::isnan(a.a_of_phi) || std::isnan(b.a_of_phi)) continue;
    const double bound = std::max(a.a_of_phi, b.a_of_phi) +
                         c_tol * (1.0 + std::abs(a.phi)) * std::max(rows[k].dt, rows[k + 1].dt);
    if (a.dphi_dt > bound) mon.violations.push_back({k + 1, "phi-growth", a.dphi_dt, bound});
  }
  return mon;
}

}  // namespace ks1d
