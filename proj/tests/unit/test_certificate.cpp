#include <cmath>
#include <random>

#include "core/certificate.hpp"
#include "helpers.hpp"
#include "json.hpp"

using namespace ks1d;

namespace {

// O(n^2) chord oracle for the least concave majorant at the sample points,
// then a running maximum for monotonicity.
std::vector<double> chord_oracle(const std::vector<TailSample>& s) {
  const std::size_t n = s.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = s[i].g;
    for (std::size_t j = 0; j <= i; ++j)
      for (std::size_t k = i; k < n; ++k) {
        if (j == k) continue;
        const double w = (s[i].r - s[j].r) / (s[k].r - s[j].r);
        best = std::max(best, (1 - w) * s[j].g + w * s[k].g);
      }
    out[i] = best;
  }
  for (std::size_t i = 1; i < n; ++i) out[i] = std::max(out[i], out[i - 1]);
  return out;
}

}  // namespace

TEST_CASE("majorant matches the chord oracle") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> G(0.0, 5.0), dR(0.05, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<TailSample> s{{0.0, G(rng)}};
    for (int i = 0; i < 40; ++i) s.push_back({s.back().r + dR(rng), G(rng)});
    const ConcaveEnvelope B = concave_majorant(s);
    const auto want = chord_oracle(s);
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(B(s[i].r) == doctest::Approx(want[i]).epsilon(1e-12));
      CHECK(B(s[i].r) >= s[i].g - 1e-12);
    }
    CHECK(B.tail_slope() == 0.0);
    CHECK(B(1e6) == doctest::Approx(want.back()));
    const auto& sl = B.slopes();
    for (std::size_t k = 1; k < sl.size(); ++k) CHECK(sl[k] <= sl[k - 1] + 1e-12);
  }
}

TEST_CASE("majorant input checks and the zero envelope") {
  CHECK(code_of([] { concave_majorant(std::vector<TailSample>{{0, 1}}); }) == code(ErrorCode::InputDomain));
  CHECK(code_of([] { concave_majorant(std::vector<TailSample>{{0.5, 1}, {1, 2}}); }) ==
        code(ErrorCode::InputDomain));
  CHECK(code_of([] { concave_majorant(std::vector<TailSample>{{0, 1}, {0, 2}}); }) ==
        code(ErrorCode::InputDomain));
  CHECK(code_of([] { concave_majorant(std::vector<TailSample>{{0, 1}, {1, -2}}); }) ==
        code(ErrorCode::InputDomain));
  const auto z = concave_majorant(std::vector<TailSample>{{0, 0}, {1, 0}, {2, 0}});
  CHECK(z.is_zero());
  CHECK(z(5.0) == 0.0);
  CHECK(ConcaveEnvelope::zero()(3.0) == 0.0);
  CHECK(code_of([] { ConcaveEnvelope({1.0, 2.0}, {0.0, 1.0}); }) == code(ErrorCode::InputDomain));
  CHECK(code_of([] { ConcaveEnvelope::zero()(-1.0); }) == code(ErrorCode::InputDomain));
}

TEST_CASE("envelope of an integrable power law") {
  // alpha = 2: g(r) = r / (1 + r) is already concave and increasing.
  const auto B = build_envelope(DiffusionModel::power_law(2.0));
  // Chords of a concave g: exact on the nodes, within the secant defect between.
  for (double r : {1e-3, 0.1, 1.0, 3.7, 50.0, 1e4}) CHECK(B(r) == doctest::Approx(r / (1 + r)).epsilon(2e-5));
  const auto& x = B.breakpoints_x();
  const auto& y = B.breakpoints_y();
  for (std::size_t k = 0; k < x.size(); ++k) CHECK(y[k] >= x[k] / (1 + x[k]) * (1 - 1e-12));
  for (std::size_t k = 0; k < x.size(); ++k) CHECK(y[k] == doctest::Approx(x[k] / (1 + x[k])).epsilon(1e-10));
  CHECK(beta_eval(B, 1.0) == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(code_of([&] { beta_eval(B, 0.0); }) == code(ErrorCode::InputDomain));
  CHECK(code_of([] { build_envelope(DiffusionModel::power_law(1.0)); }) == code(ErrorCode::DivergentTail));
  CHECK(code_of([] { build_envelope(DiffusionModel::power_law(0.5)); }) == code(ErrorCode::DivergentTail));
  const auto tail = sample_tail_function(DiffusionModel::power_law(3.0));
  CHECK(tail.front().r == 0.0);
  CHECK(tail.front().g == 0.0);
  CHECK(tail.back().g / tail.back().r < 1e-6);
}

TEST_CASE("certificate functional") {
  const auto zero = ConcaveEnvelope::zero();
  // B = 0, q = 5, M = 1, eps = 1: A(L) = 1.05 L - 1/30.
  CHECK(certificate_A(zero, 5, 1, 1, 1) == doctest::Approx(61.0 / 60.0).epsilon(1e-15));
  CHECK(certificate_A(zero, 5, 1, 1, 0) == doctest::Approx(-1.0 / 30.0).epsilon(1e-15));
  CHECK(certificate_A(zero, 5, 1, 1, 2.0 / 63.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  // B(x) = min(x, 1), q = 4, M = 1, L = 1: beta(1/20) = 1 and
  // A = 3 sqrt(1/5) + (1 + 1/16) - 1/20.
  const ConcaveEnvelope ramp({0.0, 1.0, 2.0}, {0.0, 1.0, 1.0});
  CHECK(certificate_A(ramp, 4, 1, 1, 1) == doctest::Approx(3 / std::sqrt(5.0) + 1.0625 - 0.05).epsilon(1e-14));
  // L = 0.01: beta(5) = 1/5.
  CHECK(certificate_A(ramp, 4, 1, 1, 0.01) ==
        doctest::Approx(3 * std::sqrt(0.2) * std::sqrt(0.2) + 0.010625 - 0.05).epsilon(1e-14));
  CHECK(code_of([&] { certificate_A(zero, 2, 1, 1, 1); }) == code(ErrorCode::InputDomain));
  CHECK(code_of([&] { certificate_A(zero, 5, 1, 1, -1); }) == code(ErrorCode::InputDomain));
  CHECK(code_of([&] { certificate_A(zero, 5, 1, 0, 1); }) == code(ErrorCode::InputDomain));
}

TEST_CASE("ramp initial data") {
  const double M = 6.0;
  GridSpec g(480);  // support edge 5/6 falls on a cell face
  const State s = blowup_initial_data(M, g);
  double mass = 0.0, vsum = 0.0;
  for (double x : s.u) mass += x * g.h();
  for (double x : s.v) vsum += x * g.h();
  CHECK(mass == doctest::Approx(M).epsilon(1e-13));
  CHECK(std::abs(vsum) < 1e-12);
  CHECK(s.u[399] == 0.0);
  CHECK(s.u[400] > 0.0);
  CHECK(s.u[479] == doctest::Approx(2 * M * M * M * (1.0 / M - 0.5 * g.h())).epsilon(1e-12));
  GridSpec off(500);  // edge inside a cell
  mass = 0.0;
  for (double x : blowup_initial_data(M, off).u) mass += x * off.h();
  CHECK(mass == doctest::Approx(M).epsilon(1e-13));
  CHECK(code_of([] { blowup_initial_data(100.0, GridSpec(512)); }) == code(ErrorCode::Resolution));
  CHECK(code_of([] { blowup_initial_data(1.0, GridSpec(512)); }) == code(ErrorCode::InputDomain));
  CHECK(blowup_u0(M, 0.5) == 0.0);
  CHECK(blowup_u0(M, 1.0) == doctest::Approx(2 * M * M));
  CHECK(blowup_v0(M, 0.0) == -3.0);
}

TEST_CASE("ramp data moments against closed forms") {
  for (double M : {1.5, 4.0, 20.0}) {
    for (double q : {5.0, 6.5}) {
      const auto m = blowup_data_moments(M, q);
      CHECK(m.mass == doctest::Approx(M).epsilon(1e-13));
      CHECK(m.u_l2_sq == doctest::Approx(4 * M * M * M / 3).epsilon(1e-13));
      CHECK(m.v_h1_sq == doctest::Approx(M * M * (1 + 1.0 / 12)).epsilon(1e-13));
      CHECK(m.uv == doctest::Approx(M * M / 2 - M / 3).epsilon(1e-13));
      CHECK(m.L0 == doctest::Approx(std::pow(M, q - 1) / (q * (2 * q + 1))).epsilon(1e-12));
    }
  }
}

TEST_CASE("certify on the ramp data") {
  const auto model = DiffusionModel::power_law(2.0);
  const EntropyProfile b(model, EntropyTableOptions{});
  const auto hi = certify(50.0, 5.0, model, b, GridSpec(threshold_grid_cells(50.0)));
  CHECK(hi.certified);
  CHECK(hi.A_at_Phi0 < 0.0);
  CHECK(hi.eps_choice == doctest::Approx(std::pow(50.0, -4.0)));
  CHECK(hi.Phi0 == doctest::Approx(hi.L0 + hi.lambda0 + 1250.0).epsilon(1e-14));
  const auto lo = certify(2.0, 5.0, model, b, GridSpec(512));
  CHECK_FALSE(lo.certified);
  CHECK(lo.A_at_Phi0 > 0.0);
  CHECK(certify(50.0, 5.0, model, b, GridSpec(1024), 0.5).eps_choice == 0.5);
  CHECK(code_of([&] { certify(50.0, 4.0, model, b, GridSpec(1024)); }) == code(ErrorCode::InputDomain));
  CHECK(code_of([&] { certify(1.0, 5.0, model, b, GridSpec(1024)); }) == code(ErrorCode::InputDomain));
  const auto div = DiffusionModel::power_law(0.5);
  CHECK(code_of([&] { certify(50.0, 5.0, div, EntropyProfile(div), GridSpec(1024)); }) ==
        code(ErrorCode::DivergentTail));

  const auto j = nlohmann::json::parse(to_json(hi));
  for (const char* k : {"q", "M", "eps_choice", "L0", "lambda0", "Phi0", "A_at_Phi0", "certified"})
    CHECK(j.contains(k));
  CHECK_FALSE(j.contains("M0_search_trace"));
  CHECK(j["certified"] == true);
}

TEST_CASE("threshold grid sizing") {
  CHECK(threshold_grid_cells(1.5) == 512);
  CHECK(threshold_grid_cells(32.0) == 512);
  CHECK(threshold_grid_cells(50.0) == 1024);
  CHECK(threshold_grid_cells(100.0) == 2048);
  CHECK(threshold_grid_cells(3.0, 64) == 64);
}

TEST_CASE("mass threshold bisection") {
  auto step_at = [](double edge) {
    return [edge](double M) {
      CertificateReport r;
      r.M = M;
      r.A_at_Phi0 = edge - M;
      r.certified = M > edge;
      return r;
    };
  };
  auto res = search_mass_threshold(step_at(3.0), 1.0, 10.0);
  CHECK(res.found);
  CHECK(res.M0 > 3.0);
  CHECK(res.lower <= 3.0);
  CHECK((res.M0 - res.lower) <= 1e-10 * res.M0);
  CHECK(res.monotone_validated);
  CHECK(res.validation.size() == 16);
  CHECK(res.A_min == 2.0);
  CHECK(res.A_max == -7.0);

  res = search_mass_threshold(step_at(20.0), 1.0, 10.0);
  CHECK_FALSE(res.found);
  CHECK(res.trace.size() == 2);
  res = search_mass_threshold(step_at(0.5), 1.0, 10.0);
  CHECK_FALSE(res.found);

  // Certified on (3, 5) and past 8: the bracket still closes at 3, but the
  // validation sweep sees the uncertified window.
  auto windowed = [](double M) {
    CertificateReport r;
    r.certified = (M > 3.0 && M < 5.0) || M > 8.0;
    r.A_at_Phi0 = r.certified ? -1.0 : 1.0;
    return r;
  };
  res = search_mass_threshold(windowed, 1.0, 10.0);
  CHECK(res.found);
  CHECK(res.M0 == doctest::Approx(3.0).epsilon(1e-9));
  CHECK_FALSE(res.monotone_validated);

  CHECK(code_of([&] { search_mass_threshold(step_at(3.0), 5.0, 5.0); }) == code(ErrorCode::InputDomain));
  CHECK(code_of([&] { search_mass_threshold(step_at(3.0), 0.0, 5.0); }) == code(ErrorCode::InputDomain));
}

TEST_CASE("phi monitor") {
  const auto zero = ConcaveEnvelope::zero();
  const double q = 5, M = 1, eps = 1;  // A(Phi) = 1.05 Phi - 1/30
  std::vector<DiagnosticsRecord> rows(4);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    rows[k].t = 0.1 * k;
    rows[k].dt = 1e-6;
    rows[k].u_max = 10.0;
    rows[k].L_q = 0.0;
    rows[k].lambda = -0.5 + 1.0 - 0.1 * k;  // Phi = 1 - 0.1 k
  }
  auto mon = monitor_phi(rows, zero, q, M, eps);
  REQUIRE(mon.rows.size() == 4);
  CHECK(mon.violations.empty());
  CHECK(mon.rows[0].phi == doctest::Approx(1.0));
  CHECK(mon.rows[0].a_of_phi == doctest::Approx(61.0 / 60.0));
  CHECK(mon.rows[0].dphi_dt == doctest::Approx(-1.0));
  CHECK(std::isnan(mon.rows[3].dphi_dt));

  auto fast = rows;
  fast[2].lambda += 1.0;  // slope +9 against A ~ 1.9
  mon = monitor_phi(fast, zero, q, M, eps);
  REQUIRE(mon.violations.size() == 1);
  CHECK(mon.violations[0].kind == "phi-growth");
  CHECK(mon.violations[0].index == 2);

  auto neg = rows;
  neg[3].lambda = -0.6;
  mon = monitor_phi(neg, zero, q, M, eps);
  REQUIRE(mon.violations.size() == 1);
  CHECK(mon.violations[0].kind == "phi-negative");

  auto capped = fast;
  capped[2].u_max = 2e3;  // rows from the first u_max > cap on are dropped
  mon = monitor_phi(capped, zero, q, M, eps);
  CHECK(mon.rows.size() == 2);
  CHECK(mon.violations.empty());
}
