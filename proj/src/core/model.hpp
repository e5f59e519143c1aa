#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ks1d {

/// Uniform partition of [0, 1] into n_cells cells of width h = 1/n_cells.
class GridSpec {
 public:
  explicit GridSpec(std::size_t n_cells);

  std::size_t n_cells() const noexcept { return n_; }
  double h() const noexcept { return h_; }
  double center(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) * h_; }
  /// Right edge of cell i.
  double right_edge(std::size_t i) const noexcept { return static_cast<double>(i + 1) * h_; }

 private:
  std::size_t n_;
  double h_;
};

/// Cell averages on a GridSpec. Length and finiteness are checked by the
/// operations that consume it.
using CellField = std::vector<double>;

void require_field(std::span<const double> f, const GridSpec& grid, const char* what);

struct State {
  double t = 0.0;
  CellField u;  // density
  CellField v;  // chemoattractant
};

/// Throws Validation when lengths mismatch, NumericState on NaN/Inf (with the
/// first offending index), Validation when u has entries below -1e-13.
void validate_state(const State& s, const GridSpec& grid);

struct Params {
  double chi = 1.0;    // chemotactic sensitivity; 0 is the heat limit
  double eps = 1.0;    // factor on v_t
  double D = 1.0;      // chemoattractant diffusivity
  double gamma = 0.0;  // linear v term
  double mass = 1.0;   // M

  void validate() const;
  /// True when the Liapunov structure (chi = D = 1, gamma = 0) applies.
  bool liapunov_setting() const noexcept { return chi == 1.0 && D == 1.0 && gamma == 0.0; }
};

/// Nonlinear diffusion a(u) > 0: either (1+u)^-alpha or a tabulated profile
/// (piecewise linear between nodes, pure power tail c*r^-p past the last node).
class DiffusionModel {
 public:
  static DiffusionModel power_law(double alpha);
  static DiffusionModel tabulated(std::vector<double> r, std::vector<double> a,
                                  double tail_exponent);
  static DiffusionModel read_csv(std::istream& in);
  static DiffusionModel load_csv(const std::string& path);
  void write_csv(std::ostream& out) const;

  /// a(u). Throws InputDomain for negative or non-finite u.
  double operator()(double u) const;
  /// int_lo^hi a(s) ds for 0 <= lo <= hi < inf, exact for both variants.
  double integral(double lo, double hi) const;
  /// int_r^inf a(s) ds; throws DivergentTail when not integrable.
  double tail_integral(double r) const;
  /// g(r) = r * int_r^inf a(s) ds.
  double tail_mass(double r) const;

  bool integrable() const noexcept { return tail_exponent() > 1.0; }
  /// alpha for the power law, the recorded tail exponent for tables.
  double tail_exponent() const noexcept;
  std::optional<double> alpha() const noexcept;
  std::string describe() const;

  const std::vector<double>& nodes_r() const noexcept { return r_; }
  const std::vector<double>& nodes_a() const noexcept { return a_; }

 private:
  DiffusionModel() = default;

  bool power_ = true;
  double alpha_ = 0.0;
  std::vector<double> r_;
  std::vector<double> a_;
  std::vector<double> cum_;  // cum_[k] = int_{r_0}^{r_k} a
  double tail_p_ = 0.0;
  double tail_c_ = 0.0;
};

double diffusion_eval(const DiffusionModel& model, double u);
double diffusion_tail_mass(const DiffusionModel& model, double r);

struct EntropyTableOptions {
  double lower = 1e-6;
  double upper = 1e8;
  int nodes_per_decade = 200;
  double tolerance = 1e-12;
};

/// The entropy b with b'' = a(s)/s, b(1) = b'(1) = 0.
///
/// Closed forms are used for alpha = 0 (x ln x - x + 1) and alpha = 1
/// (x ln(2x/(1+x)) - ln((1+x)/2)). Otherwise b and b' are tabulated on a
/// log-spaced grid from segment-wise adaptive quadrature of a(s)/s and a(s),
/// using b(x) = x b'(x) - int_1^x a, and interpolated by cubic Hermite pieces
/// in ln x with exact slopes x b'(x).
class EntropyProfile {
 public:
  explicit EntropyProfile(const DiffusionModel& model, EntropyTableOptions options = {});
  /// b == 0: the a == 0 limit used by synthetic certificate checks.
  static EntropyProfile zero();

  /// b(x). Throws InputDomain for x <= 0, Range outside the table.
  double operator()(double x) const;
  double derivative(double x) const;
  /// b(0+) = int_0^1 a(s) ds.
  double at_zero() const noexcept { return b_zero_; }
  /// b(x) for x >= 0; values below the table floor are linearly bridged from
  /// b(0+) and counted in `floor_hits`.
  double evaluate_clamped(double x, std::size_t& floor_hits) const;

  bool tabulated() const noexcept { return kind_ == Kind::Table; }
  double lower() const noexcept { return options_.lower; }
  double upper() const noexcept { return options_.upper; }
  double tolerance() const noexcept { return options_.tolerance; }

 private:
  enum class Kind { Alpha0, Alpha1, Table, Zero };
  EntropyProfile() = default;
  double table_value(double x) const;
  double table_derivative(double x) const;

  Kind kind_ = Kind::Zero;
  EntropyTableOptions options_{};
  double b_zero_ = 0.0;
  double t0_ = 0.0;   // ln(lower)
  double dt_ = 0.0;   // ln-spacing
  std::vector<double> b_;
  std::vector<double> slope_;  // x b'(x)
};

double entropy_b(const EntropyProfile& profile, double x);

/// Running sums F_i = h * sum_{j<=i} f_j (values of int_0^x f at right cell
/// edges).
CellField cumulative_integral(std::span<const double> f, const GridSpec& grid);

}  // namespace ks1d
