#include "core/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "core/errors.hpp"
#include "core/quadrature.hpp"

namespace ks1d {

GridSpec::GridSpec(std::size_t n_cells) : n_(n_cells), h_(0.0) {
  if (n_cells < 4) fail(ErrorCode::Validation, "grid needs at least 4 cells, got " + std::to_string(n_cells));
  h_ = 1.0 / static_cast<double>(n_cells);
}

void require_field(std::span<const double> f, const GridSpec& grid, const char* what) {
  if (f.size() != grid.n_cells())
    fail(ErrorCode::Validation, std::string(what) + " has " + std::to_string(f.size()) +
                                    " entries, grid has " + std::to_string(grid.n_cells()));
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!std::isfinite(f[i]))
      fail(ErrorCode::NumericState, std::string(what) + " is not finite at index " + std::to_string(i));
}

void validate_state(const State& s, const GridSpec& grid) {
  if (!std::isfinite(s.t)) fail(ErrorCode::NumericState, "state time is not finite");
  require_field(s.u, grid, "u");
  require_field(s.v, grid, "v");
  for (std::size_t i = 0; i < s.u.size(); ++i)
    if (s.u[i] < -1e-13)
      fail(ErrorCode::Validation, "u is negative at index " + std::to_string(i));
}

void Params::validate() const {
  auto bad = [](const char* name, double value, const char* rule) {
    std::ostringstream os;
    os << name << " = " << value << " violates " << rule;
    fail(ErrorCode::Validation, os.str());
  };
  if (!(chi >= 0.0) || !std::isfinite(chi)) bad("chi", chi, "chi >= 0");
  if (!(eps > 0.0) || !std::isfinite(eps)) bad("eps", eps, "eps > 0");
  if (!(D > 0.0) || !std::isfinite(D)) bad("D", D, "D > 0");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) bad("gamma", gamma, "gamma >= 0");
  if (!(mass > 0.0) || !std::isfinite(mass)) bad("mass", mass, "mass > 0");
}

// ---------------------------------------------------------------------------
// DiffusionModel

DiffusionModel DiffusionModel::power_law(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    fail(ErrorCode::InputDomain, "power-law exponent alpha must be finite and >= 0");
  DiffusionModel m;
  m.power_ = true;
  m.alpha_ = alpha;
  return m;
}

DiffusionModel DiffusionModel::tabulated(std::vector<double> r, std::vector<double> a,
                                         double tail_exponent) {
  if (r.size() != a.size() || r.size() < 2)
    fail(ErrorCode::Validation, "tabulated diffusion needs at least two (r, a) nodes");
  if (r.front() != 0.0) fail(ErrorCode::Validation, "tabulated diffusion must start at r = 0");
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (!std::isfinite(r[k]) || !std::isfinite(a[k]))
      fail(ErrorCode::Validation, "tabulated diffusion node " + std::to_string(k) + " is not finite");
    if (!(a[k] > 0.0))
      fail(ErrorCode::Validation, "tabulated diffusion must be positive (node " + std::to_string(k) + ")");
    if (k > 0 && !(r[k] > r[k - 1]))
      fail(ErrorCode::Validation, "tabulated nodes must be strictly increasing (node " + std::to_string(k) + ")");
  }
  if (!(tail_exponent > 0.0) || !std::isfinite(tail_exponent))
    fail(ErrorCode::Validation, "tail_exponent must be finite and positive");
  DiffusionModel m;
  m.power_ = false;
  m.r_ = std::move(r);
  m.a_ = std::move(a);
  m.tail_p_ = tail_exponent;
  m.tail_c_ = m.a_.back() * std::pow(m.r_.back(), tail_exponent);
  m.cum_.assign(m.r_.size(), 0.0);
  for (std::size_t k = 1; k < m.r_.size(); ++k)
    m.cum_[k] = m.cum_[k - 1] + 0.5 * (m.a_[k] + m.a_[k - 1]) * (m.r_[k] - m.r_[k - 1]);
  return m;
}

DiffusionModel DiffusionModel::read_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  std::optional<double> tail;
  std::vector<double> r;
  std::vector<double> a;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("tail_exponent");
      if (pos != std::string::npos) {
        const auto eq = line.find('=', pos);
        if (eq == std::string::npos)
          fail(ErrorCode::Io, "line " + std::to_string(line_no) + ": malformed tail_exponent comment");
        try {
          tail = std::stod(line.substr(eq + 1));
        } catch (const std::exception&) {
          fail(ErrorCode::Io, "line " + std::to_string(line_no) + ": tail_exponent is not a number");
        }
      }
      continue;
    }
    if (!header) {
      std::string h;
      for (char c : line)
        if (c != ' ' && c != '\t') h.push_back(c);
      if (h != "r,a") fail(ErrorCode::Io, "line " + std::to_string(line_no) + ": expected header 'r,a'");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      fail(ErrorCode::Io, "line " + std::to_string(line_no) + ": expected two comma-separated columns");
    try {
      r.push_back(std::stod(line.substr(0, comma)));
      a.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      fail(ErrorCode::Io, "line " + std::to_string(line_no) + ": non-numeric entry");
    }
  }
  if (!header) fail(ErrorCode::Io, "missing 'r,a' header");
  if (!tail) fail(ErrorCode::Io, "missing '# tail_exponent=<real>' comment");
  return tabulated(std::move(r), std::move(a), *tail);
}

DiffusionModel DiffusionModel::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open diffusion table '" + path + "'");
  return read_csv(in);
}

void DiffusionModel::write_csv(std::ostream& out) const {
  if (power_) fail(ErrorCode::Validation, "only tabulated diffusion models serialize to CSV");
  out.precision(17);
  out << "r,a\n";
  for (std::size_t k = 0; k < r_.size(); ++k) out << r_[k] << ',' << a_[k] << '\n';
  out << "# tail_exponent=" << tail_p_ << '\n';
}

double DiffusionModel::operator()(double u) const {
  if (!(u >= 0.0) || !std::isfinite(u)) {
    std::ostringstream os;
    os << "diffusion evaluated at u = " << u << " (needs finite u >= 0)";
    fail(ErrorCode::InputDomain, os.str());
  }
  if (power_) return alpha_ == 0.0 ? 1.0 : std::pow(1.0 + u, -alpha_);
  if (u >= r_.back()) return tail_c_ * std::pow(u, -tail_p_);
  const auto it = std::upper_bound(r_.begin(), r_.end(), u);
  const std::size_t k = static_cast<std::size_t>(it - r_.begin()) - 1;
  const double w = (u - r_[k]) / (r_[k + 1] - r_[k]);
  return a_[k] + w * (a_[k + 1] - a_[k]);
}

namespace {

double power_antiderivative(double alpha, double s) {
  // d/ds of this is (1+s)^-alpha
  if (alpha == 1.0) return std::log1p(s);
  return std::pow(1.0 + s, 1.0 - alpha) / (1.0 - alpha);
}

}  // namespace

double DiffusionModel::integral(double lo, double hi) const {
  if (!(lo >= 0.0) || !(hi >= lo) || !std::isfinite(hi))
    fail(ErrorCode::InputDomain, "integral bounds must satisfy 0 <= lo <= hi < inf");
  if (lo == hi) return 0.0;
  if (power_) {
    if (alpha_ == 0.0) return hi - lo;
    return power_antiderivative(alpha_, hi) - power_antiderivative(alpha_, lo);
  }
  // Primitive measured from r = 0.
  auto primitive = [this](double x) {
    if (x >= r_.back()) {
      const double rl = r_.back();
      double tail;
      if (tail_p_ == 1.0) tail = tail_c_ * std::log(x / rl);
      else tail = tail_c_ * (std::pow(x, 1.0 - tail_p_) - std::pow(rl, 1.0 - tail_p_)) / (1.0 - tail_p_);
      return cum_.back() + tail;
    }
    const auto it = std::upper_bound(r_.begin(), r_.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - r_.begin()) - 1;
    const double ax = (*this)(x);
    return cum_[k] + 0.5 * (a_[k] + ax) * (x - r_[k]);
  };
  return primitive(hi) - primitive(lo);
}

double DiffusionModel::tail_integral(double r) const {
  if (!(r >= 0.0) || !std::isfinite(r)) fail(ErrorCode::InputDomain, "tail integral needs finite r >= 0");
  if (!integrable())
    fail(ErrorCode::DivergentTail, "int_r^inf a(s) ds diverges for " + describe() +
                                       " (needs tail exponent > 1)");
  if (power_) return std::pow(1.0 + r, 1.0 - alpha_) / (alpha_ - 1.0);
  const double rl = r_.back();
  if (r >= rl) return tail_c_ * std::pow(r, 1.0 - tail_p_) / (tail_p_ - 1.0);
  return integral(r, rl) + tail_c_ * std::pow(rl, 1.0 - tail_p_) / (tail_p_ - 1.0);
}

double DiffusionModel::tail_mass(double r) const {
  const double tail = tail_integral(r);
  return r * tail;
}

double DiffusionModel::tail_exponent() const noexcept { return power_ ? alpha_ : tail_p_; }

std::optional<double> DiffusionModel::alpha() const noexcept {
  if (power_) return alpha_;
  return std::nullopt;
}

std::string DiffusionModel::describe() const {
  std::ostringstream os;
  if (power_) os << "power-law diffusion (1+u)^-" << alpha_;
  else os << "tabulated diffusion (" << r_.size() << " nodes, tail exponent " << tail_p_ << ")";
  return os.str();
}

double diffusion_eval(const DiffusionModel& model, double u) { return model(u); }
double diffusion_tail_mass(const DiffusionModel& model, double r) { return model.tail_mass(r); }

// ---------------------------------------------------------------------------
// EntropyProfile

EntropyProfile::EntropyProfile(const DiffusionModel& model, EntropyTableOptions options)
    : options_(options) {
  b_zero_ = model.integral(0.0, 1.0);
  if (const auto alpha = model.alpha()) {
    if (*alpha == 0.0) {
      kind_ = Kind::Alpha0;
      return;
    }
    if (*alpha == 1.0) {
      kind_ = Kind::Alpha1;
      return;
    }
  }
  if (!(options.lower > 0.0) || !(options.lower < 1.0) || !(options.upper > 1.0) ||
      options.nodes_per_decade < 4)
    fail(ErrorCode::Validation, "entropy table range must bracket 1 with lower > 0");
  kind_ = Kind::Table;
  const double per = static_cast<double>(options.nodes_per_decade);
  const long k_lo = static_cast<long>(std::floor(std::log10(options.lower) * per));
  const long k_hi = static_cast<long>(std::ceil(std::log10(options.upper) * per));
  const std::size_t count = static_cast<std::size_t>(k_hi - k_lo + 1);
  std::vector<double> x(count);
  for (std::size_t i = 0; i < count; ++i)
    x[i] = std::pow(10.0, static_cast<double>(k_lo + static_cast<long>(i)) / per);
  options_.lower = x.front();
  options_.upper = x.back();
  t0_ = std::log(x.front());
  dt_ = std::log(10.0) / per;

  const std::size_t one = static_cast<std::size_t>(-k_lo);  // x[one] == 1 exactly
  std::vector<double> bprime(count, 0.0);  // int_1^x a(s)/s ds (signed)
  std::vector<double> amass(count, 0.0);   // int_1^x a(s) ds (signed)
  auto a_over_s = [&model](double s) { return model(s) / s; };
  const double tol = options.tolerance;
  for (std::size_t i = one + 1; i < count; ++i) {
    bprime[i] = bprime[i - 1] + quad::adaptive(a_over_s, x[i - 1], x[i], tol * 1e-2, tol);
    amass[i] = amass[i - 1] + model.integral(x[i - 1], x[i]);
  }
  for (std::size_t i = one; i-- > 0;) {
    bprime[i] = bprime[i + 1] - quad::adaptive(a_over_s, x[i], x[i + 1], tol * 1e-2, tol);
    amass[i] = amass[i + 1] - model.integral(x[i], x[i + 1]);
  }
  b_.resize(count);
  slope_.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    b_[i] = (i == one) ? 0.0 : x[i] * bprime[i] - amass[i];
    slope_[i] = x[i] * bprime[i];
  }
}

EntropyProfile EntropyProfile::zero() {
  EntropyProfile p;
  p.kind_ = Kind::Zero;
  p.b_zero_ = 0.0;
  p.options_.lower = 0.0;
  p.options_.upper = INFINITY;
  return p;
}

double EntropyProfile::table_value(double x) const {
  const double t = (std::log(x) - t0_) / dt_;
  std::size_t k = static_cast<std::size_t>(std::clamp(std::floor(t), 0.0, static_cast<double>(b_.size() - 2)));
  const double s = std::clamp(t - static_cast<double>(k), 0.0, 1.0);
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * b_[k] + h10 * dt_ * slope_[k] + h01 * b_[k + 1] + h11 * dt_ * slope_[k + 1];
}

double EntropyProfile::table_derivative(double x) const {
  const double t = (std::log(x) - t0_) / dt_;
  std::size_t k = static_cast<std::size_t>(std::clamp(std::floor(t), 0.0, static_cast<double>(b_.size() - 2)));
  const double s = std::clamp(t - static_cast<double>(k), 0.0, 1.0);
  const double s2 = s * s;
  const double d00 = 6 * s2 - 6 * s;
  const double d10 = 3 * s2 - 4 * s + 1;
  const double d01 = -6 * s2 + 6 * s;
  const double d11 = 3 * s2 - 2 * s;
  const double dbdt = (d00 * b_[k] + d01 * b_[k + 1]) / dt_ + d10 * slope_[k] + d11 * slope_[k + 1];
  return dbdt / x;
}

double EntropyProfile::operator()(double x) const {
  if (!(x > 0.0) || !std::isfinite(x)) {
    std::ostringstream os;
    os << "entropy b evaluated at x = " << x << " (needs x > 0)";
    fail(ErrorCode::InputDomain, os.str());
  }
  switch (kind_) {
    case Kind::Zero: return 0.0;
    case Kind::Alpha0: return x * std::log(x) - x + 1.0;
    case Kind::Alpha1: return x * std::log(2.0 * x / (1.0 + x)) - std::log((1.0 + x) / 2.0);
    case Kind::Table: break;
  }
  if (x < options_.lower || x > options_.upper) {
    std::ostringstream os;
    os.precision(6);
    os << "entropy b queried at x = " << x << " outside table range [" << options_.lower << ", "
       << options_.upper << "]";
    fail(ErrorCode::Range, os.str());
  }
  return table_value(x);
}

double EntropyProfile::derivative(double x) const {
  if (!(x > 0.0) || !std::isfinite(x)) fail(ErrorCode::InputDomain, "entropy derivative needs x > 0");
  switch (kind_) {
    case Kind::Zero: return 0.0;
    case Kind::Alpha0: return std::log(x);
    case Kind::Alpha1: return std::log(2.0 * x / (1.0 + x));
    case Kind::Table: break;
  }
  if (x < options_.lower || x > options_.upper)
    fail(ErrorCode::Range, "entropy derivative queried outside table range");
  return table_derivative(x);
}

double EntropyProfile::evaluate_clamped(double x, std::size_t& floor_hits) const {
  if (kind_ != Kind::Table) {
    if (x > 0.0) return (*this)(x);
    ++floor_hits;
    return b_zero_;
  }
  if (x >= options_.lower) return (*this)(x);
  ++floor_hits;
  const double w = std::max(x, 0.0) / options_.lower;
  return (1.0 - w) * b_zero_ + w * b_.front();
}

double entropy_b(const EntropyProfile& profile, double x) { return profile(x); }

CellField cumulative_integral(std::span<const double> f, const GridSpec& grid) {
  require_field(f, grid, "integrand");
  CellField out(f.size());
  double running = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    running += f[i];
    out[i] = grid.h() * running;
  }
  return out;
}

}  // namespace ks1d
