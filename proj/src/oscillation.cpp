#include "modcont/oscillation.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <functional>
#include <sstream>

#include "modcont/trend.hpp"

namespace modcont {

namespace {

constexpr double kRadiusSlack = 1e-12;
constexpr double kProbeFloor = 1e-12;
// Deepest probe for analytic families, r = e^{-690} ≈ 1e-300.
constexpr double kAnalyticProbeDepth = 690.0;

double log_inv(double r) { return -std::log(r); }

// Log-type families with α ≤ 1 have a non-integrable ω(r)/r at the origin.
bool dini_divergent(const OscillationSpec& spec) {
  const bool log_like = spec.family() == Family::log ||
                        (spec.family() == Family::holog && spec.lambda() == 0.0);
  return log_like && spec.alpha() <= 1.0;
}

double integrate_tail(const std::function<double(double)>& f, double a, double tol) {
  static thread_local boost::math::quadrature::exp_sinh<double> integrator;
  double err = 0.0;
  return integrator.integrate(f, a, std::numeric_limits<double>::infinity(), tol, &err);
}

double integrate_finite(const std::function<double(double)>& f, double a, double b,
                        double tol) {
  if (b <= a) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 20, tol,
                                                                       &err);
}

void check_radius(const OscillationSpec& spec, double r, const char* what) {
  if (!(r >= 0.0) || r > spec.radius() * (1.0 + kRadiusSlack)) {
    std::ostringstream os;
    os << what << ": radius " << r << " outside [0, " << spec.radius() << "]";
    throw DomainError(os.str());
  }
}

// Index k with radii[k] <= r < radii[k+1] (clamped to the last segment).
std::size_t segment(std::span<const double> radii, double r) {
  auto it = std::upper_bound(radii.begin(), radii.end(), r);
  std::size_t k = static_cast<std::size_t>(it - radii.begin());
  k = k == 0 ? 0 : k - 1;
  return std::min(k, radii.size() - 2);
}

// ∫_{a}^{b} ω(s)/s ds and r∫_a^b ω(s)/s² ds over the piecewise-linear table,
// exact per segment: ω(s) = c0 + c1 s.
double table_hat(const OscillationSpec& spec, double r) {
  auto rad = spec.table_radii();
  auto val = spec.table_values();
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < rad.size() && rad[k] < r; ++k) {
    const double s0 = rad[k], s1 = std::min(rad[k + 1], r);
    const double slope = (val[k + 1] - val[k]) / (rad[k + 1] - rad[k]);
    const double c0 = val[k] - slope * rad[k];
    if (s0 == 0.0) {
      sum += slope * s1;  // c0 = 0 on the first segment
    } else {
      sum += c0 * std::log(s1 / s0) + slope * (s1 - s0);
    }
  }
  return sum;
}

double table_b_numerator(const OscillationSpec& spec, double r) {
  auto rad = spec.table_radii();
  auto val = spec.table_values();
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < rad.size(); ++k) {
    if (rad[k + 1] <= r) continue;
    const double s0 = std::max(rad[k], r), s1 = rad[k + 1];
    const double slope = (val[k + 1] - val[k]) / (rad[k + 1] - rad[k]);
    const double c0 = val[k] - slope * rad[k];
    sum += c0 * (1.0 / s0 - 1.0 / s1) + slope * std::log(s1 / s0);
  }
  return r * sum;
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::holder: return "holder";
    case Family::log: return "log";
    case Family::holog: return "holog";
    case Family::tabulated: return "tabulated";
  }
  return "?";
}

OscillationSpec OscillationSpec::holder(double lambda, double R) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw std::invalid_argument("holder: lambda must lie in (0, 1)");
  if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument("holder: R must be > 0");
  OscillationSpec s;
  s.family_ = Family::holder;
  s.lambda_ = lambda;
  s.R_ = R;
  return s;
}

OscillationSpec OscillationSpec::log(double alpha, double R) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("log: alpha must be > 0");
  if (!(R > 0.0 && R < 1.0)) throw std::invalid_argument("log: R must lie in (0, 1)");
  OscillationSpec s;
  s.family_ = Family::log;
  s.alpha_ = alpha;
  s.R_ = R;
  return s;
}

OscillationSpec OscillationSpec::holog(double lambda, double alpha, double R) {
  if (!(lambda >= 0.0 && lambda < 1.0))
    throw std::invalid_argument("holog: lambda must lie in [0, 1)");
  if (!std::isfinite(alpha)) throw std::invalid_argument("holog: alpha must be finite");
  if (lambda == 0.0 && !(alpha > 0.0))
    throw std::invalid_argument("holog: lambda = 0 requires alpha > 0");
  if (!(R > 0.0 && R < 1.0)) throw std::invalid_argument("holog: R must lie in (0, 1)");
  OscillationSpec s;
  s.family_ = Family::holog;
  s.lambda_ = lambda;
  s.alpha_ = alpha;
  s.R_ = R;
  return s;
}

OscillationSpec OscillationSpec::tabulated(std::vector<double> radii,
                                           std::vector<double> values) {
  if (radii.size() != values.size() || radii.size() < 2)
    throw std::invalid_argument("tabulated: need at least two (r, omega) pairs");
  if (radii.front() != 0.0 || values.front() != 0.0)
    throw std::invalid_argument("tabulated: first pair must be (0, 0)");
  for (std::size_t k = 1; k < radii.size(); ++k) {
    if (!std::isfinite(radii[k]) || !std::isfinite(values[k]))
      throw std::invalid_argument("tabulated: non-finite entry");
    if (!(radii[k] > radii[k - 1]))
      throw std::invalid_argument("tabulated: radii must be strictly increasing");
    if (values[k] < values[k - 1])
      throw std::invalid_argument("tabulated: values must be non-decreasing");
    if (!(values[k] > 0.0))
      throw std::invalid_argument("tabulated: omega(r) must be positive for r > 0");
  }
  OscillationSpec s;
  s.family_ = Family::tabulated;
  s.R_ = radii.back();
  s.radii_ = std::move(radii);
  s.values_ = std::move(values);
  return s;
}

std::string OscillationSpec::describe() const {
  std::ostringstream os;
  switch (family_) {
    case Family::holder: os << "Holder(" << lambda_ << ")"; break;
    case Family::log: os << "Log(" << alpha_ << ")"; break;
    case Family::holog: os << "Holog(" << lambda_ << ", " << alpha_ << ")"; break;
    case Family::tabulated: os << "Tabulated[" << radii_.size() << "]"; break;
  }
  os << " on [0, " << R_ << "]";
  return os.str();
}

double eval(const OscillationSpec& spec, double r) {
  check_radius(spec, r, "eval");
  if (r == 0.0) return 0.0;
  switch (spec.family()) {
    case Family::holder: return std::pow(r, spec.lambda());
    case Family::log:
    case Family::holog: return eval_log(spec, log_inv(r));
    case Family::tabulated: {
      auto rad = spec.table_radii();
      auto val = spec.table_values();
      const std::size_t k = segment(rad, r);
      const double w = (r - rad[k]) / (rad[k + 1] - rad[k]);
      return val[k] + w * (val[k + 1] - val[k]);
    }
  }
  return 0.0;
}

double eval_log(const OscillationSpec& spec, double t) {
  switch (spec.family()) {
    case Family::holder: return std::exp(-spec.lambda() * t);
    case Family::log: return std::pow(t, -spec.alpha());
    case Family::holog: return std::exp(-spec.lambda() * t) * std::pow(t, -spec.alpha());
    case Family::tabulated: return eval(spec, std::exp(-t));
  }
  return 0.0;
}

double derivative(const OscillationSpec& spec, double r) {
  if (!spec.is_analytic()) throw UnsupportedOperation("derivative: tabulated spec");
  check_radius(spec, r, "derivative");
  if (!(r > 0.0)) throw DomainError("derivative: r must be > 0");
  const double lam = spec.lambda();
  if (spec.family() == Family::holder) return lam * std::pow(r, lam - 1.0);
  // ω' = r^{λ-1} L^{-α} (λ + α/L), L = log(1/r)
  const double L = log_inv(r), a = spec.alpha();
  return std::pow(r, lam - 1.0) * std::pow(L, -a) * (lam + a / L);
}

double second_derivative(const OscillationSpec& spec, double r) {
  if (!spec.is_analytic()) throw UnsupportedOperation("second_derivative: tabulated spec");
  check_radius(spec, r, "second_derivative");
  if (!(r > 0.0)) throw DomainError("second_derivative: r must be > 0");
  const double lam = spec.lambda();
  if (spec.family() == Family::holder) return lam * (lam - 1.0) * std::pow(r, lam - 2.0);
  // ω'' = −r^{λ−2} L^{−α} (λ(1−λ) − (2λ−1)α/L − α(α+1)/L²)
  const double L = log_inv(r), a = spec.alpha();
  const double bracket = lam * (1.0 - lam) - (2.0 * lam - 1.0) * a / L - a * (a + 1.0) / (L * L);
  return -std::pow(r, lam - 2.0) * std::pow(L, -a) * bracket;
}

ExtReal dini_integral(const OscillationSpec& spec) {
  if (dini_divergent(spec)) return ExtReal::infinity();
  return ExtReal::finite(HatTransform(spec)(spec.radius()));
}

HatTransform::HatTransform(OscillationSpec base, double quadrature_tolerance)
    : base_(std::move(base)), tol_(quadrature_tolerance) {
  if (!(tol_ > 0.0)) throw std::invalid_argument("HatTransform: tolerance must be > 0");
}

bool HatTransform::has_closed_form() const {
  switch (base_.family()) {
    case Family::holder:
    case Family::tabulated: return true;
    case Family::log: return base_.alpha() > 1.0;
    case Family::holog: return false;
  }
  return false;
}

std::optional<double> HatTransform::closed_form(double r) const {
  check_radius(base_, r, "hat");
  if (!has_closed_form()) return std::nullopt;
  if (r == 0.0) return 0.0;
  switch (base_.family()) {
    case Family::holder: return std::pow(r, base_.lambda()) / base_.lambda();
    case Family::log: {
      const double a = base_.alpha();
      return std::pow(log_inv(r), 1.0 - a) / (a - 1.0);
    }
    case Family::tabulated: return table_hat(base_, r);
    case Family::holog: break;
  }
  return std::nullopt;
}

double HatTransform::quadrature_at_log(double t) const {
  if (dini_divergent(base_)) throw NotDiniAdmissible();
  // Quadrature runs well below the requested tolerance so that the reported
  // value carries at most `tol_` relative error.
  const double q_tol = std::min(tol_ * 1e-3, 1e-10);
  const OscillationSpec& spec = base_;
  auto f = [&spec](double tau) { return eval_log(spec, tau); };
  if (spec.family() != Family::tabulated) return integrate_tail(f, t, q_tol);
  // Piecewise-linear data has kinks at the knots: integrate knot to knot in
  // t, then the linear first segment as a tail.
  auto rad = spec.table_radii();
  double sum = 0.0;
  for (std::size_t k = rad.size() - 1; k >= 2; --k) {
    const double a = log_inv(rad[k]), b = log_inv(rad[k - 1]);
    if (b > t) sum += integrate_finite(f, std::max(a, t), b, q_tol);
  }
  return sum + integrate_tail(f, std::max(t, log_inv(rad[1])), q_tol);
}

double HatTransform::quadrature(double r) const {
  check_radius(base_, r, "hat");
  if (r == 0.0) return 0.0;
  return quadrature_at_log(log_inv(r));
}

double HatTransform::operator()(double r) const {
  check_radius(base_, r, "hat");
  if (r == 0.0) return 0.0;
  if (dini_divergent(base_)) throw NotDiniAdmissible();
  if (auto cf = closed_form(r)) return *cf;
  return quadrature(r);
}

double HatTransform::at_log(double t) const {
  if (base_.family() == Family::tabulated) return (*this)(std::exp(-t));
  if (t < log_inv(base_.radius()) * (1.0 - kRadiusSlack) - kRadiusSlack)
    throw DomainError("hat: radius beyond R");
  switch (base_.family()) {
    case Family::holder: return std::exp(-base_.lambda() * t) / base_.lambda();
    case Family::log:
      if (base_.alpha() > 1.0) return std::pow(t, 1.0 - base_.alpha()) / (base_.alpha() - 1.0);
      break;
    default: break;
  }
  return quadrature_at_log(t);
}

double hat(const OscillationSpec& spec, double r) { return HatTransform(spec)(r); }

double b_of_r(const OscillationSpec& spec, double r) {
  if (!(r > 0.0) || r >= spec.radius())
    throw DomainError("b_of_r: r must lie in (0, R)");
  HatTransform h(spec);
  const double denom = h(r);
  double numer = 0.0;
  switch (spec.family()) {
    case Family::holder: {
      const double lam = spec.lambda();
      numer = (std::pow(r, lam) - r * std::pow(spec.radius(), lam - 1.0)) / (1.0 - lam);
      break;
    }
    case Family::tabulated: numer = table_b_numerator(spec, r); break;
    default: {
      // r ∫_r^R ω(s)/s² ds = ∫_0^{L(r)−L(R)} ω(e^{-(L(r)−u)}) e^{-u} du
      const double Lr = log_inv(r), LR = log_inv(spec.radius());
      numer = integrate_finite(
          [&](double u) { return eval_log(spec, Lr - u) * std::exp(-u); }, 0.0, Lr - LR,
          1e-12);
      break;
    }
  }
  return numer / denom;
}

LimitEstimate c1_limit(const OscillationSpec& spec) {
  switch (spec.family()) {
    case Family::holder: return {ExtReal::finite(1.0 / spec.lambda()), true};
    case Family::log: return {ExtReal::infinity(), true};
    case Family::holog:
      if (spec.lambda() == 0.0) return {ExtReal::infinity(), true};
      return {ExtReal::finite(1.0 / spec.lambda()), true};
    case Family::tabulated: break;
  }
  // Log-log slope s(L) = d log ω / d log r between consecutive knots near
  // L_max, L_max/2, L_max/4; ω/(rω') = 1/s. Richardson in 1/L assumes
  // s = s∞ + c/L.
  auto rad = spec.table_radii();
  auto val = spec.table_values();
  if (rad.size() < 5) throw DomainError("c1_limit: table too short to extrapolate");
  const double L_max = log_inv(rad[1]);
  auto slope_near = [&](double L) {
    const double r = std::exp(-L);
    std::size_t k = segment(rad, r);
    k = std::max<std::size_t>(k, 1);
    const double s = std::log(val[k + 1] / val[k]) / std::log(rad[k + 1] / rad[k]);
    const double Lmid = -0.5 * (std::log(rad[k]) + std::log(rad[k + 1]));
    return std::pair{Lmid, s};
  };
  const auto [La, sa] = slope_near(L_max);
  const auto [Lb, sb] = slope_near(L_max / 2.0);
  const auto [Lc, sc] = slope_near(L_max / 4.0);
  auto rich = [](double L1, double s1, double L2, double s2) {
    return (L1 * s1 - L2 * s2) / (L1 - L2);
  };
  const double s_ab = rich(La, sa, Lb, sb);
  const double s_bc = rich(Lb, sb, Lc, sc);
  constexpr double kZeroSlope = 1e-3;
  const bool confident = (std::abs(s_ab) <= kZeroSlope && std::abs(s_bc) <= kZeroSlope) ||
                         std::abs(s_ab - s_bc) <= 0.05 * std::abs(s_ab);
  if (s_ab <= kZeroSlope) return {ExtReal::infinity(), confident};
  return {ExtReal::finite(1.0 / s_ab), confident};
}

SpaceConstants space_constants(const OscillationSpec& spec) {
  SpaceConstants c;
  c.C1 = c1_limit(spec).value;
  c.dini_value = dini_integral(spec);
  c.B_limit = c.C1.infinite ? 0.0 : 1.0 / (c.C1.value - 1.0);
  return c;
}

std::vector<double> probe_grid(double hi, double lo) {
  if (!(hi > 0.0)) throw std::invalid_argument("probe_grid: hi must be > 0");
  const double floor = std::max(lo, kProbeFloor);
  // Factor-2 spacing, refined so that narrow intervals still get 32 probes.
  double factor = 2.0;
  if (lo > 0.0) factor = std::min(2.0, std::pow(hi / lo, 1.0 / 32.0));
  std::vector<double> grid;
  for (double r = hi; r > floor * (1.0 - 1e-12) && grid.size() < 4096; r /= factor) {
    if (lo > 0.0 && r <= lo) break;
    grid.push_back(r);
  }
  return grid;
}

bool is_concave_near_zero(const OscillationSpec& spec, ProbeInterval probe) {
  const double hi = probe.hi > 0.0 ? std::min(probe.hi, spec.radius()) : spec.radius();
  const auto grid = probe_grid(hi, probe.lo);
  if (spec.is_analytic()) {
    return std::all_of(grid.begin(), grid.end(),
                       [&](double r) { return second_derivative(spec, r) <= 0.0; });
  }
  // Tabulated: knot-to-knot slopes must be non-increasing on the interval.
  auto rad = spec.table_radii();
  auto val = spec.table_values();
  double prev_slope = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < rad.size(); ++k) {
    if (rad[k + 1] <= probe.lo || rad[k] >= hi) continue;
    const double s = (val[k + 1] - val[k]) / (rad[k + 1] - rad[k]);
    if (s > prev_slope * (1.0 + 1e-12)) return false;
    prev_slope = s;
  }
  return true;
}

namespace {

double probe_depth(const OscillationSpec& a, const OscillationSpec& b) {
  double depth = kAnalyticProbeDepth;
  for (const auto* s : {&a, &b})
    if (!s->is_analytic()) depth = std::min(depth, log_inv(s->table_radii()[1]));
  const double L_R = log_inv(std::min(a.radius(), b.radius()));
  if (depth / 8.0 < L_R)
    throw DomainError("probe: tabulated data does not reach close enough to the origin");
  return depth;
}

TrendReport ratio_trend(const OscillationSpec& num, const OscillationSpec& den) {
  const double depth = probe_depth(num, den);
  return classify_ratio_trend(
      [&](double L) { return eval_log(num, L) / eval_log(den, L); }, depth);
}

}  // namespace

bool dominates(const OscillationSpec& weaker, const OscillationSpec& stronger) {
  const auto rep = ratio_trend(weaker, stronger);
  return rep.trend == RatioTrend::to_zero && rep.monotone_decreasing;
}

bool equivalent(const OscillationSpec& a, const OscillationSpec& b) {
  return ratio_trend(a, b).trend == RatioTrend::bounded;
}

double doubling_constant(const OscillationSpec& spec, double k, ProbeInterval probe) {
  if (!(k >= 1.0)) throw std::invalid_argument("doubling_constant: k must be >= 1");
  const double hi = probe.hi > 0.0 ? probe.hi : spec.radius() / k;
  if (k * hi > spec.radius() * (1.0 + kRadiusSlack))
    throw DomainError("doubling_constant: k * r exceeds R on the probe range");
  double sup = 0.0;
  const auto grid = probe_grid(hi, probe.lo);
  if (grid.empty()) throw DomainError("doubling_constant: empty probe range");
  for (double r : grid) sup = std::max(sup, eval(spec, k * r) / eval(spec, r));
  return sup;
}

OscillationSpec tabulate(const OscillationSpec& spec, double r_min, int n, double scale) {
  if (n < 2 || !(r_min > 0.0) || r_min >= spec.radius())
    throw std::invalid_argument("tabulate: need n >= 2 and 0 < r_min < R");
  std::vector<double> radii{0.0}, values{0.0};
  const double q = std::log(spec.radius() / r_min) / (n - 1);
  for (int k = 0; k < n; ++k) {
    const double r = k == n - 1 ? spec.radius() : r_min * std::exp(q * k);
    radii.push_back(r);
    values.push_back(scale * eval(spec, r));
  }
  return OscillationSpec::tabulated(std::move(radii), std::move(values));
}

OscillationSpec tabulate_hat(const OscillationSpec& spec, double r_min, int n) {
  if (n < 2 || !(r_min > 0.0) || r_min >= spec.radius())
    throw std::invalid_argument("tabulate_hat: need n >= 2 and 0 < r_min < R");
  HatTransform h(spec);
  std::vector<double> radii{0.0}, values{0.0};
  const double q = std::log(spec.radius() / r_min) / (n - 1);
  for (int k = 0; k < n; ++k) {
    const double r = k == n - 1 ? spec.radius() : r_min * std::exp(q * k);
    radii.push_back(r);
    values.push_back(h(r));
  }
  return OscillationSpec::tabulated(std::move(radii), std::move(values));
}

}  // namespace modcont
