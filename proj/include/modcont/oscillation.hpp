#pragma once

// Parametric oscillation functions ω(r) and their scalar calculus: the Dini
// integral, the transform ĥ(r) = ∫₀ʳ ω(s)/s ds, the quotient B(r) and the
// limit C₁ = lim ω/(rω'), plus probe-grid predicates (concavity, domination,
// equivalence, doubling).
//
// All integrals are computed after the substitution t = log(1/s), which turns
// the 1/s endpoint singularity into a smooth, slowly varying integrand on a
// half line. Analytic families expose ω(e^{-t}) directly so that radii far
// below the double-precision range of r never underflow.

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "modcont/errors.hpp"

namespace modcont {

/// Real number or +∞. Infinite values are results, not errors.
struct ExtReal {
  double value = 0.0;
  bool infinite = false;

  static constexpr ExtReal finite(double v) { return {v, false}; }
  static constexpr ExtReal infinity() { return {0.0, true}; }
  bool is_finite() const { return !infinite; }
  /// Converts to double, +inf for the infinite marker.
  double to_double() const {
    return infinite ? std::numeric_limits<double>::infinity() : value;
  }
};

enum class Family { holder, log, holog, tabulated };

std::string to_string(Family f);

/// An oscillation function ω on [0, R]: ω(0) = 0, ω(r) > 0 for r > 0.
///
///   holder(λ):     ω(r) = r^λ
///   log(α):        ω(r) = (−log r)^{−α}             (R < 1)
///   holog(λ, α):   ω(r) = r^λ (−log r)^{−α}          (R < 1)
///   tabulated:     piecewise linear through (r_k, ω_k), r_0 = 0, ω_0 = 0
class OscillationSpec {
 public:
  static constexpr double kDefaultLogRadius = 0.36787944117144233;  // e^{-1}

  static OscillationSpec holder(double lambda, double R = 1.0);
  static OscillationSpec log(double alpha, double R = kDefaultLogRadius);
  static OscillationSpec holog(double lambda, double alpha,
                               double R = kDefaultLogRadius);
  static OscillationSpec tabulated(std::vector<double> radii,
                                   std::vector<double> values);

  Family family() const { return family_; }
  double lambda() const { return lambda_; }
  double alpha() const { return alpha_; }
  double radius() const { return R_; }
  bool is_analytic() const { return family_ != Family::tabulated; }

  std::span<const double> table_radii() const { return radii_; }
  std::span<const double> table_values() const { return values_; }

  std::string describe() const;

 private:
  OscillationSpec() = default;

  Family family_ = Family::holder;
  double lambda_ = 0.0;
  double alpha_ = 0.0;
  double R_ = 1.0;
  std::vector<double> radii_;
  std::vector<double> values_;
};

double eval(const OscillationSpec& spec, double r);

/// ω(e^{-t}) for t ≥ log(1/R); valid for t far beyond −log(DBL_MIN).
double eval_log(const OscillationSpec& spec, double t);

double derivative(const OscillationSpec& spec, double r);
double second_derivative(const OscillationSpec& spec, double r);

/// ∫₀ᴿ ω(r)/r dr, infinite when the integrand is not integrable.
ExtReal dini_integral(const OscillationSpec& spec);

/// ĥ for one base function. Uses a closed form when the family has one
/// (Holder, Log with α > 1, Tabulated) and adaptive quadrature otherwise.
class HatTransform {
 public:
  explicit HatTransform(OscillationSpec base, double quadrature_tolerance = 1e-8);

  const OscillationSpec& base() const { return base_; }
  bool has_closed_form() const;
  double quadrature_tolerance() const { return tol_; }

  double operator()(double r) const;
  /// ĥ at r = e^{-t}.
  double at_log(double t) const;
  std::optional<double> closed_form(double r) const;
  double quadrature(double r) const;
  double quadrature_at_log(double t) const;

 private:
  OscillationSpec base_;
  double tol_;
};

double hat(const OscillationSpec& spec, double r);

/// B(r) = r ∫_r^R ω(s)/s² ds / ∫₀^r ω(s)/s ds.
double b_of_r(const OscillationSpec& spec, double r);

/// Limit with a flag telling whether a numeric extrapolation converged.
struct LimitEstimate {
  ExtReal value;
  bool confident = true;
};

/// lim_{r→0} ω(r)/(r ω'(r)). Analytic for the parametric families;
/// Richardson-extrapolated log-log slopes for tabulated data.
LimitEstimate c1_limit(const OscillationSpec& spec);

struct SpaceConstants {
  ExtReal C1;
  ExtReal dini_value;
  double B_limit = 0.0;  // 1/(C1 − 1), with 1/∞ = 0
};

SpaceConstants space_constants(const OscillationSpec& spec);

struct ProbeInterval {
  double lo = 0.0;  // 0 means "down to the probe floor"
  double hi = 0.0;  // 0 means "family default"
};

/// Geometric probe grid hi·2^{-k} down to max(lo, 1e-12).
std::vector<double> probe_grid(double hi, double lo = 0.0);

bool is_concave_near_zero(const OscillationSpec& spec, ProbeInterval probe);

/// ω << ω₁ : ω(r)/ω₁(r) → 0.
bool dominates(const OscillationSpec& weaker, const OscillationSpec& stronger);

/// 0 < k₀ ≤ ω_a/ω_b ≤ k₁ < ∞ near the origin.
bool equivalent(const OscillationSpec& a, const OscillationSpec& b);

/// sup over the probe grid of ω(k r)/ω(r).
double doubling_constant(const OscillationSpec& spec, double k,
                         ProbeInterval probe = {});

/// Tabulates ω on a geometric grid of n knots in [r_min, R] plus the origin.
OscillationSpec tabulate(const OscillationSpec& spec, double r_min, int n,
                         double scale = 1.0);

/// Tabulates ĥ of a Dini-admissible spec the same way.
OscillationSpec tabulate_hat(const OscillationSpec& spec, double r_min, int n);

}  // namespace modcont
