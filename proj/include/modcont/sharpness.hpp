#pragma once

// Closed-form counterexample u(x) = ψ(|x|) ĥ(|x|) Σ b_ij x_i x_j with
// Σ a_ij b_ij = 0: Lu is controlled by ω while ∂_i∂_j u only by ĥ. Plus the
// density-failure gap for f(x) = ω(|x|).

#include <optional>
#include <vector>

#include "modcont/cutoff.hpp"
#include "modcont/elliptic.hpp"
#include "modcont/oscillation.hpp"
#include "modcont/trend.hpp"

namespace modcont {

class Counterexample {
 public:
  /// b is n×n row-major, symmetric, non-zero, with |Σ a_ij b_ij| ≤ 1e-12
  /// relative to ‖a‖‖b‖. The spec must be Dini-admissible.
  Counterexample(OscillationSpec spec, EllipticOperator op, std::vector<double> b,
                 std::optional<CutoffSpec> cutoff = std::nullopt);

  /// Laplacian with b = (e₁⊗e₂ + e₂⊗e₁)/2, so that u = ĥ(|x|) x₁x₂.
  static Counterexample laplacian(OscillationSpec spec, int n = 2,
                                  std::optional<CutoffSpec> cutoff = std::nullopt);

  const OscillationSpec& spec() const { return hat_.base(); }
  const EllipticOperator& op() const { return op_; }
  double b(int i, int j) const { return b_[static_cast<std::size_t>(i * op_.n() + j)]; }
  const std::optional<CutoffSpec>& cutoff() const { return cutoff_; }
  double hat(double r) const { return hat_(r); }

  /// Largest |x| at which the closed forms are evaluated.
  double max_radius() const;

 private:
  HatTransform hat_;
  EllipticOperator op_;
  std::vector<double> b_;
  std::optional<CutoffSpec> cutoff_;
};

/// Σ a_ij b_ij for row-major n×n matrices.
double trace_product(int n, const std::vector<double>& a, const std::vector<double>& b);

double counterexample_u(const Counterexample& ce, const Point& x);
double counterexample_Lu(const Counterexample& ce, const Point& x);
/// ∂_k∂_l u.
double counterexample_hessian(const Counterexample& ce, const Point& x, int k, int l);
double counterexample_d1d2u(const Counterexample& ce, const Point& x);

/// inf of ω(r)/(r ω'(r)) over [r_lo, r_hi] on a geometric probe grid.
/// Throws DomainError where ω' ≤ 0.
double flotas_constant(const OscillationSpec& spec, double r_lo, double r_hi);

/// C with |Lu(x)| ≤ C ω(|x|) for the Laplacian counterexample without cutoff:
/// Δu = (x₁x₂/|x|²)((n+2)ω + |x|ω') and |x₁x₂|/|x|² ≤ 1/2 give
/// C = ((n+2) + 1/C_f)/2.
double laplacian_bound_constant(int n, double flotas);

struct CertificateRow {
  double radius;
  double ratio;
};

struct SharpnessCertificate {
  std::vector<CertificateRow> rows;  // ĥ(r)/candidate(r) at the given radii
  double sup_ratio = 0.0;
  double argmax_radius = 0.0;
  TrendReport trend;
  bool admissible = true;  // ratio bounded as r → 0
};

/// Ratio ĥ/candidate at the radii, and whether it stays bounded as r → 0
/// (log-log slope test down to the smallest radius).
SharpnessCertificate sharpness_certificate(const OscillationSpec& spec,
                                           const OscillationSpec& candidate,
                                           const std::vector<double>& radii);

struct DensityGap {
  double gap = 0.0;                // min over radii
  std::vector<CertificateRow> rows;  // per-radius max over the shell
};

/// With f(x) = ω(|x|): for each radius r, the max over lattice points x with
/// ||x| − r| ≤ h/2 of |(f−g)(x) − (f−g)(0)| / ω(|x|); the gap is the min of
/// these over the radii. g(0) is interpolated when the origin is not a
/// lattice point.
DensityGap density_failure_gap(const OscillationSpec& spec, const SampledField& g,
                               const std::vector<double>& radii);

}  // namespace modcont
