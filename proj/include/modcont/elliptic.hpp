#pragma once

// Constant-coefficient operators L = Σ a_ij ∂_i∂_j in two and three
// dimensions, their fundamental solutions and the second-derivative kernels
// K_ij = ∂_i∂_j J, principal-value quadrature in cancellation form, and the
// finite-difference Dirichlet solver used to produce ∇²u.
//
// Sign convention: L J = δ. In 3D J = −1/(4π) (Σ A_ij x_i x_j)^{-1/2} with A
// the cofactor matrix of a; in 2D J = log(xᵀa⁻¹x) / (4π √det a).

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "modcont/field.hpp"
#include "modcont/modulus.hpp"
#include "modcont/oscillation.hpp"

namespace modcont {

using Mat3 = std::array<std::array<double, 3>, 3>;

class EllipticOperator {
 public:
  /// a is n×n, given row-major (n² entries). Must be symmetric positive
  /// definite.
  EllipticOperator(int n, const std::vector<double>& a);
  static EllipticOperator laplacian(int n);

  int n() const { return n_; }
  double a(int i, int j) const { return a_[i][j]; }
  double cofactor(int i, int j) const { return cof_[i][j]; }
  double inverse(int i, int j) const { return inv_[i][j]; }
  double det() const { return det_; }
  double min_eigenvalue() const { return lo_; }
  double max_eigenvalue() const { return hi_; }

  /// xᵀ a⁻¹ x.
  double quadratic_inverse(const Point& x) const;
  std::string describe() const;

 private:
  int n_;
  Mat3 a_{}, cof_{}, inv_{};
  double det_ = 1.0, lo_ = 1.0, hi_ = 1.0;
};

double fundamental_solution(const EllipticOperator& op, const Point& x);

/// Quadrature rule on the unit sphere S^{n-1}: nodes and weights summing to
/// the sphere measure. 2D: `m` uniform angles. 3D: `m` Gauss-Legendre nodes
/// in cos θ times 2m uniform azimuths.
struct SphereRule {
  std::vector<Point> nodes;
  std::vector<double> weights;
};
SphereRule sphere_rule(int n, int m);

/// K(x) = σ(x/|x|)/|x|ⁿ with ∫_S σ = 0.
class SingularKernel {
 public:
  using Sigma = std::function<double(const Point&)>;

  /// Throws std::invalid_argument when the sphere mean of σ exceeds 1e-8
  /// relative to the sphere integral of |σ|.
  SingularKernel(int n, Sigma sigma, std::string name = "K");

  int n() const { return n_; }
  const std::string& name() const { return name_; }
  double sigma(const Point& unit) const { return sigma_(unit); }
  double operator()(const Point& x) const;

  /// ∫_S σ dS by the reference rule.
  double sphere_integral() const { return sphere_integral_; }
  /// sup |σ| plus sup of the tangential gradient, sampled.
  double norm_bound() const { return norm_bound_; }

 private:
  int n_;
  Sigma sigma_;
  std::string name_;
  double sphere_integral_ = 0.0;
  double norm_bound_ = 0.0;
};

/// ∂_i∂_j J for the operator, as a singular kernel.
SingularKernel second_derivative_kernel(const EllipticOperator& op, int i, int j);

/// c_ij = ∫_S ∂_iJ(z) z_j dS(z): ∂_i∂_j (J ∗ φ) = PV K_ij ∗ φ + c_ij φ.
/// For the Laplacian c_ij = δ_ij / n.
double delta_coefficient(const EllipticOperator& op, int i, int j);

/// ∫_{ρ1 < |x| < ρ2} K dx by Gauss-Legendre in r times the sphere rule.
double pv_ring_integral(const SingularKernel& kernel, double rho1, double rho2);

struct PvOptions {
  int angles = 64;         // 2D angular nodes; 3D uses angles/4 polar nodes
  int radial_nodes = 8;    // Gauss-Legendre nodes in log r per ring
};

/// ∫ K(x − y)(φ(y) − φ(x)) dy over |x − y| up to the farthest box corner,
/// with φ continued outside its box by the value at the nearest box point
/// (the zero extension when φ is supported inside the box). Rings are
/// geometric (factor 2) down to h; the sub-h disc is dropped since σ is even
/// and φ is linear there.
double pv_convolution(const SingularKernel& kernel, const SampledField& phi, const Point& x,
                      PvOptions opt = {});

struct HklgResult {
  double ratio = 0.0;       // [K∗φ]_ĥ / ‖φ‖_ω
  double numerator = 0.0;   // [K∗φ]_ĥ
  double denominator = 0.0; // ‖φ‖_ω
  bool degenerate = false;  // φ ≡ 0
  SeminormReport numerator_report;
};

struct HklgOptions {
  double box_half = 0.5;       // φ lives on [−box_half, box_half]^n
  double support = 0.3;        // cutoff radius, capped below R
  double eval_half = 0.25;     // K∗φ evaluated on [−eval_half, eval_half]^n
  PvOptions pv{};
};

/// Ratio for φ given on a lattice centred at the origin.
HklgResult hklg_ratio(const SingularKernel& kernel, const SampledField& phi,
                      const OscillationSpec& spec, HklgOptions opt = {});

/// Builds φ(y) = ω(|y|)ψ(|y|/ρ) on a lattice with `resolution` points per
/// axis and measures the ratio.
HklgResult hklg_ratio(const SingularKernel& kernel, const OscillationSpec& spec, int resolution,
                      HklgOptions opt = {});

// ---------------------------------------------------------------- solver

struct DirichletProblem {
  EllipticOperator op;
  SampledField rhs;  // on the full lattice of the box, boundary included
};

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;  // ‖f − A u‖ / ‖f‖ on interior points
};

/// Solves Σ a_ij D_ij u = f with u = 0 on the lattice boundary. Second
/// differences on the diagonal, 4-point centred stencils across axes.
/// Conjugate gradients preconditioned by the exact inverse of the diagonal
/// part (sine transform). Requires a square/cubic lattice.
SampledField solve_dirichlet(const DirichletProblem& problem, double tol = 1e-10,
                             SolveStats* stats = nullptr, int max_iterations = 500);

/// Applies the discrete operator (interior points; boundary rows are zero).
SampledField apply_operator(const EllipticOperator& op, const SampledField& u);

/// Hessian components (i ≤ j, row-major upper triangle) on the lattice
/// shrunk by one layer.
std::vector<SampledField> hessian(const SampledField& u);
int hessian_index(int n, int i, int j);

}  // namespace modcont
