#include "modcont/elliptic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "modcont/cutoff.hpp"
#include "modcont/errors.hpp"

namespace modcont {

namespace {

constexpr double kPi = std::numbers::pi;

double norm3(const Point& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
  x.clear();
  w.clear();
  for (double z : boost::math::legendre_p_zeros<double>(m)) {
    const double dp = boost::math::legendre_p_prime<double>(m, z);
    const double wz = 2.0 / ((1.0 - z * z) * dp * dp);
    x.push_back(z);
    w.push_back(wz);
    if (z != 0.0) {
      x.push_back(-z);
      w.push_back(wz);
    }
  }
}

}  // namespace

// ---------------------------------------------------------------- operator

EllipticOperator::EllipticOperator(int n, const std::vector<double>& a) : n_(n) {
  if (n != 2 && n != 3) throw std::invalid_argument("EllipticOperator: n must be 2 or 3");
  if (static_cast<int>(a.size()) != n * n)
    throw std::invalid_argument("EllipticOperator: need n*n coefficients");
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = a[static_cast<std::size_t>(i * n + j)];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (std::abs(m(i, j) - m(j, i)) > 1e-12 * (std::abs(m(i, j)) + std::abs(m(j, i)) + 1e-300))
        throw std::invalid_argument("EllipticOperator: matrix must be symmetric");
  const Eigen::MatrixXd sub = m.topLeftCorner(n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub);
  lo_ = es.eigenvalues().minCoeff();
  hi_ = es.eigenvalues().maxCoeff();
  if (!(lo_ > 0.0)) throw std::invalid_argument("EllipticOperator: matrix must be positive definite");
  det_ = sub.determinant();
  const Eigen::MatrixXd inv = sub.inverse();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      a_[i][j] = sub(i, j);
      inv_[i][j] = inv(i, j);
      cof_[i][j] = det_ * inv(i, j);  // symmetric, so cofactor = adjugate
    }
}

EllipticOperator EllipticOperator::laplacian(int n) {
  std::vector<double> a(static_cast<std::size_t>(n * n), 0.0);
  for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i * n + i)] = 1.0;
  return EllipticOperator(n, a);
}

double EllipticOperator::quadratic_inverse(const Point& x) const {
  double q = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) q += inv_[i][j] * x[i] * x[j];
  return q;
}

std::string EllipticOperator::describe() const {
  std::ostringstream os;
  os << "a=[";
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) os << (i || j ? " " : "") << a_[i][j];
  os << "]";
  return os.str();
}

double fundamental_solution(const EllipticOperator& op, const Point& x) {
  double sx = 0.0;
  for (int i = 0; i < op.n(); ++i) sx += x[i] * x[i];
  if (sx == 0.0) throw DomainError("fundamental_solution: singular at x = 0");
  if (op.n() == 3) {
    double q = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) q += op.cofactor(i, j) * x[i] * x[j];
    return -1.0 / (4.0 * kPi * std::sqrt(q));
  }
  return std::log(op.quadratic_inverse(x)) / (4.0 * kPi * std::sqrt(op.det()));
}

// ---------------------------------------------------------------- sphere

SphereRule sphere_rule(int n, int m) {
  if (m < 2) throw std::invalid_argument("sphere_rule: need at least 2 nodes");
  SphereRule rule;
  if (n == 2) {
    for (int k = 0; k < m; ++k) {
      const double t = 2 * kPi * k / m;
      rule.nodes.push_back({std::cos(t), std::sin(t), 0.0});
      rule.weights.push_back(2 * kPi / m);
    }
    return rule;
  }
  if (n != 3) throw std::invalid_argument("sphere_rule: n must be 2 or 3");
  std::vector<double> z, w;
  gauss_legendre(m, z, w);
  const int naz = 2 * m;
  for (std::size_t a = 0; a < z.size(); ++a) {
    const double s = std::sqrt(std::max(0.0, 1.0 - z[a] * z[a]));
    for (int k = 0; k < naz; ++k) {
      const double p = 2 * kPi * (k + 0.5) / naz;
      rule.nodes.push_back({s * std::cos(p), s * std::sin(p), z[a]});
      rule.weights.push_back(w[a] * 2 * kPi / naz);
    }
  }
  return rule;
}

// ---------------------------------------------------------------- kernels

SingularKernel::SingularKernel(int n, Sigma sigma, std::string name)
    : n_(n), sigma_(std::move(sigma)), name_(std::move(name)) {
  if (n != 2 && n != 3) throw std::invalid_argument("SingularKernel: n must be 2 or 3");
  const SphereRule rule = sphere_rule(n, n == 2 ? 2048 : 64);
  double total = 0.0, mass = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double s = sigma_(rule.nodes[k]);
    total += rule.weights[k] * s;
    mass += rule.weights[k] * std::abs(s);
  }
  sphere_integral_ = total;
  if (std::abs(total) > 1e-8 * std::max(mass, 1.0))
    throw std::invalid_argument("SingularKernel: sigma does not have mean zero on the sphere");

  // Norm bound: sup |σ| + sup tangential derivative, by central differences.
  const SphereRule coarse = sphere_rule(n, n == 2 ? 256 : 24);
  const double eps = 1e-5;
  double sup_sigma = 0.0, sup_grad = 0.0;
  for (const Point& u : coarse.nodes) {
    double g = 0.0;
    const Point ref = std::abs(u[0]) < 0.9 ? Point{1, 0, 0} : Point{0, 1, 0};
    std::vector<Point> tangents;
    if (n == 2) {
      tangents.push_back({-u[1], u[0], 0.0});
    } else {
      Point t1{u[1] * ref[2] - u[2] * ref[1], u[2] * ref[0] - u[0] * ref[2],
               u[0] * ref[1] - u[1] * ref[0]};
      const double l = norm3(t1);
      for (double& c : t1) c /= l;
      const Point t2{u[1] * t1[2] - u[2] * t1[1], u[2] * t1[0] - u[0] * t1[2],
                     u[0] * t1[1] - u[1] * t1[0]};
      tangents = {t1, t2};
    }
    for (const Point& t : tangents) {
      Point p, q;
      for (int c = 0; c < 3; ++c) {
        p[c] = u[c] + eps * t[c];
        q[c] = u[c] - eps * t[c];
      }
      const double lp = norm3(p), lq = norm3(q);
      for (int c = 0; c < 3; ++c) {
        p[c] /= lp;
        q[c] /= lq;
      }
      const double d = (sigma_(p) - sigma_(q)) / (2 * eps);
      g += d * d;
    }
    sup_sigma = std::max(sup_sigma, std::abs(sigma_(u)));
    sup_grad = std::max(sup_grad, std::sqrt(g));
  }
  norm_bound_ = sup_sigma + sup_grad;
}

double SingularKernel::operator()(const Point& x) const {
  const double r = norm3(x);
  if (r == 0.0) throw DomainError("SingularKernel: singular at x = 0");
  const Point u{x[0] / r, x[1] / r, x[2] / r};
  return sigma_(u) / std::pow(r, n_);
}

SingularKernel second_derivative_kernel(const EllipticOperator& op, int i, int j) {
  if (i < 0 || j < 0 || i >= op.n() || j >= op.n())
    throw std::invalid_argument("second_derivative_kernel: axis out of range");
  const int n = op.n();
  const double sd = std::sqrt(op.det());
  auto mx = [op](const Point& x, int k) {
    double s = 0.0;
    for (int l = 0; l < op.n(); ++l) s += op.inverse(k, l) * x[l];
    return s;
  };
  SingularKernel::Sigma sigma;
  if (n == 3) {
    const double c = -1.0 / (4.0 * kPi * sd);
    sigma = [=](const Point& u) {
      const double q = op.quadratic_inverse(u);
      return c * (3.0 * mx(u, i) * mx(u, j) / std::pow(q, 2.5) - op.inverse(i, j) / std::pow(q, 1.5));
    };
  } else {
    const double c = 1.0 / (4.0 * kPi * sd);
    sigma = [=](const Point& u) {
      const double q = op.quadratic_inverse(u);
      return 2.0 * c * (op.inverse(i, j) / q - 2.0 * mx(u, i) * mx(u, j) / (q * q));
    };
  }
  std::ostringstream name;
  name << "K" << i + 1 << j + 1;
  return SingularKernel(n, std::move(sigma), name.str());
}

double delta_coefficient(const EllipticOperator& op, int i, int j) {
  const int n = op.n();
  const SphereRule rule = sphere_rule(n, n == 2 ? 2048 : 64);
  const double sd = std::sqrt(op.det());
  double sum = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const Point& z = rule.nodes[k];
    double mz = 0.0;
    for (int l = 0; l < n; ++l) mz += op.inverse(i, l) * z[l];
    const double q = op.quadratic_inverse(z);
    // ∂_i J on the unit sphere.
    const double di = n == 3 ? mz / (4.0 * kPi * sd * std::pow(q, 1.5)) : mz / (2.0 * kPi * sd * q);
    sum += rule.weights[k] * di * z[j];
  }
  return sum;
}

double pv_ring_integral(const SingularKernel& kernel, double rho1, double rho2) {
  if (!(rho1 > 0.0 && rho1 < rho2)) throw DomainError("pv_ring_integral: need 0 < rho1 < rho2");
  const int n = kernel.n();
  const SphereRule rule = sphere_rule(n, n == 2 ? 512 : 48);
  std::vector<double> z, w;
  gauss_legendre(16, z, w);
  const double a = std::log(rho1), b = std::log(rho2);
  double sum = 0.0;
  for (std::size_t q = 0; q < z.size(); ++q) {
    const double r = std::exp(0.5 * (a + b) + 0.5 * (b - a) * z[q]);
    double ang = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const Point& u = rule.nodes[k];
      ang += rule.weights[k] * kernel(Point{r * u[0], r * u[1], r * u[2]});
    }
    // dx = r^{n-1} dr dS = r^n d(log r) dS
    sum += 0.5 * (b - a) * w[q] * std::pow(r, n) * ang;
  }
  return sum;
}

// ---------------------------------------------------------------- PV

namespace {

// φ extended by its value at the nearest box point, multilinear inside. For
// φ vanishing near the box faces this is the zero extension; for constant φ
// it keeps the integrand identically zero.
struct ClampExtended {
  const SampledField& f;
  double operator()(Point y) const {
    for (int a = 0; a < f.dim(); ++a)
      y[a] = std::clamp(y[a], f.origin()[a], f.origin()[a] + (f.shape()[a] - 1) * f.h());
    return f.interpolate(y);
  }
};

}  // namespace

double pv_convolution(const SingularKernel& kernel, const SampledField& phi, const Point& x,
                      PvOptions opt) {
  const int n = kernel.n();
  if (phi.dim() != n) throw std::invalid_argument("pv_convolution: dimension mismatch");
  if (!phi.contains(x)) throw DomainError("pv_convolution: point outside the field box");
  const ClampExtended ext{phi};
  const double fx = phi.interpolate(x);
  const double h = phi.h();

  double rmax = 0.0;
  for (int corner = 0; corner < (1 << n); ++corner) {
    double d2 = 0.0;
    for (int a = 0; a < n; ++a) {
      const double side = (phi.shape()[a] - 1) * h;
      const double c = phi.origin()[a] + ((corner >> a & 1) ? side : 0.0);
      d2 += (c - x[a]) * (c - x[a]);
    }
    rmax = std::max(rmax, std::sqrt(d2));
  }
  if (rmax <= h) return 0.0;

  const SphereRule rule = sphere_rule(n, n == 2 ? opt.angles : std::max(4, opt.angles / 4));
  std::vector<double> sig(rule.nodes.size());
  for (std::size_t k = 0; k < sig.size(); ++k) {
    const Point& u = rule.nodes[k];
    sig[k] = rule.weights[k] * kernel.sigma(Point{-u[0], -u[1], -u[2]});
  }
  std::vector<double> z, w;
  gauss_legendre(opt.radial_nodes, z, w);

  double sum = 0.0;
  for (double hi = rmax; hi > h * (1.0 + 1e-12);) {
    const double lo = std::max(0.5 * hi, h);
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t q = 0; q < z.size(); ++q) {
      const double r = std::exp(0.5 * (a + b) + 0.5 * (b - a) * z[q]);
      double ang = 0.0;
      for (std::size_t k = 0; k < sig.size(); ++k) {
        const Point& u = rule.nodes[k];
        ang += sig[k] * (ext(Point{x[0] + r * u[0], x[1] + r * u[1], x[2] + r * u[2]}) - fx);
      }
      // K dx = σ r^{-n} r^{n-1} dr dS = σ d(log r) dS
      sum += 0.5 * (b - a) * w[q] * ang;
    }
    hi = lo;
  }
  return sum;
}

// ---------------------------------------------------------------- HKLG

HklgResult hklg_ratio(const SingularKernel& kernel, const SampledField& phi,
                      const OscillationSpec& spec, HklgOptions opt) {
  const int n = kernel.n();
  if (phi.dim() != n) throw std::invalid_argument("hklg_ratio: dimension mismatch");
  HklgResult res;
  if (phi.max_abs() == 0.0) {
    res.degenerate = true;
    return res;
  }
  const double h = phi.h();
  // Lattice points of φ inside the evaluation box.
  std::vector<int> lo(n), shape(n);
  std::vector<double> origin(n);
  for (int a = 0; a < n; ++a) {
    lo[a] = static_cast<int>(std::ceil((-opt.eval_half - phi.origin()[a]) / h - 1e-9));
    const int hi = static_cast<int>(std::floor((opt.eval_half - phi.origin()[a]) / h + 1e-9));
    lo[a] = std::max(lo[a], 0);
    shape[a] = std::min(hi, phi.shape()[a] - 1) - lo[a] + 1;
    origin[a] = phi.origin()[a] + lo[a] * h;
    if (shape[a] < 5) throw std::invalid_argument("hklg_ratio: evaluation box too small");
  }
  const SampledField kphi = SampledField::sample(shape, h, origin, [&](const Point& x) {
    return pv_convolution(kernel, phi, x, opt.pv);
  });
  const double max_radius = 0.5 * kphi.min_side();
  const RadiusWindow window = default_window(h, max_radius);
  ModulusOptions mopt;
  mopt.offset_cap = std::max(mopt.offset_cap, static_cast<int>(std::ceil(max_radius / h)) + 1);

  HatTransform hat_t(spec);
  res.numerator_report =
      seminorm(empirical_oscillation(kphi, max_radius, mopt), [&](double r) { return hat_t(r); },
               window);
  res.numerator = res.numerator_report.seminorm;
  res.denominator = phi.max_abs() +
                    seminorm(empirical_oscillation(phi, max_radius, mopt), spec, window).seminorm;
  res.ratio = res.numerator / res.denominator;
  return res;
}

HklgResult hklg_ratio(const SingularKernel& kernel, const OscillationSpec& spec, int resolution,
                      HklgOptions opt) {
  if (resolution < 9) throw std::invalid_argument("hklg_ratio: resolution too small");
  const CutoffSpec psi(std::min(opt.support, 0.95 * spec.radius()));
  const SampledField phi = SampledField::sample_box(
      kernel.n(), resolution, -opt.box_half, opt.box_half, [&](const Point& y) {
        const double r = norm3(y);
        return r >= psi.rho ? 0.0 : eval(spec, r) * psi.value(r);
      });
  return hklg_ratio(kernel, phi, spec, opt);
}

}  // namespace modcont
