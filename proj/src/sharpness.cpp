#include "modcont/sharpness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "modcont/errors.hpp"

namespace modcont {

namespace {

double radius_of(const Point& x, int n) {
  double s = 0.0;
  for (int a = 0; a < n; ++a) s += x[a] * x[a];
  return std::sqrt(s);
}

// g = ψ ĥ and its first two radial derivatives.
struct Radial {
  double g, g1, g2;
};

Radial radial_profile(const Counterexample& ce, double r) {
  const OscillationSpec& s = ce.spec();
  const double h = ce.hat(r), w = eval(s, r), w1 = derivative(s, r);
  Radial p{h, w / r, w1 / r - w / (r * r)};
  if (const auto& c = ce.cutoff()) {
    const double psi = c->value(r), d1 = c->d1(r), d2 = c->d2(r);
    p = {psi * h, d1 * h + psi * w / r, d2 * h + 2 * d1 * w / r + psi * (w1 / r - w / (r * r))};
  }
  return p;
}

}  // namespace

double trace_product(int n, const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (int k = 0; k < n * n; ++k) s += a[static_cast<std::size_t>(k)] * b[static_cast<std::size_t>(k)];
  return s;
}

Counterexample::Counterexample(OscillationSpec spec, EllipticOperator op, std::vector<double> b,
                               std::optional<CutoffSpec> cutoff)
    : hat_(std::move(spec)), op_(std::move(op)), b_(std::move(b)), cutoff_(cutoff) {
  const int n = op_.n();
  if (static_cast<int>(b_.size()) != n * n)
    throw std::invalid_argument("Counterexample: b must be n*n");
  double bn = 0.0, an = 0.0;
  std::vector<double> a(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (b_[static_cast<std::size_t>(i * n + j)] != b_[static_cast<std::size_t>(j * n + i)])
        throw std::invalid_argument("Counterexample: b must be symmetric");
      a[static_cast<std::size_t>(i * n + j)] = op_.a(i, j);
      bn += b_[static_cast<std::size_t>(i * n + j)] * b_[static_cast<std::size_t>(i * n + j)];
      an += op_.a(i, j) * op_.a(i, j);
    }
  if (bn == 0.0) throw std::invalid_argument("Counterexample: b must be non-zero");
  if (std::abs(trace_product(n, a, b_)) > 1e-12 * std::sqrt(an * bn))
    throw std::invalid_argument("Counterexample: trace condition sum a_ij b_ij = 0 violated");
  if (!dini_integral(hat_.base()).is_finite()) throw NotDiniAdmissible();
  if (cutoff_ && cutoff_->rho > hat_.base().radius() * (1.0 + 1e-12))
    throw std::invalid_argument("Counterexample: cutoff radius exceeds R");
}

Counterexample Counterexample::laplacian(OscillationSpec spec, int n,
                                         std::optional<CutoffSpec> cutoff) {
  std::vector<double> b(static_cast<std::size_t>(n * n), 0.0);
  b[1] = b[static_cast<std::size_t>(n)] = 0.5;
  return Counterexample(std::move(spec), EllipticOperator::laplacian(n), std::move(b), cutoff);
}

double Counterexample::max_radius() const { return cutoff_ ? cutoff_->rho : spec().radius(); }

double counterexample_u(const Counterexample& ce, const Point& x) {
  const int n = ce.op().n();
  const double r = radius_of(x, n);
  if (r == 0.0) return 0.0;
  if (ce.cutoff() && r >= ce.cutoff()->rho) return 0.0;
  double P = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) P += ce.b(i, j) * x[i] * x[j];
  const double psi = ce.cutoff() ? ce.cutoff()->value(r) : 1.0;
  return psi * ce.hat(r) * P;
}

double counterexample_hessian(const Counterexample& ce, const Point& x, int k, int l) {
  const int n = ce.op().n();
  const double r = radius_of(x, n);
  if (r == 0.0) return 0.0;
  if (ce.cutoff() && r >= ce.cutoff()->rho) return 0.0;
  const Radial g = radial_profile(ce, r);
  double P = 0.0, bxk = 0.0, bxl = 0.0;
  for (int i = 0; i < n; ++i) {
    bxk += ce.b(k, i) * x[i];
    bxl += ce.b(l, i) * x[i];
    for (int j = 0; j < n; ++j) P += ce.b(i, j) * x[i] * x[j];
  }
  const double dk = g.g1 * x[k] / r, dl = g.g1 * x[l] / r;
  const double dkl = g.g2 * x[k] * x[l] / (r * r) + g.g1 * ((k == l ? 1.0 / r : 0.0) - x[k] * x[l] / (r * r * r));
  return dkl * P + 2.0 * (dk * bxl + dl * bxk) + 2.0 * g.g * ce.b(k, l);
}

double counterexample_Lu(const Counterexample& ce, const Point& x) {
  const int n = ce.op().n();
  double s = 0.0;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      const double a = ce.op().a(k, l);
      if (a != 0.0) s += a * counterexample_hessian(ce, x, k, l);
    }
  return s;
}

double counterexample_d1d2u(const Counterexample& ce, const Point& x) {
  return counterexample_hessian(ce, x, 0, 1);
}

double flotas_constant(const OscillationSpec& spec, double r_lo, double r_hi) {
  double inf = std::numeric_limits<double>::infinity();
  auto probe = probe_grid(r_hi, r_lo);
  probe.push_back(r_lo);
  for (double r : probe) {
    const double d = derivative(spec, r);
    if (!(d > 0.0)) throw DomainError("flotas_constant: omega is not increasing at r = " + std::to_string(r));
    inf = std::min(inf, eval(spec, r) / (r * d));
  }
  return inf;
}

double laplacian_bound_constant(int n, double flotas) {
  if (!(flotas > 0.0)) throw std::invalid_argument("laplacian_bound_constant: C_f must be positive");
  return 0.5 * ((n + 2) + 1.0 / flotas);
}

SharpnessCertificate sharpness_certificate(const OscillationSpec& spec,
                                           const OscillationSpec& candidate,
                                           const std::vector<double>& radii) {
  if (radii.empty()) throw std::invalid_argument("sharpness_certificate: no radii");
  const HatTransform hat(spec);
  SharpnessCertificate c;
  double r_min = radii.front();
  for (double r : radii) {
    if (!(r > 0.0) || r >= std::min(spec.radius(), candidate.radius()) * (1.0 + 1e-12))
      throw DomainError("sharpness_certificate: radius outside (0, R)");
    const double q = hat(r) / eval(candidate, r);
    c.rows.push_back({r, q});
    if (c.rows.size() == 1 || q > c.sup_ratio) {
      c.sup_ratio = q;
      c.argmax_radius = r;
    }
    r_min = std::min(r_min, r);
  }
  // The slope probe starts at L_max/8, which must stay inside both domains.
  const double L_floor = 8.0 * std::max(-std::log(spec.radius()), -std::log(candidate.radius()));
  c.trend = classify_ratio_trend(
      [&](double L) { return hat.at_log(L) / eval_log(candidate, L); },
      std::max(-std::log(r_min), L_floor * (1.0 + 1e-9)));
  c.admissible = c.trend.trend != RatioTrend::to_infinity;
  return c;
}

DensityGap density_failure_gap(const OscillationSpec& spec, const SampledField& g,
                               const std::vector<double>& radii) {
  if (radii.empty()) throw std::invalid_argument("density_failure_gap: no radii");
  const Point origin{0.0, 0.0, 0.0};
  if (!g.contains(origin)) throw DomainError("density_failure_gap: origin outside the field box");
  const double g0 = g.interpolate(origin);
  // f(0) = ω(0) = 0
  DensityGap out;
  out.gap = std::numeric_limits<double>::infinity();
  const int n = g.dim();
  auto v = g.values();
  for (double r : radii) {
    double best = -1.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Point x = g.point(g.unflat(k));
      const double rx = radius_of(x, n);
      if (rx == 0.0 || std::abs(rx - r) > 0.5 * g.h()) continue;
      const double w = eval(spec, rx);
      best = std::max(best, std::abs((w - v[k]) - (0.0 - g0)) / w);
    }
    if (best < 0.0) throw DomainError("density_failure_gap: no lattice point at that radius");
    out.rows.push_back({r, best});
    out.gap = std::min(out.gap, best);
  }
  return out;
}

}  // namespace modcont
