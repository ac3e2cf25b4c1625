#include "modcont/modulus.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "modcont/errors.hpp"

namespace modcont {

namespace {

// Bin of an offset with squared length m: floor(2 sqrt(m)), computed exactly.
int bin_of(long m) {
  long b = static_cast<long>(std::floor(2.0 * std::sqrt(static_cast<double>(m))));
  while ((b + 1) * (b + 1) <= 4 * m) ++b;
  while (b * b > 4 * m) --b;
  return static_cast<int>(b);
}

// The field viewed as 3D with leading singleton axes.
struct Grid3 {
  std::array<int, 3> n{1, 1, 1};
  std::array<std::size_t, 3> stride{0, 0, 1};

  explicit Grid3(const SampledField& f) {
    const int pad = 3 - f.dim();
    for (int a = 0; a < f.dim(); ++a) n[pad + a] = f.shape()[a];
    stride[2] = 1;
    stride[1] = static_cast<std::size_t>(n[2]);
    stride[0] = stride[1] * static_cast<std::size_t>(n[1]);
  }
  std::size_t flat(int i, int j, int k) const {
    return stride[0] * static_cast<std::size_t>(i) + stride[1] * static_cast<std::size_t>(j) +
           static_cast<std::size_t>(k);
  }
  std::ptrdiff_t flat_offset(const std::array<int, 3>& d) const {
    return static_cast<std::ptrdiff_t>(stride[0]) * d[0] +
           static_cast<std::ptrdiff_t>(stride[1]) * d[1] + d[2];
  }
};

struct Offset {
  std::array<int, 3> d;
  int bin;  // compact bin index
};

struct OffsetTable {
  std::vector<Offset> offsets;  // half space: first non-zero component > 0
  std::vector<double> radii;    // compact bin representatives (ascending)
};

OffsetTable make_offsets(const SampledField& f, double max_radius, const ModulusOptions& opt,
                         bool check_cap = true) {
  if (!(max_radius > 0.0)) throw DomainError("modulus: max_radius must be positive");
  if (max_radius > 0.5 * f.min_side() * (1.0 + 1e-12))
    throw DomainError("modulus: max_radius exceeds half the smallest box side");
  const double steps = max_radius / f.h();
  if (check_cap && steps > opt.offset_cap * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "modulus: max_radius/h = " << steps << " exceeds the offset cap " << opt.offset_cap
       << "; use a smaller max_radius, subsample the field or raise the cap";
    throw OffsetCapExceeded(os.str());
  }
  const Grid3 g(f);
  const long kmax = static_cast<long>(std::floor(steps * (1.0 + 1e-12)));
  const double lim2 = steps * steps * (1.0 + 1e-12);
  std::array<int, 3> ext;
  for (int a = 0; a < 3; ++a) ext[a] = static_cast<int>(std::min<long>(kmax, g.n[a] - 1));

  OffsetTable t;
  std::vector<std::pair<long, std::array<int, 3>>> raw;
  for (int i = 0; i <= ext[0]; ++i)
    for (int j = i == 0 ? 0 : -ext[1]; j <= ext[1]; ++j)
      for (int k = (i == 0 && j == 0) ? 1 : -ext[2]; k <= ext[2]; ++k) {
        const long m = long(i) * i + long(j) * j + long(k) * k;
        if (m > lim2) continue;
        raw.push_back({m, {i, j, k}});
      }
  std::vector<int> bins;
  for (auto& [m, d] : raw) bins.push_back(bin_of(m));
  std::vector<int> uniq(bins);
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  t.radii.assign(uniq.size(), 0.0);
  for (std::size_t q = 0; q < raw.size(); ++q) {
    const int c = static_cast<int>(std::lower_bound(uniq.begin(), uniq.end(), bins[q]) - uniq.begin());
    t.offsets.push_back({raw[q].second, c});
    t.radii[c] = std::max(t.radii[c], std::sqrt(static_cast<double>(raw[q].first)) * f.h());
  }
  return t;
}

void envelope(std::vector<double>& v) {
  for (std::size_t b = 1; b < v.size(); ++b) v[b] = std::max(v[b], v[b - 1]);
}

// Valid start range along one axis for offset component d.
std::pair<int, int> span_for(int n, int d) { return {std::max(0, -d), n - std::max(0, d)}; }

double trapezoid_dini(const ModulusCurve& curve, double h, double R) {
  std::vector<double> nodes{h};
  for (double r : curve.radii)
    if (r > h * (1.0 + 1e-12) && r < R * (1.0 - 1e-12)) nodes.push_back(r);
  if (R > h) nodes.push_back(R);
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double a = nodes[k], b = nodes[k + 1];
    sum += 0.5 * (b - a) * (curve.at(a) / a + curve.at(b) / b);
  }
  return sum;
}

}  // namespace

double ModulusCurve::at(double r) const {
  auto it = std::upper_bound(radii.begin(), radii.end(), r * (1.0 + 1e-12));
  if (it == radii.begin()) return 0.0;
  return values[static_cast<std::size_t>(it - radii.begin()) - 1];
}

void ModulusCurve::check_monotone() const {
  if (radii.size() != values.size()) throw std::logic_error("ModulusCurve: size mismatch");
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] < 0.0) throw std::logic_error("ModulusCurve: negative value");
    if (k > 0 && (values[k] < values[k - 1] || radii[k] <= radii[k - 1]))
      throw std::logic_error("ModulusCurve: not monotone");
  }
}

RadiusWindow default_window(double h, double max_radius) { return {4.0 * h, 0.5 * max_radius}; }

ModulusCurve empirical_oscillation(const SampledField& field, double max_radius,
                                   ModulusOptions opt) {
  const OffsetTable t = make_offsets(field, max_radius, opt);
  const Grid3 g(field);
  const double* f = field.values().data();
  std::vector<double> best(t.radii.size(), 0.0);
  std::vector<double> acc(static_cast<std::size_t>(g.n[2]));

  for (const Offset& o : t.offsets) {
    const auto [i0, i1] = span_for(g.n[0], o.d[0]);
    const auto [j0, j1] = span_for(g.n[1], o.d[1]);
    const auto [k0, k1] = span_for(g.n[2], o.d[2]);
    if (i0 >= i1 || j0 >= j1 || k0 >= k1) continue;
    const std::ptrdiff_t shift = g.flat_offset(o.d);
    std::fill(acc.begin(), acc.end(), 0.0);
    double* __restrict a = acc.data();
    for (int i = i0; i < i1; ++i)
      for (int j = j0; j < j1; ++j) {
        const double* __restrict x = f + g.flat(i, j, 0);
        const double* __restrict y = x + shift;
        for (int k = k0; k < k1; ++k) a[k] = std::max(a[k], std::abs(y[k] - x[k]));
      }
    const double m = *std::max_element(acc.begin() + k0, acc.begin() + k1);
    best[o.bin] = std::max(best[o.bin], m);
  }
  envelope(best);
  ModulusCurve c{t.radii, best};
  c.check_monotone();
  return c;
}

ModulusCurve all_pairs_oscillation(const SampledField& field, double max_radius) {
  const OffsetTable t = make_offsets(field, max_radius, {}, false);
  const double lim2 = (max_radius / field.h()) * (max_radius / field.h()) * (1.0 + 1e-12);
  // Map bin number to compact index through the representative radii.
  std::vector<int> bin_numbers;
  for (double r : t.radii) bin_numbers.push_back(bin_of(std::lround((r / field.h()) * (r / field.h()))));
  std::vector<double> best(t.radii.size(), 0.0);
  auto v = field.values();
  const std::size_t n = field.size();
  for (std::size_t p = 0; p < n; ++p) {
    const Index ip = field.unflat(p);
    for (std::size_t q = p + 1; q < n; ++q) {
      const Index iq = field.unflat(q);
      long m = 0;
      for (int a = 0; a < field.dim(); ++a) m += long(iq[a] - ip[a]) * (iq[a] - ip[a]);
      if (m > lim2) continue;
      const int b = bin_of(m);
      const int c = static_cast<int>(std::lower_bound(bin_numbers.begin(), bin_numbers.end(), b) -
                                     bin_numbers.begin());
      best[c] = std::max(best[c], std::abs(v[p] - v[q]));
    }
  }
  envelope(best);
  return ModulusCurve{t.radii, best};
}

SeminormReport seminorm(const ModulusCurve& curve, const Gauge& gauge, RadiusWindow window) {
  SeminormReport rep;
  for (std::size_t b = 0; b < curve.size(); ++b) {
    const double r = curve.radii[b];
    if (r < window.lo * (1.0 - 1e-12) || r > window.hi * (1.0 + 1e-12)) continue;
    const double w = gauge(r);
    if (!(w > 0.0)) throw DomainError("seminorm: gauge must be positive on the window");
    const double q = curve.values[b] / w;
    rep.per_radius_ratio.radii.push_back(r);
    rep.per_radius_ratio.values.push_back(q);
    if (rep.per_radius_ratio.size() == 1 || q > rep.seminorm) {
      rep.seminorm = q;
      rep.argmax_radius = r;
    }
  }
  if (rep.per_radius_ratio.size() == 0) throw std::invalid_argument("seminorm: empty radius window");
  return rep;
}

SeminormReport seminorm(const ModulusCurve& curve, const OscillationSpec& spec,
                        RadiusWindow window) {
  return seminorm(curve, [&spec](double r) { return eval(spec, r); }, window);
}

SeminormReport seminorm(const SampledField& field, const OscillationSpec& spec,
                        RadiusWindow window, ModulusOptions opt) {
  return seminorm(empirical_oscillation(field, window.hi, opt), spec, window);
}

double norm(const SampledField& field, const OscillationSpec& spec, RadiusWindow window,
            ModulusOptions opt) {
  return field.max_abs() + seminorm(field, spec, window, opt).seminorm;
}

DiniEstimate dini_of_curve(const ModulusCurve& curve, double h, double R) {
  return {trapezoid_dini(curve, h, R), curve.at(h)};
}

DiniEstimate dini_seminorm(const SampledField& field, double R, ModulusOptions opt) {
  return dini_of_curve(empirical_oscillation(field, R, opt), field.h(), R);
}

PointwiseOscillation pointwise_oscillation(const SampledField& field, const Index& center,
                                           double max_radius, ModulusOptions opt) {
  const OffsetTable t = make_offsets(field, max_radius, opt);
  const Grid3 g(field);
  const int pad = 3 - field.dim();
  std::array<int, 3> c{0, 0, 0};
  for (int a = 0; a < field.dim(); ++a) {
    if (center[a] < 0 || center[a] >= field.shape()[a])
      throw DomainError("pointwise_oscillation: center outside the lattice");
    c[pad + a] = center[a];
  }
  auto v = field.values();
  const double fc = v[g.flat(c[0], c[1], c[2])];
  std::vector<double> best(t.radii.size(), 0.0);
  for (const Offset& o : t.offsets)
    for (int s : {1, -1}) {
      std::array<int, 3> y;
      bool ok = true;
      for (int a = 0; a < 3; ++a) {
        y[a] = c[a] + s * o.d[a];
        ok = ok && y[a] >= 0 && y[a] < g.n[a];
      }
      if (ok) best[o.bin] = std::max(best[o.bin], std::abs(v[g.flat(y[0], y[1], y[2])] - fc));
    }
  envelope(best);
  return {center, ModulusCurve{t.radii, best}};
}

PointwiseDini pointwise_dini_seminorm(const SampledField& field, double R, ModulusOptions opt) {
  const OffsetTable t = make_offsets(field, R, opt);
  const Grid3 g(field);
  const std::size_t nb = t.radii.size();
  const std::size_t n = field.size();
  if (n * nb > (std::size_t{1} << 27))
    throw std::length_error("pointwise_dini_seminorm: lattice too large for per-point curves");
  std::vector<double> pm(n * nb, 0.0);
  auto v = field.values();
  for (const Offset& o : t.offsets) {
    const auto [i0, i1] = span_for(g.n[0], o.d[0]);
    const auto [j0, j1] = span_for(g.n[1], o.d[1]);
    const auto [k0, k1] = span_for(g.n[2], o.d[2]);
    const std::ptrdiff_t shift = g.flat_offset(o.d);
    for (int i = i0; i < i1; ++i)
      for (int j = j0; j < j1; ++j)
        for (int k = k0; k < k1; ++k) {
          const std::size_t p = g.flat(i, j, k);
          const std::size_t q = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(p) + shift);
          const double d = std::abs(v[q] - v[p]);
          double& a = pm[p * nb + o.bin];
          double& b = pm[q * nb + o.bin];
          a = std::max(a, d);
          b = std::max(b, d);
        }
  }
  PointwiseDini best;
  ModulusCurve curve{t.radii, std::vector<double>(nb)};
  for (std::size_t p = 0; p < n; ++p) {
    std::copy(pm.begin() + p * nb, pm.begin() + (p + 1) * nb, curve.values.begin());
    envelope(curve.values);
    const double val = trapezoid_dini(curve, field.h(), R);
    if (val > best.value || p == 0) {
      best.value = std::max(best.value, val);
      best.argmax = field.unflat(p);
    }
  }
  return best;
}

FamilyFit fit_family(const ModulusCurve& curve) {
  std::vector<double> r, w;
  for (std::size_t b = 0; b < curve.size(); ++b)
    if (curve.values[b] > 0.0 && curve.radii[b] < 1.0) {
      r.push_back(curve.radii[b]);
      w.push_back(curve.values[b]);
    }
  if (r.size() < 8 || r.back() / r.front() < 100.0)
    throw std::invalid_argument("fit_family: need at least 8 positive bins spanning 2 decades");
  const auto m = static_cast<Eigen::Index>(r.size());
  Eigen::MatrixXd A(m, 3);
  Eigen::VectorXd y(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double L = -std::log(r[static_cast<std::size_t>(k)]);
    A(k, 0) = -L;
    A(k, 1) = -std::log(L);
    A(k, 2) = 1.0;
    y(k) = std::log(w[static_cast<std::size_t>(k)]);
  }
  const Eigen::Vector3d c = A.colPivHouseholderQr().solve(y);
  FamilyFit fit;
  fit.lambda = c(0);
  fit.alpha = c(1);
  fit.constant = c(2);
  fit.residual = std::sqrt((A * c - y).squaredNorm() / static_cast<double>(m));
  fit.degenerate = std::abs(fit.lambda) < 1e-3 && std::abs(fit.alpha) < 1e-2;
  if (std::abs(fit.lambda) <= 0.02)
    fit.family = Family::log;
  else if (std::abs(fit.alpha) <= 0.1)
    fit.family = Family::holder;
  else
    fit.family = Family::holog;
  return fit;
}

void write_curve_csv(const ModulusCurve& curve, const std::string& path,
                     const std::string& value_name) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_curve_csv: cannot open " + path);
  os.precision(17);
  os << "radius," << value_name << '\n';
  for (std::size_t b = 0; b < curve.size(); ++b) os << curve.radii[b] << ',' << curve.values[b] << '\n';
}

}  // namespace modcont
