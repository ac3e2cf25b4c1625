#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "modcont/errors.hpp"
#include "modcont/modulus.hpp"
#include "modcont/sharpness.hpp"

using namespace modcont;

namespace {

using Spec = OscillationSpec;

double fd_hessian(const Counterexample& ce, Point x, int k, int l, double step) {
  auto u = [&](double dk, double dl) {
    Point y = x;
    y[k] += dk;
    y[l] += dl;
    return counterexample_u(ce, y);
  };
  if (k == l) return (u(step, 0) - 2 * u(0, 0) + u(-step, 0)) / (step * step);
  return (u(step, step) - u(step, -step) - u(-step, step) + u(-step, -step)) / (4 * step * step);
}

std::vector<double> rotate(const std::vector<double>& m, const std::vector<double>& q, int n) {
  std::vector<double> out(static_cast<std::size_t>(n * n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          out[i * n + j] += q[i * n + k] * m[k * n + l] * q[j * n + l];
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) out[j * n + i] = out[i * n + j];
  return out;
}

// Random rotation by Gram-Schmidt on a Gaussian matrix.
std::vector<double> random_rotation(int n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  std::vector<double> q(static_cast<std::size_t>(n * n));
  for (auto& v : q) v = g(rng);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      double d = 0;
      for (int k = 0; k < n; ++k) d += q[i * n + k] * q[j * n + k];
      for (int k = 0; k < n; ++k) q[i * n + k] -= d * q[j * n + k];
    }
    double s = 0;
    for (int k = 0; k < n; ++k) s += q[i * n + k] * q[i * n + k];
    for (int k = 0; k < n; ++k) q[i * n + k] /= std::sqrt(s);
  }
  return q;
}

}  // namespace

TEST_CASE("counterexample values") {
  const auto ce = Counterexample::laplacian(Spec::log(2.0));
  CHECK(counterexample_u(ce, {0, 0, 0}) == 0.0);
  CHECK(counterexample_u(ce, {0.1, 0, 0}) == 0.0);
  CHECK(counterexample_Lu(ce, {0, 0, 0}) == 0.0);
  CHECK(counterexample_d1d2u(ce, {0, 0, 0}) == 0.0);
  const double t = std::exp(-10.0) / std::sqrt(2.0);
  CHECK(counterexample_u(ce, {t, t, 0}) == doctest::Approx(0.1 * t * t).epsilon(1e-12));
}

TEST_CASE("construction is validated") {
  CHECK_THROWS_AS(Counterexample::laplacian(Spec::log(1.0)), NotDiniAdmissible);
  const auto lap = EllipticOperator::laplacian(2);
  CHECK_THROWS_AS(Counterexample(Spec::holder(0.5), lap, {1, 0, 0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(Counterexample(Spec::holder(0.5), lap, {0, 1, 0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(Counterexample(Spec::holder(0.5), lap, {0, 0, 0, 0}), std::invalid_argument);
  CHECK_NOTHROW(Counterexample(Spec::holder(0.5), lap, {1, 0, 0, -1}));
  CHECK_THROWS_AS(Counterexample::laplacian(Spec::log(2.0), 2, CutoffSpec(0.5)),
                  std::invalid_argument);
}

TEST_CASE("Laplacian closed form") {
  for (const Spec& s : {Spec::holder(0.5), Spec::log(2.0), Spec::holog(0.5, 1.0)}) {
    for (int n : {2, 3}) {
      const auto ce = Counterexample::laplacian(s, n);
      for (const Point& x : {Point{0.03, -0.05, 0.02}, Point{0.1, 0.07, -0.01}}) {
        Point y = x;
        if (n == 2) y[2] = 0.0;
        const double r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
        const double q = y[0] * y[1] / (r * r);
        const double want = (n + 2) * q * eval(s, r) + q * r * derivative(s, r);
        CHECK(counterexample_Lu(ce, y) == doctest::Approx(want).epsilon(1e-12));
        const double x1 = y[0] * y[0], x2 = y[1] * y[1];
        const double want12 = hat(s, r) + (x1 + x2 - 2 * x1 * x2 / (r * r)) / (r * r) * eval(s, r) +
                              x1 * x2 / (r * r * r * r) * r * derivative(s, r);
        CHECK(counterexample_d1d2u(ce, y) == doctest::Approx(want12).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("second derivatives match finite differences") {
  std::vector<Counterexample> cases;
  for (const Spec& s : {Spec::holder(0.5), Spec::log(2.0), Spec::holog(0.5, 1.0)}) {
    cases.push_back(Counterexample::laplacian(s));
    cases.push_back(Counterexample::laplacian(s, 2, CutoffSpec(0.15)));
    cases.push_back(Counterexample(s, EllipticOperator(2, {2, 0.5, 0.5, 1}), {1, 0, 0, -2}));
    cases.push_back(Counterexample(s, EllipticOperator(3, {1, 0, 0, 0, 2, 0, 0, 0, 3}),
                                   {1, 0.3, 0, 0.3, 1, 0, 0, 0, -1}, CutoffSpec(0.2)));
  }
  const std::vector<Point> xs{{0.06, 0.08, 0.0}, {-0.07071, 0.07071, 0.0}, {0.01, 0.004, 0.0},
                              {0.05, 0.06, 0.04}};
  for (const auto& ce : cases) {
    const int n = ce.op().n();
    for (Point x : xs) {
      if (n == 2) x[2] = 0.0;
      const double r = std::hypot(x[0], x[1], x[2]);
      const double step = 1e-5 * r;
      double lu_fd = 0, scale = 0;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double exact = counterexample_hessian(ce, x, k, l);
          const double fd = fd_hessian(ce, x, k, l, step);
          scale = std::max(scale, std::abs(exact));
          CHECK(std::abs(fd - exact) <= 1e-4 * std::max(std::abs(exact), 1e-3 * scale + 1e-300));
          lu_fd += ce.op().a(k, l) * fd;
        }
      CHECK(std::abs(lu_fd - counterexample_Lu(ce, x)) <= 1e-4 * scale);
    }
  }
}

TEST_CASE("finite differences at |x| = 0.1 with step 1e-5") {
  const auto ce = Counterexample::laplacian(Spec::log(2.0));
  const Point x{0.1 * std::cos(0.4), 0.1 * std::sin(0.4), 0.0};
  const double lu = fd_hessian(ce, x, 0, 0, 1e-5) + fd_hessian(ce, x, 1, 1, 1e-5);
  CHECK(lu == doctest::Approx(counterexample_Lu(ce, x)).epsilon(1e-4));
  CHECK(fd_hessian(ce, x, 0, 1, 1e-5) == doctest::Approx(counterexample_d1d2u(ce, x)).epsilon(1e-4));
}

TEST_CASE("trace condition under random rotations") {
  std::mt19937 rng(20261015);
  for (int n : {2, 3}) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> a(static_cast<std::size_t>(n * n), 0.0), b = a;
      for (int i = 0; i < n; ++i) a[i * n + i] = 1.0 + i;
      // Σ a_ii b_ii = 0 on the diagonal, plus an off-diagonal part.
      b[0] = 2.0;
      b[n + 1] = -1.0;
      b[1] = b[n] = 0.7;
      if (n == 3) b[2] = b[6] = -0.4;
      REQUIRE(std::abs(trace_product(n, a, b)) < 1e-15);
      const auto q = random_rotation(n, rng);
      const auto ar = rotate(a, q, n), br = rotate(b, q, n);
      CHECK(std::abs(trace_product(n, ar, br)) <= 1e-12);
      CHECK_NOTHROW(Counterexample(Spec::holder(0.5), EllipticOperator(n, ar), br));
    }
  }
}

TEST_CASE("diagonal lower bound on the mixed derivative") {
  for (const Spec& s : {Spec::holder(0.5), Spec::holder(0.9), Spec::log(2.0), Spec::log(3.0),
                        Spec::holog(0.5, 1.0), Spec::holog(0.25, -1.0)}) {
    const auto ce = Counterexample::laplacian(s);
    for (int e = 2; e <= 8; ++e) {
      const double r = std::pow(10.0, -e), t = r / std::sqrt(2.0);
      CHECK(counterexample_d1d2u(ce, {t, t, 0}) >= hat(s, r) - 1e-12);
    }
  }
}

TEST_CASE("Laplacian bounded by omega on spheres") {
  for (const Spec& s : {Spec::holder(0.5), Spec::log(2.0), Spec::holog(0.5, 1.0)}) {
    const double R = 0.99 * s.radius();
    const double cf = flotas_constant(s, 1e-10, R);
    const double C = laplacian_bound_constant(2, cf);
    const auto ce = Counterexample::laplacian(s);
    double worst = 0.0;
    for (double r = R; r > 1e-10; r /= 1.5)
      for (int k = 0; k < 720; ++k) {
        const double th = 2 * std::numbers::pi * k / 720;
        worst = std::max(worst, std::abs(counterexample_Lu(ce, {r * std::cos(th), r * std::sin(th), 0})) /
                                    eval(s, r));
      }
    CHECK(worst <= C * (1 + 1e-12));
    if (s.family() == Family::holder) {
      // Attained on the diagonal: ((n+2) + λ)/2.
      CHECK(worst == doctest::Approx(C).epsilon(1e-9));
      // The quartered constant is not an upper bound.
      CHECK(worst > 0.25 * (4 + 1.0 / cf));
    }
  }
}

TEST_CASE("sampled Lu has a refinement-stable seminorm") {
  const auto s = Spec::log(2.0);
  const auto ce = Counterexample::laplacian(s);
  std::vector<double> vals;
  for (int n : {129, 257}) {
    const auto f = SampledField::sample_box(2, n, -0.25, 0.25, [&](const Point& x) {
      return counterexample_Lu(ce, x);
    });
    const auto rep = seminorm(f, s, {4 * f.h(), 0.0625});
    CHECK(std::isfinite(rep.seminorm));
    vals.push_back(rep.seminorm);
  }
  CHECK(std::abs(vals[1] - vals[0]) <= 0.25 * vals[0]);
}

TEST_CASE("sharpness certificate") {
  std::vector<double> radii;
  for (int e = 1; e <= 12; ++e) radii.push_back(std::pow(10.0, -e) * 0.3);
  const auto one = sharpness_certificate(Spec::log(2.0), Spec::log(1.0), radii);
  CHECK(one.sup_ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(one.admissible);

  radii.push_back(1e-12);
  const auto half = sharpness_certificate(Spec::log(2.0), Spec::log(1.5), radii);
  CHECK_FALSE(half.admissible);
  CHECK(half.trend.trend == RatioTrend::to_infinity);
  for (const auto& row : half.rows)
    CHECK(row.ratio >= std::sqrt(-std::log(row.radius)) * (1 - 1e-12));
  CHECK(half.argmax_radius == 0.3e-12);

  const auto self = sharpness_certificate(Spec::log(2.0), tabulate_hat(Spec::log(2.0), 1e-14, 800), radii);
  CHECK(self.sup_ratio == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(self.admissible);

  const auto hold = sharpness_certificate(Spec::holder(0.5), Spec::holder(0.5), {0.1, 1e-4, 1e-8});
  CHECK(hold.sup_ratio == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(hold.admissible);

  CHECK_THROWS_AS(sharpness_certificate(Spec::log(2.0), Spec::log(1.0), {0.5}), DomainError);
}

TEST_CASE("density failure gap") {
  const auto s = Spec::holder(0.5);
  const std::vector<double> radii{1e-6};
  const auto zero = SampledField::sample({41}, 1e-7, {-2e-6}, [](const Point&) { return 0.0; });
  CHECK(density_failure_gap(s, zero, radii).gap == 1.0);

  const auto lin = SampledField::sample({41}, 1e-7, {-2e-6}, [](const Point& x) { return x[0]; });
  CHECK(density_failure_gap(s, lin, radii).gap >= 0.99);

  const auto self = SampledField::sample({41}, 1e-7, {-2e-6},
                                         [&](const Point& x) { return eval(s, std::abs(x[0])); });
  CHECK(density_failure_gap(s, self, radii).gap == 0.0);

  const auto lin2 = SampledField::sample({41, 41}, 1e-7, {-2e-6, -2e-6},
                                         [](const Point& x) { return x[0] + 3 * x[1]; });
  const auto g2 = density_failure_gap(s, lin2, {1e-6, 5e-7, 1.5e-6});
  CHECK(g2.gap >= 0.99);
  CHECK(g2.rows.size() == 3);

  const auto off = SampledField::sample({11}, 1e-7, {1e-7}, [](const Point&) { return 0.0; });
  CHECK_THROWS_AS(density_failure_gap(s, off, radii), DomainError);
}

TEST_CASE("flotas constant needs an increasing modulus") {
  CHECK(flotas_constant(Spec::holder(0.5), 1e-10, 0.9) == doctest::Approx(2.0));
  CHECK(flotas_constant(Spec::log(2.0), 1e-10, 0.3) == doctest::Approx(-std::log(0.3) / 2.0));
  // r^{1/4} log(1/r) decreases for log(1/r) < 4.
  CHECK_THROWS_AS(flotas_constant(Spec::holog(0.25, -1.0), 1e-10, 0.3), DomainError);
  CHECK_THROWS_AS(laplacian_bound_constant(2, 0.0), std::invalid_argument);
}
