#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "modcont/oscillation.hpp"

using namespace modcont;

namespace {

const double e = std::numbers::e;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Reference values of ĥ(r) = λ^{α−1} Γ(1−α, λ log(1/r)) for Holog families,
// evaluated with mpmath at 40 digits.
struct HatRef {
  double lambda, alpha, r, value;
};
constexpr HatRef kHologHat[] = {
    {0.5, 1.0, 1e-2, 0.032389789593291021697},
    {0.5, 1.0, 1e-6, 0.00012815499334587104661},
    {0.5, 1.0, 1e-12, 6.7772435566296221705e-8},
    {0.5, 1.0, 0.3, 0.45256736925141963086},
    {0.5, -1.0, 1e-2, 1.3210340371976182736},
    {0.5, -1.0, 1e-12, 0.000059262042231857096416},
    {0.25, 1.0, 1e-6, 0.0073801231303182602873},
    {0.75, -1.0, 1e-6, 0.00063873134153104855955},
    {0.5, 0.5, 1e-6, 0.00050549798460187650568},
    {0.3, 2.5, 1e-12, 1.6337279228182524489e-7},
    {0.3, 2.5, 0.3, 0.25115536842305386825},
};

// B(r) references (mpmath, t = log(1/s) form, R = e^{-1}).
struct BRef {
  double lambda, alpha, r, value;
};
constexpr BRef kBRef[] = {
    {0.5, 1.0, 1e-3, 1.7671578254139328049},
    {0.5, 1.0, 1e-6, 1.3823529888310569224},
    {0.5, -1.0, 1e-6, 0.7471879732193763676},
    {0.25, 1.0, 1e-6, 0.46512797728193597169},
    {0.0, 1.5, 1e-8, 0.029731474025711762832},
    {0.0, 2.0, 1e-3, 0.2325702681297593052},
    {0.0, 2.0, 1e-8, 0.061438344481788063667},
    {0.0, 3.0, 1e-8, 0.1317453528500910916},
};

OscillationSpec make(double lambda, double alpha) {
  if (lambda == 0.0) return OscillationSpec::log(alpha);
  return OscillationSpec::holog(lambda, alpha);
}

}  // namespace

TEST_SUITE("oscillation") {
  TEST_CASE("eval examples") {
    CHECK(eval(OscillationSpec::holder(0.5), 0.25) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(eval(OscillationSpec::log(2.0), std::exp(-10.0)) == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(eval(OscillationSpec::holog(0.5, 1.0), std::exp(-4.0)) ==
          doctest::Approx(std::exp(-2.0) / 4.0).epsilon(1e-14));
    CHECK(eval(OscillationSpec::log(3.0), 0.0) == 0.0);
  }

  TEST_CASE("construction and domain errors") {
    CHECK_THROWS_AS(OscillationSpec::log(2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(OscillationSpec::holog(0.5, 1.0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(OscillationSpec::log(0.0), std::invalid_argument);
    CHECK_THROWS_AS(OscillationSpec::holder(1.0), std::invalid_argument);
    CHECK_THROWS_AS(OscillationSpec::holog(0.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(eval(OscillationSpec::log(2.0), 0.5), DomainError);
    CHECK_THROWS_AS(eval(OscillationSpec::holder(0.5), -1e-3), DomainError);
    CHECK_THROWS_AS(OscillationSpec::tabulated({0.0, 0.2, 0.1}, {0.0, 1.0, 2.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(OscillationSpec::tabulated({0.0, 0.1, 0.2}, {0.0, 2.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(OscillationSpec::tabulated({0.1, 0.2}, {0.0, 1.0}), std::invalid_argument);
  }

  TEST_CASE("derivative examples and finite differences") {
    CHECK(derivative(OscillationSpec::holder(0.5), 0.25) == doctest::Approx(1.0));
    CHECK(derivative(OscillationSpec::log(2.0), std::exp(-10.0)) ==
          doctest::Approx(2.0 * std::exp(10.0) / 1000.0).epsilon(1e-12));
    CHECK(derivative(OscillationSpec::holog(0.5, 1.0), std::exp(-4.0)) ==
          doctest::Approx(e * e * 0.25 * 0.75).epsilon(1e-12));
    CHECK_THROWS_AS(derivative(tabulate(OscillationSpec::holder(0.5), 1e-6, 20), 0.1),
                    UnsupportedOperation);

    // Central differences at relative step 1e-6 match ω' and ω'' everywhere.
    const OscillationSpec specs[] = {
        OscillationSpec::holder(0.25), OscillationSpec::holder(0.75),
        OscillationSpec::log(1.5),     OscillationSpec::log(3.0),
        OscillationSpec::holog(0.5, 1.0), OscillationSpec::holog(0.5, -3.0, 0.45),
        OscillationSpec::holog(0.3, 2.5)};
    for (const auto& s : specs) {
      for (double r : {1e-9, 1e-5, 1e-2, 0.1, 0.9 * s.radius()}) {
        CAPTURE(s.describe());
        CAPTURE(r);
        const double h = 1e-6 * r;
        const double fd = (eval(s, r + h) - eval(s, r - h)) / (2 * h);
        CHECK(rel(fd, derivative(s, r)) <= 1e-5);
        const double fd2 = (derivative(s, r + h) - derivative(s, r - h)) / (2 * h);
        CHECK(std::abs(fd2 - second_derivative(s, r)) <=
              1e-5 * std::abs(second_derivative(s, r)) + 1e-8 * std::abs(derivative(s, r) / r));
      }
    }
  }

  TEST_CASE("dini integral") {
    CHECK(dini_integral(OscillationSpec::holder(0.5, 1.0)).value == doctest::Approx(2.0));
    const auto log2 = dini_integral(OscillationSpec::log(2.0, std::exp(-1.0)));
    CHECK(log2.is_finite());
    CHECK(log2.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dini_integral(OscillationSpec::log(1.0, 0.5)).infinite);
    CHECK(dini_integral(OscillationSpec::log(0.5)).infinite);
    CHECK(dini_integral(OscillationSpec::holog(0.0, 1.0)).infinite);
    CHECK(dini_integral(OscillationSpec::holog(0.5, 1.0)).value ==
          doctest::Approx(0.55977359477616081175).epsilon(1e-9));
  }

  TEST_CASE("hat examples") {
    CHECK(hat(OscillationSpec::holder(0.5), 0.25) == doctest::Approx(1.0));
    CHECK(hat(OscillationSpec::log(2.0), std::exp(-10.0)) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(hat(OscillationSpec::log(2.0), 0.0) == 0.0);
    CHECK_THROWS_AS(hat(OscillationSpec::log(1.0), 0.1), NotDiniAdmissible);
    CHECK_THROWS_AS(hat(OscillationSpec::log(0.7), 0.1), NotDiniAdmissible);
  }

  TEST_CASE("hat quadrature against incomplete-gamma references") {
    for (const auto& ref : kHologHat) {
      CAPTURE(ref.lambda);
      CAPTURE(ref.alpha);
      CAPTURE(ref.r);
      const double v = hat(OscillationSpec::holog(ref.lambda, ref.alpha), ref.r);
      CHECK(rel(v, ref.value) <= 1e-8);
    }
  }

  TEST_CASE("hat/omega approaches 1/lambda for Holog") {
    const auto s = OscillationSpec::holog(0.5, 1.0);
    // The approach is logarithmic: 1.8191 at 1e-8, 1.9914 at 1e-200 (mpmath).
    const double at8 = hat(s, 1e-8) / eval(s, 1e-8);
    CHECK(at8 == doctest::Approx(1.819070602736907458).epsilon(1e-8));
    HatTransform h(s);
    const double t = 200.0 * std::log(10.0);
    CHECK(h.at_log(t) / eval_log(s, t) == doctest::Approx(1.9913885887987915095).epsilon(1e-8));
    CHECK(std::abs(h.at_log(t) / eval_log(s, t) - 2.0) <= 0.05 * 2.0);
  }

  TEST_CASE("closed form and quadrature routes agree") {
    for (const auto& s :
         {OscillationSpec::holder(0.25), OscillationSpec::holder(0.5), OscillationSpec::holder(0.75),
          OscillationSpec::log(1.5), OscillationSpec::log(2.0), OscillationSpec::log(3.0)}) {
      HatTransform h(s);
      REQUIRE(h.has_closed_form());
      for (double r = 1e-6; r <= 0.9 * s.radius(); r *= 1.7) {
        CAPTURE(s.describe());
        CAPTURE(r);
        CHECK(rel(h.quadrature(r), *h.closed_form(r)) <= 1e-6);
      }
    }
  }

  TEST_CASE("hat is non-decreasing and dominates omega for concave families") {
    for (const auto& s : {OscillationSpec::holder(0.3), OscillationSpec::log(2.0),
                          OscillationSpec::holog(0.5, 1.0), OscillationSpec::holog(0.4, -2.0, 0.05)}) {
      double prev = 0.0;
      for (double r = 1e-12; r <= s.radius() / 2; r *= 1.3) {
        const double v = hat(s, r);
        CHECK(v >= prev);
        prev = v;
        if (is_concave_near_zero(s, {0.0, s.radius() / 2})) CHECK(v >= eval(s, r));
      }
    }
  }

  TEST_CASE("tabulated hat is exact on piecewise-linear data") {
    // ω(s) = s on [0, 1]: ĥ(r) = r.
    const auto lin = OscillationSpec::tabulated({0.0, 0.5, 1.0}, {0.0, 0.5, 1.0});
    CHECK(hat(lin, 0.8) == doctest::Approx(0.8));
    // ω = 1 + ... segment: (0,0)-(0.1,1)-(1,1). ĥ(1) = 1 + log(10).
    const auto step = OscillationSpec::tabulated({0.0, 0.1, 1.0}, {0.0, 1.0, 1.0});
    CHECK(hat(step, 1.0) == doctest::Approx(1.0 + std::log(10.0)));
    HatTransform h(step);
    CHECK(h.quadrature(1.0) == doctest::Approx(1.0 + std::log(10.0)).epsilon(1e-8));
  }

  TEST_CASE("B(r) examples") {
    CHECK(std::abs(b_of_r(OscillationSpec::holder(0.5), 1e-5) - 1.0) <= 0.05);
    CHECK(b_of_r(OscillationSpec::log(2.0), 1e-8) <= 0.1);
    const auto s = OscillationSpec::holder(0.5);
    CHECK(b_of_r(s, 1.0 - 1e-9) < 1e-6);
    CHECK_THROWS_AS(b_of_r(s, 1.0), DomainError);
    CHECK_THROWS_AS(b_of_r(OscillationSpec::log(1.0), 1e-3), NotDiniAdmissible);
  }

  TEST_CASE("B(r) against references") {
    for (const auto& ref : kBRef) {
      CAPTURE(ref.lambda);
      CAPTURE(ref.alpha);
      CAPTURE(ref.r);
      CHECK(rel(b_of_r(make(ref.lambda, ref.alpha), ref.r), ref.value) <= 1e-8);
    }
  }

  TEST_CASE("B(r) tends to 1/(C1 - 1)") {
    // Holder families converge algebraically and are checked at 1e-6. Log
    // and Holog families converge like 1/log(1/r), so the limit is only
    // within 10% far below double-precision resolution of typical grids.
    for (double lam : {0.25, 0.5, 0.75}) {
      const auto s = OscillationSpec::holder(lam);
      const double lim = space_constants(s).B_limit;
      CHECK(lim == doctest::Approx(lam / (1 - lam)));
      CHECK(rel(b_of_r(s, 1e-6), lim) <= 0.1);
    }
    for (double a : {1.5, 2.0, 3.0}) {
      const auto s = OscillationSpec::log(a);
      CHECK(space_constants(s).B_limit == 0.0);
      CHECK(b_of_r(s, 1e-150) <= 0.1);
    }
    for (double a : {-1.0, 0.0, 1.0}) {
      const auto s = OscillationSpec::holog(0.5, a);
      CHECK(rel(b_of_r(s, 1e-150), space_constants(s).B_limit) <= 0.1);
    }
    // Tabulated path matches the analytic one on a fine table.
    // Below the first knot the table is linear, so the first knot sits deep.
    const auto tab = tabulate(OscillationSpec::holder(0.5), 1e-16, 3000);
    CHECK(rel(b_of_r(tab, 1e-4), b_of_r(OscillationSpec::holder(0.5), 1e-4)) <= 1e-3);
  }

  TEST_CASE("c1 limit") {
    CHECK(c1_limit(OscillationSpec::holder(0.5)).value.value == doctest::Approx(2.0));
    CHECK(c1_limit(OscillationSpec::log(3.0)).value.infinite);
    CHECK(c1_limit(OscillationSpec::holog(0.25, -2.0)).value.value == doctest::Approx(4.0));
    CHECK(c1_limit(OscillationSpec::holog(0.0, 2.0)).value.infinite);

    const auto tab_h = c1_limit(tabulate(OscillationSpec::holder(0.4), 1e-12, 300));
    CHECK(tab_h.confident);
    CHECK(tab_h.value.value == doctest::Approx(2.5).epsilon(1e-3));
    const auto tab_l = c1_limit(tabulate(OscillationSpec::log(2.0), 1e-12, 300));
    CHECK(tab_l.value.infinite);
    const auto tab_hl = c1_limit(tabulate(OscillationSpec::holog(0.5, 1.0), 1e-12, 300));
    CHECK(tab_hl.value.value == doctest::Approx(2.0).epsilon(0.02));
  }

  TEST_CASE("concavity near zero") {
    CHECK(is_concave_near_zero(OscillationSpec::holder(0.5), {0.0, 0.5}));
    CHECK(is_concave_near_zero(OscillationSpec::holog(0.5, -3.0), {0.0, 5e-3}));
    CHECK_FALSE(is_concave_near_zero(OscillationSpec::holog(0.5, -3.0, 0.45), {0.3, 0.4}));
    // ω_α is concave exactly where log(1/r) > α + 1.
    CHECK(is_concave_near_zero(OscillationSpec::log(2.0), {0.0, std::exp(-3.01)}));
    CHECK_FALSE(is_concave_near_zero(OscillationSpec::log(2.0), {0.0, std::exp(-2.9)}));
    const auto tab = tabulate(OscillationSpec::holder(0.5), 1e-8, 100);
    CHECK(is_concave_near_zero(tab, {0.0, 1.0}));
  }

  TEST_CASE("domination and equivalence") {
    CHECK(dominates(OscillationSpec::holder(0.6), OscillationSpec::holder(0.5)));
    CHECK(dominates(OscillationSpec::log(3.0), OscillationSpec::log(2.0)));
    CHECK(dominates(OscillationSpec::holog(0.5, 1.0), OscillationSpec::holder(0.5, 0.3)));
    CHECK_FALSE(dominates(OscillationSpec::holder(0.5), OscillationSpec::holder(0.5)));
    CHECK_FALSE(dominates(OscillationSpec::log(2.0), OscillationSpec::log(3.0)));

    CHECK_FALSE(equivalent(OscillationSpec::log(2.0), OscillationSpec::log(2.5)));
    CHECK(equivalent(OscillationSpec::holder(0.5),
                     tabulate(OscillationSpec::holder(0.5), 1e-12, 400, 3.0)));
    for (auto [lam, a] : {std::pair{0.5, 1.0}, {0.5, -1.0}, {0.25, 1.0}, {0.75, 2.0}}) {
      const auto s = OscillationSpec::holog(lam, a);
      CAPTURE(s.describe());
      CHECK(equivalent(s, tabulate_hat(s, 1e-12, 400)));
    }
  }

  TEST_CASE("dominates and equivalent are mutually exclusive") {
    std::mt19937 rng(20261015);
    std::uniform_real_distribution<double> lam(0.05, 0.95), alpha(-3.0, 3.0);
    for (int i = 0; i < 40; ++i) {
      const auto a = OscillationSpec::holog(lam(rng), alpha(rng));
      const auto b = OscillationSpec::holog(lam(rng), alpha(rng));
      CHECK_FALSE((dominates(a, b) && equivalent(a, b)));
      CHECK_FALSE((dominates(b, a) && equivalent(b, a)));
    }
  }

  TEST_CASE("doubling constant") {
    CHECK(doubling_constant(OscillationSpec::holder(0.5), 3.0) ==
          doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
    // (log(1/r)/log(1/3r))^2 at r = 1e-4, decreasing towards 1 as r → 0.
    CHECK(doubling_constant(OscillationSpec::log(2.0), 3.0, {0.0, 1e-4}) ==
          doctest::Approx(1.2892127500022919811).epsilon(1e-12));
    CHECK(doubling_constant(OscillationSpec::log(2.0), 3.0, {0.0, 1e-10}) ==
          doctest::Approx(1.1027155300946536).epsilon(1e-9));
    CHECK(doubling_constant(OscillationSpec::log(2.0), 1.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(doubling_constant(OscillationSpec::holder(0.5), 3.0, {0.0, 0.5}), DomainError);
  }

  TEST_CASE("doubling constant of concave specs is at most k") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> lam(0.05, 0.95), alpha(0.0, 3.0), k(1.0, 8.0);
    for (int i = 0; i < 30; ++i) {
      const auto s = OscillationSpec::holog(lam(rng), alpha(rng), 1e-3);
      const double kk = k(rng);
      if (!is_concave_near_zero(s, {0.0, s.radius()})) continue;
      CHECK(doubling_constant(s, kk) <= kk + 1e-9);
    }
  }
}
