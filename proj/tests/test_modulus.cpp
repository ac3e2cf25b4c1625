#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "modcont/modulus.hpp"

using namespace modcont;

namespace {

SampledField random_field(std::vector<int> shape, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  std::size_t n = 1;
  for (int s : shape) n *= static_cast<std::size_t>(s);
  std::vector<double> v(n);
  for (double& x : v) x = nd(rng);
  return SampledField(shape, 1.0 / (shape[0] - 1), std::vector<double>(shape.size(), 0.0), v);
}

double radius(const Point& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

SampledField radial(const OscillationSpec& s, int dim, int n, double half) {
  return SampledField::sample_box(dim, n, -half, half,
                                  [&](const Point& x) { return eval(s, radius(x)); });
}

}  // namespace

TEST_SUITE("field") {
  TEST_CASE("construction rejects bad input") {
    CHECK_THROWS(SampledField({3, 3}, 0.5, {0.0}, std::vector<double>(9)));
    CHECK_THROWS(SampledField({3, 3}, 0.5, {0.0, 0.0}, std::vector<double>(8)));
    CHECK_THROWS(SampledField({3, 3}, -0.5, {0.0, 0.0}, std::vector<double>(9)));
    CHECK_THROWS(SampledField({3}, 0.5, {0.0}, {0.0, NAN, 1.0}));
    CHECK_THROWS(SampledField({2, 2, 2, 2}, 0.5, {0, 0, 0, 0}, std::vector<double>(16)));
  }

  TEST_CASE("indexing and interpolation") {
    auto f = SampledField::sample({5, 9, 4}, 0.25, {1.0, -1.0, 0.5},
                                  [](const Point& x) { return 2 * x[0] - 3 * x[1] + x[2] + 0.5; });
    CHECK(f.dim() == 3);
    CHECK(f.min_side() == doctest::Approx(0.75));
    const Index idx{3, 7, 2};
    CHECK(f.unflat(f.flat(idx)) == idx);
    const Point p = f.point(idx);
    CHECK(p[0] == doctest::Approx(1.75));
    // Multilinear interpolation reproduces affine functions.
    const Point q{1.33, 0.1, 0.9};
    CHECK(f.interpolate(q) == doctest::Approx(2 * 1.33 - 0.3 + 0.9 + 0.5));
    CHECK_THROWS_AS(f.interpolate({0.0, 0.0, 0.0}), DomainError);
    auto g = f.shrink(1);
    CHECK(g.shape() == std::vector<int>{3, 7, 2});
    CHECK(g.at({0, 0, 0}) == f.at({1, 1, 1}));
  }

  TEST_CASE("text and binary round trips") {
    auto f = random_field({4, 6}, 3);
    std::stringstream text;
    write_csv(f, text);
    auto g = read_csv(text);
    CHECK(g.shape() == f.shape());
    CHECK(g.h() == f.h());
    for (std::size_t k = 0; k < f.size(); ++k) CHECK(g.values()[k] == f.values()[k]);

    std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
    write_binary(f, bin);
    auto b = read_binary(bin);
    CHECK(b.origin() == f.origin());
    for (std::size_t k = 0; k < f.size(); ++k) CHECK(b.values()[k] == f.values()[k]);

    std::stringstream junk("XXXXXXXX");
    CHECK_THROWS(read_binary(junk));
  }
}

TEST_SUITE("modulus") {
  TEST_CASE("constant field has zero modulus") {
    auto f = SampledField::sample_box(2, 33, 0, 1, [](const Point&) { return 4.2; });
    auto c = empirical_oscillation(f, 0.5);
    for (double v : c.values) CHECK(v == 0.0);
    CHECK(seminorm(c, OscillationSpec::holder(0.5), {0.1, 0.5}).seminorm == 0.0);
    CHECK(dini_seminorm(f, 0.5).total() == 0.0);
    CHECK(pointwise_dini_seminorm(f, 0.5).value == 0.0);
  }

  TEST_CASE("linear 1D field") {
    auto f = SampledField::sample_box(1, 1025, 0, 1, [](const Point& x) { return x[0]; });
    auto c = empirical_oscillation(f, 0.25, {.offset_cap = 256});
    for (std::size_t b = 0; b < c.size(); ++b) CHECK(std::abs(c.values[b] - c.radii[b]) <= f.h());
    // Bin representatives are exact lattice distances.
    CHECK(c.radii.front() == doctest::Approx(f.h()));
  }

  TEST_CASE("offset scan equals all-pairs brute force") {
    for (unsigned seed = 1; seed <= 4; ++seed) {
      auto f = random_field({33, 33}, seed);
      for (double R : {0.5, 0.3, 0.13}) {
        auto a = empirical_oscillation(f, R);
        auto b = all_pairs_oscillation(f, R);
        REQUIRE(a.size() == b.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
          CHECK(a.radii[k] == b.radii[k]);
          CHECK(a.values[k] == b.values[k]);
        }
      }
    }
    auto one = random_field({33}, 9);
    CHECK(empirical_oscillation(one, 0.5).values == all_pairs_oscillation(one, 0.5).values);
    auto cube = random_field({9, 9, 9}, 11);
    CHECK(empirical_oscillation(cube, 0.5).values == all_pairs_oscillation(cube, 0.5).values);
    auto rv = random_field({17, 33}, 5);
    auto rect = SampledField({17, 33}, 1.0 / 32, {0.0, 0.0},
                             std::vector<double>(rv.values().begin(), rv.values().end()));
    CHECK(empirical_oscillation(rect, 0.25).values == all_pairs_oscillation(rect, 0.25).values);
  }

  TEST_CASE("radial Log(2) profile") {
    const auto s = OscillationSpec::log(2.0);
    auto f = radial(s, 2, 65, 0.125);
    // Concave radial profiles realize their gauge exactly: brute force over
    // all pairs shows ω_f(r) = ω₂(r) at lattice distances along the axes.
    auto c = all_pairs_oscillation(f, 0.125);
    const auto rep = seminorm(c, s, default_window(f.h(), 0.125));
    CHECK(rep.seminorm == doctest::Approx(1.0).epsilon(0.1));
    CHECK(rep.per_radius_ratio.size() > 3);
  }

  TEST_CASE("errors") {
    auto f = random_field({33, 33}, 1);
    CHECK_THROWS_AS(empirical_oscillation(f, 0.6), DomainError);
    CHECK_THROWS_AS(empirical_oscillation(f, 0.0), DomainError);
    auto big = SampledField::sample_box(1, 1025, 0, 1, [](const Point& x) { return x[0]; });
    CHECK_THROWS_AS(empirical_oscillation(big, 0.25), OffsetCapExceeded);
    auto c = empirical_oscillation(f, 0.5);
    CHECK_THROWS_AS(seminorm(c, OscillationSpec::holder(0.5), {0.8, 0.9}), std::invalid_argument);
  }

  TEST_CASE("symmetry, homogeneity and subadditivity") {
    auto f = random_field({33, 33}, 7);
    auto c = empirical_oscillation(f, 0.5);
    CHECK(empirical_oscillation(f.scaled(-1.0), 0.5).values == c.values);
    auto shifted = empirical_oscillation(f.shifted(3.0), 0.5);
    for (std::size_t k = 0; k < c.size(); ++k)
      CHECK(shifted.values[k] == doctest::Approx(c.values[k]).epsilon(1e-14));

    const auto s = OscillationSpec::holder(0.5);
    const RadiusWindow w{4 * f.h(), 0.5};
    const double s1 = seminorm(c, s, w).seminorm;
    const double s3 = seminorm(f.scaled(3.0), s, w).seminorm;
    CHECK(s3 == doctest::Approx(3.0 * s1).epsilon(1e-15));
    CHECK(norm(f, s, w) == doctest::Approx(f.max_abs() + s1));

    // ω(r1 + r2) ≤ ω(r1) + ω(r2) up to bin slack: compare at the bin holding
    // r1 + r2 against curve values evaluated half a step higher.
    auto g = radial(OscillationSpec::holder(0.3), 2, 65, 0.5);
    auto cg = empirical_oscillation(g, 0.5);
    for (double r1 : {0.1, 0.2, 0.3})
      for (double r2 : {0.05, 0.15, 0.4}) {
        if (r1 + r2 > 0.5) continue;
        const double slack = cg.at(r1 + g.h()) - cg.at(r1) + cg.at(r2 + g.h()) - cg.at(r2);
        CHECK(cg.at(r1 + r2) <= cg.at(r1) + cg.at(r2) + 2 * slack + 1e-15);
      }
  }

  TEST_CASE("dini seminorm") {
    auto lin = SampledField::sample_box(1, 1025, 0, 1, [](const Point& x) { return x[0]; });
    const auto d = dini_seminorm(lin, 0.5, {.offset_cap = 512});
    CHECK(d.resolved == doctest::Approx(0.5 - lin.h()).epsilon(1e-9));
    CHECK(d.unresolved == doctest::Approx(lin.h()));

    auto sq = SampledField::sample_box(1, 4097, 0, 1, [](const Point& x) { return std::sqrt(x[0]); });
    const auto ds = dini_seminorm(sq, 0.25, {.offset_cap = 1024});
    CHECK(std::abs(ds.resolved - 1.0) <= 0.05);
    CHECK(std::abs(ds.total() - 1.0) <= 0.05);
  }

  TEST_CASE("pointwise dini seminorm") {
    auto lin = SampledField::sample_box(1, 257, 0, 1, [](const Point& x) { return x[0]; });
    const double g = dini_seminorm(lin, 0.5, {.offset_cap = 128}).resolved;
    const auto p = pointwise_dini_seminorm(lin, 0.5, {.offset_cap = 128});
    CHECK(p.value == doctest::Approx(g).epsilon(1e-12));

    for (unsigned seed = 20; seed < 24; ++seed) {
      auto f = random_field({17, 17}, seed);
      const double glob = dini_seminorm(f, 0.5).resolved;
      const auto pw = pointwise_dini_seminorm(f, 0.5);
      CHECK(pw.value <= glob + 1e-9);
      CHECK(pw.value > 0.0);
    }
    auto f = random_field({17, 17}, 3);
    auto pc = pointwise_oscillation(f, {8, 8}, 0.5);
    auto gc = empirical_oscillation(f, 0.5);
    for (std::size_t k = 0; k < pc.curve.size(); ++k) CHECK(pc.curve.values[k] <= gc.values[k]);
  }

  TEST_CASE("grid refinement of a Holog profile") {
    const auto s = OscillationSpec::holog(0.5, 1.0);
    auto coarse = radial(s, 2, 129, 0.125);
    auto fine = radial(s, 2, 257, 0.125);
    const RadiusWindow w{4 * coarse.h(), 0.06};
    const double a = seminorm(coarse, s, w).seminorm;
    const double b = seminorm(fine, s, w).seminorm;
    CHECK(std::abs(a - b) <= 0.05 * b);
  }

  TEST_CASE("family fit round trips") {
    auto synth = [](const OscillationSpec& s) {
      ModulusCurve c;
      for (double r = 1e-8; r < 0.3; r *= 1.5) {
        c.radii.push_back(r);
        c.values.push_back(eval(s, r));
      }
      return c;
    };
    auto h = fit_family(synth(OscillationSpec::holder(0.5)));
    CHECK(std::abs(h.lambda - 0.5) <= 0.05);
    CHECK(std::abs(h.alpha) <= 0.05);
    CHECK(h.family == Family::holder);
    auto l = fit_family(synth(OscillationSpec::log(2.0)));
    CHECK(std::abs(l.lambda) <= 0.05);
    CHECK(std::abs(l.alpha - 2.0) <= 0.2);
    CHECK(l.family == Family::log);
    auto hl = fit_family(synth(OscillationSpec::holog(0.4, 1.5)));
    CHECK(hl.family == Family::holog);

    ModulusCurve flat;
    for (double r = 1e-6; r < 0.3; r *= 2) {
      flat.radii.push_back(r);
      flat.values.push_back(1.0);
    }
    CHECK(fit_family(flat).degenerate);
    ModulusCurve tiny{{0.1, 0.2}, {1, 2}};
    CHECK_THROWS_AS(fit_family(tiny), std::invalid_argument);
  }
}
