#include <cmath>
#include <numbers>

#include "support.hpp"

using namespace ppife;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

double integrate(const QuadRule& q, const ScalarFn& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * f(q.points[i]);
  return s;
}

Plane unit_plane(const Vec3& n, double c) { return {n.normalized() * (c / n.norm()), n.normalized()}; }

}  // namespace

TEST_SUITE("quadrature") {

TEST_CASE("gauss-legendre exactness") {
  for (int order = 1; order <= 6; ++order) {
    const auto [x, w] = gauss_legendre01(order);
    REQUIRE(x.size() == std::size_t(order));
    for (int k = 0; k <= 2 * order - 1; ++k) {
      double s = 0.0;
      for (int i = 0; i < order; ++i) s += w[i] * std::pow(x[i], k);
      CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("tet rule is exact to degree 5") {
  const Tet ref{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  const QuadRule q = tet_rule(ref);
  CHECK(q.size() == 14);
  for (double w : q.weights) CHECK(w > 0.0);
  for (int a = 0; a <= 5; ++a) {
    for (int b = 0; a + b <= 5; ++b) {
      for (int c = 0; a + b + c <= 5; ++c) {
        const double exact = factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3);
        const double got = integrate(q, [&](const Vec3& x) {
          return std::pow(x.x(), a) * std::pow(x.y(), b) * std::pow(x.z(), c);
        });
        CHECK(got == doctest::Approx(exact).epsilon(1e-12));
      }
    }
  }
  const Tet t{Vec3(0.2, 0.1, 0.0), Vec3(1.3, 0.0, 0.4), Vec3(0.1, 0.9, 0.2), Vec3(0.4, 0.3, 1.1)};
  CHECK(tet_rule(t).measure() == doctest::Approx(std::abs(tet_volume(t))).epsilon(1e-13));
}

TEST_CASE("triangle rule is exact to degree 4") {
  const QuadRule q = triangle_rule(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0));
  CHECK(q.size() == 6);
  for (int a = 0; a <= 4; ++a) {
    for (int b = 0; a + b <= 4; ++b) {
      const double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
      const double got =
          integrate(q, [&](const Vec3& x) { return std::pow(x.x(), a) * std::pow(x.y(), b); });
      CHECK(got == doctest::Approx(exact).epsilon(1e-12));
    }
  }
  CHECK(triangle_area(Vec3(0, 0, 0), Vec3(0, 2, 0), Vec3(0, 0, 3)) == doctest::Approx(3.0));
}

TEST_CASE("box and cuboid rules") {
  const QuadRule q = box_rule(Vec3(0, 1, 2), Vec3(1, 3, 2.5), 3);
  CHECK(q.size() == 27);
  CHECK(q.measure() == doctest::Approx(1.0));
  CHECK(integrate(q, [](const Vec3& x) { return std::pow(x.x(), 5) * x.y() * x.y(); }) ==
        doctest::Approx((1.0 / 6.0) * (26.0 / 3.0) * 0.5));
  const Mesh m = build_mesh(BoxDomain(Vec3::Zero(), Vec3(2, 1, 1)), {4, 2, 2});
  double total = 0.0, moment = 0.0;
  for (Index e = 0; e < m.num_elements(); ++e) {
    const QuadRule c = cuboid_rule(m, e);
    total += c.measure();
    moment += integrate(c, [](const Vec3& x) { return x.x(); });
  }
  CHECK(total == doctest::Approx(2.0));
  CHECK(moment == doctest::Approx(2.0));
}

TEST_CASE("tessellation volumes") {
  const Vec3 lo = Vec3::Zero(), hi = Vec3::Ones();
  auto vol = [&](const Plane& p) {
    const auto t = tessellate_box(lo, hi, p);
    return std::pair{t.volume(Side::Minus), t.volume(Side::Plus)};
  };
  auto [a, b] = vol({Vec3(0, 0, 0.5), Vec3::UnitZ()});
  CHECK(a == doctest::Approx(0.5));
  CHECK(b == doctest::Approx(0.5));
  std::tie(a, b) = vol(unit_plane(Vec3(1, 1, 1), 0.5));
  CHECK(a == doctest::Approx(1.0 / 48.0).epsilon(1e-13));
  CHECK(b == doctest::Approx(47.0 / 48.0).epsilon(1e-13));
  std::tie(a, b) = vol({Vec3(0.125, 0, 0), Vec3::UnitX()});
  CHECK(a == doctest::Approx(0.125));
  std::tie(a, b) = vol(unit_plane(Vec3(1, 1, 1), 1.5));
  CHECK(a == doctest::Approx(0.5).epsilon(1e-13));
  std::tie(a, b) = vol(unit_plane(Vec3(1, 1, 0), 1.0));
  CHECK(a == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("cut-piece integrals against closed forms") {
  const auto t = tessellate_box(Vec3::Zero(), Vec3::Ones(), {Vec3(0.5, 0, 0), Vec3::UnitX()});
  CHECK(integrate(volume_rule(t, Side::Minus), [](const Vec3& x) { return x.x(); }) ==
        doctest::Approx(0.125));
  // corner simplex with legs a: int x = a^4 / 24
  const double leg = 0.5;
  const auto c = tessellate_box(Vec3::Zero(), Vec3::Ones(), unit_plane(Vec3(1, 1, 1), leg));
  CHECK(integrate(volume_rule(c, Side::Minus), [](const Vec3& x) { return x.x(); }) ==
        doctest::Approx(std::pow(leg, 4) / 24.0).epsilon(1e-12));
  CHECK(integrate(volume_rule(c, Side::Minus), [](const Vec3& x) { return x.x() * x.y() * x.z(); }) ==
        doctest::Approx(std::pow(leg, 6) / 720.0).epsilon(1e-12));
  // whole box from both sides, any trilinear integrand
  const auto r = tessellate_box(Vec3(0.2, 0.1, 0.0), Vec3(0.5, 0.4, 0.2),
                                unit_plane(Vec3(0.3, -1, 0.7), -0.05));
  auto f = [](const Vec3& x) { return 1 + x.x() * x.y() * x.z() + 3 * x.x() * x.z(); };
  QuadRule both = volume_rule(r, Side::Minus);
  both.append(volume_rule(r, Side::Plus));
  CHECK(integrate(both, f) ==
        doctest::Approx(integrate(box_rule(Vec3(0.2, 0.1, 0.0), Vec3(0.5, 0.4, 0.2), 2), f))
            .epsilon(1e-12));
}

TEST_CASE("axis-aligned cut against a sub-cell Gauss oracle") {
  // the plane y = 0.37 passes through a box; oracle integrates each side on a
  // 20^3 grid of sub-cells aligned with the cut
  const Vec3 lo(0.1, 0.2, 0.3), hi(0.6, 0.5, 0.9);
  const double cut = 0.37;
  const auto t = tessellate_box(lo, hi, {Vec3(0, cut, 0), Vec3::UnitY()});
  auto f = [](const Vec3& x) { return std::exp(x.x()) * std::sin(3 * x.y()) + x.z() * x.z(); };
  auto oracle = [&](double ylo, double yhi) {
    double s = 0.0;
    const int n = 20;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const Vec3 a(lo.x() + (hi.x() - lo.x()) * i / n, ylo + (yhi - ylo) * j / n,
                       lo.z() + (hi.z() - lo.z()) * k / n);
          const Vec3 b(lo.x() + (hi.x() - lo.x()) * (i + 1) / n, ylo + (yhi - ylo) * (j + 1) / n,
                       lo.z() + (hi.z() - lo.z()) * (k + 1) / n);
          s += integrate(box_rule(a, b, 2), f);
        }
    return s;
  };
  CHECK(integrate(volume_rule(t, Side::Minus), f) ==
        doctest::Approx(oracle(lo.y(), cut)).epsilon(1e-9));
  CHECK(integrate(volume_rule(t, Side::Plus), f) ==
        doctest::Approx(oracle(cut, hi.y())).epsilon(1e-9));
}

TEST_CASE("tessellation is additive and valid for random cuts") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    const Vec3 lo(u(rng), u(rng), u(rng));
    const Vec3 hi = lo + Vec3(0.05 + u(rng), 0.05 + u(rng), 0.05 + u(rng));
    const Vec3 p = lo + (hi - lo).cwiseProduct(Vec3(u(rng), u(rng), u(rng)));
    const Plane pl{p, Vec3(g(rng), g(rng), g(rng)).normalized()};
    const auto tess = tessellate_box(lo, hi, pl);
    const double box = (hi - lo).prod();
    CHECK(std::abs(tess.volume(Side::Minus) + tess.volume(Side::Plus) - box) <= 1e-12 * box);
    for (Side s : {Side::Minus, Side::Plus}) {
      for (const auto& tet : tess.tets(s)) {
        CHECK(std::abs(tet_volume(tet)) > 0.0);
        const Vec3 c = 0.25 * (tet[0] + tet[1] + tet[2] + tet[3]);
        if (!tess.merged) CHECK((pl.signed_distance(c) < 0.0) == (s == Side::Minus));
        for (const auto& v : tet) {
          CHECK((v.array() >= lo.array() - 1e-12).all());
          CHECK((v.array() <= hi.array() + 1e-12).all());
        }
      }
    }
    if (!tess.merged) {
      CHECK(tess.section.size() >= 3);
      CHECK(tess.section.size() <= 6);
      for (const auto& v : tess.section) CHECK(std::abs(pl.signed_distance(v)) < 1e-12);
    }
  }
}

TEST_CASE("polygons") {
  const Polygon sq{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)};
  CHECK(polygon_area(sq) == doctest::Approx(1.0));
  CHECK(polygon_rule(sq).measure() == doctest::Approx(1.0));
  const auto [neg, pos] = split_polygon(sq, {Vec3(0.25, 0, 0), Vec3::UnitX()}, 1e-12);
  CHECK(polygon_area(neg) == doctest::Approx(0.25));
  CHECK(polygon_area(pos) == doctest::Approx(0.75));
  const auto [n2, p2] = split_polygon(sq, {Vec3(2, 0, 0), Vec3::UnitX()}, 1e-12);
  CHECK(polygon_area(n2) == doctest::Approx(1.0));
  CHECK(p2.empty());
}

TEST_CASE("face rule splits by the neighbor planes") {
  const Vec3 lo(0, 0, 0), hi(0, 1, 1);
  NeighborSplit first{Plane{Vec3(0, 0.5, 0), Vec3::UnitY()}, Side::Plus};
  NeighborSplit second{std::nullopt, Side::Plus};
  const FaceQuad fq = face_rule(lo, hi, first, second);
  CHECK(fq.rule.measure() == doctest::Approx(1.0));
  double minus_area = 0.0, plus_area = 0.0;
  for (std::size_t i = 0; i < fq.rule.size(); ++i) {
    CHECK(fq.second_side[i] == Side::Plus);
    CHECK((fq.rule.points[i].y() < 0.5) == (fq.first_side[i] == Side::Minus));
    (fq.first_side[i] == Side::Minus ? minus_area : plus_area) += fq.rule.weights[i];
  }
  CHECK(minus_area == doctest::Approx(0.5));
  CHECK(plus_area == doctest::Approx(0.5));

  // two crossing traces give four pieces
  NeighborSplit s2{Plane{Vec3(0, 0, 0.25), Vec3::UnitZ()}, Side::Plus};
  const FaceQuad fq2 = face_rule(lo, hi, first, s2);
  CHECK(fq2.rule.measure() == doctest::Approx(1.0));
  double mm = 0.0;
  for (std::size_t i = 0; i < fq2.rule.size(); ++i) {
    if (fq2.first_side[i] == Side::Minus && fq2.second_side[i] == Side::Minus) mm += fq2.rule.weights[i];
  }
  CHECK(mm == doctest::Approx(0.125));
}

TEST_CASE("surface rule") {
  SUBCASE("plane area") {
    const double c = std::numbers::pi / 10.0;
    const auto ls = plane_level_set(Vec3(1, 0, 1), c);
    const Mesh m = build_mesh(BoxDomain(Vec3::Constant(-1), Vec3::Constant(1)), {9, 9, 9});
    const auto cls = classify_mesh(ls, m);
    double area = 0.0;
    for (const auto& cut : cls.interface_cuts) area += surface_rule(cut, ls).measure();
    // x + z = c inside the cube: (2 - c) * 2 * sqrt(2)
    CHECK(area == doctest::Approx((2.0 - c) * 2.0 * std::sqrt(2.0)).epsilon(1e-10));
  }
  SUBCASE("sphere area") {
    const double r = std::numbers::pi / 4.0;
    const auto ls = sphere_level_set(Vec3::Zero(), r);
    const Mesh m = build_mesh(BoxDomain(Vec3::Constant(-1), Vec3::Constant(1)), {20, 20, 20});
    const auto cls = classify_mesh(ls, m);
    double area = 0.0;
    for (const auto& cut : cls.interface_cuts) {
      const auto q = surface_rule(cut, ls);
      for (const auto& x : q.points) CHECK(std::abs(ls(x)) < 1e-10);
      CHECK(q.measure() <= 4.0 * m.h() * m.h());
      area += q.measure();
    }
    CHECK(area == doctest::Approx(4.0 * std::numbers::pi * r * r).epsilon(0.01));
  }
}

}
