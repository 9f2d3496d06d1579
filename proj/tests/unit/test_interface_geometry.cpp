#include <cmath>
#include <numbers>
#include <set>

#include "support.hpp"

using namespace ppife;

namespace {

ElementCut cut_unit(const LevelSetField& ls) {
  const Mesh m = testing::unit_mesh(1);
  return classify_element(ls, m, 0, default_snap_tol(m));
}

double max_triangle_angle(const std::array<Vec3, 3>& t) {
  double best = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Vec3 a = t[(i + 1) % 3] - t[i];
    const Vec3 b = t[(i + 2) % 3] - t[i];
    best = std::max(best, std::acos(std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0)));
  }
  return best * 180.0 / std::numbers::pi;
}

}  // namespace

TEST_SUITE("interface_geometry") {

TEST_CASE("edge intersection of a plane") {
  const auto ls = plane_level_set(Vec3(1, 0, 0), 0.25);
  const auto p = edge_intersection(ls, Vec3(0, 0, 0), Vec3(1, 0, 0));
  REQUIRE(p);
  CHECK(p->x() == doctest::Approx(0.25).epsilon(1e-14));
  CHECK_FALSE(edge_intersection(ls, Vec3(0.5, 0, 0), Vec3(1, 0, 0)));
  CHECK_FALSE(edge_intersection(ls, Vec3(0, 0, 0), Vec3(0, 1, 0)));
}

TEST_CASE("edge intersection of a sphere") {
  const auto ls = sphere_level_set(Vec3::Zero(), 0.6);
  const auto p = edge_intersection(ls, Vec3(0, 0, 0), Vec3(1, 0, 0));
  REQUIRE(p);
  CHECK(p->x() == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("two crossings on an edge violate H3") {
  const LevelSetField ls([](const Vec3& x) { return (x.x() - 0.3) * (x.x() - 0.7); });
  CHECK_THROWS_AS(edge_intersection(ls, Vec3(0, 0, 0), Vec3(1, 0, 0)), HypothesisViolation);
  try {
    edge_intersection(ls, Vec3(0, 0, 0), Vec3(1, 0, 0));
  } catch (const HypothesisViolation& e) {
    CHECK(e.hypothesis() == "H3");
  }
  const Mesh m = testing::unit_mesh(1);
  CHECK_THROWS_AS(classify_mesh(ls, m), HypothesisViolation);
  const auto cls = classify_mesh(ls, m, ViolationPolicy::Tolerate);
  CHECK_FALSE(cls.violations.empty());
  CHECK(cls.violations.front().hypothesis == "H3");
  const auto rep = validate_hypotheses(m, ls);
  CHECK(rep.h3 == Verdict::Fail);
  CHECK_FALSE(rep.all_pass());
}

TEST_CASE("cut kinds on a single cube") {
  struct Case {
    Vec3 n;
    double offset;
    CutKind kind;
    int minus;
  };
  const Case cases[] = {
      {Vec3(1, 1, 1), 0.5, CutKind::TypeI, 1},
      {Vec3(0, 0, 1), 0.5, CutKind::TypeII, 4},
      {Vec3(1, 1, 0), 0.5, CutKind::TypeIII, 2},
      {Vec3(1, 1, 2), 1.5, CutKind::TypeIV, 3},
      {Vec3(1, 1, 1), 1.5, CutKind::TypeV, 4},
      {Vec3(1, 1, 1), -0.5, CutKind::NonInterfacePlus, 0},
      {Vec3(1, 1, 1), 3.5, CutKind::NonInterfaceMinus, 8},
  };
  for (const auto& c : cases) {
    CAPTURE(to_string(c.kind));
    const auto cut = cut_unit(plane_level_set(c.n, c.offset));
    CHECK(cut.kind == c.kind);
    CHECK(cut.minus_vertex_count() == c.minus);
    CHECK(cut.plane.has_value() == is_interface(c.kind));
  }
}

TEST_CASE("corner cut plane") {
  const auto cut = cut_unit(plane_level_set(Vec3(1, 1, 1), 0.5));
  REQUIRE(cut.plane);
  CHECK(cut.intersections.size() == 3);
  CHECK((cut.plane->centroid - Vec3::Constant(1.0 / 6.0)).norm() < 1e-14);
  CHECK((cut.plane->normal - Vec3::Ones().normalized()).norm() < 1e-14);
  CHECK(cut.plane->max_angle_deg == doctest::Approx(60.0));
  CHECK(cut.plane->side_of(Vec3::Zero()) == Side::Minus);
  CHECK(cut.plane->side_of(Vec3::Ones()) == Side::Plus);
}

TEST_CASE("planar interfaces are reproduced exactly") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  const Mesh m = build_mesh(BoxDomain(Vec3::Constant(-1), Vec3::Constant(1)), {7, 7, 7});
  for (int t = 0; t < 20; ++t) {
    const Vec3 n = Vec3(g(rng), g(rng), g(rng)).normalized();
    const double c = 0.3 * g(rng);
    const auto ls = plane_level_set(n, c);
    const auto cls = classify_mesh(ls, m);
    for (const auto& cut : cls.interface_cuts) {
      REQUIRE(cut.plane);
      CHECK(std::abs(cut.plane->normal.dot(n)) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(cut.plane->normal.dot(n) > 0.0);
      for (const auto& x : cut.intersections) CHECK(std::abs(ls(x.point)) < 1e-12);
      for (const auto& v : cut.plane->triangle) CHECK(std::abs(ls(v)) < 1e-12);
    }
  }
}

TEST_CASE("intersection points lie on their edges and on the interface") {
  const auto ls = sphere_level_set(Vec3(0.03, -0.02, 0.01), 0.61);
  const Mesh m = build_mesh(BoxDomain(Vec3::Constant(-1), Vec3::Constant(1)), {16, 16, 16});
  const auto cls = classify_mesh(ls, m);
  REQUIRE(cls.interface_count() > 0);
  for (const auto& cut : cls.interface_cuts) {
    for (const auto& x : cut.intersections) {
      const auto [a, b] = kLocalEdgeVertices[x.local_edge];
      const Vec3 e = cut.vertices[b] - cut.vertices[a];
      const double t = (x.point - cut.vertices[a]).dot(e) / e.squaredNorm();
      CHECK(t >= 0.0);
      CHECK(t <= 1.0);
      CHECK(((x.point - cut.vertices[a]) - t * e).norm() < 1e-14);
      CHECK(std::abs(ls(x.point)) < 1e-10);
      CHECK(cut.vertex_sides[a] != cut.vertex_sides[b]);
    }
    const int m_count = cut.minus_vertex_count();
    CHECK(m_count >= 1);
    CHECK(m_count <= 7);
  }
}

TEST_CASE("approximating triangles respect the angle bound") {
  const Mesh m = build_mesh(BoxDomain(Vec3::Constant(-1.2), Vec3::Constant(1.2)), {24, 24, 24});
  const auto cls = classify_mesh(orthocircle_level_set(), m, ViolationPolicy::Tolerate);
  std::set<Index> bad;
  for (const auto& v : cls.violations) bad.insert(v.element);
  int checked = 0;
  for (const auto& cut : cls.interface_cuts) {
    if (bad.count(cut.element) || cut.hypothesis_violated) continue;
    REQUIRE(cut.plane);
    CHECK(cut.plane->max_angle_deg <= 135.0 + 1e-9);
    CHECK(max_triangle_angle(cut.plane->triangle) == doctest::Approx(cut.plane->max_angle_deg));
    CHECK(cut.plane->normal.norm() == doctest::Approx(1.0));
    ++checked;
  }
  CHECK(checked > 500);
}

TEST_CASE("normal points to the plus side") {
  const auto ls = sphere_level_set(Vec3(0.05, 0.0, -0.03), 0.5);
  const Mesh m = build_mesh(BoxDomain(Vec3::Constant(-1), Vec3::Constant(1)), {20, 20, 20});
  const auto cls = classify_mesh(ls, m);
  for (const auto& cut : cls.interface_cuts) {
    const Vec3 grad = ls.gradient(cut.plane->centroid, m.h());
    CHECK(grad.dot(cut.plane->normal) > 0.0);
    for (int v = 0; v < 8; ++v) {
      // vertices far from tau_T fall on the side their sign says
      if (std::abs(cut.plane->level(cut.vertices[v])) > 0.2 * m.h()) {
        CHECK(cut.plane->side_of(cut.vertices[v]) == cut.vertex_sides[v]);
      }
    }
  }
}

TEST_CASE("negating the level set swaps the sides") {
  const auto ls = sphere_level_set(Vec3(0.013, 0.021, -0.017), 0.57);
  const Mesh m = build_mesh(BoxDomain(Vec3::Constant(-1), Vec3::Constant(1)), {12, 12, 12});
  const auto a = classify_mesh(ls, m);
  const auto b = classify_mesh(ls.negated(), m);
  REQUIRE(a.interface_count() == b.interface_count());
  for (Index e = 0; e < m.num_elements(); ++e) {
    const auto* ca = a.cut_of(e);
    const auto* cb = b.cut_of(e);
    REQUIRE((ca == nullptr) == (cb == nullptr));
    if (!ca) {
      CHECK(a.kinds[e] != b.kinds[e]);
      continue;
    }
    CHECK(ca->kind == cb->kind);
    CHECK(ca->minus_vertex_count() == 8 - cb->minus_vertex_count());
    CHECK((ca->plane->normal + cb->plane->normal).norm() < 1e-12);
    CHECK((ca->plane->centroid - cb->plane->centroid).norm() < 1e-12);
  }
}

TEST_CASE("mesh classification agrees with per-element classification") {
  const auto ls = sphere_level_set(Vec3(0.1, 0.0, 0.0), 0.45);
  const Mesh m = build_mesh(BoxDomain(Vec3::Constant(-1), Vec3::Constant(1)), {10, 10, 10});
  const auto cls = classify_mesh(ls, m, ViolationPolicy::Tolerate);
  std::set<Index> bad;
  for (const auto& v : cls.violations) bad.insert(v.element);
  for (Index e = 0; e < m.num_elements(); ++e) {
    if (bad.count(e)) {
      CHECK_THROWS_AS(classify_element(ls, m, e, default_snap_tol(m)), HypothesisViolation);
      continue;
    }
    const auto cut = classify_element(ls, m, e, default_snap_tol(m));
    CHECK(cut.kind == cls.kinds[e]);
    if (cut.is_interface()) {
      const auto* c = cls.cut_of(e);
      REQUIRE(c);
      CHECK((c->plane->normal - cut.plane->normal).norm() < 1e-12);
    }
  }
}

TEST_CASE("hypothesis verdicts") {
  const Mesh m20 = build_mesh(BoxDomain(Vec3::Constant(-1), Vec3::Constant(1)), {20, 20, 20});
  const auto sphere = sphere_level_set(Vec3::Zero(), std::numbers::pi / 4.0);
  const auto rep = validate_hypotheses(m20, sphere);
  // h = 0.1: reach/(3 sqrt 3) = 0.151 > h, h kappa = 0.127 > 0.0288
  CHECK(rep.h1 == Verdict::Pass);
  CHECK(rep.h2 == Verdict::Fail);
  CHECK(rep.h3 == Verdict::Pass);
  CHECK(rep.h4 == Verdict::Pass);

  const auto plane = plane_level_set(Vec3(1, 0, 1), std::numbers::pi / 10.0);
  const auto rp = validate_hypotheses(m20, plane);
  CHECK(rp.h1 == Verdict::Pass);
  CHECK(rp.h2 == Verdict::Pass);
  CHECK(rp.all_pass());

  const auto rg = validate_hypotheses(m20, orthocircle_level_set());
  CHECK(rg.h1 == Verdict::Unknown);
  CHECK(rg.h2 == Verdict::Unknown);
}

TEST_CASE("geometric error bounds on the sphere") {
  const double r = std::numbers::pi / 4.0;
  const auto ls = sphere_level_set(Vec3::Zero(), r);
  const Mesh m = build_mesh(BoxDomain(Vec3::Constant(-1), Vec3::Constant(1)), {20, 20, 20});
  const auto cls = classify_mesh(ls, m);
  const double kappa = 1.0 / r;
  const double h = m.h();
  for (std::size_t i = 0; i < cls.interface_cuts.size(); i += 3) {
    const auto d = geometric_diagnostics(cls.interface_cuts[i], ls);
    CHECK(d.max_dist <= 12.0927 * kappa * h * h);
    CHECK(d.min_normal_dot >= 1.0 - 26.6121 * kappa * kappa * h * h);
    CHECK(d.patch_area > 0.0);
    CHECK(d.patch_area <= 4.0 * h * h);
  }
}

TEST_CASE("lift to surface") {
  const auto ls = sphere_level_set(Vec3::Zero(), 0.5);
  const auto p = lift_to_surface(ls, Vec3(0.4, 0, 0), Vec3::UnitX(), 0.2);
  REQUIRE(p);
  CHECK(p->x() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_FALSE(lift_to_surface(ls, Vec3(0.1, 0, 0), Vec3::UnitX(), 0.1));
}

}
