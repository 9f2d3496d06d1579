#pragma once

#include <array>
#include <optional>
#include <vector>

#include "ppife/geometry.hpp"
#include "ppife/interface_geometry.hpp"

namespace ppife {

/// Points in global coordinates with volume or area weights.
struct QuadRule {
  std::vector<Vec3> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
  double measure() const;
  void append(const QuadRule& other);
};

using Tet = std::array<Vec3, 4>;
double tet_volume(const Tet& t);
double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);

/// Degree-5 tetrahedron rule (14 points, positive weights).
QuadRule tet_rule(const Tet& t);
/// Degree-4 triangle rule (6 points).
QuadRule triangle_rule(const Vec3& a, const Vec3& b, const Vec3& c);
/// Gauss-Legendre nodes and weights on [0, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre01(int order);
/// Tensor Gauss rule on the box [lo, hi], exact for per-axis degree <= 2 order - 1.
QuadRule box_rule(const Vec3& lo, const Vec3& hi, int order);
QuadRule cuboid_rule(const Mesh& mesh, Index element, int order = 3);

/// A convex planar polygon with vertices in cyclic order.
using Polygon = std::vector<Vec3>;
double polygon_area(const Polygon& poly);
/// Fan triangulation from vertex 0 with the triangle rule on each piece.
QuadRule polygon_rule(const Polygon& poly);
/// Splits a convex polygon by a plane into (negative part, positive part);
/// empty parts are returned as empty polygons.
std::pair<Polygon, Polygon> split_polygon(const Polygon& poly, const Plane& plane, double tol);

/// The cuboid [lo, hi] cut by a plane into tetrahedralized pieces.
struct SubElementTessellation {
  std::vector<Tet> minus_tets;
  std::vector<Tet> plus_tets;
  /// Cross-section polygon of the plane with the cuboid (empty after a merge).
  Polygon section;
  /// Set when one piece was a sliver and got merged into the other side.
  bool merged = false;

  const std::vector<Tet>& tets(Side s) const { return s == Side::Minus ? minus_tets : plus_tets; }
  double volume(Side s) const;
};

SubElementTessellation tessellate_box(const Vec3& lo, const Vec3& hi, const Plane& plane);
SubElementTessellation tessellate_cut(const ElementCut& cut);

/// Degree-5 rule over the tets of one side.
QuadRule volume_rule(const SubElementTessellation& tess, Side side);

/// Face quadrature with the polynomial piece to use on each neighbor.
struct FaceQuad {
  QuadRule rule;
  std::vector<Side> first_side;
  std::vector<Side> second_side;
};

/// How a face neighbor selects its polynomial piece: by a plane, or a fixed side.
struct NeighborSplit {
  std::optional<Plane> plane;
  Side fixed = Side::Plus;
};

/// Splits the axis-aligned face rectangle [lo, hi] (hi[axis] == lo[axis]) by the
/// traces of both neighbor planes and labels each piece.
FaceQuad face_rule(const Vec3& lo, const Vec3& hi, const NeighborSplit& first,
                   const NeighborSplit& second);

/// Quadrature on Gamma inside the element: plane-section points lifted along nbar
/// onto the level set, weights divided by n(X) . nbar.
QuadRule surface_rule(const ElementCut& cut, const LevelSetField& ls);

}  // namespace ppife
