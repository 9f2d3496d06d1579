#include "ppife/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace ppife {

double QuadRule::measure() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

void QuadRule::append(const QuadRule& other) {
  points.insert(points.end(), other.points.begin(), other.points.end());
  weights.insert(weights.end(), other.weights.begin(), other.weights.end());
}

double tet_volume(const Tet& t) {
  return std::abs((t[1] - t[0]).dot((t[2] - t[0]).cross(t[3] - t[0]))) / 6.0;
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

namespace {

struct BaryPoint {
  std::array<double, 4> l;
  double w;
};

std::vector<BaryPoint> make_tet_table() {
  std::vector<BaryPoint> pts;
  auto add_orbit4 = [&](double a, double w) {
    const double b = 1.0 - 3.0 * a;
    for (int k = 0; k < 4; ++k) {
      std::array<double, 4> l{a, a, a, a};
      l[k] = b;
      pts.push_back({l, w});
    }
  };
  add_orbit4(0.31088591926330060980, 0.11268792571801585080);
  add_orbit4(0.092735250310891226402, 0.073493043116361949544);
  const double a = 0.045503704125649649492;
  const double b = 0.5 - a;
  const double w = 0.042546020777081466438;
  const std::array<std::array<int, 2>, 6> pairs{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
  for (const auto& [i, j] : pairs) {
    std::array<double, 4> l{b, b, b, b};
    l[i] = a;
    l[j] = a;
    pts.push_back({l, w});
  }
  return pts;
}

struct TriPoint {
  std::array<double, 3> l;
  double w;
};

std::vector<TriPoint> make_triangle_table() {
  std::vector<TriPoint> pts;
  auto add_orbit3 = [&](double a, double w) {
    const double b = 1.0 - 2.0 * a;
    pts.push_back({{b, a, a}, w});
    pts.push_back({{a, b, a}, w});
    pts.push_back({{a, a, b}, w});
  };
  add_orbit3(0.44594849091596488632, 0.22338158967801146570);
  add_orbit3(0.091576213509770743460, 0.10995174365532186764);
  return pts;
}

const std::vector<BaryPoint>& tet_table() {
  static const std::vector<BaryPoint> table = make_tet_table();
  return table;
}

const std::vector<TriPoint>& triangle_table() {
  static const std::vector<TriPoint> table = make_triangle_table();
  return table;
}

}  // namespace

QuadRule tet_rule(const Tet& t) {
  const double vol = tet_volume(t);
  QuadRule q;
  q.points.reserve(14);
  q.weights.reserve(14);
  for (const auto& p : tet_table()) {
    q.points.push_back(p.l[0] * t[0] + p.l[1] * t[1] + p.l[2] * t[2] + p.l[3] * t[3]);
    q.weights.push_back(p.w * vol);
  }
  return q;
}

QuadRule triangle_rule(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double area = triangle_area(a, b, c);
  QuadRule q;
  q.points.reserve(6);
  q.weights.reserve(6);
  for (const auto& p : triangle_table()) {
    q.points.push_back(p.l[0] * a + p.l[1] * b + p.l[2] * c);
    q.weights.push_back(p.w * area);
  }
  return q;
}

namespace {

// (P_n(t), P_{n-1}(t)) by the three-term recurrence.
std::pair<double, double> legendre(int n, double t) {
  double p0 = 1.0;
  double p1 = t;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, p0};
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> gauss_legendre01(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre01: order must be >= 1");
  std::vector<double> x(order), w(order);
  for (int i = 0; i < order; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [pn, pm] = legendre(order, t);
      const double dp = order * (t * pn - pm) / (t * t - 1.0);
      const double dt = pn / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    const auto [pn, pm] = legendre(order, t);
    const double dp = order * (t * pn - pm) / (t * t - 1.0);
    x[order - 1 - i] = 0.5 * (t + 1.0);
    w[order - 1 - i] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
  return {x, w};
}

QuadRule box_rule(const Vec3& lo, const Vec3& hi, int order) {
  const auto [x, w] = gauss_legendre01(order);
  const Vec3 d = hi - lo;
  const double vol = d.prod();
  QuadRule q;
  const std::size_t n = x.size();
  q.points.reserve(n * n * n);
  q.weights.reserve(n * n * n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        q.points.push_back(lo + Vec3(x[i], x[j], x[k]).cwiseProduct(d));
        q.weights.push_back(w[i] * w[j] * w[k] * vol);
      }
    }
  }
  return q;
}

QuadRule cuboid_rule(const Mesh& mesh, Index element, int order) {
  if (order < 1) throw std::invalid_argument("cuboid_rule: order must be >= 1");
  return box_rule(mesh.element_lo(element), mesh.element_hi(element), order);
}

double polygon_area(const Polygon& poly) {
  double a = 0.0;
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) a += triangle_area(poly[0], poly[i], poly[i + 1]);
  return a;
}

QuadRule polygon_rule(const Polygon& poly) {
  QuadRule q;
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
    q.append(triangle_rule(poly[0], poly[i], poly[i + 1]));
  }
  return q;
}

std::pair<Polygon, Polygon> split_polygon(const Polygon& poly, const Plane& plane, double tol) {
  Polygon neg, pos;
  const std::size_t n = poly.size();
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = plane.signed_distance(poly[i]);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    if (s[i] < -tol) {
      neg.push_back(poly[i]);
    } else if (s[i] > tol) {
      pos.push_back(poly[i]);
    } else {
      neg.push_back(poly[i]);
      pos.push_back(poly[i]);
    }
    if ((s[i] < -tol && s[j] > tol) || (s[i] > tol && s[j] < -tol)) {
      const double t = s[i] / (s[i] - s[j]);
      const Vec3 x = poly[i] + t * (poly[j] - poly[i]);
      neg.push_back(x);
      pos.push_back(x);
    }
  }
  if (neg.size() < 3) neg.clear();
  if (pos.size() < 3) pos.clear();
  return {neg, pos};
}

double SubElementTessellation::volume(Side s) const {
  double v = 0.0;
  for (const auto& t : tets(s)) v += tet_volume(t);
  return v;
}

namespace {

void dedupe(std::vector<Vec3>& pts, double tol) {
  std::vector<Vec3> out;
  for (const auto& p : pts) {
    const bool dup = std::any_of(out.begin(), out.end(),
                                 [&](const Vec3& q) { return (p - q).norm() <= tol; });
    if (!dup) out.push_back(p);
  }
  pts = std::move(out);
}

// Cyclic order of coplanar points around their centroid.
Polygon sort_cyclic(std::vector<Vec3> pts, const Vec3& normal) {
  if (pts.size() < 3) return pts;
  Vec3 c = Vec3::Zero();
  for (const auto& p : pts) c += p;
  c /= double(pts.size());
  Vec3 u = pts[0] - c;
  if (u.norm() == 0.0) u = pts[1] - c;
  u.normalize();
  const Vec3 v = normal.normalized().cross(u);
  std::vector<std::pair<double, Vec3>> keyed;
  keyed.reserve(pts.size());
  for (const auto& p : pts) keyed.emplace_back(std::atan2((p - c).dot(v), (p - c).dot(u)), p);
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  Polygon out;
  for (const auto& [ang, p] : keyed) out.push_back(p);
  return out;
}

// Fan tetrahedralization of a convex polytope contained in the box, whose faces
// lie on the box faces and optionally the cutting plane.
std::vector<Tet> tetrahedralize_piece(const std::vector<Vec3>& verts, const Vec3& lo,
                                      const Vec3& hi, const std::optional<Plane>& cut,
                                      double tol, double min_tet_volume) {
  std::vector<Tet> tets;
  if (verts.size() < 4) return tets;
  Vec3 c = Vec3::Zero();
  for (const auto& p : verts) c += p;
  c /= double(verts.size());

  auto add_face = [&](std::vector<Vec3> face, const Vec3& normal) {
    if (face.size() < 3) return;
    const Polygon poly = sort_cyclic(std::move(face), normal);
    for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
      const Tet t{c, poly[0], poly[i], poly[i + 1]};
      if (tet_volume(t) > min_tet_volume) tets.push_back(t);
    }
  };

  for (int axis = 0; axis < 3; ++axis) {
    for (int end = 0; end < 2; ++end) {
      const double value = end == 0 ? lo[axis] : hi[axis];
      std::vector<Vec3> face;
      for (const auto& p : verts) {
        if (std::abs(p[axis] - value) <= tol) face.push_back(p);
      }
      Vec3 n = Vec3::Zero();
      n[axis] = 1.0;
      add_face(std::move(face), n);
    }
  }
  if (cut) {
    std::vector<Vec3> face;
    for (const auto& p : verts) {
      if (std::abs(cut->signed_distance(p)) <= tol) face.push_back(p);
    }
    add_face(std::move(face), cut->normal);
  }
  return tets;
}

}  // namespace

SubElementTessellation tessellate_box(const Vec3& lo, const Vec3& hi, const Plane& plane) {
  const Vec3 d = hi - lo;
  const double scale = d.maxCoeff();
  const double tol = 1e-12 * scale;
  const double box_volume = d.prod();
  const double sliver = 1e-14 * box_volume;

  std::array<Vec3, 8> corners;
  std::array<double, 8> s{};
  for (int v = 0; v < 8; ++v) {
    corners[v] = lo + Vec3(v & 1, (v >> 1) & 1, (v >> 2) & 1).cwiseProduct(d);
    s[v] = plane.signed_distance(corners[v]);
  }

  std::vector<Vec3> minus_verts, plus_verts, section;
  for (int v = 0; v < 8; ++v) {
    if (s[v] < -tol) {
      minus_verts.push_back(corners[v]);
    } else if (s[v] > tol) {
      plus_verts.push_back(corners[v]);
    } else {
      section.push_back(corners[v]);
    }
  }
  for (const auto& [a, b] : kLocalEdgeVertices) {
    if ((s[a] < -tol && s[b] > tol) || (s[a] > tol && s[b] < -tol)) {
      const double t = s[a] / (s[a] - s[b]);
      Vec3 x = corners[a] + t * (corners[b] - corners[a]);
      // Keep the point exactly on its edge.
      for (int k = 0; k < 3; ++k) {
        if (corners[a][k] == corners[b][k]) x[k] = corners[a][k];
      }
      section.push_back(x);
    }
  }
  dedupe(section, tol);
  minus_verts.insert(minus_verts.end(), section.begin(), section.end());
  plus_verts.insert(plus_verts.end(), section.begin(), section.end());

  SubElementTessellation tess;
  const double min_tet = 1e-14 * box_volume;
  tess.minus_tets = tetrahedralize_piece(minus_verts, lo, hi, plane, tol, min_tet);
  tess.plus_tets = tetrahedralize_piece(plus_verts, lo, hi, plane, tol, min_tet);
  tess.section = sort_cyclic(section, plane.normal);

  const double vm = tess.volume(Side::Minus);
  const double vp = tess.volume(Side::Plus);
  if (vm < sliver || vp < sliver) {
    std::vector<Vec3> all(corners.begin(), corners.end());
    auto whole = tetrahedralize_piece(all, lo, hi, std::nullopt, tol, min_tet);
    if (vm < vp) {
      tess.minus_tets.clear();
      tess.plus_tets = std::move(whole);
    } else {
      tess.plus_tets.clear();
      tess.minus_tets = std::move(whole);
    }
    tess.merged = vm > 0.0 && vp > 0.0;
    tess.section.clear();
  }
  return tess;
}

SubElementTessellation tessellate_cut(const ElementCut& cut) {
  if (!cut.plane) throw std::invalid_argument("tessellate_cut: cut has no approximating plane");
  return tessellate_box(cut.lo(), cut.hi(), cut.plane->plane());
}

QuadRule volume_rule(const SubElementTessellation& tess, Side side) {
  QuadRule q;
  for (const auto& t : tess.tets(side)) q.append(tet_rule(t));
  return q;
}

FaceQuad face_rule(const Vec3& lo, const Vec3& hi, const NeighborSplit& first,
                   const NeighborSplit& second) {
  int axis = 0;
  for (int a = 0; a < 3; ++a) {
    if (hi[a] == lo[a]) axis = a;
  }
  const int u = (axis + 1) % 3;
  const int w = (axis + 2) % 3;
  Vec3 eu = Vec3::Zero();
  Vec3 ew = Vec3::Zero();
  eu[u] = hi[u] - lo[u];
  ew[w] = hi[w] - lo[w];
  const double scale = std::max(eu.norm(), ew.norm());
  const double tol = 1e-12 * scale;
  const double min_area = 1e-14 * eu.norm() * ew.norm();

  struct Piece {
    Polygon poly;
    Side s1;
    Side s2;
  };
  std::vector<Piece> pieces{{{lo, lo + eu, lo + eu + ew, lo + ew}, first.fixed, second.fixed}};

  auto refine = [&](const NeighborSplit& split, bool is_first) {
    if (!split.plane) return;
    std::vector<Piece> next;
    for (const auto& piece : pieces) {
      auto [neg, pos] = split_polygon(piece.poly, *split.plane, tol);
      for (auto [poly, side] : {std::pair{neg, Side::Minus}, std::pair{pos, Side::Plus}}) {
        if (poly.empty() || polygon_area(poly) <= min_area) continue;
        Piece p{poly, piece.s1, piece.s2};
        (is_first ? p.s1 : p.s2) = side;
        next.push_back(std::move(p));
      }
    }
    pieces = std::move(next);
  };
  refine(first, true);
  refine(second, false);

  FaceQuad fq;
  for (const auto& piece : pieces) {
    const QuadRule q = polygon_rule(piece.poly);
    fq.rule.append(q);
    fq.first_side.insert(fq.first_side.end(), q.size(), piece.s1);
    fq.second_side.insert(fq.second_side.end(), q.size(), piece.s2);
  }
  return fq;
}

QuadRule surface_rule(const ElementCut& cut, const LevelSetField& ls) {
  const SubElementTessellation tess = tessellate_cut(cut);
  const double h = cut.spacing().maxCoeff();
  const Vec3 nbar = cut.plane->normal;
  const QuadRule base = polygon_rule(tess.section);
  QuadRule q;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const auto x = lift_to_surface(ls, base.points[i], nbar, 2.0 * h);
    if (!x) {
      throw std::runtime_error("surface_rule: could not lift a quadrature point onto the interface");
    }
    const double dot = std::abs(ls.unit_normal(*x, h).dot(nbar));
    if (dot <= 0.0) throw std::runtime_error("surface_rule: interface normal orthogonal to plane");
    q.points.push_back(*x);
    q.weights.push_back(base.weights[i] / dot);
  }
  return q;
}

}  // namespace ppife
