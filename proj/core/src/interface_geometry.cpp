#include "ppife/interface_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "parallel.hpp"

namespace ppife {

const char* to_string(CutKind kind) {
  switch (kind) {
    case CutKind::NonInterfaceMinus: return "NonInterfaceMinus";
    case CutKind::NonInterfacePlus: return "NonInterfacePlus";
    case CutKind::TypeI: return "TypeI";
    case CutKind::TypeII: return "TypeII";
    case CutKind::TypeIII: return "TypeIII";
    case CutKind::TypeIV: return "TypeIV";
    case CutKind::TypeV: return "TypeV";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

int ElementCut::minus_vertex_count() const {
  return int(std::count(vertex_sides.begin(), vertex_sides.end(), Side::Minus));
}

double default_snap_tol(const Mesh& mesh) { return 1e-12 * mesh.h(); }

namespace {

constexpr int kEdgeSamples = 8;
constexpr double kMaxAngleDeg = 135.0;

struct EdgeScan {
  int sign_changes = 0;
  std::optional<Vec3> root;
};

// Zero of the level set in [t0, t1]. Snapping only decides vertex sides; the
// root itself is located on the true sign so planar interfaces come out exact.
Vec3 bisect_root(const LevelSetField& ls, const Vec3& a, const Vec3& b, double t0, double t1) {
  const Vec3 d = b - a;
  double v0 = ls(a + t0 * d);
  double v1 = ls(a + t1 * d);
  if (v0 == 0.0) return a + t0 * d;
  if (v1 == 0.0) return a + t1 * d;
  // a snapped endpoint: the zero lies just outside the bracket
  if ((v0 < 0.0) == (v1 < 0.0)) return std::abs(v0) < std::abs(v1) ? a + t0 * d : a + t1 * d;
  const bool neg0 = v0 < 0.0;
  for (int it = 0; it < 200 && t1 - t0 > 1e-15; ++it) {
    const double mid = 0.5 * (t0 + t1);
    const double v = ls(a + mid * d);
    if (v == 0.0) return a + mid * d;
    if ((v < 0.0) == neg0) {
      t0 = mid;
      v0 = v;
    } else {
      t1 = mid;
      v1 = v;
    }
  }
  // secant step on the final bracket; exact for level sets linear along the edge
  double t = 0.5 * (t0 + t1);
  const double sec = t0 + (t1 - t0) * v0 / (v0 - v1);
  if (std::isfinite(sec) && sec >= t0 && sec <= t1) t = sec;
  return a + t * d;
}

EdgeScan scan_edge(const LevelSetField& ls, const Vec3& a, const Vec3& b, double va, double vb,
                   double snap_tol) {
  std::array<Side, kEdgeSamples + 1> sides{};
  sides[0] = classify_value(va, snap_tol);
  sides[kEdgeSamples] = classify_value(vb, snap_tol);
  for (int k = 1; k < kEdgeSamples; ++k) {
    const double t = double(k) / kEdgeSamples;
    sides[k] = classify_value(ls(a + t * (b - a)), snap_tol);
  }
  EdgeScan scan;
  int first_change = -1;
  for (int k = 0; k < kEdgeSamples; ++k) {
    if (sides[k] != sides[k + 1]) {
      ++scan.sign_changes;
      if (first_change < 0) first_change = k;
    }
  }
  if (sides[0] != sides[kEdgeSamples]) {
    scan.root = bisect_root(ls, a, b, double(first_change) / kEdgeSamples,
                            double(first_change + 1) / kEdgeSamples);
  }
  return scan;
}

double triangle_max_angle_deg(const Vec3& p0, const Vec3& p1, const Vec3& p2) {
  const std::array<Vec3, 3> p{p0, p1, p2};
  double max_angle = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Vec3 u = p[(i + 1) % 3] - p[i];
    const Vec3 v = p[(i + 2) % 3] - p[i];
    const double c = std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0);
    max_angle = std::max(max_angle, std::acos(c) * 180.0 / std::numbers::pi);
  }
  return max_angle;
}

// Gradient of the trilinear interpolant of the vertex signs; only used to
// orient degenerate fallback planes.
Vec3 vertex_sign_gradient(const ElementCut& cut) {
  Vec3 g = Vec3::Zero();
  const Vec3 h = cut.spacing();
  for (int v = 0; v < 8; ++v) {
    const double s = cut.vertex_sides[v] == Side::Plus ? 1.0 : -1.0;
    for (int a = 0; a < 3; ++a) g[a] += s * (((v >> a) & 1) ? 1.0 : -1.0) / (4.0 * h[a]);
  }
  return g;
}

void orient_toward_plus(const ElementCut& cut, InterfacePlane& plane) {
  double s = 0.0;
  for (int v = 0; v < 8; ++v) {
    const double sgn = cut.vertex_sides[v] == Side::Plus ? 1.0 : -1.0;
    s += sgn * plane.level(cut.vertices[v]);
  }
  if (s < 0.0) plane.normal = -plane.normal;
}

InterfacePlane build_plane(const ElementCut& cut, bool allow_obtuse) {
  const auto& pts = cut.intersections;
  const int n = int(pts.size());
  if (n < 3) {
    throw DegenerateGeometry(cut.element, fmt::format("element {}: {} intersection points, need 3",
                                                      cut.element, n));
  }
  const double scale = cut.spacing().maxCoeff();
  double best = std::numeric_limits<double>::infinity();
  std::array<int, 3> best_idx{-1, -1, -1};
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        const Vec3& a = pts[i].point;
        const Vec3& b = pts[j].point;
        const Vec3& c = pts[k].point;
        const double area2 = (b - a).cross(c - a).norm();
        if (area2 <= 1e-10 * scale * scale) continue;
        const double ang = triangle_max_angle_deg(a, b, c);
        if (ang < best - 1e-12) {
          best = ang;
          best_idx = {i, j, k};
        }
      }
    }
  }

  InterfacePlane plane;
  if (best_idx[0] < 0) {
    if (!allow_obtuse) {
      throw DegenerateGeometry(cut.element,
                               fmt::format("element {}: all candidate triangles are degenerate",
                                           cut.element));
    }
    Vec3 c = Vec3::Zero();
    for (const auto& p : pts) c += p.point;
    c /= n;
    Vec3 g = vertex_sign_gradient(cut);
    plane.centroid = c;
    plane.normal = g.norm() > 0 ? Vec3(g.normalized()) : Vec3::UnitZ();
    plane.triangle = {c, c, c};
    plane.triangle_indices = {-1, -1, -1};
    plane.max_angle_deg = 180.0;
    orient_toward_plus(cut, plane);
    return plane;
  }
  if (best > kMaxAngleDeg + 1e-9 && !allow_obtuse) {
    throw DegenerateGeometry(
        cut.element, fmt::format("element {}: best triangle has max angle {:.3f} > 135 degrees",
                                 cut.element, best));
  }
  const auto [i, j, k] = best_idx;
  plane.triangle = {pts[i].point, pts[j].point, pts[k].point};
  plane.triangle_indices = best_idx;
  plane.centroid = (pts[i].point + pts[j].point + pts[k].point) / 3.0;
  plane.normal = (pts[j].point - pts[i].point).cross(pts[k].point - pts[i].point).normalized();
  plane.max_angle_deg = best;
  orient_toward_plus(cut, plane);
  return plane;
}

// Assigns kind and plane once vertex sides and intersections are filled in.
void finish_cut(ElementCut& cut, ViolationPolicy policy, std::vector<Violation>* violations) {
  auto violate = [&](const std::string& hyp, const std::string& msg) {
    if (policy == ViolationPolicy::Throw) throw HypothesisViolation(hyp, cut.element, msg);
    cut.hypothesis_violated = true;
    if (violations) violations->push_back({cut.element, hyp, msg});
  };

  const int minus = cut.minus_vertex_count();
  if (minus == 0 || minus == 8) {
    cut.kind = minus == 8 ? CutKind::NonInterfaceMinus : CutKind::NonInterfacePlus;
    cut.intersections.clear();
    cut.plane.reset();
    return;
  }

  std::array<bool, 12> cut_edge{};
  for (const auto& x : cut.intersections) cut_edge[x.local_edge] = true;
  for (int f = 0; f < 6; ++f) {
    int count = 0;
    for (int e : kLocalFaceEdges[f]) count += cut_edge[e] ? 1 : 0;
    if (count > 2) {
      violate("H4", fmt::format("element {}: face {} has {} interface edges", cut.element, f,
                                count));
      break;
    }
  }

  const int n = int(cut.intersections.size());
  if (n > 6) {
    violate("H4", fmt::format("element {}: {} intersection points (at most 6 are possible)",
                              cut.element, n));
  }
  switch (n) {
    case 3: cut.kind = CutKind::TypeI; break;
    case 4: {
      const int axis = local_edge_axis(cut.intersections[0].local_edge);
      const bool parallel = std::all_of(
          cut.intersections.begin(), cut.intersections.end(),
          [axis](const EdgeIntersection& x) { return local_edge_axis(x.local_edge) == axis; });
      cut.kind = parallel ? CutKind::TypeII : CutKind::TypeIII;
      break;
    }
    case 5: cut.kind = CutKind::TypeIV; break;
    default: cut.kind = CutKind::TypeV; break;
  }

  if (policy == ViolationPolicy::Throw) {
    cut.plane = build_plane(cut, false);
  } else {
    try {
      cut.plane = build_plane(cut, false);
    } catch (const DegenerateGeometry& e) {
      cut.hypothesis_violated = true;
      if (violations) violations->push_back({cut.element, "degenerate", e.what()});
      cut.plane = build_plane(cut, true);
    }
  }
}

}  // namespace

std::optional<Vec3> edge_intersection(const LevelSetField& ls, const Vec3& a, const Vec3& b,
                                      double snap_tol) {
  const EdgeScan scan = scan_edge(ls, a, b, ls(a), ls(b), snap_tol);
  if (scan.sign_changes > 1) {
    throw HypothesisViolation(
        "H3", std::nullopt,
        fmt::format("edge ({}, {}, {})-({}, {}, {}) crosses the interface {} times", a.x(), a.y(),
                    a.z(), b.x(), b.y(), b.z(), scan.sign_changes));
  }
  return scan.root;
}

ElementCut classify_element(const LevelSetField& ls, const Mesh& mesh, Index element,
                            double snap_tol) {
  ElementCut cut;
  cut.element = element;
  cut.vertices = mesh.element_vertices(element);
  std::array<double, 8> values{};
  for (int v = 0; v < 8; ++v) {
    values[v] = ls(cut.vertices[v]);
    cut.vertex_sides[v] = classify_value(values[v], snap_tol);
  }
  const auto edges = mesh.element_edges(element);
  for (int e = 0; e < 12; ++e) {
    const auto [v0, v1] = kLocalEdgeVertices[e];
    const EdgeScan scan =
        scan_edge(ls, cut.vertices[v0], cut.vertices[v1], values[v0], values[v1], snap_tol);
    if (scan.sign_changes > 1) {
      throw HypothesisViolation(
          "H3", element,
          fmt::format("element {}: local edge {} crosses the interface {} times", element, e,
                      scan.sign_changes));
    }
    if (scan.root) cut.intersections.push_back({edges[e], e, *scan.root});
  }
  finish_cut(cut, ViolationPolicy::Throw, nullptr);
  return cut;
}

InterfacePlane approximate_plane(const ElementCut& cut) {
  if (!cut.is_interface()) {
    throw std::invalid_argument("approximate_plane: element is not an interface element");
  }
  return build_plane(cut, false);
}

MeshClassification classify_mesh(const LevelSetField& ls, const Mesh& mesh,
                                  ViolationPolicy policy, std::optional<double> snap_tol_opt) {
  const double snap_tol = snap_tol_opt.value_or(default_snap_tol(mesh));
  MeshClassification out;
  const Index num_nodes = mesh.num_nodes();
  std::vector<double> values(num_nodes);
  detail::parallel_for(num_nodes, [&](Index n) { values[n] = ls(mesh.node_point(n)); });
  out.node_sides.resize(num_nodes);
  for (Index n = 0; n < num_nodes; ++n) out.node_sides[n] = classify_value(values[n], snap_tol);

  const Index num_edges = mesh.num_edges();
  std::vector<std::uint8_t> changes(num_edges, 0);
  std::vector<Vec3> roots(num_edges, Vec3::Zero());
  detail::parallel_for(num_edges, [&](Index e) {
    const auto [n0, n1] = mesh.edge_nodes(e);
    const EdgeScan scan =
        scan_edge(ls, mesh.node_point(n0), mesh.node_point(n1), values[n0], values[n1], snap_tol);
    changes[e] = std::uint8_t(std::min(scan.sign_changes, 255));
    if (scan.root) roots[e] = *scan.root;
  });

  const Index num_elements = mesh.num_elements();
  out.kinds.resize(num_elements);
  out.interface_slot.assign(num_elements, -1);
  for (Index el = 0; el < num_elements; ++el) {
    const auto nodes = mesh.element_nodes(el);
    const auto edges = mesh.element_edges(el);
    int minus = 0;
    for (Index n : nodes) minus += out.node_sides[n] == Side::Minus ? 1 : 0;

    bool h3 = false;
    for (Index e : edges) h3 = h3 || changes[e] > 1;
    if (h3) {
      const std::string msg =
          fmt::format("element {}: an edge crosses the interface more than once", el);
      if (policy == ViolationPolicy::Throw) throw HypothesisViolation("H3", el, msg);
      out.violations.push_back({el, "H3", msg});
    }

    if (minus == 0 || minus == 8) {
      out.kinds[el] = minus == 8 ? CutKind::NonInterfaceMinus : CutKind::NonInterfacePlus;
      continue;
    }
    ElementCut cut;
    cut.element = el;
    cut.vertices = mesh.element_vertices(el);
    for (int v = 0; v < 8; ++v) cut.vertex_sides[v] = out.node_sides[nodes[v]];
    cut.hypothesis_violated = h3;
    for (int e = 0; e < 12; ++e) {
      const auto [v0, v1] = kLocalEdgeVertices[e];
      if (cut.vertex_sides[v0] != cut.vertex_sides[v1]) {
        cut.intersections.push_back({edges[e], e, roots[edges[e]]});
      }
    }
    finish_cut(cut, policy, &out.violations);
    out.kinds[el] = cut.kind;
    out.interface_slot[el] = std::int32_t(out.interface_cuts.size());
    out.interface_cuts.push_back(std::move(cut));
  }
  return out;
}

HypothesisReport validate_hypotheses(const Mesh& mesh, const LevelSetField& ls) {
  HypothesisReport report;
  report.h = mesh.h();
  if (ls.reach()) {
    report.h1 = report.h < *ls.reach() / (3.0 * std::sqrt(3.0)) ? Verdict::Pass : Verdict::Fail;
  }
  if (ls.curvature_bound()) {
    report.h2 = report.h * *ls.curvature_bound() <= 0.0288 ? Verdict::Pass : Verdict::Fail;
  }
  const MeshClassification cls = classify_mesh(ls, mesh, ViolationPolicy::Tolerate);
  for (const auto& v : cls.violations) {
    auto& list = v.hypothesis == "H3"   ? report.h3_elements
                 : v.hypothesis == "H4" ? report.h4_elements
                                        : report.degenerate_elements;
    if (list.empty() || list.back() != v.element) list.push_back(v.element);
  }
  report.h3 = report.h3_elements.empty() ? Verdict::Pass : Verdict::Fail;
  report.h4 = report.h4_elements.empty() ? Verdict::Pass : Verdict::Fail;
  return report;
}

std::optional<Vec3> lift_to_surface(const LevelSetField& ls, const Vec3& p, const Vec3& n,
                                    double search_radius) {
  const double v0 = ls(p);
  if (v0 == 0.0) return p;
  constexpr int kSteps = 64;
  const double step = search_radius / kSteps;
  const bool neg0 = v0 < 0.0;
  for (int k = 1; k <= kSteps; ++k) {
    for (double dir : {1.0, -1.0}) {
      const double t_prev = dir * (k - 1) * step;
      const double t = dir * k * step;
      const double v = ls(p + t * n);
      if ((v < 0.0) != neg0 || v == 0.0) {
        double a = t_prev;
        double b = t;
        for (int it = 0; it < 100 && std::abs(b - a) > 1e-16 * search_radius; ++it) {
          const double m = 0.5 * (a + b);
          if ((ls(p + m * n) < 0.0) == neg0) {
            a = m;
          } else {
            b = m;
          }
        }
        return Vec3(p + 0.5 * (a + b) * n);
      }
    }
  }
  return std::nullopt;
}

}  // namespace ppife
