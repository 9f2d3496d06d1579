#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppife/level_set.hpp"
#include "ppife/mesh.hpp"

namespace ppife {

enum class CutKind : std::uint8_t {
  NonInterfaceMinus,
  NonInterfacePlus,
  TypeI,
  TypeII,
  TypeIII,
  TypeIV,
  TypeV,
};

const char* to_string(CutKind kind);
inline bool is_interface(CutKind k) {
  return k != CutKind::NonInterfaceMinus && k != CutKind::NonInterfacePlus;
}

/// Raised when a mesh does not resolve the interface (more than one crossing
/// on an edge, more than two interface edges on a face, too many crossings).
class HypothesisViolation : public std::runtime_error {
 public:
  HypothesisViolation(std::string hypothesis, std::optional<Index> element, const std::string& what)
      : std::runtime_error(what), hypothesis_(std::move(hypothesis)), element_(element) {}
  const std::string& hypothesis() const { return hypothesis_; }
  const std::optional<Index>& element() const { return element_; }

 private:
  std::string hypothesis_;
  std::optional<Index> element_;
};

/// No admissible approximating triangle (every candidate is degenerate or has
/// an angle above 135 degrees).
class DegenerateGeometry : public std::runtime_error {
 public:
  DegenerateGeometry(std::optional<Index> element, const std::string& what)
      : std::runtime_error(what), element_(element) {}
  const std::optional<Index>& element() const { return element_; }

 private:
  std::optional<Index> element_;
};

struct EdgeIntersection {
  Index edge = 0;
  int local_edge = 0;
  Vec3 point = Vec3::Zero();
};

/// Approximating plane tau_T: triangle of intersection points with the
/// smallest maximal angle, its centroid and unit normal pointing to the plus side.
struct InterfacePlane {
  Vec3 centroid = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  std::array<Vec3, 3> triangle;
  std::array<int, 3> triangle_indices{};
  double max_angle_deg = 0.0;

  Plane plane() const { return {centroid, normal}; }
  double level(const Vec3& x) const { return (x - centroid).dot(normal); }
  Side side_of(const Vec3& x) const { return level(x) < 0.0 ? Side::Minus : Side::Plus; }
};

struct ElementCut {
  Index element = 0;
  CutKind kind = CutKind::NonInterfacePlus;
  std::vector<EdgeIntersection> intersections;
  std::array<Vec3, 8> vertices;
  std::array<Side, 8> vertex_sides{};
  std::optional<InterfacePlane> plane;
  /// Set when classification went ahead despite an unresolved configuration.
  bool hypothesis_violated = false;

  bool is_interface() const { return ppife::is_interface(kind); }
  int minus_vertex_count() const;
  Vec3 lo() const { return vertices[0]; }
  Vec3 hi() const { return vertices[7]; }
  Vec3 spacing() const { return vertices[7] - vertices[0]; }
};

/// Root of the level set on segment [a, b]. Eight uniform sub-intervals are
/// sign-sampled; more than one sign change throws HypothesisViolation("H3").
std::optional<Vec3> edge_intersection(const LevelSetField& ls, const Vec3& a, const Vec3& b,
                                      double snap_tol = 0.0);

/// Classification of one element; throws HypothesisViolation on unresolved
/// configurations and DegenerateGeometry when no plane can be built.
ElementCut classify_element(const LevelSetField& ls, const Mesh& mesh, Index element,
                            double snap_tol);

double default_snap_tol(const Mesh& mesh);

/// Triangle selection, centroid and oriented normal for an interface cut.
InterfacePlane approximate_plane(const ElementCut& cut);

enum class ViolationPolicy {
  Throw,
  /// Record offenders and classify from edge-endpoint signs only.
  Tolerate,
};

struct Violation {
  Index element = 0;
  std::string hypothesis;
  std::string message;
};

/// Classification of every element with one root search per mesh edge.
/// Non-interface entries carry vertices and sides but no intersections.
struct MeshClassification {
  std::vector<CutKind> kinds;
  std::vector<std::int32_t> interface_slot;  // -1 for non-interface elements
  std::vector<ElementCut> interface_cuts;
  std::vector<Side> node_sides;
  std::vector<Violation> violations;

  Index interface_count() const { return Index(interface_cuts.size()); }
  const ElementCut* cut_of(Index element) const {
    const auto s = interface_slot[element];
    return s < 0 ? nullptr : &interface_cuts[s];
  }
};

MeshClassification classify_mesh(const LevelSetField& ls, const Mesh& mesh,
                                  ViolationPolicy policy = ViolationPolicy::Throw,
                                  std::optional<double> snap_tol = std::nullopt);

enum class Verdict { Pass, Fail, Unknown };
const char* to_string(Verdict v);

struct HypothesisReport {
  Verdict h1 = Verdict::Unknown;  // h < reach / (3 sqrt 3)
  Verdict h2 = Verdict::Unknown;  // h * kappa <= 0.0288
  Verdict h3 = Verdict::Pass;
  Verdict h4 = Verdict::Pass;
  std::vector<Index> h3_elements;
  std::vector<Index> h4_elements;
  std::vector<Index> degenerate_elements;
  double h = 0.0;

  bool all_pass() const {
    return h1 != Verdict::Fail && h2 != Verdict::Fail && h3 == Verdict::Pass &&
           h4 == Verdict::Pass && degenerate_elements.empty();
  }
};

HypothesisReport validate_hypotheses(const Mesh& mesh, const LevelSetField& ls);

struct GeometricDiagnostics {
  double max_dist = 0.0;        // max distance from sampled Gamma cap T to tau_T
  double min_normal_dot = 1.0;  // min n(X) . nbar over the samples
  double patch_area = 0.0;      // quadrature estimate of |Gamma cap T|
};

/// Samples Gamma inside the element by lifting plane quadrature points along
/// nbar. `samples` is the per-edge subdivision of the cross-section triangles.
GeometricDiagnostics geometric_diagnostics(const ElementCut& cut, const LevelSetField& ls,
                                           int samples = 4);

/// Root of t -> ls(p + t n) closest to t = 0 with |t| <= search_radius.
std::optional<Vec3> lift_to_surface(const LevelSetField& ls, const Vec3& p, const Vec3& n,
                                    double search_radius);

}  // namespace ppife
