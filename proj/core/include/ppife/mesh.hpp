#pragma once

#include <array>
#include <optional>
#include <vector>

#include "ppife/geometry.hpp"

namespace ppife {

/// Axis-aligned box domain with hi > lo componentwise.
class BoxDomain {
 public:
  BoxDomain(const Vec3& lo, const Vec3& hi);

  const Vec3& lo() const { return lo_; }
  const Vec3& hi() const { return hi_; }
  Vec3 extent() const { return hi_ - lo_; }
  double volume() const;
  double diameter() const { return extent().norm(); }
  bool contains(const Vec3& x) const;

 private:
  Vec3 lo_;
  Vec3 hi_;
};

struct GridIndex {
  int i = 0;
  int j = 0;
  int k = 0;
  friend bool operator==(const GridIndex&, const GridIndex&) = default;
};

/// Result of a face adjacency query. The face normal points from `first`
/// to `second`; on boundary faces `second` is empty and the normal points
/// out of the domain.
struct FaceNeighbors {
  Index first = 0;
  std::optional<Index> second;
  int axis = 0;
  Vec3 normal = Vec3::Zero();

  bool is_boundary() const { return !second.has_value(); }
};

// Local vertex v of an element sits at offset (v&1, (v>>1)&1, (v>>2)&1).
// Local edges: 0-3 along x, 4-7 along y, 8-11 along z.
// Local faces: -x, +x, -y, +y, -z, +z.
inline constexpr std::array<std::array<int, 2>, 12> kLocalEdgeVertices{{
    {0, 1}, {2, 3}, {4, 5}, {6, 7},
    {0, 2}, {1, 3}, {4, 6}, {5, 7},
    {0, 4}, {1, 5}, {2, 6}, {3, 7},
}};

inline constexpr std::array<std::array<int, 4>, 6> kLocalFaceVertices{{
    {0, 2, 4, 6}, {1, 3, 5, 7},
    {0, 1, 4, 5}, {2, 3, 6, 7},
    {0, 1, 2, 3}, {4, 5, 6, 7},
}};

inline constexpr std::array<std::array<int, 4>, 6> kLocalFaceEdges{{
    {4, 6, 8, 10}, {5, 7, 9, 11},
    {0, 2, 8, 9}, {1, 3, 10, 11},
    {0, 1, 4, 5}, {2, 3, 6, 7},
}};

inline constexpr int local_edge_axis(int local_edge) { return local_edge / 4; }

/// Uniform Cartesian cuboid mesh. Node, element, face and edge numbering is
/// lexicographic with x fastest; faces and edges are grouped by axis (x, y, z).
/// Connectivity is computed from index arithmetic, so the object is small and
/// immutable after construction.
class Mesh {
 public:
  Mesh(const BoxDomain& domain, const std::array<int, 3>& counts);

  const BoxDomain& domain() const { return domain_; }
  const std::array<int, 3>& counts() const { return counts_; }
  const Vec3& spacing() const { return spacing_; }
  /// Largest element side length.
  double h() const;
  double element_volume() const { return spacing_.prod(); }

  Index num_nodes() const;
  Index num_elements() const;
  Index num_faces() const;
  Index num_edges() const;

  Index node_index(int i, int j, int k) const;
  GridIndex node_grid(Index node) const;
  Vec3 node_point(Index node) const;
  bool is_boundary_node(Index node) const;
  std::vector<Index> boundary_nodes() const;

  Index element_index(int i, int j, int k) const;
  GridIndex element_grid(Index element) const;
  std::array<Index, 8> element_nodes(Index element) const;
  std::array<Index, 6> element_faces(Index element) const;
  std::array<Index, 12> element_edges(Index element) const;
  Vec3 element_lo(Index element) const;
  Vec3 element_hi(Index element) const;
  std::array<Vec3, 8> element_vertices(Index element) const;
  /// Element containing x (points on shared boundaries go to the upper element,
  /// clamped to the mesh).
  Index locate(const Vec3& x) const;

  Index face_index(int axis, int i, int j, int k) const;
  /// Axis of the face normal and the grid index of its lowest node.
  std::pair<int, GridIndex> face_grid(Index face) const;
  std::array<Index, 4> face_nodes(Index face) const;
  /// Face as an axis-aligned rectangle: (lo corner, hi corner).
  std::pair<Vec3, Vec3> face_box(Index face) const;
  FaceNeighbors face_neighbors(Index face) const;

  Index edge_index(int axis, int i, int j, int k) const;
  std::pair<int, GridIndex> edge_grid(Index edge) const;
  std::array<Index, 2> edge_nodes(Index edge) const;

 private:
  void check_element(Index element) const;
  void check_face(Index face) const;
  void check_edge(Index edge) const;

  BoxDomain domain_;
  std::array<int, 3> counts_;
  Vec3 spacing_;
  std::array<Index, 3> face_offset_{};
  std::array<Index, 3> edge_offset_{};
};

Mesh build_mesh(const BoxDomain& domain, const std::array<int, 3>& counts);

}  // namespace ppife
