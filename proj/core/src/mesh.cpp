#include "ppife/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ppife {

BoxDomain::BoxDomain(const Vec3& lo, const Vec3& hi) : lo_(lo), hi_(hi) {
  if (!((hi.array() > lo.array()).all())) {
    throw std::invalid_argument("BoxDomain: hi must exceed lo in every component");
  }
}

double BoxDomain::volume() const { return extent().prod(); }

bool BoxDomain::contains(const Vec3& x) const {
  return (x.array() >= lo_.array()).all() && (x.array() <= hi_.array()).all();
}

Mesh::Mesh(const BoxDomain& domain, const std::array<int, 3>& counts)
    : domain_(domain), counts_(counts) {
  for (int n : counts) {
    if (n < 1) {
      throw std::invalid_argument("Mesh: element counts must be >= 1, got " + std::to_string(n));
    }
  }
  const auto [nx, ny, nz] = counts_;
  spacing_ = domain.extent().cwiseQuotient(Vec3(nx, ny, nz));

  const Index fx = Index(nx + 1) * ny * nz;
  const Index fy = Index(nx) * (ny + 1) * nz;
  face_offset_ = {0, fx, fx + fy};

  const Index ex = Index(nx) * (ny + 1) * (nz + 1);
  const Index ey = Index(nx + 1) * ny * (nz + 1);
  edge_offset_ = {0, ex, ex + ey};
}

Mesh build_mesh(const BoxDomain& domain, const std::array<int, 3>& counts) {
  return Mesh(domain, counts);
}

double Mesh::h() const { return spacing_.maxCoeff(); }

Index Mesh::num_nodes() const {
  return Index(counts_[0] + 1) * (counts_[1] + 1) * (counts_[2] + 1);
}

Index Mesh::num_elements() const { return Index(counts_[0]) * counts_[1] * counts_[2]; }

Index Mesh::num_faces() const {
  return face_offset_[2] + Index(counts_[0]) * counts_[1] * (counts_[2] + 1);
}

Index Mesh::num_edges() const {
  return edge_offset_[2] + Index(counts_[0] + 1) * (counts_[1] + 1) * counts_[2];
}

Index Mesh::node_index(int i, int j, int k) const {
  return i + Index(counts_[0] + 1) * (j + Index(counts_[1] + 1) * k);
}

GridIndex Mesh::node_grid(Index node) const {
  if (node < 0 || node >= num_nodes()) throw std::out_of_range("Mesh: node index out of range");
  const Index sx = counts_[0] + 1;
  const Index sy = counts_[1] + 1;
  return {int(node % sx), int((node / sx) % sy), int(node / (sx * sy))};
}

Vec3 Mesh::node_point(Index node) const {
  const GridIndex g = node_grid(node);
  return domain_.lo() + Vec3(g.i, g.j, g.k).cwiseProduct(spacing_);
}

bool Mesh::is_boundary_node(Index node) const {
  const GridIndex g = node_grid(node);
  return g.i == 0 || g.j == 0 || g.k == 0 || g.i == counts_[0] || g.j == counts_[1] ||
         g.k == counts_[2];
}

std::vector<Index> Mesh::boundary_nodes() const {
  std::vector<Index> out;
  for (Index n = 0; n < num_nodes(); ++n) {
    if (is_boundary_node(n)) out.push_back(n);
  }
  return out;
}

void Mesh::check_element(Index element) const {
  if (element < 0 || element >= num_elements()) {
    throw std::out_of_range("Mesh: element index out of range");
  }
}

void Mesh::check_face(Index face) const {
  if (face < 0 || face >= num_faces()) throw std::out_of_range("Mesh: face index out of range");
}

void Mesh::check_edge(Index edge) const {
  if (edge < 0 || edge >= num_edges()) throw std::out_of_range("Mesh: edge index out of range");
}

Index Mesh::element_index(int i, int j, int k) const {
  return i + Index(counts_[0]) * (j + Index(counts_[1]) * k);
}

GridIndex Mesh::element_grid(Index element) const {
  check_element(element);
  const Index sx = counts_[0];
  const Index sy = counts_[1];
  return {int(element % sx), int((element / sx) % sy), int(element / (sx * sy))};
}

std::array<Index, 8> Mesh::element_nodes(Index element) const {
  const GridIndex g = element_grid(element);
  std::array<Index, 8> out{};
  for (int v = 0; v < 8; ++v) {
    out[v] = node_index(g.i + (v & 1), g.j + ((v >> 1) & 1), g.k + ((v >> 2) & 1));
  }
  return out;
}

std::array<Index, 6> Mesh::element_faces(Index element) const {
  const GridIndex g = element_grid(element);
  return {face_index(0, g.i, g.j, g.k), face_index(0, g.i + 1, g.j, g.k),
          face_index(1, g.i, g.j, g.k), face_index(1, g.i, g.j + 1, g.k),
          face_index(2, g.i, g.j, g.k), face_index(2, g.i, g.j, g.k + 1)};
}

std::array<Index, 12> Mesh::element_edges(Index element) const {
  const GridIndex g = element_grid(element);
  std::array<Index, 12> out{};
  for (int m = 0; m < 4; ++m) {
    const int p = m & 1;
    const int q = (m >> 1) & 1;
    out[m] = edge_index(0, g.i, g.j + p, g.k + q);
    out[4 + m] = edge_index(1, g.i + p, g.j, g.k + q);
    out[8 + m] = edge_index(2, g.i + p, g.j + q, g.k);
  }
  return out;
}

Vec3 Mesh::element_lo(Index element) const {
  const GridIndex g = element_grid(element);
  return domain_.lo() + Vec3(g.i, g.j, g.k).cwiseProduct(spacing_);
}

Vec3 Mesh::element_hi(Index element) const { return element_lo(element) + spacing_; }

std::array<Vec3, 8> Mesh::element_vertices(Index element) const {
  const Vec3 lo = element_lo(element);
  std::array<Vec3, 8> out;
  for (int v = 0; v < 8; ++v) {
    out[v] = lo + Vec3(v & 1, (v >> 1) & 1, (v >> 2) & 1).cwiseProduct(spacing_);
  }
  return out;
}

Index Mesh::locate(const Vec3& x) const {
  std::array<int, 3> g{};
  for (int a = 0; a < 3; ++a) {
    const double t = (x[a] - domain_.lo()[a]) / spacing_[a];
    g[a] = std::clamp(static_cast<int>(std::floor(t)), 0, counts_[a] - 1);
  }
  return element_index(g[0], g[1], g[2]);
}

Index Mesh::face_index(int axis, int i, int j, int k) const {
  const auto [nx, ny, nz] = counts_;
  switch (axis) {
    case 0: return face_offset_[0] + i + Index(nx + 1) * (j + Index(ny) * k);
    case 1: return face_offset_[1] + i + Index(nx) * (j + Index(ny + 1) * k);
    case 2: return face_offset_[2] + i + Index(nx) * (j + Index(ny) * k);
    default: throw std::invalid_argument("Mesh: axis must be 0, 1 or 2");
  }
}

std::pair<int, GridIndex> Mesh::face_grid(Index face) const {
  check_face(face);
  const auto [nx, ny, nz] = counts_;
  const int axis = face >= face_offset_[2] ? 2 : (face >= face_offset_[1] ? 1 : 0);
  const Index local = face - face_offset_[axis];
  const Index sx = axis == 0 ? nx + 1 : nx;
  const Index sy = axis == 1 ? ny + 1 : ny;
  return {axis, {int(local % sx), int((local / sx) % sy), int(local / (sx * sy))}};
}

std::array<Index, 4> Mesh::face_nodes(Index face) const {
  const auto [axis, g] = face_grid(face);
  const int u = (axis + 1) % 3;
  const int w = (axis + 2) % 3;
  std::array<Index, 4> out{};
  for (int m = 0; m < 4; ++m) {
    std::array<int, 3> c{g.i, g.j, g.k};
    c[u] += m & 1;
    c[w] += (m >> 1) & 1;
    out[m] = node_index(c[0], c[1], c[2]);
  }
  return out;
}

std::pair<Vec3, Vec3> Mesh::face_box(Index face) const {
  const auto [axis, g] = face_grid(face);
  const Vec3 lo = domain_.lo() + Vec3(g.i, g.j, g.k).cwiseProduct(spacing_);
  Vec3 hi = lo + spacing_;
  hi[axis] = lo[axis];
  return {lo, hi};
}

FaceNeighbors Mesh::face_neighbors(Index face) const {
  const auto [axis, g] = face_grid(face);
  std::array<int, 3> c{g.i, g.j, g.k};
  FaceNeighbors out;
  out.axis = axis;
  out.normal = Vec3::Zero();
  out.normal[axis] = 1.0;
  if (c[axis] == 0) {
    out.first = element_index(c[0], c[1], c[2]);
    out.normal[axis] = -1.0;
    return out;
  }
  std::array<int, 3> below = c;
  below[axis] -= 1;
  out.first = element_index(below[0], below[1], below[2]);
  if (c[axis] < counts_[axis]) out.second = element_index(c[0], c[1], c[2]);
  return out;
}

Index Mesh::edge_index(int axis, int i, int j, int k) const {
  const auto [nx, ny, nz] = counts_;
  switch (axis) {
    case 0: return edge_offset_[0] + i + Index(nx) * (j + Index(ny + 1) * k);
    case 1: return edge_offset_[1] + i + Index(nx + 1) * (j + Index(ny) * k);
    case 2: return edge_offset_[2] + i + Index(nx + 1) * (j + Index(ny + 1) * k);
    default: throw std::invalid_argument("Mesh: axis must be 0, 1 or 2");
  }
}

std::pair<int, GridIndex> Mesh::edge_grid(Index edge) const {
  check_edge(edge);
  const auto [nx, ny, nz] = counts_;
  const int axis = edge >= edge_offset_[2] ? 2 : (edge >= edge_offset_[1] ? 1 : 0);
  const Index local = edge - edge_offset_[axis];
  const Index sx = axis == 0 ? nx : nx + 1;
  const Index sy = axis == 1 ? ny : ny + 1;
  return {axis, {int(local % sx), int((local / sx) % sy), int(local / (sx * sy))}};
}

std::array<Index, 2> Mesh::edge_nodes(Index edge) const {
  const auto [axis, g] = edge_grid(edge);
  std::array<int, 3> c{g.i, g.j, g.k};
  const Index a = node_index(c[0], c[1], c[2]);
  c[axis] += 1;
  return {a, node_index(c[0], c[1], c[2])};
}

}  // namespace ppife
