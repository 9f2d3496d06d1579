#pragma once

#include <array>
#include <stdexcept>

#include "ppife/interface_geometry.hpp"
#include "ppife/q1poly.hpp"

namespace ppife {

/// Affine map X = lo + h * xi between an element and [0,1]^3.
struct ElementFrame {
  Vec3 lo = Vec3::Zero();
  Vec3 h = Vec3::Ones();

  Vec3 to_local(const Vec3& x) const { return (x - lo).cwiseQuotient(h); }
  Vec3 to_global(const Vec3& xi) const { return lo + xi.cwiseProduct(h); }
  /// Converts a gradient with respect to xi into one with respect to X.
  Vec3 grad_to_global(const Vec3& g) const { return g.cwiseQuotient(h); }
};

/// The approximating plane in local coordinates. `flux_dir` turns a local
/// gradient into the normal derivative, `level_dir` gives the signed distance.
struct LocalPlane {
  Vec3 centroid = Vec3::Zero();
  Vec3 flux_dir = Vec3::UnitZ();
  Vec3 level_dir = Vec3::UnitZ();

  double level(const Vec3& xi) const { return (xi - centroid).dot(level_dir); }
  Side side_of(const Vec3& xi) const { return level(xi) < 0.0 ? Side::Minus : Side::Plus; }
};

LocalPlane to_local(const ElementFrame& frame, const Plane& plane);

/// Plus-side polynomial p + (beta-/beta+ - 1)(grad p(F) . n)((X - F) . n).
Q1Poly extension_apply(const Q1Poly& p, const Plane& plane, const Betas& betas);
/// Inverse map, p + (beta+/beta- - 1)(grad p(F) . n)((X - F) . n).
Q1Poly extension_invert(const Q1Poly& p, const Plane& plane, const Betas& betas);

/// Lagrange IFE shape functions of an interface element, in local coordinates.
struct IFEBasis {
  Index element = 0;
  ElementFrame frame;
  Plane plane;
  LocalPlane local_plane;
  Betas betas;
  std::array<Side, 8> vertex_sides{};
  std::array<Q1Poly, 8> minus;
  std::array<Q1Poly, 8> plus;
  /// Reciprocal condition estimate of the 8x8 coefficient system.
  double rcond = 1.0;

  const std::array<Q1Poly, 8>& side(Side s) const { return s == Side::Minus ? minus : plus; }
  bool ill_conditioned() const { return rcond < 1e-12; }
};

class SingularBasisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

IFEBasis build_ife_basis(const ElementCut& cut, const Betas& betas);

/// Tensor-product nodal basis of [0,1]^3.
const std::array<Q1Poly, 8>& reference_basis();
/// Nodal basis of the cuboid [lo, lo + h] in global coordinates.
std::array<Q1Poly, 8> standard_basis(const Vec3& lo, const Vec3& h);

}  // namespace ppife
