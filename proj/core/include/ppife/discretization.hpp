#pragma once

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "ppife/ife_basis.hpp"
#include "ppife/interface_geometry.hpp"
#include "ppife/mesh.hpp"

namespace ppife {

/// Exact-solution style evaluators that receive the subdomain of the point.
using SidedScalarFn = std::function<double(const Vec3&, Side)>;
using SidedVectorFn = std::function<Vec3(const Vec3&, Side)>;

/// Mesh, interface classification and local shape functions for the global
/// IFE space. Non-interface elements share the reference trilinear basis.
class Discretization {
 public:
  Discretization(Mesh mesh, MeshClassification classification, const Betas& betas);

  const Mesh& mesh() const { return mesh_; }
  const MeshClassification& classification() const { return cls_; }
  const Betas& betas() const { return betas_; }
  const std::vector<IFEBasis>& interface_bases() const { return bases_; }

  bool is_interface(Index e) const { return cls_.interface_slot[e] >= 0; }
  const IFEBasis* basis_of(Index e) const;
  /// Subdomain of a non-interface element.
  Side fixed_side(Index e) const;
  ElementFrame frame(Index e) const;

  /// Polynomial piece used at X inside element e: plane side on interface
  /// elements, the element's subdomain otherwise.
  Side piece_at(Index e, const Vec3& x) const;
  const std::array<Q1Poly, 8>& polys(Index e, Side piece) const;

  /// Shape values and global gradients of element e's piece at X.
  void shape(Index e, const Vec3& x, Side piece, std::array<double, 8>& values,
             std::array<Vec3, 8>& grads) const;

  Index num_dofs() const { return mesh_.num_nodes(); }

 private:
  Mesh mesh_;
  MeshClassification cls_;
  Betas betas_;
  std::vector<IFEBasis> bases_;
};

Discretization build_discretization(const Mesh& mesh, const LevelSetField& ls, const Betas& betas,
                                    ViolationPolicy policy = ViolationPolicy::Throw);

/// A nodal coefficient vector viewed as a function of the IFE space.
class DiscreteFunction {
 public:
  DiscreteFunction(const Discretization& disc, Eigen::VectorXd coeffs);

  const Eigen::VectorXd& coefficients() const { return coeffs_; }
  const Discretization& discretization() const { return *disc_; }

  double value(const Vec3& x) const;
  Vec3 gradient(const Vec3& x) const;
  double value_in(Index e, const Vec3& x, Side piece) const;
  Vec3 gradient_in(Index e, const Vec3& x, Side piece) const;

 private:
  const Discretization* disc_;
  Eigen::VectorXd coeffs_;
};

/// Nodal interpolant: the coefficient at node X is u(X) with the side taken
/// from the level-set sign of X.
Eigen::VectorXd interpolate(const Discretization& disc, const SidedScalarFn& u);

}  // namespace ppife
