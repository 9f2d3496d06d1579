#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "ppife/discretization.hpp"
#include "ppife/quadrature.hpp"

namespace ppife {

enum class QuadratureMode {
  /// Tetrahedra of the plane-cut sub-elements; pieces and coefficients by plane side.
  PlaneCut,
  /// Subdivided Gauss rule; pieces and coefficients by level-set sign per point.
  LevelSetSign,
};

const char* to_string(QuadratureMode mode);
QuadratureMode parse_quadrature_mode(const std::string& name);

struct SchemeParams {
  int epsilon = -1;
  double sigma0 = 10.0;
  Betas betas;
  QuadratureMode quadrature = QuadratureMode::PlaneCut;
  /// Sub-boxes per axis for LevelSetSign integration on interface elements.
  int levelset_subdivisions = 4;

  /// sigma0 * (beta+)^2 / beta-.
  double sigma() const { return sigma0 * betas.plus * betas.plus / betas.minus; }
  void validate() const;
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct LinearSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  std::vector<Index> dirichlet_nodes;
  Eigen::VectorXd dirichlet_values;  // same order as dirichlet_nodes
};

/// A quadrature rule on which one polynomial piece (and its coefficient) applies.
struct VolumePiece {
  QuadRule rule;
  Side piece = Side::Plus;
};

std::vector<VolumePiece> volume_pieces(const Discretization& disc, Index e,
                                       const LevelSetField& ls, const SchemeParams& params,
                                       int cuboid_order = 3);

/// Interior faces with at least one interface neighbor, in increasing index order.
std::vector<Index> interface_faces(const Discretization& disc);

FaceQuad interface_face_quadrature(const Discretization& disc, Index face,
                                   const LevelSetField& ls, const SchemeParams& params);

/// Local matrix of the face terms over the 16 dofs (first element's nodes, then
/// the second's); row = test function.
Eigen::Matrix<double, 16, 16> face_matrix(const Discretization& disc, Index face,
                                          const FaceQuad& quad, const SchemeParams& params);

/// Boundary faces of interface elements. IFE shape functions of interior nodes
/// need not vanish there, so these faces carry the flux term with g as the
/// outside trace (Nitsche form with the same epsilon and sigma).
std::vector<Index> boundary_interface_faces(const Discretization& disc);
FaceQuad boundary_face_quadrature(const Discretization& disc, Index face,
                                  const LevelSetField& ls, const SchemeParams& params);

struct BoundaryFaceTerms {
  Eigen::Matrix<double, 8, 8> matrix;
  Eigen::Matrix<double, 8, 1> rhs;
};
BoundaryFaceTerms boundary_face_terms(const Discretization& disc, Index face,
                                      const FaceQuad& quad, const SchemeParams& params,
                                      const ScalarFn& g);

Eigen::Matrix<double, 8, 8> element_stiffness(const Discretization& disc,
                                              const std::vector<VolumePiece>& pieces,
                                              Index e);

struct AssemblyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Full system over all nodes before boundary elimination. The load uses f on
/// the level-set side of each quadrature point.
LinearSystem assemble(const Discretization& disc, const LevelSetField& ls,
                      const SchemeParams& params, const SidedScalarFn& f, const ScalarFn& g);

struct ReducedSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  std::vector<Index> interior;      // reduced index -> node
  Eigen::VectorXd boundary_values;  // full-length vector holding g on boundary nodes
};

/// Symmetric elimination of the Dirichlet nodes.
ReducedSystem apply_dirichlet(const LinearSystem& system);
Eigen::VectorXd expand_solution(const ReducedSystem& reduced, const Eigen::VectorXd& x);

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Preconditioned CG when symmetric (epsilon = -1), BiCGSTAB otherwise.
Eigen::VectorXd solve(const ReducedSystem& system, int epsilon, double tol = 1e-10,
                      int max_iter = 20000, SolveStats* stats = nullptr);

}  // namespace ppife
