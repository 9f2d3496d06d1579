#include "ppife/discretization.hpp"

#include <stdexcept>

#include "parallel.hpp"

namespace ppife {

Discretization::Discretization(Mesh mesh, MeshClassification classification, const Betas& betas)
    : mesh_(std::move(mesh)), cls_(std::move(classification)), betas_(betas) {
  if (Index(cls_.kinds.size()) != mesh_.num_elements()) {
    throw std::invalid_argument("Discretization: classification does not match the mesh");
  }
  bases_.resize(cls_.interface_cuts.size());
  const Index n = Index(bases_.size());
  detail::parallel_for(n, [&](Index s) { bases_[s] = build_ife_basis(cls_.interface_cuts[s], betas_); });
}

const IFEBasis* Discretization::basis_of(Index e) const {
  const auto s = cls_.interface_slot[e];
  return s < 0 ? nullptr : &bases_[s];
}

Side Discretization::fixed_side(Index e) const {
  return cls_.kinds[e] == CutKind::NonInterfaceMinus ? Side::Minus : Side::Plus;
}

ElementFrame Discretization::frame(Index e) const {
  return {mesh_.element_lo(e), mesh_.spacing()};
}

Side Discretization::piece_at(Index e, const Vec3& x) const {
  const IFEBasis* b = basis_of(e);
  return b ? b->local_plane.side_of(b->frame.to_local(x)) : fixed_side(e);
}

const std::array<Q1Poly, 8>& Discretization::polys(Index e, Side piece) const {
  const IFEBasis* b = basis_of(e);
  return b ? b->side(piece) : reference_basis();
}

void Discretization::shape(Index e, const Vec3& x, Side piece, std::array<double, 8>& values,
                           std::array<Vec3, 8>& grads) const {
  const ElementFrame fr = frame(e);
  const Vec3 xi = fr.to_local(x);
  const auto& p = polys(e, piece);
  const auto mono = Q1Poly::monomials(xi);
  const auto mgrad = Q1Poly::monomial_gradients(xi);
  for (int i = 0; i < 8; ++i) {
    double v = 0.0;
    Vec3 g = Vec3::Zero();
    for (int k = 0; k < 8; ++k) {
      v += p[i].c[k] * mono[k];
      g += p[i].c[k] * mgrad[k];
    }
    values[i] = v;
    grads[i] = fr.grad_to_global(g);
  }
}

Discretization build_discretization(const Mesh& mesh, const LevelSetField& ls, const Betas& betas,
                                    ViolationPolicy policy) {
  return Discretization(mesh, classify_mesh(ls, mesh, policy), betas);
}

DiscreteFunction::DiscreteFunction(const Discretization& disc, Eigen::VectorXd coeffs)
    : disc_(&disc), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != disc.num_dofs()) {
    throw std::invalid_argument("DiscreteFunction: coefficient vector has the wrong length");
  }
}

double DiscreteFunction::value_in(Index e, const Vec3& x, Side piece) const {
  std::array<double, 8> v;
  std::array<Vec3, 8> g;
  disc_->shape(e, x, piece, v, g);
  const auto nodes = disc_->mesh().element_nodes(e);
  double out = 0.0;
  for (int i = 0; i < 8; ++i) out += coeffs_[nodes[i]] * v[i];
  return out;
}

Vec3 DiscreteFunction::gradient_in(Index e, const Vec3& x, Side piece) const {
  std::array<double, 8> v;
  std::array<Vec3, 8> g;
  disc_->shape(e, x, piece, v, g);
  const auto nodes = disc_->mesh().element_nodes(e);
  Vec3 out = Vec3::Zero();
  for (int i = 0; i < 8; ++i) out += coeffs_[nodes[i]] * g[i];
  return out;
}

double DiscreteFunction::value(const Vec3& x) const {
  const Index e = disc_->mesh().locate(x);
  return value_in(e, x, disc_->piece_at(e, x));
}

Vec3 DiscreteFunction::gradient(const Vec3& x) const {
  const Index e = disc_->mesh().locate(x);
  return gradient_in(e, x, disc_->piece_at(e, x));
}

Eigen::VectorXd interpolate(const Discretization& disc, const SidedScalarFn& u) {
  const Mesh& mesh = disc.mesh();
  const Index n = mesh.num_nodes();
  Eigen::VectorXd out(n);
  const auto& sides = disc.classification().node_sides;
  detail::parallel_for(n, [&](Index i) { out[i] = u(mesh.node_point(i), sides[i]); });
  return out;
}

}  // namespace ppife
