#include "ppife/ife_basis.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace ppife {

namespace {

void check_inputs(const Plane& plane, const Betas& betas) {
  if (std::abs(plane.normal.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("extension operator: plane normal must be a unit vector");
  }
  if (!(betas.minus > 0.0 && betas.plus > 0.0)) {
    throw std::invalid_argument("extension operator: coefficients must be positive");
  }
}

// Product of three 1D factors (alpha_a + beta_a x_a) in monomial form.
Q1Poly tensor_product(const Vec3& alpha, const Vec3& beta) {
  Q1Poly p;
  p.c = {alpha[0] * alpha[1] * alpha[2], beta[0] * alpha[1] * alpha[2],
         alpha[0] * beta[1] * alpha[2],  alpha[0] * alpha[1] * beta[2],
         beta[0] * beta[1] * alpha[2],   beta[0] * alpha[1] * beta[2],
         alpha[0] * beta[1] * beta[2],   beta[0] * beta[1] * beta[2]};
  return p;
}

std::array<Q1Poly, 8> make_reference_basis() {
  return standard_basis(Vec3::Zero(), Vec3::Ones());
}

}  // namespace

LocalPlane to_local(const ElementFrame& frame, const Plane& plane) {
  LocalPlane lp;
  lp.centroid = frame.to_local(plane.point);
  lp.flux_dir = plane.normal.cwiseQuotient(frame.h);
  lp.level_dir = plane.normal.cwiseProduct(frame.h);
  return lp;
}

Q1Poly extension_apply(const Q1Poly& p, const Plane& plane, const Betas& betas) {
  check_inputs(plane, betas);
  return extend(p, plane.point, plane.normal, plane.normal, betas.minus / betas.plus - 1.0);
}

Q1Poly extension_invert(const Q1Poly& p, const Plane& plane, const Betas& betas) {
  check_inputs(plane, betas);
  return extend(p, plane.point, plane.normal, plane.normal, betas.plus / betas.minus - 1.0);
}

std::array<Q1Poly, 8> standard_basis(const Vec3& lo, const Vec3& h) {
  std::array<Q1Poly, 8> out;
  for (int v = 0; v < 8; ++v) {
    Vec3 alpha, beta;
    for (int a = 0; a < 3; ++a) {
      const bool upper = (v >> a) & 1;
      // (x - lo)/h on the upper vertex, (lo + h - x)/h on the lower one.
      alpha[a] = upper ? -lo[a] / h[a] : (lo[a] + h[a]) / h[a];
      beta[a] = upper ? 1.0 / h[a] : -1.0 / h[a];
    }
    out[v] = tensor_product(alpha, beta);
  }
  return out;
}

const std::array<Q1Poly, 8>& reference_basis() {
  static const std::array<Q1Poly, 8> basis = make_reference_basis();
  return basis;
}

IFEBasis build_ife_basis(const ElementCut& cut, const Betas& betas) {
  if (!cut.is_interface() || !cut.plane) {
    throw std::invalid_argument(
        fmt::format("build_ife_basis: element {} is not an interface element", cut.element));
  }
  if (!(betas.minus > 0.0 && betas.plus > 0.0)) {
    throw std::invalid_argument("build_ife_basis: coefficients must be positive");
  }
  IFEBasis basis;
  basis.element = cut.element;
  basis.frame = {cut.lo(), cut.spacing()};
  basis.plane = cut.plane->plane();
  basis.local_plane = to_local(basis.frame, basis.plane);
  basis.betas = betas;
  basis.vertex_sides = cut.vertex_sides;

  const LocalPlane& lp = basis.local_plane;
  const double r = betas.minus / betas.plus - 1.0;
  const auto grads_at_f = Q1Poly::monomial_gradients(lp.centroid);
  Eigen::Matrix<double, 8, 8> m;
  for (int j = 0; j < 8; ++j) {
    const Vec3 xi(j & 1, (j >> 1) & 1, (j >> 2) & 1);
    const auto mono = Q1Poly::monomials(xi);
    const double level = lp.level(xi);
    for (int k = 0; k < 8; ++k) {
      m(j, k) = mono[k];
      if (cut.vertex_sides[j] == Side::Plus) m(j, k) += r * level * grads_at_f[k].dot(lp.flux_dir);
    }
  }
  const Eigen::PartialPivLU<Eigen::Matrix<double, 8, 8>> lu(m);
  basis.rcond = lu.rcond();
  if (!(basis.rcond > 0.0) || !std::isfinite(lu.determinant()) || lu.determinant() == 0.0) {
    throw SingularBasisError(
        fmt::format("build_ife_basis: singular coefficient system on element {}", cut.element));
  }
  Eigen::Matrix<double, 8, 8> coeffs = lu.solve(Eigen::Matrix<double, 8, 8>::Identity());
  // one refinement step; high contrast leaves residuals near 1e-12 otherwise
  coeffs += lu.solve(Eigen::Matrix<double, 8, 8>::Identity() - m * coeffs);
  for (int i = 0; i < 8; ++i) {
    for (int k = 0; k < 8; ++k) basis.minus[i].c[k] = coeffs(k, i);
    basis.plus[i] = extend(basis.minus[i], lp.centroid, lp.flux_dir, lp.level_dir, r);
  }
  return basis;
}

}  // namespace ppife
