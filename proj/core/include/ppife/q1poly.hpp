#pragma once

#include <array>

#include "ppife/geometry.hpp"

namespace ppife {

/// Trilinear polynomial with coefficients in the basis {1, x, y, z, xy, xz, yz, xyz}.
struct Q1Poly {
  std::array<double, 8> c{};

  static std::array<double, 8> monomials(const Vec3& x) {
    return {1.0, x[0], x[1], x[2], x[0] * x[1], x[0] * x[2], x[1] * x[2], x[0] * x[1] * x[2]};
  }

  /// Gradients of the monomials, one row per monomial.
  static std::array<Vec3, 8> monomial_gradients(const Vec3& x) {
    return {Vec3(0, 0, 0),
            Vec3(1, 0, 0),
            Vec3(0, 1, 0),
            Vec3(0, 0, 1),
            Vec3(x[1], x[0], 0),
            Vec3(x[2], 0, x[0]),
            Vec3(0, x[2], x[1]),
            Vec3(x[1] * x[2], x[0] * x[2], x[0] * x[1])};
  }

  double eval(const Vec3& x) const {
    return c[0] + c[1] * x[0] + c[2] * x[1] + c[3] * x[2] + c[4] * x[0] * x[1] +
           c[5] * x[0] * x[2] + c[6] * x[1] * x[2] + c[7] * x[0] * x[1] * x[2];
  }

  Vec3 grad(const Vec3& x) const {
    return {c[1] + c[4] * x[1] + c[5] * x[2] + c[7] * x[1] * x[2],
            c[2] + c[4] * x[0] + c[6] * x[2] + c[7] * x[0] * x[2],
            c[3] + c[5] * x[0] + c[6] * x[1] + c[7] * x[0] * x[1]};
  }

  /// Coefficients of xy, xz, yz, xyz.
  std::array<double, 4> d() const { return {c[4], c[5], c[6], c[7]}; }

  Q1Poly& operator+=(const Q1Poly& o) {
    for (int i = 0; i < 8; ++i) c[i] += o.c[i];
    return *this;
  }
  Q1Poly& operator*=(double s) {
    for (double& v : c) v *= s;
    return *this;
  }
  friend Q1Poly operator+(Q1Poly a, const Q1Poly& b) { return a += b; }
  friend Q1Poly operator*(double s, Q1Poly a) { return a *= s; }
  friend bool operator==(const Q1Poly&, const Q1Poly&) = default;
};

/// Affine polynomial (X - point) . dir as a Q1Poly.
inline Q1Poly affine_level(const Vec3& point, const Vec3& dir) {
  Q1Poly p;
  p.c[0] = -point.dot(dir);
  p.c[1] = dir[0];
  p.c[2] = dir[1];
  p.c[3] = dir[2];
  return p;
}

/// p + r * (grad p(F) . a) * ((X - F) . b). With a = b = nbar this is the
/// extension operator in the coordinates p is written in; under the scaling
/// X = lo + h * xi it becomes a = nbar / h, b = h * nbar.
inline Q1Poly extend(const Q1Poly& p, const Vec3& F, const Vec3& a, const Vec3& b, double r) {
  const double flux = p.grad(F).dot(a);
  return p + (r * flux) * affine_level(F, b);
}

}  // namespace ppife
