#include "ppife/level_set.hpp"

#include <stdexcept>
#include <utility>

namespace ppife {

LevelSetField::LevelSetField(ScalarFn value, VectorFn gradient,
                             std::optional<double> curvature_bound, std::optional<double> reach)
    : value_(std::move(value)),
      gradient_(std::move(gradient)),
      curvature_bound_(curvature_bound),
      reach_(reach) {
  if (!value_) throw std::invalid_argument("LevelSetField: value evaluator is required");
  if (curvature_bound_ && *curvature_bound_ < 0.0) {
    throw std::invalid_argument("LevelSetField: curvature bound must be >= 0");
  }
  if (reach_ && *reach_ <= 0.0) throw std::invalid_argument("LevelSetField: reach must be > 0");
}

Vec3 LevelSetField::gradient(const Vec3& x, double h) const {
  if (gradient_) return gradient_(x);
  const double step = 1e-6 * h;
  Vec3 g;
  for (int a = 0; a < 3; ++a) {
    Vec3 xp = x;
    Vec3 xm = x;
    xp[a] += step;
    xm[a] -= step;
    g[a] = (value_(xp) - value_(xm)) / (2.0 * step);
  }
  return g;
}

Vec3 LevelSetField::unit_normal(const Vec3& x, double h) const {
  const Vec3 g = gradient(x, h);
  const double n = g.norm();
  return n > 0.0 ? Vec3(g / n) : Vec3::Zero();
}

LevelSetField LevelSetField::negated() const {
  ScalarFn v = [f = value_](const Vec3& x) { return -f(x); };
  VectorFn g;
  if (gradient_) g = [f = gradient_](const Vec3& x) { return Vec3(-f(x)); };
  return LevelSetField(std::move(v), std::move(g), curvature_bound_, reach_);
}

LevelSetField plane_level_set(const Vec3& normal, double offset) {
  const double len = normal.norm();
  if (len == 0.0) throw std::invalid_argument("plane_level_set: zero normal");
  const Vec3 n = normal / len;
  const double c = offset / len;
  return LevelSetField([n, c](const Vec3& x) { return n.dot(x) - c; },
                       [n](const Vec3&) { return n; }, 0.0,
                       std::numeric_limits<double>::infinity());
}

LevelSetField sphere_level_set(const Vec3& center, double radius) {
  if (radius <= 0.0) throw std::invalid_argument("sphere_level_set: radius must be > 0");
  return LevelSetField(
      [center, radius](const Vec3& x) { return (x - center).squaredNorm() - radius * radius; },
      [center](const Vec3& x) { return Vec3(2.0 * (x - center)); }, 1.0 / radius, radius);
}

namespace {

constexpr double kOrthoK = 0.075 * 0.075;

struct TorusFactor {
  double value;
  Vec3 grad;
  double lap;
};

// ((a^2 + b^2 - 1)^2 + c^2) where (a, b) span the torus plane and c is normal to it.
TorusFactor torus_factor(const Vec3& x, int a, int b, int c) {
  const double q = x[a] * x[a] + x[b] * x[b] - 1.0;
  TorusFactor f;
  f.value = q * q + x[c] * x[c];
  f.grad = Vec3::Zero();
  f.grad[a] = 4.0 * x[a] * q;
  f.grad[b] = 4.0 * x[b] * q;
  f.grad[c] = 2.0 * x[c];
  f.lap = 16.0 * (x[a] * x[a] + x[b] * x[b]) - 6.0;
  return f;
}

}  // namespace

double orthocircle_value(const Vec3& x) {
  const auto A = torus_factor(x, 0, 1, 2);
  const auto B = torus_factor(x, 0, 2, 1);
  const auto C = torus_factor(x, 1, 2, 0);
  return A.value * B.value * C.value - kOrthoK * (1.0 + 3.0 * x.squaredNorm());
}

Vec3 orthocircle_gradient(const Vec3& x) {
  const auto A = torus_factor(x, 0, 1, 2);
  const auto B = torus_factor(x, 0, 2, 1);
  const auto C = torus_factor(x, 1, 2, 0);
  return A.grad * (B.value * C.value) + B.grad * (A.value * C.value) +
         C.grad * (A.value * B.value) - 6.0 * kOrthoK * x;
}

double orthocircle_laplacian(const Vec3& x) {
  const auto A = torus_factor(x, 0, 1, 2);
  const auto B = torus_factor(x, 0, 2, 1);
  const auto C = torus_factor(x, 1, 2, 0);
  return A.lap * B.value * C.value + A.value * B.lap * C.value + A.value * B.value * C.lap +
         2.0 * (C.value * A.grad.dot(B.grad) + B.value * A.grad.dot(C.grad) +
                A.value * B.grad.dot(C.grad)) -
         18.0 * kOrthoK;
}

LevelSetField orthocircle_level_set() {
  return LevelSetField(orthocircle_value, orthocircle_gradient);
}

}  // namespace ppife
