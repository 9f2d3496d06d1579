#pragma once

#include <limits>
#include <optional>

#include "ppife/geometry.hpp"

namespace ppife {

/// Interface description: negative values are the minus subdomain, positive
/// values the plus subdomain. Evaluators must be safe to call concurrently.
class LevelSetField {
 public:
  LevelSetField(ScalarFn value, VectorFn gradient = {},
                std::optional<double> curvature_bound = std::nullopt,
                std::optional<double> reach = std::nullopt);

  double operator()(const Vec3& x) const { return value_(x); }
  double value(const Vec3& x) const { return value_(x); }

  bool has_gradient() const { return static_cast<bool>(gradient_); }
  /// Analytic gradient when supplied, else central differences with step 1e-6*h.
  Vec3 gradient(const Vec3& x, double h) const;
  Vec3 unit_normal(const Vec3& x, double h) const;

  /// Bound on the principal curvatures (1/length), if known.
  const std::optional<double>& curvature_bound() const { return curvature_bound_; }
  /// Reach of the zero set (length), if known.
  const std::optional<double>& reach() const { return reach_; }

  /// The same interface with the two subdomains swapped.
  LevelSetField negated() const;

 private:
  ScalarFn value_;
  VectorFn gradient_;
  std::optional<double> curvature_bound_;
  std::optional<double> reach_;
};

/// Minus iff value <= -snap_tol: vertices within snap_tol of the interface
/// are assigned to the plus side.
inline Side classify_value(double value, double snap_tol) {
  return value <= -snap_tol ? Side::Minus : Side::Plus;
}

/// gamma(x) = (normal . x - offset) / |normal|.
LevelSetField plane_level_set(const Vec3& normal, double offset);

/// gamma(x) = |x - center|^2 - radius^2.
LevelSetField sphere_level_set(const Vec3& center, double radius);

/// Orthocircle surface: three mutually orthogonal tori of unit radius.
LevelSetField orthocircle_level_set();
double orthocircle_value(const Vec3& x);
Vec3 orthocircle_gradient(const Vec3& x);
double orthocircle_laplacian(const Vec3& x);

}  // namespace ppife
