#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace ppife {

using Vec3 = Eigen::Vector3d;
using Index = std::int64_t;

using ScalarFn = std::function<double(const Vec3&)>;
using VectorFn = std::function<Vec3(const Vec3&)>;

/// Which subdomain a point, vertex or polynomial piece belongs to.
enum class Side : std::uint8_t { Minus, Plus };

inline constexpr Side opposite(Side s) { return s == Side::Minus ? Side::Plus : Side::Minus; }

/// Piecewise constant diffusion coefficient.
struct Betas {
  double minus = 1.0;
  double plus = 1.0;

  double operator[](Side s) const { return s == Side::Minus ? minus : plus; }
  double max() const { return minus > plus ? minus : plus; }
};

/// Plane through `point` with unit `normal`.
struct Plane {
  Vec3 point;
  Vec3 normal;

  double signed_distance(const Vec3& x) const { return (x - point).dot(normal); }
};

}  // namespace ppife
