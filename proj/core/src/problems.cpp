#include "ppife/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ppife {

GammaOverBeta gamma_over_beta(ScalarFn gamma, VectorFn grad, ScalarFn laplacian,
                              const Betas& betas) {
  auto side_of = [gamma](const Vec3& x) { return gamma(x) <= 0.0 ? Side::Minus : Side::Plus; };
  GammaOverBeta out;
  out.exact.u = [gamma, betas](const Vec3& x, Side) {
    const double v = gamma(x);
    return v / (v <= 0.0 ? betas.minus : betas.plus);
  };
  out.exact.grad = [gamma, grad, betas](const Vec3& x, Side) {
    return Vec3(grad(x) / (gamma(x) <= 0.0 ? betas.minus : betas.plus));
  };
  out.f = [laplacian](const Vec3& x, Side) { return -laplacian(x); };
  out.g = [gamma, betas, side_of](const Vec3& x) { return gamma(x) / betas[side_of(x)]; };
  return out;
}

namespace {

Problem from_gamma(std::string name, const BoxDomain& domain, const LevelSetField& ls,
                   ScalarFn gamma, VectorFn grad, ScalarFn laplacian, const Betas& betas) {
  const GammaOverBeta s = gamma_over_beta(std::move(gamma), std::move(grad), std::move(laplacian), betas);
  Problem p;
  p.name = std::move(name);
  p.domain = domain;
  p.betas = betas;
  p.interface = [ls](const Mesh&) { return ls; };
  p.f = s.f;
  p.g = s.g;
  p.exact = s.exact;
  return p;
}

}  // namespace

Problem plane_problem(const Betas& betas) {
  const Vec3 normal(1.0, 0.0, 1.0);
  const double offset = std::numbers::pi / 10.0;
  const LevelSetField ls = plane_level_set(normal, offset);
  const Vec3 n = normal.normalized();
  const double c = offset / std::sqrt(2.0);
  return from_gamma(
      "plane", BoxDomain(Vec3::Constant(-1.0), Vec3::Constant(1.0)), ls,
      [n, c](const Vec3& x) { return n.dot(x) - c; }, [n](const Vec3&) { return n; },
      [](const Vec3&) { return 0.0; }, betas);
}

double sphere_beta_ratio(double radius) { return std::numbers::pi / (2.0 * radius * radius); }

Problem sphere_problem(double beta_minus, double radius, const Vec3& center) {
  if (!(beta_minus > 0.0)) throw std::invalid_argument("sphere_problem: beta_minus must be > 0");
  const double a = sphere_beta_ratio(radius);
  const Betas betas{beta_minus, beta_minus * a};
  const double r2 = radius * radius;
  Problem p;
  p.name = "sphere";
  p.domain = BoxDomain(Vec3::Constant(-1.0), Vec3::Constant(1.0));
  p.betas = betas;
  const LevelSetField ls = sphere_level_set(center, radius);
  p.interface = [ls](const Mesh&) { return ls; };
  auto side_of = [r2, center](const Vec3& x) {
    return (x - center).squaredNorm() - r2 <= 0.0 ? Side::Minus : Side::Plus;
  };
  ExactSolution ex;
  ex.u = [a, r2, center](const Vec3& x, Side s) {
    const double q = (x - center).squaredNorm();
    return s == Side::Minus ? -std::cos(a * q) : q - r2;
  };
  ex.grad = [a, center](const Vec3& x, Side s) {
    const Vec3 d = x - center;
    const double q = d.squaredNorm();
    return Vec3(s == Side::Minus ? 2.0 * a * std::sin(a * q) * d : 2.0 * d);
  };
  p.f = [a, betas, center](const Vec3& x, Side s) {
    const double q = (x - center).squaredNorm();
    if (s == Side::Plus) return -6.0 * betas.plus;
    return -betas.minus * (6.0 * a * std::sin(a * q) + 4.0 * a * a * q * std::cos(a * q));
  };
  p.g = [u = ex.u, side_of](const Vec3& x) { return u(x, side_of(x)); };
  p.exact = ex;
  return p;
}

Problem orthocircle_problem(const Betas& betas) {
  return from_gamma("orthocircle", BoxDomain(Vec3::Constant(-1.2), Vec3::Constant(1.2)),
                    orthocircle_level_set(), orthocircle_value, orthocircle_gradient,
                    orthocircle_laplacian, betas);
}

BoxDomain cloud_reference_domain() { return BoxDomain(Vec3(0.2, 0.2, 0.1), Vec3(1.0, 1.0, 0.9)); }

PointCloud reference_sphere_cloud(std::size_t n) {
  return fibonacci_sphere(n, Vec3(0.6, 0.6, 0.5), 0.3);
}

Problem cloud_reference_problem(PointCloud cloud, const Betas& betas) {
  Problem p;
  p.name = "cloud";
  p.domain = cloud_reference_domain();
  check_cloud_inside(cloud, p.domain);
  p.betas = betas;
  auto shared = std::make_shared<const PointCloud>(std::move(cloud));
  p.interface = [shared](const Mesh& m) { return signed_distance(*shared, m).field(); };
  p.f = [](const Vec3&, Side) { return 0.0; };
  p.g = [](const Vec3& x) {
    const double k = 3.0 * std::numbers::pi;
    return std::sin(k * x.x()) * std::sin(k * x.y()) * std::sin(k * x.z());
  };
  return p;
}

Problem sphere_cloud_problem(std::size_t n, const Betas& betas) {
  const Vec3 c = Vec3::Constant(0.5);
  const double r = 0.3;
  auto cloud = std::make_shared<const PointCloud>(fibonacci_sphere(n, c, r));
  Problem p = from_gamma(
      "sphere-cloud", BoxDomain(Vec3::Zero(), Vec3::Ones()), sphere_level_set(c, r),
      [c, r](const Vec3& x) { return (x - c).squaredNorm() - r * r; },
      [c](const Vec3& x) { return Vec3(2.0 * (x - c)); }, [](const Vec3&) { return 6.0; },
      betas);
  p.interface = [cloud](const Mesh& m) { return signed_distance(*cloud, m).field(); };
  return p;
}

}  // namespace ppife
