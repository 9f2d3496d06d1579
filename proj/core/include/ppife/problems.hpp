#pragma once

#include <functional>
#include <numbers>
#include <optional>
#include <string>

#include "ppife/discretization.hpp"
#include "ppife/error_analysis.hpp"
#include "ppife/level_set.hpp"
#include "ppife/mesh.hpp"
#include "ppife/pointcloud.hpp"

namespace ppife {

/// Interface, data and (optionally) exact solution of an interface problem
/// -div(beta grad u) = f with Dirichlet data g.
struct Problem {
  std::string name;
  BoxDomain domain{Vec3::Zero(), Vec3::Ones()};
  Betas betas;
  /// Computational level set for a given mesh (nodal fields depend on it).
  std::function<LevelSetField(const Mesh&)> interface;
  SidedScalarFn f;
  ScalarFn g;
  std::optional<ExactSolution> exact;
};

/// u = gamma / beta on each side, f = -laplacian(gamma). The branch follows the
/// sign of gamma itself, whatever side the caller passes.
struct GammaOverBeta {
  ExactSolution exact;
  SidedScalarFn f;
  ScalarFn g;
};
GammaOverBeta gamma_over_beta(ScalarFn gamma, VectorFn grad, ScalarFn laplacian,
                              const Betas& betas);

/// Plane gamma = (x + z - pi/10)/sqrt(2) on (-1,1)^3; the solution lies in the IFE space.
Problem plane_problem(const Betas& betas = {1.0, 10.0});

/// Sphere |x - c|^2 = r^2 on (-1,1)^3 with u- = -cos(a s), u+ = s - r^2 where
/// s = |x - c|^2 and a = pi/(2 r^2); flux continuity fixes beta+ = a beta-.
Problem sphere_problem(double beta_minus = 1.0, double radius = std::numbers::pi / 4.0,
                       const Vec3& center = Vec3::Zero());
double sphere_beta_ratio(double radius);

/// Orthocircle on (-1.2,1.2)^3 with u = gamma/beta.
Problem orthocircle_problem(const Betas& betas = {1.0, 100.0});

/// f = 0, g = sin(3 pi x) sin(3 pi y) sin(3 pi z) on (0.2,1)x(0.2,1)x(0.1,0.9);
/// no exact solution. The interface comes from a point cloud.
Problem cloud_reference_problem(PointCloud cloud, const Betas& betas = {1.0, 10.0});
BoxDomain cloud_reference_domain();
/// The synthetic stand-in cloud for the reference problem.
PointCloud reference_sphere_cloud(std::size_t n = 5000);

/// Sphere cloud on (0,1)^3 (centre 0.5, radius 0.3) whose nodal signed distance
/// is the computational interface, measured against the analytic sphere
/// solution u = (|x - c|^2 - r^2)/beta.
Problem sphere_cloud_problem(std::size_t n = 5000, const Betas& betas = {1.0, 10.0});

}  // namespace ppife
