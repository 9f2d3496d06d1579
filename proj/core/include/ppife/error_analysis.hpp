#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ppife/assembly.hpp"
#include "ppife/discretization.hpp"

namespace ppife {

struct ErrorReport {
  int n = 0;
  double h = 0.0;
  double e_inf = 0.0;
  double e_0 = 0.0;
  double e_1 = 0.0;
  std::optional<double> e_energy;
  double assembly_s = 0.0;
  double solve_s = 0.0;
  /// |interface elements| / |elements| in [0, 1].
  double interface_fraction = 0.0;
};

/// Exact (or reference) solution with its gradient; the side argument selects
/// the branch.
struct ExactSolution {
  SidedScalarFn u;
  SidedVectorFn grad;
};

/// Wraps a (finer-mesh) discrete solution as a reference; the side is ignored.
ExactSolution reference_solution(const DiscreteFunction& fine);

/// Nodal max error, L2 error and broken H1-seminorm error. The exact branch at
/// a quadrature point follows the level-set sign, the discrete branch the plane
/// side. The energy norm adds the interface-face jump and flux-average terms.
ErrorReport norm_errors(const DiscreteFunction& uh, const ExactSolution& exact,
                        const LevelSetField& ls, const SchemeParams& params,
                        bool with_energy = true);

/// Energy norm of a discrete function: broken weighted H1 seminorm plus
/// sigma/h |[v]|^2 and h/sigma |{beta grad v . n}|^2 on interface faces.
double energy_norm(const DiscreteFunction& v, const LevelSetField& ls, const SchemeParams& params);

/// Least-squares slope of log(e) against log(h).
double convergence_slope(const std::vector<double>& h, const std::vector<double>& e);

struct ConvergenceRates {
  double e_inf = 0.0;
  double e_0 = 0.0;
  double e_1 = 0.0;
  std::optional<double> e_energy;
};

ConvergenceRates convergence_rates(const std::vector<ErrorReport>& reports);

enum class ProbeKind {
  /// ||beta grad phi . n||_F / (h^{-1/2} (beta+/sqrt(beta-)) ||sqrt(beta) grad phi||_T)
  Trace,
  /// h ||grad phi||_T / ((beta+/beta-) ||phi||_T)
  Inverse,
  /// ||[phi]||_{Gamma cap T} / ((sqrt(beta+)/beta-) h^{3/2} ||sqrt(beta) grad phi||_T)
  InterfaceJump,
};

const char* to_string(ProbeKind kind);

/// Maximum normalized ratio over `samples` random IFE functions (coefficients
/// uniform in [-1, 1]) on each listed interface element.
double inequality_probe(const Discretization& disc, const LevelSetField& ls,
                        const std::vector<Index>& elements, ProbeKind kind, int samples = 100,
                        std::uint64_t seed = 1);

}  // namespace ppife
