#include "ppife/error_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "parallel.hpp"

namespace ppife {

ExactSolution reference_solution(const DiscreteFunction& fine) {
  return {[&fine](const Vec3& x, Side) { return fine.value(x); },
          [&fine](const Vec3& x, Side) { return fine.gradient(x); }};
}

namespace {

struct FaceTerms {
  double jump2 = 0.0;
  double flux2 = 0.0;
};

// Jump and flux-average integrals of (exact - v) over one interface face.
// Without an exact solution only v enters.
FaceTerms face_terms(const DiscreteFunction& v, const ExactSolution* exact,
                     const LevelSetField& ls, const SchemeParams& params, Index face) {
  const Discretization& disc = v.discretization();
  const FaceNeighbors nb = disc.mesh().face_neighbors(face);
  const FaceQuad quad = interface_face_quadrature(disc, face, ls, params);
  const double snap = default_snap_tol(disc.mesh());
  const Betas& betas = disc.betas();
  FaceTerms t;
  for (std::size_t p = 0; p < quad.rule.size(); ++p) {
    const Vec3& x = quad.rule.points[p];
    const Side s1 = quad.first_side[p];
    const Side s2 = quad.second_side[p];
    const double jump = v.value_in(*nb.second, x, s2) - v.value_in(nb.first, x, s1);
    double avg = 0.5 * (betas[s1] * v.gradient_in(nb.first, x, s1).dot(nb.normal) +
                        betas[s2] * v.gradient_in(*nb.second, x, s2).dot(nb.normal));
    if (exact) {
      const Side side = classify_value(ls(x), snap);
      avg -= betas[side] * exact->grad(x, side).dot(nb.normal);
    }
    t.jump2 += quad.rule.weights[p] * jump * jump;
    t.flux2 += quad.rule.weights[p] * avg * avg;
  }
  return t;
}

}  // namespace

ErrorReport norm_errors(const DiscreteFunction& uh, const ExactSolution& exact,
                        const LevelSetField& ls, const SchemeParams& params, bool with_energy) {
  const Discretization& disc = uh.discretization();
  const Mesh& mesh = disc.mesh();
  const double snap = default_snap_tol(mesh);
  const Betas& betas = disc.betas();
  ErrorReport rep;
  rep.n = mesh.counts()[0];
  rep.h = mesh.h();
  rep.interface_fraction =
      double(disc.classification().interface_count()) / double(mesh.num_elements());

  const auto& coeffs = uh.coefficients();
  const auto& sides = disc.classification().node_sides;
  for (Index i = 0; i < mesh.num_nodes(); ++i) {
    const double err = std::abs(coeffs[i] - exact.u(mesh.node_point(i), sides[i]));
    rep.e_inf = std::max(rep.e_inf, err);
  }

  const Index ne = mesh.num_elements();
  std::vector<std::array<double, 3>> local(ne);
  detail::parallel_for(ne, [&](Index e) {
    const auto pieces = volume_pieces(disc, e, ls, params);
    const bool iface = disc.is_interface(e);
    std::array<double, 3> acc{0.0, 0.0, 0.0};
    for (const auto& piece : pieces) {
      for (std::size_t p = 0; p < piece.rule.size(); ++p) {
        const Vec3& x = piece.rule.points[p];
        const Side side = iface ? classify_value(ls(x), snap) : piece.piece;
        const double w = piece.rule.weights[p];
        const double du = exact.u(x, side) - uh.value_in(e, x, piece.piece);
        const Vec3 dg = exact.grad(x, side) - uh.gradient_in(e, x, piece.piece);
        acc[0] += w * du * du;
        acc[1] += w * dg.squaredNorm();
        acc[2] += w * betas[piece.piece] * dg.squaredNorm();
      }
    }
    local[e] = acc;
  });
  double l2 = 0.0, h1 = 0.0, energy = 0.0;
  for (const auto& a : local) {
    l2 += a[0];
    h1 += a[1];
    energy += a[2];
  }
  rep.e_0 = std::sqrt(l2);
  rep.e_1 = std::sqrt(h1);

  if (with_energy) {
    const auto faces = interface_faces(disc);
    std::vector<FaceTerms> terms(faces.size());
    detail::parallel_for(Index(faces.size()), [&](Index i) {
      terms[i] = face_terms(uh, &exact, ls, params, faces[i]);
    });
    const double sigma = params.sigma();
    const double h = mesh.h();
    for (const auto& t : terms) energy += sigma / h * t.jump2 + h / sigma * t.flux2;
    rep.e_energy = std::sqrt(energy);
  }
  return rep;
}

double energy_norm(const DiscreteFunction& v, const LevelSetField& ls, const SchemeParams& params) {
  const Discretization& disc = v.discretization();
  const Mesh& mesh = disc.mesh();
  double total = 0.0;
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    for (const auto& piece : volume_pieces(disc, e, ls, params)) {
      const double beta = disc.betas()[piece.piece];
      for (std::size_t p = 0; p < piece.rule.size(); ++p) {
        total += piece.rule.weights[p] * beta *
                 v.gradient_in(e, piece.rule.points[p], piece.piece).squaredNorm();
      }
    }
  }
  const double sigma = params.sigma();
  const double h = mesh.h();
  for (Index f : interface_faces(disc)) {
    const FaceTerms t = face_terms(v, nullptr, ls, params, f);
    total += sigma / h * t.jump2 + h / sigma * t.flux2;
  }
  return std::sqrt(total);
}

double convergence_slope(const std::vector<double>& h, const std::vector<double>& e) {
  if (h.size() != e.size() || h.size() < 2) {
    throw std::invalid_argument("convergence_slope: need at least two (h, e) pairs");
  }
  const std::size_t n = h.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(h[i]);
    my += std::log(e[i]);
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(h[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(e[i]) - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("convergence_slope: mesh sizes must be distinct");
  return sxy / sxx;
}

ConvergenceRates convergence_rates(const std::vector<ErrorReport>& reports) {
  std::vector<double> h, ei, e0, e1, ee;
  bool energy = true;
  for (const auto& r : reports) {
    h.push_back(r.h);
    ei.push_back(r.e_inf);
    e0.push_back(r.e_0);
    e1.push_back(r.e_1);
    if (r.e_energy) {
      ee.push_back(*r.e_energy);
    } else {
      energy = false;
    }
  }
  ConvergenceRates rates;
  rates.e_inf = convergence_slope(h, ei);
  rates.e_0 = convergence_slope(h, e0);
  rates.e_1 = convergence_slope(h, e1);
  if (energy) rates.e_energy = convergence_slope(h, ee);
  return rates;
}

const char* to_string(ProbeKind kind) {
  switch (kind) {
    case ProbeKind::Trace: return "trace";
    case ProbeKind::Inverse: return "inverse";
    case ProbeKind::InterfaceJump: return "interface-jump";
  }
  return "?";
}

namespace {

struct LocalFunction {
  const IFEBasis* basis;
  std::array<double, 8> c;

  Q1Poly poly(Side s) const {
    Q1Poly p;
    const auto& b = basis->side(s);
    for (int i = 0; i < 8; ++i) p += c[i] * b[i];
    return p;
  }
};

}  // namespace

double inequality_probe(const Discretization& disc, const LevelSetField& ls,
                        const std::vector<Index>& elements, ProbeKind kind, int samples,
                        std::uint64_t seed) {
  const Mesh& mesh = disc.mesh();
  const Betas& betas = disc.betas();
  const double h = mesh.h();
  const double bp = betas.plus;
  const double bm = betas.minus;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  SchemeParams params;
  params.betas = betas;

  double worst = 0.0;
  for (Index e : elements) {
    const IFEBasis* basis = disc.basis_of(e);
    if (!basis) {
      throw std::invalid_argument(fmt::format("inequality_probe: element {} is not an interface element", e));
    }
    const ElementCut& cut = *disc.classification().cut_of(e);
    const ElementFrame& fr = basis->frame;
    const auto pieces = volume_pieces(disc, e, ls, params);

    std::vector<FaceQuad> faces;
    std::vector<Vec3> normals;
    QuadRule gamma;
    if (kind == ProbeKind::Trace) {
      const auto ef = mesh.element_faces(e);
      for (int lf = 0; lf < 6; ++lf) {
        const auto [lo, hi] = mesh.face_box(ef[lf]);
        NeighborSplit own;
        own.plane = basis->plane;
        faces.push_back(face_rule(lo, hi, own, NeighborSplit{}));
        Vec3 n = Vec3::Zero();
        n[lf / 2] = (lf % 2 == 0) ? -1.0 : 1.0;
        normals.push_back(n);
      }
    } else if (kind == ProbeKind::InterfaceJump) {
      gamma = surface_rule(cut, ls);
    }

    for (int r = 0; r < samples; ++r) {
      LocalFunction phi{basis, {}};
      for (double& c : phi.c) c = unif(rng);
      const Q1Poly pm = phi.poly(Side::Minus);
      const Q1Poly pp = phi.poly(Side::Plus);
      auto poly = [&](Side s) -> const Q1Poly& { return s == Side::Minus ? pm : pp; };

      double energy = 0.0, grad2 = 0.0, val2 = 0.0;
      for (const auto& piece : pieces) {
        const Q1Poly& p = poly(piece.piece);
        for (std::size_t q = 0; q < piece.rule.size(); ++q) {
          const Vec3 xi = fr.to_local(piece.rule.points[q]);
          const double w = piece.rule.weights[q];
          const double g2 = fr.grad_to_global(p.grad(xi)).squaredNorm();
          energy += w * betas[piece.piece] * g2;
          grad2 += w * g2;
          const double v = p.eval(xi);
          val2 += w * v * v;
        }
      }

      double ratio = 0.0;
      if (kind == ProbeKind::Inverse) {
        if (val2 <= 0.0) continue;
        ratio = std::sqrt(grad2) * h / ((bp / bm) * std::sqrt(val2));
      } else if (kind == ProbeKind::Trace) {
        if (energy <= 0.0) continue;
        double num = 0.0;
        for (std::size_t f = 0; f < faces.size(); ++f) {
          double acc = 0.0;
          for (std::size_t q = 0; q < faces[f].rule.size(); ++q) {
            const Side s = faces[f].first_side[q];
            const Vec3 xi = fr.to_local(faces[f].rule.points[q]);
            const double flux = betas[s] * fr.grad_to_global(poly(s).grad(xi)).dot(normals[f]);
            acc += faces[f].rule.weights[q] * flux * flux;
          }
          num = std::max(num, std::sqrt(acc));
        }
        ratio = num / (std::pow(h, -0.5) * (bp / std::sqrt(bm)) * std::sqrt(energy));
      } else {
        if (energy <= 0.0) continue;
        double acc = 0.0;
        for (std::size_t q = 0; q < gamma.size(); ++q) {
          const Vec3 xi = fr.to_local(gamma.points[q]);
          const double j = pp.eval(xi) - pm.eval(xi);
          acc += gamma.weights[q] * j * j;
        }
        ratio = std::sqrt(acc) / ((std::sqrt(bp) / bm) * std::pow(h, 1.5) * std::sqrt(energy));
      }
      worst = std::max(worst, ratio);
    }
  }
  return worst;
}

}  // namespace ppife
