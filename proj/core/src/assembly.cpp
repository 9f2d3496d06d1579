#include "ppife/assembly.hpp"

#include <algorithm>
#include <set>

#include <Eigen/IterativeLinearSolvers>
#include <fmt/format.h>

#include "parallel.hpp"

namespace ppife {

namespace {

/// Accumulates into a 27-point nodal stencil; the wider couplings of face terms
/// go to a side list. Summation order is fixed by the caller's loop order.
class StencilMatrix {
 public:
  explicit StencilMatrix(const Mesh& mesh)
      : counts_(mesh.counts()), values_(std::size_t(mesh.num_nodes()) * 27, 0.0) {}

  void add(Index row, Index col, double v) {
    const Index nx = counts_[0] + 1, ny = counts_[1] + 1;
    const Index di = col % nx - row % nx;
    const Index dj = (col / nx) % ny - (row / nx) % ny;
    const Index dk = col / (nx * ny) - row / (nx * ny);
    if (dk >= -1 && dk <= 1 && dj >= -1 && dj <= 1 && di >= -1 && di <= 1) {
      values_[std::size_t(row) * 27 + std::size_t((dk + 1) * 9 + (dj + 1) * 3 + (di + 1))] += v;
    } else {
      extra_.push_back({row, col, v});
    }
  }

  SparseMatrix build() {
    std::stable_sort(extra_.begin(), extra_.end(), [](const Entry& a, const Entry& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    const Index nx = counts_[0] + 1, ny = counts_[1] + 1, nz = counts_[2] + 1;
    const Index n = nx * ny * nz;
    SparseMatrix m(n, n);
    m.reserve(Index(values_.size() + extra_.size()));
    std::size_t x = 0;
    std::vector<std::pair<Index, double>> row_entries;
    for (Index row = 0; row < n; ++row) {
      row_entries.clear();
      const Index i = row % nx, j = (row / nx) % ny, k = row / (nx * ny);
      for (int dk = -1; dk <= 1; ++dk) {
        for (int dj = -1; dj <= 1; ++dj) {
          for (int di = -1; di <= 1; ++di) {
            if (i + di < 0 || i + di >= nx || j + dj < 0 || j + dj >= ny || k + dk < 0 ||
                k + dk >= nz) {
              continue;
            }
            const Index col = row + di + nx * (dj + ny * dk);
            row_entries.emplace_back(
                col, values_[std::size_t(row) * 27 + std::size_t((dk + 1) * 9 + (dj + 1) * 3 + (di + 1))]);
          }
        }
      }
      for (; x < extra_.size() && extra_[x].row == row; ++x) {
        if (!row_entries.empty() && row_entries.back().first == extra_[x].col) {
          row_entries.back().second += extra_[x].value;
        } else {
          row_entries.emplace_back(extra_[x].col, extra_[x].value);
        }
      }
      std::sort(row_entries.begin(), row_entries.end());
      m.startVec(row);
      for (const auto& [col, v] : row_entries) m.insertBack(row, col) = v;
    }
    m.finalize();
    return m;
  }

 private:
  struct Entry {
    Index row;
    Index col;
    double value;
  };

  std::array<int, 3> counts_;
  std::vector<double> values_;
  std::vector<Entry> extra_;
};

}  // namespace

const char* to_string(QuadratureMode mode) {
  return mode == QuadratureMode::PlaneCut ? "plane-cut" : "levelset-sign";
}

QuadratureMode parse_quadrature_mode(const std::string& name) {
  if (name == "plane-cut") return QuadratureMode::PlaneCut;
  if (name == "levelset-sign") return QuadratureMode::LevelSetSign;
  throw std::invalid_argument(
      fmt::format("unknown quadrature mode '{}' (expected plane-cut or levelset-sign)", name));
}

void SchemeParams::validate() const {
  if (epsilon != -1 && epsilon != 0 && epsilon != 1) {
    throw std::invalid_argument(fmt::format("epsilon must be -1, 0 or 1, got {}", epsilon));
  }
  if (!(sigma0 > 0.0)) throw std::invalid_argument("sigma0 must be positive");
  if (!(betas.minus > 0.0 && betas.plus > 0.0)) {
    throw std::invalid_argument("beta_minus and beta_plus must be positive");
  }
  if (levelset_subdivisions < 1) throw std::invalid_argument("levelset_subdivisions must be >= 1");
}

namespace {

Side level_set_side(const LevelSetField& ls, const Vec3& x, double snap_tol) {
  return classify_value(ls(x), snap_tol);
}

// Gauss rule on an axis-aligned rectangle split into m x m sub-rectangles.
QuadRule rectangle_rule(const Vec3& lo, const Vec3& hi, int m, int order) {
  int axis = 0;
  for (int a = 0; a < 3; ++a) {
    if (hi[a] == lo[a]) axis = a;
  }
  const int u = (axis + 1) % 3;
  const int w = (axis + 2) % 3;
  const auto [x, wt] = gauss_legendre01(order);
  const double du = (hi[u] - lo[u]) / m;
  const double dw = (hi[w] - lo[w]) / m;
  QuadRule q;
  for (int bj = 0; bj < m; ++bj) {
    for (int bi = 0; bi < m; ++bi) {
      for (std::size_t j = 0; j < x.size(); ++j) {
        for (std::size_t i = 0; i < x.size(); ++i) {
          Vec3 p = lo;
          p[u] += (bi + x[i]) * du;
          p[w] += (bj + x[j]) * dw;
          q.points.push_back(p);
          q.weights.push_back(wt[i] * wt[j] * du * dw);
        }
      }
    }
  }
  return q;
}

Eigen::Matrix<double, 8, 8> reference_stiffness(const Vec3& h) {
  const QuadRule q = box_rule(Vec3::Zero(), Vec3::Ones(), 2);
  const auto& basis = reference_basis();
  Eigen::Matrix<double, 8, 8> k = Eigen::Matrix<double, 8, 8>::Zero();
  const double jac = h.prod();
  for (std::size_t p = 0; p < q.size(); ++p) {
    std::array<Vec3, 8> g;
    for (int i = 0; i < 8; ++i) g[i] = basis[i].grad(q.points[p]).cwiseQuotient(h);
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) k(i, j) += q.weights[p] * jac * g[i].dot(g[j]);
    }
  }
  return k;
}

}  // namespace

std::vector<VolumePiece> volume_pieces(const Discretization& disc, Index e,
                                       const LevelSetField& ls, const SchemeParams& params,
                                       int cuboid_order) {
  const Mesh& mesh = disc.mesh();
  if (!disc.is_interface(e)) return {{cuboid_rule(mesh, e, cuboid_order), disc.fixed_side(e)}};
  const ElementCut& cut = *disc.classification().cut_of(e);
  std::vector<VolumePiece> out;
  if (params.quadrature == QuadratureMode::PlaneCut) {
    const SubElementTessellation tess = tessellate_cut(cut);
    for (Side s : {Side::Minus, Side::Plus}) {
      if (!tess.tets(s).empty()) out.push_back({volume_rule(tess, s), s});
    }
    return out;
  }
  const int m = params.levelset_subdivisions;
  const Vec3 lo = mesh.element_lo(e);
  const Vec3 d = mesh.spacing() / m;
  const double snap = default_snap_tol(mesh);
  VolumePiece minus{{}, Side::Minus};
  VolumePiece plus{{}, Side::Plus};
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < m; ++i) {
        const Vec3 sub_lo = lo + Vec3(i, j, k).cwiseProduct(d);
        const QuadRule q = box_rule(sub_lo, sub_lo + d, cuboid_order);
        for (std::size_t p = 0; p < q.size(); ++p) {
          auto& target = level_set_side(ls, q.points[p], snap) == Side::Minus ? minus : plus;
          target.rule.points.push_back(q.points[p]);
          target.rule.weights.push_back(q.weights[p]);
        }
      }
    }
  }
  if (minus.rule.size() > 0) out.push_back(std::move(minus));
  if (plus.rule.size() > 0) out.push_back(std::move(plus));
  return out;
}

std::vector<Index> interface_faces(const Discretization& disc) {
  const Mesh& mesh = disc.mesh();
  std::set<Index> faces;
  for (const auto& cut : disc.classification().interface_cuts) {
    for (Index f : mesh.element_faces(cut.element)) {
      if (!mesh.face_neighbors(f).is_boundary()) faces.insert(f);
    }
  }
  return {faces.begin(), faces.end()};
}

FaceQuad interface_face_quadrature(const Discretization& disc, Index face,
                                   const LevelSetField& ls, const SchemeParams& params) {
  const Mesh& mesh = disc.mesh();
  const FaceNeighbors nb = mesh.face_neighbors(face);
  if (nb.is_boundary()) {
    throw std::invalid_argument(fmt::format("face {} is a boundary face", face));
  }
  const auto [lo, hi] = mesh.face_box(face);
  const Index e1 = nb.first;
  const Index e2 = *nb.second;

  if (params.quadrature == QuadratureMode::PlaneCut) {
    auto split = [&](Index e) {
      NeighborSplit s;
      if (const IFEBasis* b = disc.basis_of(e)) {
        s.plane = b->plane;
      } else {
        s.fixed = disc.fixed_side(e);
      }
      return s;
    };
    return face_rule(lo, hi, split(e1), split(e2));
  }

  FaceQuad fq;
  fq.rule = rectangle_rule(lo, hi, params.levelset_subdivisions, 3);
  const double snap = default_snap_tol(mesh);
  for (const auto& x : fq.rule.points) {
    const Side ls_side = level_set_side(ls, x, snap);
    fq.first_side.push_back(disc.is_interface(e1) ? ls_side : disc.fixed_side(e1));
    fq.second_side.push_back(disc.is_interface(e2) ? ls_side : disc.fixed_side(e2));
  }
  return fq;
}

Eigen::Matrix<double, 16, 16> face_matrix(const Discretization& disc, Index face,
                                          const FaceQuad& quad, const SchemeParams& params) {
  const Mesh& mesh = disc.mesh();
  const FaceNeighbors nb = mesh.face_neighbors(face);
  const Index e1 = nb.first;
  const Index e2 = *nb.second;
  const double eps = params.epsilon;
  const double penalty = params.sigma() / mesh.h();
  const Betas& betas = disc.betas();

  Eigen::Matrix<double, 16, 16> m = Eigen::Matrix<double, 16, 16>::Zero();
  std::array<double, 8> v1, v2;
  std::array<Vec3, 8> g1, g2;
  Eigen::Matrix<double, 16, 1> jump, avg;
  for (std::size_t p = 0; p < quad.rule.size(); ++p) {
    const Vec3& x = quad.rule.points[p];
    const Side s1 = quad.first_side[p];
    const Side s2 = quad.second_side[p];
    disc.shape(e1, x, s1, v1, g1);
    disc.shape(e2, x, s2, v2, g2);
    // n points from e1 into e2, so [v] = v1 - v2 keeps the form consistent.
    for (int i = 0; i < 8; ++i) {
      jump[i] = v1[i];
      jump[8 + i] = -v2[i];
      avg[i] = 0.5 * betas[s1] * g1[i].dot(nb.normal);
      avg[8 + i] = 0.5 * betas[s2] * g2[i].dot(nb.normal);
    }
    const double w = quad.rule.weights[p];
    // Row b is the test function, column a the trial function.
    m.noalias() += w * (-jump * avg.transpose() + eps * avg * jump.transpose() +
                        penalty * jump * jump.transpose());
  }
  return m;
}

std::vector<Index> boundary_interface_faces(const Discretization& disc) {
  const Mesh& mesh = disc.mesh();
  std::vector<Index> out;
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    const FaceNeighbors nb = mesh.face_neighbors(f);
    if (nb.is_boundary() && disc.is_interface(nb.first)) out.push_back(f);
  }
  return out;
}

FaceQuad boundary_face_quadrature(const Discretization& disc, Index face,
                                  const LevelSetField& ls, const SchemeParams& params) {
  const Mesh& mesh = disc.mesh();
  const FaceNeighbors nb = mesh.face_neighbors(face);
  if (!nb.is_boundary()) throw std::invalid_argument(fmt::format("face {} is interior", face));
  const auto [lo, hi] = mesh.face_box(face);
  const IFEBasis* b = disc.basis_of(nb.first);
  if (params.quadrature == QuadratureMode::PlaneCut && b) {
    NeighborSplit s;
    s.plane = b->plane;
    return face_rule(lo, hi, s, s);
  }
  FaceQuad fq;
  fq.rule = rectangle_rule(lo, hi, b ? params.levelset_subdivisions : 1, 3);
  const double snap = default_snap_tol(mesh);
  for (const auto& x : fq.rule.points) {
    const Side side = b ? level_set_side(ls, x, snap) : disc.fixed_side(nb.first);
    fq.first_side.push_back(side);
    fq.second_side.push_back(side);
  }
  return fq;
}

BoundaryFaceTerms boundary_face_terms(const Discretization& disc, Index face,
                                      const FaceQuad& quad, const SchemeParams& params,
                                      const ScalarFn& g) {
  const Mesh& mesh = disc.mesh();
  const FaceNeighbors nb = mesh.face_neighbors(face);
  const double eps = params.epsilon;
  const double penalty = params.sigma() / mesh.h();
  BoundaryFaceTerms t;
  t.matrix.setZero();
  t.rhs.setZero();
  std::array<double, 8> v;
  std::array<Vec3, 8> gr;
  Eigen::Matrix<double, 8, 1> val, flux;
  for (std::size_t p = 0; p < quad.rule.size(); ++p) {
    const Vec3& x = quad.rule.points[p];
    const Side s = quad.first_side[p];
    disc.shape(nb.first, x, s, v, gr);
    for (int i = 0; i < 8; ++i) {
      val[i] = v[i];
      flux[i] = disc.betas()[s] * gr[i].dot(nb.normal);  // outward normal
    }
    const double w = quad.rule.weights[p];
    const double gx = g(x);
    t.matrix.noalias() += w * (-val * flux.transpose() + eps * flux * val.transpose() +
                               penalty * val * val.transpose());
    t.rhs.noalias() += w * gx * (eps * flux + penalty * val);
  }
  return t;
}

Eigen::Matrix<double, 8, 8> element_stiffness(const Discretization& disc,
                                              const std::vector<VolumePiece>& pieces,
                                              Index e) {
  Eigen::Matrix<double, 8, 8> k = Eigen::Matrix<double, 8, 8>::Zero();
  std::array<double, 8> v;
  std::array<Vec3, 8> g;
  Eigen::Matrix<double, 3, 8> gm;
  for (const auto& piece : pieces) {
    const double beta = disc.betas()[piece.piece];
    for (std::size_t p = 0; p < piece.rule.size(); ++p) {
      disc.shape(e, piece.rule.points[p], piece.piece, v, g);
      for (int i = 0; i < 8; ++i) gm.col(i) = g[i];
      k.noalias() += (piece.rule.weights[p] * beta) * gm.transpose() * gm;
    }
  }
  return k;
}

LinearSystem assemble(const Discretization& disc, const LevelSetField& ls,
                      const SchemeParams& params, const SidedScalarFn& f, const ScalarFn& g) {
  params.validate();
  const Mesh& mesh = disc.mesh();
  const MeshClassification& cls = disc.classification();
  if (disc.interface_bases().size() != cls.interface_cuts.size()) {
    throw AssemblyError("assemble: missing IFE basis for an interface element");
  }
  const Index num_nodes = mesh.num_nodes();
  const Index num_elements = mesh.num_elements();
  const double snap = default_snap_tol(mesh);
  const Betas& betas = disc.betas();

  const auto faces = interface_faces(disc);
  const Index num_if = Index(cls.interface_cuts.size());

  // Local contributions, computed in parallel and accumulated serially in a fixed order.
  std::vector<Eigen::Matrix<double, 8, 8>> k_interface(num_if);
  std::vector<std::array<double, 8>> loads(num_elements);
  std::vector<Eigen::Matrix<double, 16, 16>> k_faces(faces.size());

  detail::parallel_for(num_elements, [&](Index e) {
    const auto pieces = volume_pieces(disc, e, ls, params);
    const bool iface = disc.is_interface(e);
    if (iface) k_interface[cls.interface_slot[e]] = element_stiffness(disc, pieces, e);
    std::array<double, 8> load{};
    std::array<double, 8> v;
    std::array<Vec3, 8> gr;
    for (const auto& piece : pieces) {
      for (std::size_t p = 0; p < piece.rule.size(); ++p) {
        const Vec3& x = piece.rule.points[p];
        const Side f_side = iface ? level_set_side(ls, x, snap) : piece.piece;
        const double fw = f(x, f_side) * piece.rule.weights[p];
        disc.shape(e, x, piece.piece, v, gr);
        for (int i = 0; i < 8; ++i) load[i] += fw * v[i];
      }
    }
    loads[e] = load;
  });
  detail::parallel_for(Index(faces.size()), [&](Index i) {
    const FaceQuad quad = interface_face_quadrature(disc, faces[i], ls, params);
    k_faces[i] = face_matrix(disc, faces[i], quad, params);
  });
  const auto bfaces = boundary_interface_faces(disc);
  std::vector<BoundaryFaceTerms> k_bfaces(bfaces.size());
  detail::parallel_for(Index(bfaces.size()), [&](Index i) {
    const FaceQuad quad = boundary_face_quadrature(disc, bfaces[i], ls, params);
    k_bfaces[i] = boundary_face_terms(disc, bfaces[i], quad, params, g);
  });

  StencilMatrix acc(mesh);
  LinearSystem sys;
  sys.rhs = Eigen::VectorXd::Zero(num_nodes);
  const Eigen::Matrix<double, 8, 8> k_ref = reference_stiffness(mesh.spacing());

  for (Index e = 0; e < num_elements; ++e) {
    const auto nodes = mesh.element_nodes(e);
    const auto slot = cls.interface_slot[e];
    const Eigen::Matrix<double, 8, 8> k =
        slot >= 0 ? k_interface[slot] : Eigen::Matrix<double, 8, 8>(betas[disc.fixed_side(e)] * k_ref);
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) acc.add(nodes[i], nodes[j], k(i, j));
      sys.rhs[nodes[i]] += loads[e][i];
    }
  }
  for (std::size_t fi = 0; fi < faces.size(); ++fi) {
    const FaceNeighbors nb = mesh.face_neighbors(faces[fi]);
    const auto n1 = mesh.element_nodes(nb.first);
    const auto n2 = mesh.element_nodes(*nb.second);
    std::array<Index, 16> dofs;
    std::copy(n1.begin(), n1.end(), dofs.begin());
    std::copy(n2.begin(), n2.end(), dofs.begin() + 8);
    const auto& m = k_faces[fi];
    for (int b = 0; b < 16; ++b) {
      for (int a = 0; a < 16; ++a) acc.add(dofs[b], dofs[a], m(b, a));
    }
  }
  for (std::size_t fi = 0; fi < bfaces.size(); ++fi) {
    const auto nodes = mesh.element_nodes(mesh.face_neighbors(bfaces[fi]).first);
    const auto& t = k_bfaces[fi];
    for (int b = 0; b < 8; ++b) {
      for (int a = 0; a < 8; ++a) acc.add(nodes[b], nodes[a], t.matrix(b, a));
      sys.rhs[nodes[b]] += t.rhs[b];
    }
  }
  sys.matrix = acc.build();

  sys.dirichlet_nodes = mesh.boundary_nodes();
  sys.dirichlet_values.resize(Index(sys.dirichlet_nodes.size()));
  for (std::size_t i = 0; i < sys.dirichlet_nodes.size(); ++i) {
    sys.dirichlet_values[Index(i)] = g(mesh.node_point(sys.dirichlet_nodes[i]));
  }
  return sys;
}

ReducedSystem apply_dirichlet(const LinearSystem& system) {
  const Index n = system.matrix.rows();
  ReducedSystem red;
  red.boundary_values = Eigen::VectorXd::Zero(n);
  std::vector<Index> reduced_of(n, 0);
  std::vector<bool> fixed(n, false);
  for (std::size_t i = 0; i < system.dirichlet_nodes.size(); ++i) {
    const Index node = system.dirichlet_nodes[i];
    fixed[node] = true;
    red.boundary_values[node] = system.dirichlet_values[Index(i)];
  }
  for (Index i = 0; i < n; ++i) {
    if (!fixed[i]) {
      reduced_of[i] = Index(red.interior.size());
      red.interior.push_back(i);
    }
  }
  const Index m = Index(red.interior.size());
  red.matrix.resize(m, m);
  red.matrix.reserve(system.matrix.nonZeros());
  red.rhs.resize(m);
  for (Index r = 0; r < m; ++r) {
    const Index row = red.interior[r];
    double b = system.rhs[row];
    red.matrix.startVec(r);
    for (SparseMatrix::InnerIterator it(system.matrix, row); it; ++it) {
      const Index col = it.col();
      if (fixed[col]) {
        b -= it.value() * red.boundary_values[col];
      } else {
        red.matrix.insertBack(r, reduced_of[col]) = it.value();
      }
    }
    red.rhs[r] = b;
  }
  red.matrix.finalize();
  return red;
}

Eigen::VectorXd expand_solution(const ReducedSystem& reduced, const Eigen::VectorXd& x) {
  Eigen::VectorXd full = reduced.boundary_values;
  for (std::size_t r = 0; r < reduced.interior.size(); ++r) full[reduced.interior[r]] = x[Index(r)];
  return full;
}

Eigen::VectorXd solve(const ReducedSystem& system, int epsilon, double tol, int max_iter,
                      SolveStats* stats) {
  if (system.matrix.rows() == 0) return Eigen::VectorXd();
  Eigen::VectorXd x;
  int iterations = 0;
  double error = 0.0;
  bool ok = false;
  if (epsilon == -1) {
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(tol);
    cg.setMaxIterations(max_iter);
    cg.compute(system.matrix);
    x = cg.solve(system.rhs);
    iterations = int(cg.iterations());
    error = cg.error();
    ok = cg.info() == Eigen::Success;
  } else {
    Eigen::BiCGSTAB<SparseMatrix> bicg;
    bicg.setTolerance(tol);
    bicg.setMaxIterations(max_iter);
    bicg.compute(system.matrix);
    x = bicg.solve(system.rhs);
    iterations = int(bicg.iterations());
    error = bicg.error();
    ok = bicg.info() == Eigen::Success;
  }
  if (stats) *stats = {iterations, error};
  if (!ok) {
    throw SolverError(fmt::format("solver did not converge: relative residual {:.3e} after {} "
                                  "iterations (tolerance {:.1e})",
                                  error, iterations, tol),
                      error);
  }
  return x;
}

}  // namespace ppife
