#include "ppife/pointcloud.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "parallel.hpp"

namespace ppife {

PointCloud parse_cloud(std::istream& in) {
  PointCloud cloud;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    std::vector<double> vals;
    std::string tok;
    while (ss >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || !std::isfinite(v)) {
        throw CloudParseError(line_no,
                              fmt::format("line {}: '{}' is not a real number", line_no, tok));
      }
      vals.push_back(v);
    }
    if (vals.empty()) continue;
    if (vals.size() != 3) {
      throw CloudParseError(
          line_no, fmt::format("line {}: expected 3 coordinates, found {}", line_no, vals.size()));
    }
    cloud.points.emplace_back(vals[0], vals[1], vals[2]);
  }
  if (cloud.points.size() < 4) {
    throw InsufficientDataError(
        fmt::format("point cloud has {} points; at least 4 are required", cloud.points.size()));
  }
  return cloud;
}

PointCloud load_cloud(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open point cloud '{}'", path.string()));
  return parse_cloud(in);
}

void save_cloud(const PointCloud& cloud, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  for (const auto& p : cloud.points) out << fmt::format("{:.17g} {:.17g} {:.17g}\n", p.x(), p.y(), p.z());
}

void check_cloud_inside(const PointCloud& cloud, const BoxDomain& domain) {
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Vec3& p = cloud.points[i];
    if (!domain.contains(p)) {
      throw std::invalid_argument(fmt::format(
          "cloud point {} ({}, {}, {}) lies outside the domain", i, p.x(), p.y(), p.z()));
    }
  }
}

PointIndex::PointIndex(const std::vector<Vec3>& points, int target_per_bin) : points_(&points) {
  if (points.empty()) throw std::invalid_argument("PointIndex: no points");
  Vec3 lo = points[0];
  Vec3 hi = points[0];
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  Vec3 ext = hi - lo;
  const double span = std::max(ext.maxCoeff(), 1e-12);
  for (int a = 0; a < 3; ++a) ext[a] = std::max(ext[a], 1e-6 * span);
  const double bins = std::max(1.0, double(points.size()) / std::max(1, target_per_bin));
  const double cell = std::cbrt(ext.prod() / bins);
  for (int a = 0; a < 3; ++a) {
    dims_[a] = std::clamp(int(std::ceil(ext[a] / cell)), 1, 512);
  }
  lo_ = lo;
  cell_ = ext.cwiseQuotient(Vec3(dims_[0], dims_[1], dims_[2]));

  const std::size_t nb = std::size_t(dims_[0]) * dims_[1] * dims_[2];
  std::vector<std::size_t> count(nb + 1, 0);
  std::vector<std::size_t> bin(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto b = bin_of(points[i]);
    bin[i] = flat(b[0], b[1], b[2]);
    ++count[bin[i] + 1];
  }
  for (std::size_t b = 0; b < nb; ++b) count[b + 1] += count[b];
  start_ = count;
  order_.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) order_[count[bin[i]]++] = i;
}

std::array<int, 3> PointIndex::bin_of(const Vec3& x) const {
  std::array<int, 3> b{};
  for (int a = 0; a < 3; ++a) {
    b[a] = std::clamp(int(std::floor((x[a] - lo_[a]) / cell_[a])), 0, dims_[a] - 1);
  }
  return b;
}

std::size_t PointIndex::flat(int i, int j, int k) const {
  return std::size_t(i) + std::size_t(dims_[0]) * (std::size_t(j) + std::size_t(dims_[1]) * k);
}

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

}  // namespace

std::pair<double, std::size_t> PointIndex::nearest(const Vec3& x) const {
  const auto& pts = *points_;
  const auto b = bin_of(x);
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_i = kNone;
  const int max_r = std::max({dims_[0], dims_[1], dims_[2]});
  for (int r = 0; r <= max_r; ++r) {
    for (int k = b[2] - r; k <= b[2] + r; ++k) {
      if (k < 0 || k >= dims_[2]) continue;
      for (int j = b[1] - r; j <= b[1] + r; ++j) {
        if (j < 0 || j >= dims_[1]) continue;
        for (int i = b[0] - r; i <= b[0] + r; ++i) {
          if (i < 0 || i >= dims_[0]) continue;
          const bool shell = std::abs(i - b[0]) == r || std::abs(j - b[1]) == r ||
                             std::abs(k - b[2]) == r;
          if (!shell) continue;
          const std::size_t f = flat(i, j, k);
          for (std::size_t s = start_[f]; s < start_[f + 1]; ++s) {
            const double d = (pts[order_[s]] - x).norm();
            if (d < best || (d == best && order_[s] < best_i)) {
              best = d;
              best_i = order_[s];
            }
          }
        }
      }
    }
    // Distance from x to the part of the grid outside the searched block.
    double reach = std::numeric_limits<double>::infinity();
    bool covered = true;
    for (int a = 0; a < 3; ++a) {
      if (b[a] - r > 0) {
        covered = false;
        reach = std::min(reach, x[a] - (lo_[a] + (b[a] - r) * cell_[a]));
      }
      if (b[a] + r < dims_[a] - 1) {
        covered = false;
        reach = std::min(reach, lo_[a] + (b[a] + r + 1) * cell_[a] - x[a]);
      }
    }
    if (covered || (best_i != kNone && best <= reach)) break;
  }
  return {best, best_i};
}

bool PointIndex::near_segment(const Vec3& a, const Vec3& b, double radius) const {
  const auto& pts = *points_;
  const Vec3 lo = a.cwiseMin(b).array() - radius;
  const Vec3 hi = a.cwiseMax(b).array() + radius;
  const auto blo = bin_of(lo);
  const auto bhi = bin_of(hi);
  const Vec3 d = b - a;
  const double len2 = d.squaredNorm();
  for (int k = blo[2]; k <= bhi[2]; ++k) {
    for (int j = blo[1]; j <= bhi[1]; ++j) {
      for (int i = blo[0]; i <= bhi[0]; ++i) {
        const std::size_t f = flat(i, j, k);
        for (std::size_t s = start_[f]; s < start_[f + 1]; ++s) {
          const Vec3& p = pts[order_[s]];
          const double t = len2 > 0.0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
          if ((a + t * d - p).norm() <= radius) return true;
        }
      }
    }
  }
  return false;
}

std::vector<double> PointIndex::nearest_neighbor_spacing() const {
  const auto& pts = *points_;
  std::vector<double> out(pts.size(), std::numeric_limits<double>::infinity());
  detail::parallel_for(Index(pts.size()), [&](Index pi) {
    const Vec3& x = pts[pi];
    const auto b = bin_of(x);
    double best = std::numeric_limits<double>::infinity();
    const int max_r = std::max({dims_[0], dims_[1], dims_[2]});
    for (int r = 0; r <= max_r; ++r) {
      for (int k = std::max(0, b[2] - r); k <= std::min(dims_[2] - 1, b[2] + r); ++k) {
        for (int j = std::max(0, b[1] - r); j <= std::min(dims_[1] - 1, b[1] + r); ++j) {
          for (int i = std::max(0, b[0] - r); i <= std::min(dims_[0] - 1, b[0] + r); ++i) {
            if (std::abs(i - b[0]) != r && std::abs(j - b[1]) != r && std::abs(k - b[2]) != r) {
              continue;
            }
            const std::size_t f = flat(i, j, k);
            for (std::size_t s = start_[f]; s < start_[f + 1]; ++s) {
              if (order_[s] == std::size_t(pi)) continue;
              best = std::min(best, (pts[order_[s]] - x).norm());
            }
          }
        }
      }
      // Points outside the searched block are at least r cells away.
      if (best <= r * cell_.minCoeff()) break;
    }
    out[pi] = best;
  });
  return out;
}

double cloud_resolution(const PointCloud& cloud, double q) {
  if (cloud.points.size() < 2) throw InsufficientDataError("cloud_resolution: need >= 2 points");
  const PointIndex index(cloud.points);
  std::vector<double> nn = index.nearest_neighbor_spacing();
  std::sort(nn.begin(), nn.end());
  const double pos = std::clamp(q, 0.0, 1.0) * double(nn.size() - 1);
  const std::size_t i = std::size_t(std::floor(pos));
  const std::size_t j = std::min(i + 1, nn.size() - 1);
  return nn[i] + (pos - double(i)) * (nn[j] - nn[i]);
}

double NodalLevelSet::eval(const Vec3& x) const {
  const Index e = mesh.locate(x);
  const auto nodes = mesh.element_nodes(e);
  const Vec3 t = (x - mesh.element_lo(e)).cwiseQuotient(mesh.spacing());
  double v = 0.0;
  for (int i = 0; i < 8; ++i) {
    double w = 1.0;
    for (int a = 0; a < 3; ++a) w *= ((i >> a) & 1) ? t[a] : 1.0 - t[a];
    v += w * values[nodes[i]];
  }
  return v;
}

Vec3 NodalLevelSet::gradient(const Vec3& x) const {
  const Index e = mesh.locate(x);
  const auto nodes = mesh.element_nodes(e);
  const Vec3 t = (x - mesh.element_lo(e)).cwiseQuotient(mesh.spacing());
  Vec3 g = Vec3::Zero();
  for (int i = 0; i < 8; ++i) {
    for (int d = 0; d < 3; ++d) {
      double w = 1.0;
      for (int a = 0; a < 3; ++a) {
        const bool up = (i >> a) & 1;
        if (a == d) {
          w *= (up ? 1.0 : -1.0) / mesh.spacing()[a];
        } else {
          w *= up ? t[a] : 1.0 - t[a];
        }
      }
      g[d] += w * values[nodes[i]];
    }
  }
  return g;
}

LevelSetField NodalLevelSet::field() const {
  auto self = std::make_shared<const NodalLevelSet>(*this);
  return LevelSetField([self](const Vec3& x) { return self->eval(x); },
                       [self](const Vec3& x) { return self->gradient(x); });
}

NodalLevelSet signed_distance(const PointCloud& cloud, const Mesh& mesh) {
  if (cloud.points.size() < 4) throw InsufficientDataError("signed_distance: need >= 4 points");
  check_cloud_inside(cloud, mesh.domain());
  const PointIndex index(cloud.points);
  NodalLevelSet out{mesh, std::vector<double>(mesh.num_nodes()), cloud_resolution(cloud, 0.95)};

  const Index n = mesh.num_nodes();
  detail::parallel_for(n, [&](Index i) { out.values[i] = index.nearest(mesh.node_point(i)).first; });

  std::vector<std::uint8_t> outside(n, 0);
  std::vector<Index> queue;
  for (Index b : mesh.boundary_nodes()) {
    outside[b] = 1;
    queue.push_back(b);
  }
  const auto counts = mesh.counts();
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Index node = queue[head];
    const GridIndex g = mesh.node_grid(node);
    const Vec3 x = mesh.node_point(node);
    for (int axis = 0; axis < 3; ++axis) {
      for (int step : {-1, 1}) {
        std::array<int, 3> c{g.i, g.j, g.k};
        c[axis] += step;
        if (c[axis] < 0 || c[axis] > counts[axis]) continue;
        const Index nb = mesh.node_index(c[0], c[1], c[2]);
        if (outside[nb]) continue;
        if (index.near_segment(x, mesh.node_point(nb), out.delta)) continue;
        outside[nb] = 1;
        queue.push_back(nb);
      }
    }
  }
  // nodes the fill missed but that sit on the cloud itself do not make a region
  bool interior = false;
  for (Index i = 0; i < n && !interior; ++i) interior = !outside[i] && out.values[i] > out.delta;
  if (!interior) {
    throw DegenerateCloudError(
        "signed_distance: no node is enclosed by the cloud at this mesh resolution");
  }
  for (Index i = 0; i < n; ++i) {
    if (!outside[i]) out.values[i] = -out.values[i];
  }
  return out;
}

PointCloud fibonacci_sphere(std::size_t n, const Vec3& center, double radius) {
  PointCloud cloud;
  cloud.points.reserve(n);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (double(i) + 0.5) / double(n);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * double(i);
    cloud.points.push_back(center + radius * Vec3(rho * std::cos(phi), rho * std::sin(phi), z));
  }
  return cloud;
}

}  // namespace ppife
