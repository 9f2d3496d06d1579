#pragma once

#include <filesystem>
#include <istream>
#include <stdexcept>
#include <vector>

#include "ppife/level_set.hpp"
#include "ppife/mesh.hpp"

namespace ppife {

struct PointCloud {
  std::vector<Vec3> points;
};

class CloudParseError : public std::runtime_error {
 public:
  CloudParseError(int line, const std::string& what) : std::runtime_error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateCloudError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One point per non-empty line; '#' starts a comment; coordinates separated
/// by whitespace or commas.
PointCloud parse_cloud(std::istream& in);
PointCloud load_cloud(const std::filesystem::path& path);
void save_cloud(const PointCloud& cloud, const std::filesystem::path& path);

/// Throws std::invalid_argument listing the first offending point.
void check_cloud_inside(const PointCloud& cloud, const BoxDomain& domain);

/// Uniform-bin spatial index for nearest-point and segment-proximity queries.
class PointIndex {
 public:
  explicit PointIndex(const std::vector<Vec3>& points, int target_per_bin = 4);

  /// (distance, point index) of the nearest point.
  std::pair<double, std::size_t> nearest(const Vec3& x) const;
  /// True when some point lies within `radius` of the segment [a, b].
  bool near_segment(const Vec3& a, const Vec3& b, double radius) const;
  /// Distance to the nearest other point, for each point.
  std::vector<double> nearest_neighbor_spacing() const;

 private:
  std::array<int, 3> bin_of(const Vec3& x) const;
  std::size_t flat(int i, int j, int k) const;

  const std::vector<Vec3>* points_;
  Vec3 lo_;
  Vec3 cell_;
  std::array<int, 3> dims_{};
  std::vector<std::size_t> start_;
  std::vector<std::size_t> order_;
};

/// Nodal signed-distance field; evaluation inside an element is the trilinear
/// interpolant of its corner values.
struct NodalLevelSet {
  Mesh mesh;
  std::vector<double> values;
  /// Local cloud resolution used to block the sign flood fill.
  double delta = 0.0;

  double eval(const Vec3& x) const;
  Vec3 gradient(const Vec3& x) const;
  LevelSetField field() const;
};

/// |value| = distance to the nearest cloud point. The sign comes from a flood
/// fill from the boundary nodes across mesh edges that stay farther than delta
/// from the cloud (delta = 95th percentile nearest-neighbour spacing); nodes
/// never reached are negative.
NodalLevelSet signed_distance(const PointCloud& cloud, const Mesh& mesh);

/// Quantile q in [0, 1] of the nearest-neighbour spacing.
double cloud_resolution(const PointCloud& cloud, double q = 0.95);

/// Fibonacci-lattice sample of a sphere.
PointCloud fibonacci_sphere(std::size_t n, const Vec3& center, double radius);

}  // namespace ppife
