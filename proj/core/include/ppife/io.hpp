#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ppife/error_analysis.hpp"
#include "ppife/interface_geometry.hpp"
#include "ppife/mesh.hpp"

namespace ppife {

/// Header: N,h,e_inf,e_0,e_1,e_energy,assembly_s,solve_s,interface_element_pct.
/// Timing columns are written as 0 when `timing` is false so reruns are byte-identical.
std::string format_errors_csv(const std::vector<ErrorReport>& reports, bool timing = true);
void write_errors_csv(const std::filesystem::path& path, const std::vector<ErrorReport>& reports,
                      bool timing = true);
std::vector<ErrorReport> read_errors_csv(const std::filesystem::path& path);

struct InterfaceStats {
  int n = 0;
  double h = 0.0;
  Index elements = 0;
  Index interface_elements = 0;
  /// Counts of Types I to V.
  std::array<Index, 5> per_type{};
  Index violations = 0;

  double fraction() const { return elements ? double(interface_elements) / double(elements) : 0.0; }
};

InterfaceStats interface_stats(const Mesh& mesh, const MeshClassification& cls);
std::string format_stats_csv(const std::vector<InterfaceStats>& stats);
void write_stats_csv(const std::filesystem::path& path, const std::vector<InterfaceStats>& stats);
std::vector<InterfaceStats> read_stats_csv(const std::filesystem::path& path);

using Triangle = std::array<Vec3, 3>;
/// Triangle soup of all approximating-plane triangles, ASCII OBJ.
std::vector<Triangle> tau_triangles(const MeshClassification& cls);
void write_obj(const std::filesystem::path& path, const std::vector<Triangle>& triangles);
std::vector<Triangle> read_obj(const std::filesystem::path& path);

/// Legacy ASCII VTK structured points with nodal scalars.
struct VtkField {
  std::array<int, 3> dims{};
  Vec3 origin = Vec3::Zero();
  Vec3 spacing = Vec3::Ones();
  std::vector<std::pair<std::string, std::vector<double>>> scalars;
};
void write_vtk(const std::filesystem::path& path, const Mesh& mesh,
               const std::vector<std::pair<std::string, Eigen::VectorXd>>& fields);
VtkField read_vtk(const std::filesystem::path& path);

/// Nodal field dump, CSV columns i,j,k,value.
void write_nodal_csv(const std::filesystem::path& path, const Mesh& mesh,
                     const std::vector<double>& values);
std::vector<double> read_nodal_csv(const std::filesystem::path& path, const Mesh& mesh);

}  // namespace ppife
