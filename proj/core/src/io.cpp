#include "ppife/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace ppife {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  return in;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

}  // namespace

std::string format_errors_csv(const std::vector<ErrorReport>& reports, bool timing) {
  std::string s = "N,h,e_inf,e_0,e_1,e_energy,assembly_s,solve_s,interface_element_pct\n";
  for (const auto& r : reports) {
    s += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{},{:.6f},{:.6f},{:.17g}\n", r.n, r.h,
                     r.e_inf, r.e_0, r.e_1,
                     r.e_energy ? fmt::format("{:.17g}", *r.e_energy) : std::string("nan"),
                     timing ? r.assembly_s : 0.0, timing ? r.solve_s : 0.0,
                     100.0 * r.interface_fraction);
  }
  return s;
}

void write_errors_csv(const std::filesystem::path& path, const std::vector<ErrorReport>& reports,
                      bool timing) {
  write_text(path, format_errors_csv(reports, timing));
}

std::vector<ErrorReport> read_errors_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);
  if (line.rfind("N,h,e_inf,e_0,e_1", 0) != 0) {
    throw std::runtime_error(fmt::format("'{}' is not an errors table", path.string()));
  }
  std::vector<ErrorReport> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split_csv(line);
    if (c.size() != 9) throw std::runtime_error("errors table: expected 9 columns");
    ErrorReport r;
    r.n = std::stoi(c[0]);
    r.h = std::stod(c[1]);
    r.e_inf = std::stod(c[2]);
    r.e_0 = std::stod(c[3]);
    r.e_1 = std::stod(c[4]);
    if (c[5] != "nan") r.e_energy = std::stod(c[5]);
    r.assembly_s = std::stod(c[6]);
    r.solve_s = std::stod(c[7]);
    r.interface_fraction = std::stod(c[8]) / 100.0;
    out.push_back(r);
  }
  return out;
}

InterfaceStats interface_stats(const Mesh& mesh, const MeshClassification& cls) {
  InterfaceStats s;
  s.n = mesh.counts()[0];
  s.h = mesh.h();
  s.elements = mesh.num_elements();
  for (CutKind k : cls.kinds) {
    switch (k) {
      case CutKind::TypeI: ++s.per_type[0]; break;
      case CutKind::TypeII: ++s.per_type[1]; break;
      case CutKind::TypeIII: ++s.per_type[2]; break;
      case CutKind::TypeIV: ++s.per_type[3]; break;
      case CutKind::TypeV: ++s.per_type[4]; break;
      default: break;
    }
  }
  s.interface_elements = cls.interface_count();
  s.violations = Index(cls.violations.size());
  return s;
}

std::string format_stats_csv(const std::vector<InterfaceStats>& stats) {
  std::string s =
      "N,h,elements,interface_elements,interface_fraction,type_I,type_II,type_III,type_IV,type_V,"
      "violations\n";
  for (const auto& r : stats) {
    s += fmt::format("{},{:.17g},{},{},{:.17g},{},{},{},{},{},{}\n", r.n, r.h, r.elements,
                     r.interface_elements, r.fraction(), r.per_type[0], r.per_type[1],
                     r.per_type[2], r.per_type[3], r.per_type[4], r.violations);
  }
  return s;
}

void write_stats_csv(const std::filesystem::path& path, const std::vector<InterfaceStats>& stats) {
  write_text(path, format_stats_csv(stats));
}

std::vector<InterfaceStats> read_stats_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);
  std::vector<InterfaceStats> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split_csv(line);
    if (c.size() != 11) throw std::runtime_error("stats table: expected 11 columns");
    InterfaceStats s;
    s.n = std::stoi(c[0]);
    s.h = std::stod(c[1]);
    s.elements = std::stoll(c[2]);
    s.interface_elements = std::stoll(c[3]);
    for (int t = 0; t < 5; ++t) s.per_type[t] = std::stoll(c[5 + t]);
    s.violations = std::stoll(c[10]);
    out.push_back(s);
  }
  return out;
}

std::vector<Triangle> tau_triangles(const MeshClassification& cls) {
  std::vector<Triangle> out;
  out.reserve(cls.interface_cuts.size());
  for (const auto& cut : cls.interface_cuts) {
    if (cut.plane) out.push_back(cut.plane->triangle);
  }
  return out;
}

void write_obj(const std::filesystem::path& path, const std::vector<Triangle>& triangles) {
  auto out = open_out(path);
  out << "# approximating-plane triangles\n";
  for (const auto& t : triangles) {
    for (const auto& v : t) out << fmt::format("v {:.17g} {:.17g} {:.17g}\n", v.x(), v.y(), v.z());
  }
  for (std::size_t i = 0; i < triangles.size(); ++i) {
    out << fmt::format("f {} {} {}\n", 3 * i + 1, 3 * i + 2, 3 * i + 3);
  }
}

std::vector<Triangle> read_obj(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<Vec3> verts;
  std::vector<Triangle> tris;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "v") {
      Vec3 v;
      ss >> v.x() >> v.y() >> v.z();
      verts.push_back(v);
    } else if (tag == "f") {
      std::array<long, 3> idx{};
      ss >> idx[0] >> idx[1] >> idx[2];
      Triangle t;
      for (int k = 0; k < 3; ++k) {
        if (idx[k] < 1 || idx[k] > long(verts.size())) {
          throw std::runtime_error("OBJ face references a missing vertex");
        }
        t[k] = verts[idx[k] - 1];
      }
      tris.push_back(t);
    }
  }
  return tris;
}

void write_vtk(const std::filesystem::path& path, const Mesh& mesh,
               const std::vector<std::pair<std::string, Eigen::VectorXd>>& fields) {
  auto out = open_out(path);
  const auto c = mesh.counts();
  const Vec3 o = mesh.domain().lo();
  const Vec3 s = mesh.spacing();
  out << "# vtk DataFile Version 3.0\nppife nodal fields\nASCII\nDATASET STRUCTURED_POINTS\n";
  out << fmt::format("DIMENSIONS {} {} {}\n", c[0] + 1, c[1] + 1, c[2] + 1);
  out << fmt::format("ORIGIN {:.17g} {:.17g} {:.17g}\n", o.x(), o.y(), o.z());
  out << fmt::format("SPACING {:.17g} {:.17g} {:.17g}\n", s.x(), s.y(), s.z());
  out << fmt::format("POINT_DATA {}\n", mesh.num_nodes());
  for (const auto& [name, values] : fields) {
    if (values.size() != mesh.num_nodes()) {
      throw std::invalid_argument(fmt::format("write_vtk: field '{}' has the wrong length", name));
    }
    out << fmt::format("SCALARS {} double 1\nLOOKUP_TABLE default\n", name);
    for (Index i = 0; i < values.size(); ++i) out << fmt::format("{:.17g}\n", values[i]);
  }
}

VtkField read_vtk(const std::filesystem::path& path) {
  auto in = open_in(path);
  VtkField f;
  std::string tok;
  Index npoints = -1;
  while (in >> tok) {
    if (tok == "DIMENSIONS") {
      in >> f.dims[0] >> f.dims[1] >> f.dims[2];
    } else if (tok == "ORIGIN") {
      in >> f.origin.x() >> f.origin.y() >> f.origin.z();
    } else if (tok == "SPACING") {
      in >> f.spacing.x() >> f.spacing.y() >> f.spacing.z();
    } else if (tok == "POINT_DATA") {
      in >> npoints;
    } else if (tok == "SCALARS") {
      std::string name, type;
      int ncomp = 1;
      in >> name >> type >> ncomp;
      std::string lt, table;
      in >> lt >> table;
      if (npoints < 0) throw std::runtime_error("VTK: SCALARS before POINT_DATA");
      std::vector<double> values(npoints);
      for (auto& v : values) {
        if (!(in >> v)) throw std::runtime_error("VTK: truncated scalar block");
      }
      f.scalars.emplace_back(name, std::move(values));
    }
  }
  return f;
}

void write_nodal_csv(const std::filesystem::path& path, const Mesh& mesh,
                     const std::vector<double>& values) {
  if (Index(values.size()) != mesh.num_nodes()) {
    throw std::invalid_argument("write_nodal_csv: one value per node is required");
  }
  auto out = open_out(path);
  out << "i,j,k,value\n";
  for (Index n = 0; n < mesh.num_nodes(); ++n) {
    const GridIndex g = mesh.node_grid(n);
    out << fmt::format("{},{},{},{:.17g}\n", g.i, g.j, g.k, values[n]);
  }
}

std::vector<double> read_nodal_csv(const std::filesystem::path& path, const Mesh& mesh) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);
  std::vector<double> values(mesh.num_nodes(), 0.0);
  std::vector<bool> seen(mesh.num_nodes(), false);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split_csv(line);
    if (c.size() != 4) throw std::runtime_error("nodal CSV: expected i,j,k,value");
    const Index n = mesh.node_index(std::stoi(c[0]), std::stoi(c[1]), std::stoi(c[2]));
    values[n] = std::stod(c[3]);
    seen[n] = true;
  }
  for (bool s : seen) {
    if (!s) throw std::runtime_error("nodal CSV: missing nodes");
  }
  return values;
}

}  // namespace ppife
