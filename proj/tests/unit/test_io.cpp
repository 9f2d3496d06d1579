#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace ppife;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("errors table round trip") {
  ErrorReport a;
  a.n = 10;
  a.h = 0.2;
  a.e_inf = 1.25e-3;
  a.e_0 = 3.0e-4;
  a.e_1 = 0.1 / 3.0;
  a.e_energy = 0.07;
  a.assembly_s = 1.5;
  a.solve_s = 0.25;
  a.interface_fraction = 0.0875;
  ErrorReport b = a;
  b.n = 20;
  b.e_energy.reset();
  const auto path = testing::scratch("io") / "errors.csv";
  write_errors_csv(path, {a, b});
  const auto back = read_errors_csv(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].n == 10);
  CHECK(back[0].e_1 == a.e_1);
  CHECK(back[0].e_energy == a.e_energy);
  CHECK_FALSE(back[1].e_energy);
  CHECK(back[0].interface_fraction == doctest::Approx(0.0875).epsilon(1e-15));
  CHECK(back[0].assembly_s == doctest::Approx(1.5));
  const std::string text = slurp(path);
  CHECK(text.rfind("N,h,e_inf,e_0,e_1,e_energy,assembly_s,solve_s,interface_element_pct\n", 0) == 0);
  CHECK(format_errors_csv({a}, false).find(",0.000000,0.000000,") != std::string::npos);
}

TEST_CASE("stats table") {
  const auto ls = plane_level_set(Vec3(1, 0, 0), 10.0);  // x - 10
  const Mesh m = testing::unit_mesh(4);
  const auto s0 = interface_stats(m, classify_mesh(ls, m));
  CHECK(s0.interface_elements == 0);
  CHECK(s0.fraction() == 0.0);

  const Mesh m2 = build_mesh(BoxDomain(Vec3::Constant(-1), Vec3::Constant(1)), {10, 10, 10});
  const auto cls = classify_mesh(sphere_level_set(Vec3::Zero(), 0.5), m2);
  const auto s = interface_stats(m2, cls);
  Index sum = 0;
  for (Index c : s.per_type) sum += c;
  CHECK(sum == s.interface_elements);
  CHECK(s.elements == 1000);
  const auto path = testing::scratch("io") / "stats.csv";
  write_stats_csv(path, {s0, s});
  const auto back = read_stats_csv(path);
  REQUIRE(back.size() == 2);
  CHECK(back[1].per_type == s.per_type);
  CHECK(back[1].interface_elements == s.interface_elements);
  CHECK(back[1].fraction() == doctest::Approx(s.fraction()));
}

TEST_CASE("OBJ round trip") {
  const Mesh m = build_mesh(BoxDomain(Vec3::Constant(-1), Vec3::Constant(1)), {8, 8, 8});
  const auto tris = tau_triangles(classify_mesh(sphere_level_set(Vec3::Zero(), 0.55), m));
  REQUIRE_FALSE(tris.empty());
  const auto path = testing::scratch("io") / "tau.obj";
  write_obj(path, tris);
  const auto back = read_obj(path);
  REQUIRE(back.size() == tris.size());
  for (std::size_t i = 0; i < tris.size(); ++i)
    for (int k = 0; k < 3; ++k) CHECK(back[i][k] == tris[i][k]);
  std::ofstream(testing::scratch("io") / "broken.obj") << "v 0 0 0\nf 1 2 3\n";
  CHECK_THROWS(read_obj(testing::scratch("io") / "broken.obj"));
}

TEST_CASE("VTK round trip") {
  const Mesh m = build_mesh(BoxDomain(Vec3(0, -1, 2), Vec3(1, 1, 3)), {2, 3, 4});
  Eigen::VectorXd a(m.num_nodes()), b(m.num_nodes());
  for (Index i = 0; i < m.num_nodes(); ++i) {
    a[i] = m.node_point(i).sum() / 3.0;
    b[i] = -double(i);
  }
  const auto path = testing::scratch("io") / "f.vtk";
  write_vtk(path, m, {{"u_h", a}, {"level_set", b}});
  const auto f = read_vtk(path);
  CHECK(f.dims == std::array<int, 3>{3, 4, 5});
  CHECK(f.origin == Vec3(0, -1, 2));
  CHECK((f.spacing - Vec3(0.5, 2.0 / 3.0, 0.25)).norm() < 1e-15);
  REQUIRE(f.scalars.size() == 2);
  CHECK(f.scalars[0].first == "u_h");
  for (Index i = 0; i < m.num_nodes(); ++i) {
    CHECK(f.scalars[0].second[i] == a[i]);
    CHECK(f.scalars[1].second[i] == b[i]);
  }
  CHECK_THROWS_AS(write_vtk(path, m, {{"bad", Eigen::VectorXd::Zero(3)}}), std::invalid_argument);
}

TEST_CASE("nodal CSV round trip") {
  const Mesh m = testing::unit_mesh(3);
  std::vector<double> v(m.num_nodes());
  for (Index i = 0; i < m.num_nodes(); ++i) v[i] = 0.1 * double(i) - 1.0 / 7.0;
  const auto path = testing::scratch("io") / "nodal.csv";
  write_nodal_csv(path, m, v);
  CHECK(read_nodal_csv(path, m) == v);
  CHECK_THROWS_AS(write_nodal_csv(path, m, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS(read_nodal_csv(path, testing::unit_mesh(4)));
}

}
