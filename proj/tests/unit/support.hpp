#pragma once

#include <filesystem>
#include <random>
#include <string>

#include <doctest.h>

#include "ppife/ppife.hpp"

namespace testing {

inline std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::path(PPIFE_TEST_TMP) / name;
  std::filesystem::create_directories(p);
  return p;
}

inline ppife::Vec3 random_point(std::mt19937_64& rng, const ppife::Vec3& lo, const ppife::Vec3& hi) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return lo + ppife::Vec3(u(rng), u(rng), u(rng)).cwiseProduct(hi - lo);
}

inline ppife::Mesh unit_mesh(int n) {
  return ppife::build_mesh(ppife::BoxDomain(ppife::Vec3::Zero(), ppife::Vec3::Ones()), {n, n, n});
}

}  // namespace testing
