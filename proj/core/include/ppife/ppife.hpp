#pragma once

#include "ppife/assembly.hpp"
#include "ppife/discretization.hpp"
#include "ppife/error_analysis.hpp"
#include "ppife/ife_basis.hpp"
#include "ppife/interface_geometry.hpp"
#include "ppife/io.hpp"
#include "ppife/level_set.hpp"
#include "ppife/mesh.hpp"
#include "ppife/pointcloud.hpp"
#include "ppife/problems.hpp"
#include "ppife/q1poly.hpp"
#include "ppife/quadrature.hpp"
