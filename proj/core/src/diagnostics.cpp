#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ppife/interface_geometry.hpp"
#include "ppife/quadrature.hpp"

namespace ppife {

GeometricDiagnostics geometric_diagnostics(const ElementCut& cut, const LevelSetField& ls,
                                           int samples) {
  if (!cut.plane) throw std::invalid_argument("geometric_diagnostics: cut has no plane");
  if (samples < 1) throw std::invalid_argument("geometric_diagnostics: samples must be >= 1");
  const SubElementTessellation tess = tessellate_cut(cut);
  const double h = cut.spacing().maxCoeff();
  const Vec3 nbar = cut.plane->normal;
  const Vec3 lo = cut.lo();
  const Vec3 hi = cut.hi();
  const double box_tol = 1e-12 * h;

  GeometricDiagnostics out;
  const Polygon& poly = tess.section;
  for (std::size_t t = 1; t + 1 < poly.size(); ++t) {
    const Vec3& a = poly[0];
    const Vec3& b = poly[t];
    const Vec3& c = poly[t + 1];
    for (int i = 0; i <= samples; ++i) {
      for (int j = 0; j <= samples - i; ++j) {
        const double u = double(i) / samples;
        const double v = double(j) / samples;
        const Vec3 p = a + u * (b - a) + v * (c - a);
        const auto x = lift_to_surface(ls, p, nbar, 2.0 * h);
        if (!x) {
          throw std::runtime_error("geometric_diagnostics: could not lift a sample onto the interface");
        }
        const bool inside = ((x->array() >= lo.array() - box_tol).all() &&
                             (x->array() <= hi.array() + box_tol).all());
        if (!inside) continue;
        out.max_dist = std::max(out.max_dist, std::abs((*x - p).dot(nbar)));
        out.min_normal_dot = std::min(out.min_normal_dot, ls.unit_normal(*x, h).dot(nbar));
      }
    }
  }
  out.patch_area = surface_rule(cut, ls).measure();
  return out;
}

}  // namespace ppife
