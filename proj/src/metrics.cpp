#include "vbjs/metrics.hpp"

#include <cmath>

namespace vbjs {

double rel_error(const Vector& f_star, const Vector& f_true, const BoolVector& region) {
  require_dim(f_star.size() == f_true.size(), "rel_error: length mismatch");
  require_dim(region.size() == 0 || region.size() == f_true.size(), "rel_error: region length mismatch");
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index i = 0; i < f_true.size(); ++i) {
    if (region.size() && !region(i)) continue;
    num += (f_star(i) - f_true(i)) * (f_star(i) - f_true(i));
    den += f_true(i) * f_true(i);
  }
  if (den == 0.0) throw InvalidArgument("rel_error: reference is zero on the region");
  return std::sqrt(num / den);
}

double abs_error(const Vector& f_star, const Vector& f_true, const Grid1D& grid, double x_star) {
  require_dim(f_star.size() == grid.Nx && f_true.size() == grid.Nx, "abs_error: length mismatch");
  const int j = grid.nearest(x_star);
  return std::abs(f_star(j) - f_true(j));
}

Vector pointwise_log(const Vector& f_star, const Vector& f_true) {
  require_dim(f_star.size() == f_true.size(), "pointwise_log: length mismatch");
  Vector out(f_true.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double e = std::abs(f_star(i) - f_true(i));
    out(i) = e > 0.0 ? std::max(-16.0, std::log10(e)) : -16.0;
  }
  return out;
}

ErrorReport error_report(const Vector& f_star, const Vector& f_true, const Grid1D& grid,
                         const BoolVector& region, double x_star) {
  ErrorReport r;
  r.rel_total = rel_error(f_star, f_true);
  r.rel_region = rel_error(f_star, f_true, region);
  r.x_star = grid.x(grid.nearest(x_star));
  r.abs_at = abs_error(f_star, f_true, grid, x_star);
  r.pointwise_log = pointwise_log(f_star, f_true);
  return r;
}

namespace regions {

namespace {
template <class Pred>
BoolVector select(const Grid1D& g, Pred pred) {
  BoolVector m(g.Nx);
  for (int j = 0; j < g.Nx; ++j) m(j) = pred(g.x(j));
  return m;
}
}  // namespace

BoolVector ramp_smooth(const Grid1D& grid) {
  return select(grid, [](double x) { return std::abs(x) >= 1.0 && std::abs(x) <= M_PI; });
}

BoolVector left_smooth(const Grid1D& grid) {
  return select(grid, [](double x) { return x >= -M_PI && x <= -1.0; });
}

BoolVector cross_section_smooth(const Grid1D& grid) {
  return select(grid, [](double x) { return std::abs(x) < 0.2; });
}

BoolVector by_name(const std::string& name, const Grid1D& grid) {
  if (name == "ramp_smooth") return ramp_smooth(grid);
  if (name == "left_smooth") return left_smooth(grid);
  if (name == "cross_section_smooth") return cross_section_smooth(grid);
  if (name == "all") return BoolVector::Constant(grid.Nx, true);
  throw InvalidArgument("unknown region preset '" + name + "'");
}

}  // namespace regions
}  // namespace vbjs
