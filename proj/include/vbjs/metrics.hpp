#pragma once

#include <string>

#include "vbjs/signal_models.hpp"

namespace vbjs {

/// ||f* - f|| / ||f|| over the indices where region is true (all if empty).
double rel_error(const Vector& f_star, const Vector& f_true, const BoolVector& region = {});
/// |f*(x*) - f(x*)| at the grid point nearest x_star.
double abs_error(const Vector& f_star, const Vector& f_true, const Grid1D& grid, double x_star);
/// log10 |f* - f|, clamped below at -16.
Vector pointwise_log(const Vector& f_star, const Vector& f_true);

struct ErrorReport {
  double rel_total = 0.0;
  double rel_region = 0.0;
  double x_star = 0.0;
  double abs_at = 0.0;
  Vector pointwise_log;
};

ErrorReport error_report(const Vector& f_star, const Vector& f_true, const Grid1D& grid,
                         const BoolVector& region, double x_star);

namespace regions {
/// 1 <= |x| <= pi, where the ramp is smooth.
BoolVector ramp_smooth(const Grid1D& grid);
/// x in [-pi, -1].
BoolVector left_smooth(const Grid1D& grid);
/// |x| < 0.2, the smooth centre of the 2D cross section.
BoolVector cross_section_smooth(const Grid1D& grid);
/// Lookup by preset name: ramp_smooth | left_smooth | cross_section_smooth | all.
BoolVector by_name(const std::string& name, const Grid1D& grid);
}  // namespace regions

constexpr double kRampXStar = -0.1;
constexpr double kSceneXStar = -0.57;

}  // namespace vbjs
