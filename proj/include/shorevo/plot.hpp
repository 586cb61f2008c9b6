#ifndef SHOREVO_PLOT_HPP
#define SHOREVO_PLOT_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "shorevo/traj_eval.hpp"

namespace shorevo {

/// Trajectory overlay in meters: ground truth blue, odometry red.
void plot_overlay(const CatmullRomSpline& g, const CatmullRomSpline& v,
                  const AffineTransform2D& align,
                  const std::filesystem::path& file);

void plot_error_vs_distance(const ErrorReport& rep,
                            const std::filesystem::path& file);

void plot_histogram(const ErrorReport& rep, const std::filesystem::path& file);

}  // namespace shorevo

#endif
