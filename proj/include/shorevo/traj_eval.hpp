#ifndef SHOREVO_TRAJ_EVAL_HPP
#define SHOREVO_TRAJ_EVAL_HPP

#include <vector>

#include "shorevo/spline.hpp"

namespace shorevo {

struct AffineTransform2D {
    Eigen::Matrix2d a = Eigen::Matrix2d::Identity();
    Vec2 t = Vec2::Zero();
    bool degenerate = false;  // samples collinear: minimum-norm solution

    Vec2 apply(const Vec2& p) const { return a * p + t; }
};

struct ErrorReport {
    std::vector<double> fractions;   // u_k in [0, 1]
    std::vector<double> errors;      // meters, aligned with fractions
    std::vector<double> distance_m;  // u_k * ground-truth length
    double max_error = 0.0;
    double mean_error = 0.0;
    double rmse = 0.0;
    std::vector<double> histogram_edges;  // bin edges, 0 .. max
    std::vector<int> histogram_counts;
};

/// Least-squares 2D affine transform mapping the odometry spline onto the
/// ground-truth spline at n common arc-length fractions.
AffineTransform2D fit_affine(const CatmullRomSpline& g,
                             const CatmullRomSpline& v,
                             int n = 200);

/// Position errors at n common fractions after affine alignment, with
/// summary statistics and a 20-bin histogram.
ErrorReport evaluate(const CatmullRomSpline& g,
                     const CatmullRomSpline& v,
                     int n = 200,
                     int histogram_bins = 20);

}  // namespace shorevo

#endif
