#ifndef SHOREVO_MLESAC_HPP
#define SHOREVO_MLESAC_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "shorevo/geometry.hpp"

namespace shorevo {

inline double deg2rad(double d) { return d * M_PI / 180.0; }

struct MlesacParams {
    double cos_cutoff = std::cos(deg2rad(5.0));
    int max_iterations = 200;
    int min_subset = 3;
    std::uint64_t seed = 0;
    int min_inliers = 8;

    /// Nominal cutoff range is [cos 7deg, cos 3deg].
    bool cutoff_in_nominal_range() const {
        return cos_cutoff > std::cos(deg2rad(7.0)) - 1e-9 &&
               cos_cutoff < std::cos(deg2rad(3.0)) + 1e-9;
    }
};

struct RobustEstimate {
    Vec3 position = Vec3::Zero();  // world meters; for the homogeneous mode
                                   // this is s_home + unit baseline direction
    std::vector<int> inliers;
    double score = 0.0;
    int iterations_used = 0;
};

/// Truncated epipolar misalignment cost of a candidate position over all
/// correspondences. Returns (score, inlier index set).
std::pair<double, std::vector<int>> score_hypothesis(
    const Vec3& position,
    const std::vector<Correspondence>& cs,
    double cutoff);

/// MLESAC over minimal subsets. Homogeneous mode (anchored == false)
/// estimates the signed unit baseline direction from a single home view;
/// anchored mode estimates the scale-aware world position.
RobustEstimate mlesac_position(const std::vector<Correspondence>& cs,
                               const MlesacParams& params,
                               bool anchored);

}  // namespace shorevo

#endif
