#ifndef SHOREVO_IMU_HPP
#define SHOREVO_IMU_HPP

#include <utility>
#include <vector>

#include "shorevo/types.hpp"

namespace shorevo {

/// One timestamped angular-velocity reading in IMU axes.
struct GyroSample {
    double t = 0.0;   // seconds
    Vec3 w = Vec3::Zero();  // rad/s, IMU axes
};

/// Fixed mapping from IMU axes to camera axes. The source frame need not be
/// right handed, so det may be -1; columns stay orthonormal.
struct ImuAlignment {
    Mat3 m = Mat3::Identity();
    Vec3 bias = Vec3::Zero();  // constant rate bias in IMU axes, subtracted first

    bool valid(double tol = 1e-6) const {
        return (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol;
    }
};

struct FrameClock {
    int frame_index = 0;
    double t = 0.0;  // seconds
};

/// Angular velocity mapped into camera axes.
Vec3 remap(const GyroSample& s, const ImuAlignment& a);

/// Rotation matrix of the rotation vector theta (rad). Small angles use the
/// series expansion of both coefficients.
Rotation rodrigues(const Vec3& theta);

/// Composes per-sample increments (trapezoidal angular-velocity averaging)
/// and interpolates the orientation at each frame time.
/// Throws CoverageError when a frame time falls outside the sample span and
/// NonMonotoneError for unordered timestamps.
std::vector<std::pair<int, Rotation>> integrate(
    const std::vector<GyroSample>& samples,
    const ImuAlignment& a,
    const std::vector<FrameClock>& clock,
    const Rotation& r0);

}  // namespace shorevo

#endif
