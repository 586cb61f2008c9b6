#include "shorevo/imu.hpp"

#include <Eigen/Geometry>
#include <algorithm>

namespace shorevo {

Vec3 remap(const GyroSample& s, const ImuAlignment& a) {
    return a.m * (s.w - a.bias);
}

static Mat3 skew(const Vec3& v) {
    Mat3 k;
    k << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
        -v.y(), v.x(), 0.0;
    return k;
}

Rotation rodrigues(const Vec3& theta) {
    const double n2 = theta.squaredNorm();
    const double n = std::sqrt(n2);
    double c1, c2;  // sin n / n and (1 - cos n) / n^2
    if (n < 1e-6) {
        c1 = 1.0 - n2 / 6.0;
        c2 = 0.5 - n2 / 24.0;
    } else {
        c1 = std::sin(n) / n;
        c2 = (1.0 - std::cos(n)) / n2;
    }
    const Mat3 k = skew(theta);
    return Rotation(Mat3::Identity() + c1 * k + c2 * (k * k));
}

std::vector<std::pair<int, Rotation>> integrate(
    const std::vector<GyroSample>& samples,
    const ImuAlignment& a,
    const std::vector<FrameClock>& clock,
    const Rotation& r0) {
    for (size_t i = 1; i < samples.size(); ++i)
        if (samples[i].t <= samples[i - 1].t)
            throw NonMonotoneError("integrate: gyro timestamps not increasing");
    for (size_t i = 1; i < clock.size(); ++i)
        if (clock[i].t <= clock[i - 1].t)
            throw NonMonotoneError("integrate: frame times not increasing");

    if (clock.empty()) return {};
    if (samples.empty() || clock.front().t < samples.front().t - 1e-12 ||
        clock.back().t > samples.back().t + 1e-12)
        throw CoverageError("integrate: frame times outside the gyro sample span");

    // Composed orientation at every sample time, with a polar
    // re-orthonormalization each 100 compositions.
    std::vector<Eigen::Quaterniond> q(samples.size());
    Mat3 r = r0.m;
    q[0] = Eigen::Quaterniond(r);
    for (size_t k = 0; k + 1 < samples.size(); ++k) {
        const double dt = samples[k + 1].t - samples[k].t;
        const Vec3 w_avg = 0.5 * (remap(samples[k], a) + remap(samples[k + 1], a));
        r = r * rodrigues(w_avg * dt).m;
        if ((k + 1) % 100 == 0) r = Rotation::project(r).m;
        q[k + 1] = Eigen::Quaterniond(r);
    }

    std::vector<std::pair<int, Rotation>> out;
    out.reserve(clock.size());
    size_t k = 0;
    for (const auto& fc : clock) {
        while (k + 1 < samples.size() && samples[k + 1].t < fc.t) ++k;
        Eigen::Quaterniond qi;
        if (k + 1 >= samples.size()) {
            qi = q[k];
        } else {
            const double span = samples[k + 1].t - samples[k].t;
            const double u = std::clamp((fc.t - samples[k].t) / span, 0.0, 1.0);
            qi = q[k].slerp(u, q[k + 1]);
        }
        out.emplace_back(fc.frame_index, Rotation(qi.normalized().toRotationMatrix()));
    }
    return out;
}

}  // namespace shorevo
