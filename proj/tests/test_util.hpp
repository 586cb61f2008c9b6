#ifndef SHOREVO_TEST_UTIL_HPP
#define SHOREVO_TEST_UTIL_HPP

// Shared synthetic-scene helpers for the unit tests. Everything here builds
// observations by direct pinhole forward projection, independent of the
// library's estimation path, so it can serve as an oracle.

#include <Eigen/Geometry>
#include <random>

#include "shorevo/geometry.hpp"

namespace shorevo::testutil {

inline Rotation random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::Quaterniond q(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
    q.normalize();
    return Rotation(q.toRotationMatrix());
}

inline Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec3 v(gauss(rng), gauss(rng), gauss(rng));
    return v.normalized();
}

/// Pinhole projection of a world point into a camera with world orientation r
/// (columns are camera axes) and center s. Returns false when behind.
inline bool project(const Rotation& r, const Vec3& s, const Vec3& point,
                    NormalizedProjection* out) {
    const Vec3 x_cam = r.m.transpose() * (point - s);
    if (x_cam.z() <= 1e-9) return false;
    *out = NormalizedProjection(x_cam.x() / x_cam.z(), x_cam.y() / x_cam.z());
    return true;
}

/// World point at depth z along the home camera's optical axis direction of
/// projection m.
inline Vec3 backproject(const Rotation& r, const Vec3& s,
                        const NormalizedProjection& m, double depth) {
    return s + r.m * (depth * m.lift());
}

/// Correspondence between two posed views observing `point`. Returns false
/// when the point is behind either camera.
inline bool make_correspondence(const Pose& home, const Pose& cur,
                                const Vec3& point, Correspondence* c) {
    NormalizedProjection mh, mc;
    if (!project(home.r, home.s, point, &mh)) return false;
    if (!project(cur.r, cur.s, point, &mc)) return false;
    c->home = mh;
    c->cur = mc;
    c->r_home = home.r;
    c->r_cur = cur.r;
    c->s_home = home.s;
    return true;
}

}  // namespace shorevo::testutil

#endif
