#ifndef SHOREVO_TYPES_HPP
#define SHOREVO_TYPES_HPP

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <stdexcept>
#include <string>

namespace shorevo {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct CheiralityError : Error { using Error::Error; };
struct ZeroDisparityError : Error { using Error::Error; };
struct DegenerateSystemError : Error { using Error::Error; };
struct DegenerateRayError : Error { using Error::Error; };
struct AmbiguousSignError : Error { using Error::Error; };
struct InsufficientDataError : Error { using Error::Error; };
struct ZeroBaselineError : Error { using Error::Error; };
struct NoConsensusError : Error { using Error::Error; };
struct CoverageError : Error { using Error::Error; };
struct NonMonotoneError : Error { using Error::Error; };
struct SingularNormalEquationsError : Error { using Error::Error; };
struct ZeroSpeedError : Error { using Error::Error; };
struct TrackingLostError : Error { using Error::Error; };
struct RangeError : Error { using Error::Error; };
struct DegenerateError : Error { using Error::Error; };
struct RankDeficientError : Error { using Error::Error; };
struct ParameterError : Error { using Error::Error; };
struct ConsistencyError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct CrossRefError : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Core domain types
// ---------------------------------------------------------------------------

/// Camera orientation. Columns are the camera frame axes expressed in the
/// enclosing frame (world unless stated otherwise).
struct Rotation {
    Mat3 m = Mat3::Identity();

    Rotation() = default;
    explicit Rotation(const Mat3& mat) : m(mat) {}

    static constexpr double kOrthoTol = 1e-9;

    bool valid(double tol = kOrthoTol) const {
        return (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
               std::abs(m.determinant() - 1.0) <= tol;
    }

    /// Throws if not a proper rotation within tol.
    static Rotation checked(const Mat3& mat, double tol = kOrthoTol) {
        Rotation r(mat);
        if (!r.valid(tol))
            throw Error("matrix is not a proper rotation");
        return r;
    }

    /// Nearest rotation by polar projection (SVD).
    static Rotation project(const Mat3& mat);

    Rotation transposed() const { return Rotation(m.transpose()); }
    Rotation operator*(const Rotation& o) const { return Rotation(m * o.m); }
    Vec3 operator*(const Vec3& v) const { return m * v; }
};

/// Camera pose: orientation plus position in world meters.
struct Pose {
    Rotation r;
    Vec3 s = Vec3::Zero();

    Pose() = default;
    Pose(const Rotation& rot, const Vec3& pos) : r(rot), s(pos) {}
};

/// Image point in normalized Euclidean coordinates (implicit third
/// coordinate 1).
struct NormalizedProjection {
    double x = 0.0;
    double y = 0.0;

    NormalizedProjection() = default;
    NormalizedProjection(double px, double py) : x(px), y(py) {}

    Vec3 lift() const { return Vec3(x, y, 1.0); }

    static constexpr double kFovLimit = 10.0;

    bool within_fov(double limit = kFovLimit) const {
        return std::isfinite(x) && std::isfinite(y) &&
               std::abs(x) <= limit && std::abs(y) <= limit;
    }
};

}  // namespace shorevo

#endif
