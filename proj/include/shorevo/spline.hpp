#ifndef SHOREVO_SPLINE_HPP
#define SHOREVO_SPLINE_HPP

#include <Eigen/Core>
#include <vector>

#include "shorevo/types.hpp"

namespace shorevo {

struct PlanarPoint {
    double e = 0.0;  // meters east
    double n = 0.0;  // meters north

    PlanarPoint() = default;
    PlanarPoint(double east, double north) : e(east), n(north) {}

    Vec2 vec() const { return Vec2(e, n); }
};

/// Centripetal Catmull-Rom curve through planar control points, with a
/// cumulative arc-length table so the curve can be indexed by fraction of
/// total length.
class CatmullRomSpline {
public:
    /// Interpolates all input points (alpha = 0.5). Duplicate consecutive
    /// points are dropped with a warning flag; fewer than 2 distinct points
    /// is an error.
    static CatmullRomSpline fit(const std::vector<PlanarPoint>& points);

    /// Point at fraction u in [0, 1] of total arc length.
    PlanarPoint point_at_fraction(double u) const;

    double total_length() const { return total_length_; }
    int segment_count() const { return static_cast<int>(segments_.size()); }
    bool dropped_duplicates() const { return dropped_duplicates_; }
    const std::vector<PlanarPoint>& control_points() const { return control_; }

    /// Curve point at (segment, local t in [0,1]).
    Vec2 eval(int segment, double t) const;
    /// Curve derivative with respect to local t.
    Vec2 derivative(int segment, double t) const;

private:
    // One cubic span: c0 + c1 t + c2 t^2 + c3 t^3, t in [0, 1].
    struct Segment {
        Vec2 c[4];
    };

    std::vector<PlanarPoint> control_;
    std::vector<Segment> segments_;
    // Cumulative arc length at kSubdivisions points per segment, plus 0 at
    // the front; strictly increasing.
    std::vector<double> arc_table_;
    double total_length_ = 0.0;
    bool dropped_duplicates_ = false;

    static constexpr int kSubdivisions = 8;

    double segment_length(int segment, double t0, double t1) const;
    void build_arc_table();
};

}  // namespace shorevo

#endif
