#include "shorevo/spline.hpp"

#include <algorithm>
#include <cmath>

namespace shorevo {

namespace {

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
const double kGlNodes[8] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498, 0.5255324099163290,
    0.7966664774136267, 0.9602898564975363};
const double kGlWeights[8] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

Vec2 lerp_guarded(const Vec2& a, const Vec2& b, double ta, double tb, double t) {
    const double span = tb - ta;
    if (span < 1e-15) return b;  // duplicated endpoint knot
    return ((tb - t) / span) * a + ((t - ta) / span) * b;
}

// Barry-Goldman pyramid for one nonuniform Catmull-Rom span.
Vec2 barry_goldman(const Vec2 p[4], const double t[4], double tt) {
    const Vec2 a1 = lerp_guarded(p[0], p[1], t[0], t[1], tt);
    const Vec2 a2 = lerp_guarded(p[1], p[2], t[1], t[2], tt);
    const Vec2 a3 = lerp_guarded(p[2], p[3], t[2], t[3], tt);
    const Vec2 b1 = lerp_guarded(a1, a2, t[0], t[2], tt);
    const Vec2 b2 = lerp_guarded(a2, a3, t[1], t[3], tt);
    return lerp_guarded(b1, b2, t[1], t[2], tt);
}

}  // namespace

CatmullRomSpline CatmullRomSpline::fit(const std::vector<PlanarPoint>& points) {
    CatmullRomSpline s;
    for (const auto& p : points) {
        if (!std::isfinite(p.e) || !std::isfinite(p.n))
            throw DegenerateError("spline: non-finite control point");
        if (!s.control_.empty() &&
            (p.vec() - s.control_.back().vec()).norm() < 1e-9) {
            s.dropped_duplicates_ = true;
            continue;
        }
        s.control_.push_back(p);
    }
    const int n = static_cast<int>(s.control_.size());
    if (n < 2)
        throw InsufficientDataError("spline: fewer than 2 distinct points");

    // Endpoint padding by duplication, then centripetal knots (alpha = 0.5).
    std::vector<Vec2> padded;
    padded.reserve(static_cast<size_t>(n) + 2);
    padded.push_back(s.control_.front().vec());
    for (const auto& p : s.control_) padded.push_back(p.vec());
    padded.push_back(s.control_.back().vec());

    std::vector<double> knots(padded.size(), 0.0);
    for (size_t i = 1; i < padded.size(); ++i)
        knots[i] = knots[i - 1] + std::sqrt((padded[i] - padded[i - 1]).norm());

    // Each span between consecutive distinct points becomes a cubic; the
    // coefficients come from four exact evaluations (the curve restricted to
    // a span is a cubic in t).
    static const double nodes[4] = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
    Eigen::Matrix4d vand;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) vand(r, c) = std::pow(nodes[r], c);
    const Eigen::Matrix4d vinv = vand.inverse();

    for (int i = 1; i + 2 < static_cast<int>(padded.size()); ++i) {
        const Vec2 p[4] = {padded[static_cast<size_t>(i - 1)],
                           padded[static_cast<size_t>(i)],
                           padded[static_cast<size_t>(i + 1)],
                           padded[static_cast<size_t>(i + 2)]};
        const double t[4] = {knots[static_cast<size_t>(i - 1)],
                             knots[static_cast<size_t>(i)],
                             knots[static_cast<size_t>(i + 1)],
                             knots[static_cast<size_t>(i + 2)]};
        Eigen::Matrix<double, 4, 2> samples;
        for (int r = 0; r < 4; ++r) {
            const double tt = t[1] + nodes[r] * (t[2] - t[1]);
            samples.row(r) = barry_goldman(p, t, tt).transpose();
        }
        const Eigen::Matrix<double, 4, 2> coeff = vinv * samples;
        Segment seg;
        for (int c = 0; c < 4; ++c) seg.c[c] = coeff.row(c).transpose();
        s.segments_.push_back(seg);
    }

    s.build_arc_table();
    return s;
}

Vec2 CatmullRomSpline::eval(int segment, double t) const {
    const Segment& s = segments_[static_cast<size_t>(segment)];
    return s.c[0] + t * (s.c[1] + t * (s.c[2] + t * s.c[3]));
}

Vec2 CatmullRomSpline::derivative(int segment, double t) const {
    const Segment& s = segments_[static_cast<size_t>(segment)];
    return s.c[1] + t * (2.0 * s.c[2] + t * 3.0 * s.c[3]);
}

double CatmullRomSpline::segment_length(int segment, double t0, double t1) const {
    const double half = 0.5 * (t1 - t0);
    const double mid = 0.5 * (t0 + t1);
    double acc = 0.0;
    for (int i = 0; i < 8; ++i)
        acc += kGlWeights[i] * derivative(segment, mid + half * kGlNodes[i]).norm();
    return acc * half;
}

void CatmullRomSpline::build_arc_table() {
    arc_table_.assign(1, 0.0);
    double acc = 0.0;
    for (int seg = 0; seg < segment_count(); ++seg) {
        for (int k = 0; k < kSubdivisions; ++k) {
            const double t0 = static_cast<double>(k) / kSubdivisions;
            const double t1 = static_cast<double>(k + 1) / kSubdivisions;
            acc += segment_length(seg, t0, t1);
            arc_table_.push_back(acc);
        }
    }
    total_length_ = acc;
    if (!(total_length_ > 0.0))
        throw DegenerateError("spline: zero total length");
    for (size_t i = 1; i < arc_table_.size(); ++i)
        if (arc_table_[i] <= arc_table_[i - 1])
            throw DegenerateError("spline: arc table not strictly increasing");
}

PlanarPoint CatmullRomSpline::point_at_fraction(double u) const {
    if (u < -1e-12 || u > 1.0 + 1e-12)
        throw RangeError("point_at_fraction: u outside [0, 1]");
    u = std::clamp(u, 0.0, 1.0);
    if (u == 0.0) return control_.front();
    if (u == 1.0) return control_.back();

    const double target = u * total_length_;
    const auto it =
        std::upper_bound(arc_table_.begin(), arc_table_.end(), target);
    const int cell = std::max(
        0, static_cast<int>(it - arc_table_.begin()) - 1);
    const int seg = cell / kSubdivisions;
    const double ta = static_cast<double>(cell % kSubdivisions) / kSubdivisions;
    double lo = ta;
    double hi = ta + 1.0 / kSubdivisions;
    const double base = arc_table_[static_cast<size_t>(cell)];

    // Bisect to 1e-9 m along the sub-span.
    while ((hi - lo) * derivative(seg, 0.5 * (lo + hi)).norm() > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        if (base + segment_length(seg, ta, mid) < target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15) break;
    }
    const Vec2 p = eval(seg, 0.5 * (lo + hi));
    return PlanarPoint(p.x(), p.y());
}

}  // namespace shorevo
