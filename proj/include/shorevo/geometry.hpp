#ifndef SHOREVO_GEOMETRY_HPP
#define SHOREVO_GEOMETRY_HPP

#include <vector>

#include "shorevo/types.hpp"

namespace shorevo {

/// One depth-eliminated constraint on the baseline. The coefficients act on
/// the baseline expressed in the home camera frame: a . b_home = 0.
struct BaselineEquationRow {
    Vec3 a = Vec3::Zero();

    bool trivial(double tol = 1e-12) const { return a.norm() < tol; }
};

/// A tracked feature seen in its home view and one later view, with the
/// orientations of both views and the known home position.
struct Correspondence {
    NormalizedProjection home;
    NormalizedProjection cur;
    Rotation r_home;   // world orientation at the home view
    Rotation r_cur;    // world orientation at the current view
    Vec3 s_home = Vec3::Zero();  // known world position of the home view
};

/// Rotation taking the home camera frame to the current camera frame.
/// Columns of the result are the current camera axes in home-frame
/// coordinates. This is the single place the convention is defined.
Rotation relative_rotation(const Rotation& r_home, const Rotation& r_cur);

/// Applies the relative rotation as a homography, producing the projection a
/// purely translating camera would have measured in the home frame.
/// Throws CheiralityError when the rotated ray lands behind the image plane.
NormalizedProjection unrotate(const NormalizedProjection& m_cur,
                              const Rotation& r_rel,
                              double cheirality_eps = 1e-12);

/// Depth-eliminated linear constraint on the home-frame baseline for one
/// correspondence. Zero-disparity correspondences yield the trivial row.
BaselineEquationRow baseline_row(const Correspondence& c);

/// Unit baseline direction (up to sign) from stacked homogeneous rows.
/// Trivial rows are dropped; throws DegenerateSystemError when the remaining
/// system has rank < 2.
Vec3 solve_baseline_homogeneous(const std::vector<BaselineEquationRow>& rows);

/// Scale-aware world position of the current view from correspondences
/// anchored at >= 2 distinct known home positions.
Vec3 solve_baseline_anchored(const std::vector<Correspondence>& cs,
                             double condition_limit = 1e12);

/// Home-view depth from the two per-axis projection equations, solved in
/// least squares. b_home is the baseline in the home camera frame.
double triangulate_depth(const NormalizedProjection& m_home,
                         const NormalizedProjection& m_unrot,
                         const Vec3& b_home);

/// Resolves the two-view sign ambiguity by counting positive triangulated
/// depths under both signs of the candidate world direction.
Vec3 vote_sign(const Vec3& direction, const std::vector<Correspondence>& cs);

/// Cosine of the dihedral angle between the two epipolar planes (home-frame
/// quantities; b must be unit, or zero to request the pure-rotation
/// collinearity fallback). Throws DegenerateRayError at the epipole.
double epipolar_cos(const NormalizedProjection& m1,
                    const NormalizedProjection& m2,
                    const Rotation& r_rel,
                    const Vec3& b,
                    double epipole_eps = 1e-12);

}  // namespace shorevo

#endif
