#include "shorevo/geometry.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace shorevo {

Rotation Rotation::project(const Mat3& mat) {
    Eigen::JacobiSVD<Mat3> svd(mat, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0) {
        Mat3 flip = Mat3::Identity();
        flip(2, 2) = -1.0;
        r = svd.matrixU() * flip * svd.matrixV().transpose();
    }
    return Rotation(r);
}

Rotation relative_rotation(const Rotation& r_home, const Rotation& r_cur) {
    return Rotation(r_home.m.transpose() * r_cur.m);
}

NormalizedProjection unrotate(const NormalizedProjection& m_cur,
                              const Rotation& r_rel,
                              double cheirality_eps) {
    const Vec3 v = r_rel.m * m_cur.lift();
    if (v.z() <= cheirality_eps)
        throw CheiralityError("unrotate: ray rotated behind the image plane");
    return NormalizedProjection(v.x() / v.z(), v.y() / v.z());
}

BaselineEquationRow baseline_row(const Correspondence& c) {
    const Rotation r_rel = relative_rotation(c.r_home, c.r_cur);
    const NormalizedProjection mp = unrotate(c.cur, r_rel);
    const double dx = mp.x - c.home.x;
    const double dy = mp.y - c.home.y;
    BaselineEquationRow row;
    row.a = Vec3(-dy, dx, dy * mp.x - dx * mp.y);
    return row;
}

Vec3 solve_baseline_homogeneous(const std::vector<BaselineEquationRow>& rows) {
    std::vector<Vec3> usable;
    usable.reserve(rows.size());
    for (const auto& r : rows)
        if (!r.trivial()) usable.push_back(r.a);
    if (usable.size() < 2)
        throw DegenerateSystemError(
            "homogeneous baseline: fewer than 2 non-trivial rows");

    // Unit row norms: each row annihilates the baseline on its own, so
    // equilibration leaves the null space untouched while keeping
    // large-disparity rows from dominating the noisy case.
    Eigen::MatrixXd A(static_cast<int>(usable.size()), 3);
    for (int i = 0; i < A.rows(); ++i)
        A.row(i) = usable[static_cast<size_t>(i)].normalized();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv(1) <= sv(0) * 1e-12)
        throw DegenerateSystemError("homogeneous baseline: rank < 2");
    return svd.matrixV().col(2).normalized();
}

Vec3 solve_baseline_anchored(const std::vector<Correspondence>& cs,
                             double condition_limit) {
    bool have_first = false;
    Vec3 first_anchor = Vec3::Zero();
    bool distinct_anchors = false;

    Mat3 ata = Mat3::Zero();
    Vec3 atb = Vec3::Zero();
    int usable = 0;
    for (const auto& c : cs) {
        const BaselineEquationRow row = baseline_row(c);
        if (row.trivial()) continue;
        if (!have_first) {
            first_anchor = c.s_home;
            have_first = true;
        } else if ((c.s_home - first_anchor).norm() > 1e-12) {
            distinct_anchors = true;
        }
        // Row over the world position: (R_h a)^T s_t = (R_h a)^T s_h.
        const Vec3 g = c.r_home.m * row.a;
        ata += g * g.transpose();
        atb += g * (g.dot(c.s_home));
        ++usable;
    }

    if (usable < 3)
        throw InsufficientDataError("anchored baseline: fewer than 3 usable rows");
    if (!distinct_anchors)
        throw DegenerateSystemError(
            "anchored baseline: all correspondences share one home view; "
            "system is scale-deficient");

    Eigen::SelfAdjointEigenSolver<Mat3> eig(ata);
    const Vec3 ev = eig.eigenvalues();
    if (ev(0) <= 0.0 || ev(2) / ev(0) > condition_limit)
        throw DegenerateSystemError("anchored baseline: ill-conditioned system");
    return ata.ldlt().solve(atb);
}

double triangulate_depth(const NormalizedProjection& m_home,
                         const NormalizedProjection& m_unrot,
                         const Vec3& b_home) {
    const double cx = m_unrot.x - m_home.x;
    const double cy = m_unrot.y - m_home.y;
    if (std::abs(cx) < 1e-12 && std::abs(cy) < 1e-12)
        throw ZeroDisparityError("triangulate_depth: depth unobservable");
    const double dx = m_unrot.x * b_home.z() - b_home.x();
    const double dy = m_unrot.y * b_home.z() - b_home.y();
    return (cx * dx + cy * dy) / (cx * cx + cy * cy);
}

Vec3 vote_sign(const Vec3& direction, const std::vector<Correspondence>& cs) {
    int pos_plus = 0;
    int pos_minus = 0;
    int considered = 0;
    for (const auto& c : cs) {
        try {
            const Rotation r_rel = relative_rotation(c.r_home, c.r_cur);
            const NormalizedProjection mp = unrotate(c.cur, r_rel);
            const Vec3 b_home = c.r_home.m.transpose() * direction;
            const double z_plus = triangulate_depth(c.home, mp, b_home);
            ++considered;
            if (z_plus > 1e-9) ++pos_plus;
            if (-z_plus > 1e-9) ++pos_minus;
        } catch (const Error&) {
            continue;  // zero disparity or cheirality: no vote
        }
    }
    if (considered == 0 || (pos_plus == 0 && pos_minus == 0))
        throw AmbiguousSignError("vote_sign: no sign yields positive depths");
    return pos_plus >= pos_minus ? direction : Vec3(-direction);
}

double epipolar_cos(const NormalizedProjection& m1,
                    const NormalizedProjection& m2,
                    const Rotation& r_rel,
                    const Vec3& b,
                    double epipole_eps) {
    const Vec3 u1 = m1.lift();
    const Vec3 u2 = r_rel.m * m2.lift();

    if (b.norm() < 0.5) {
        // Pure rotation: the planes collapse and the score reduces to the
        // inner-product cosine between the two directions.
        return u1.dot(u2) / (u1.norm() * u2.norm());
    }

    const double d1 = u1.squaredNorm() - std::pow(u1.dot(b), 2);
    const double d2 = u2.squaredNorm() - std::pow(u2.dot(b), 2);
    if (d1 <= epipole_eps || d2 <= epipole_eps)
        throw DegenerateRayError("epipolar_cos: ray coincides with the baseline");

    const double num = u1.dot(u2) - u1.dot(b) * u2.dot(b);
    double c = num / std::sqrt(d1 * d2);
    return std::clamp(c, -1.0, 1.0);
}

}  // namespace shorevo
