#include "shorevo/traj_eval.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace shorevo {

AffineTransform2D fit_affine(const CatmullRomSpline& g,
                             const CatmullRomSpline& v,
                             int n) {
    if (n < 4)
        throw InsufficientDataError("fit_affine: need at least 4 samples");

    // Two rows per sample over the 6 affine unknowns
    // (a00 a01 a10 a11 t0 t1).
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * n, 6);
    Eigen::VectorXd b(2 * n);
    for (int k = 0; k < n; ++k) {
        const double u = static_cast<double>(k) / (n - 1);
        const Vec2 pv = v.point_at_fraction(u).vec();
        const Vec2 pg = g.point_at_fraction(u).vec();
        A(2 * k, 0) = pv.x();
        A(2 * k, 1) = pv.y();
        A(2 * k, 4) = 1.0;
        A(2 * k + 1, 2) = pv.x();
        A(2 * k + 1, 3) = pv.y();
        A(2 * k + 1, 5) = 1.0;
        b(2 * k) = pg.x();
        b(2 * k + 1) = pg.y();
    }

    const Eigen::MatrixXd ata = A.transpose() * A;
    const Eigen::VectorXd atb = A.transpose() * b;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(ata);
    const auto& ev = eig.eigenvalues();

    AffineTransform2D out;
    Eigen::VectorXd x;
    if (ev(0) <= ev(5) * 1e-12) {
        // Collinear samples: the affine is not unique, take the minimum-norm
        // least-squares solution and flag it.
        out.degenerate = true;
        x = A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
    } else {
        x = ata.ldlt().solve(atb);
    }
    out.a << x(0), x(1), x(2), x(3);
    out.t << x(4), x(5);
    return out;
}

ErrorReport evaluate(const CatmullRomSpline& g,
                     const CatmullRomSpline& v,
                     int n,
                     int histogram_bins) {
    const AffineTransform2D aff = fit_affine(g, v, n);

    ErrorReport rep;
    rep.fractions.reserve(static_cast<size_t>(n));
    rep.errors.reserve(static_cast<size_t>(n));
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int k = 0; k < n; ++k) {
        const double u = static_cast<double>(k) / (n - 1);
        const Vec2 pv = aff.apply(v.point_at_fraction(u).vec());
        const Vec2 pg = g.point_at_fraction(u).vec();
        const double e = (pv - pg).norm();
        rep.fractions.push_back(u);
        rep.errors.push_back(e);
        rep.distance_m.push_back(u * g.total_length());
        rep.max_error = std::max(rep.max_error, e);
        sum += e;
        sum_sq += e * e;
    }
    rep.mean_error = sum / n;
    rep.rmse = std::sqrt(sum_sq / n);

    const double top = rep.max_error > 0.0 ? rep.max_error : 1.0;
    rep.histogram_edges.resize(static_cast<size_t>(histogram_bins) + 1);
    rep.histogram_counts.assign(static_cast<size_t>(histogram_bins), 0);
    for (int i = 0; i <= histogram_bins; ++i)
        rep.histogram_edges[static_cast<size_t>(i)] = top * i / histogram_bins;
    for (double e : rep.errors) {
        int bin = static_cast<int>(e / top * histogram_bins);
        bin = std::min(bin, histogram_bins - 1);
        ++rep.histogram_counts[static_cast<size_t>(bin)];
    }
    return rep;
}

}  // namespace shorevo
