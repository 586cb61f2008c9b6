#include "shorevo/refine.hpp"

#include <Eigen/Dense>

#include "shorevo/geometry.hpp"
#include "shorevo/imu.hpp"

namespace shorevo {

void WindowProblem::validate() const {
    const int n = static_cast<int>(poses.size());
    if (n < 2) throw Error("window: need at least 2 poses");
    if (fixed.size() != poses.size())
        throw Error("window: fixed mask size mismatch");
    const int free_n = free_pose_count();
    if (free_n == n)
        throw Error("window: all poses free; the problem is scale unaware, "
                    "fix at least one pose");
    for (const auto& obs : observations) {
        if (obs.home < 0 || obs.cur >= n || obs.home >= obs.cur)
            throw Error("window: observation must reference home < cur within range");
    }
}

int WindowProblem::free_pose_count() const {
    int c = 0;
    for (bool f : fixed)
        if (!f) ++c;
    return c;
}

double residual(const WindowObservation& obs,
                const std::vector<Pose>& poses,
                bool normalize_by_baseline) {
    const Pose& ph = poses[static_cast<size_t>(obs.home)];
    const Pose& pc = poses[static_cast<size_t>(obs.cur)];
    const Vec3 u = pc.r.m * obs.m_cur.lift();   // world ray, current view
    const Vec3 w = ph.r.m * obs.m_home.lift();  // world ray, home view
    const Vec3 d = pc.s - ph.s;
    const double len = d.norm();
    if (len < 1e-12) return 0.0;
    const double raw = u.dot(d.cross(w));
    return normalize_by_baseline ? raw / len : raw;
}

Eigen::VectorXd residuals(const WindowProblem& problem) {
    Eigen::VectorXd r(static_cast<int>(problem.observations.size()));
    for (int i = 0; i < r.size(); ++i)
        r(i) = residual(problem.observations[static_cast<size_t>(i)],
                        problem.poses, problem.normalize_by_baseline);
    return r;
}

namespace {

// Parameter offset of each free pose, kPoseDim values per pose.
std::vector<int> param_offsets(const WindowProblem& p, int pose_dim) {
    std::vector<int> off(p.poses.size(), -1);
    int next = 0;
    for (size_t i = 0; i < p.poses.size(); ++i)
        if (!p.fixed[i]) {
            off[i] = next;
            next += pose_dim;
        }
    return off;
}

}  // namespace

Eigen::MatrixXd jacobian(const WindowProblem& problem,
                         const RefineOptions& options) {
    const int pose_dim = options.refine_rotations ? 6 : 3;
    const auto off = param_offsets(problem, pose_dim);
    const int cols = problem.free_pose_count() * pose_dim;
    Eigen::MatrixXd J =
        Eigen::MatrixXd::Zero(static_cast<int>(problem.observations.size()), cols);

    for (int i = 0; i < J.rows(); ++i) {
        const auto& obs = problem.observations[static_cast<size_t>(i)];
        const Pose& ph = problem.poses[static_cast<size_t>(obs.home)];
        const Pose& pc = problem.poses[static_cast<size_t>(obs.cur)];
        const Vec3 u = pc.r.m * obs.m_cur.lift();
        const Vec3 w = ph.r.m * obs.m_home.lift();
        const Vec3 d = pc.s - ph.s;
        const double len = d.norm();
        const Vec3 wxu = w.cross(u);

        Vec3 grad_d;
        if (!problem.normalize_by_baseline || len < 1e-12) {
            grad_d = wxu;
        } else {
            const double raw = u.dot(d.cross(w));
            grad_d = wxu / len - (raw / (len * len * len)) * d;
        }
        const double scale = (problem.normalize_by_baseline && len >= 1e-12)
                                 ? 1.0 / len
                                 : 1.0;

        if (off[static_cast<size_t>(obs.cur)] >= 0)
            J.block<1, 3>(i, off[static_cast<size_t>(obs.cur)]) = grad_d.transpose();
        if (off[static_cast<size_t>(obs.home)] >= 0)
            J.block<1, 3>(i, off[static_cast<size_t>(obs.home)]) = -grad_d.transpose();

        if (options.refine_rotations) {
            const Vec3 v = d.cross(w);
            if (off[static_cast<size_t>(obs.cur)] >= 0) {
                const Vec3 g = obs.m_cur.lift().cross(pc.r.m.transpose() * v) * scale;
                J.block<1, 3>(i, off[static_cast<size_t>(obs.cur)] + 3) = g.transpose();
            }
            if (off[static_cast<size_t>(obs.home)] >= 0) {
                const Vec3 g =
                    obs.m_home.lift().cross(ph.r.m.transpose() * u.cross(d)) * scale;
                J.block<1, 3>(i, off[static_cast<size_t>(obs.home)] + 3) = g.transpose();
            }
        }
    }
    return J;
}

namespace {

std::vector<Pose> apply_step(const WindowProblem& problem,
                             const std::vector<int>& off,
                             const Eigen::VectorXd& step,
                             bool refine_rotations) {
    std::vector<Pose> poses = problem.poses;
    for (size_t i = 0; i < poses.size(); ++i) {
        if (off[i] < 0) continue;
        poses[i].s += step.segment<3>(off[i]);
        if (refine_rotations) {
            const Vec3 delta = step.segment<3>(off[i] + 3);
            poses[i].r = poses[i].r * rodrigues(delta);
        }
    }
    return poses;
}

}  // namespace

std::pair<std::vector<Pose>, RefineReport> refine(const WindowProblem& problem,
                                                  const RefineOptions& options) {
    problem.validate();
    const int pose_dim = options.refine_rotations ? 6 : 3;

    WindowProblem work = problem;
    const auto off = param_offsets(work, pose_dim);

    const std::vector<Pose> init = problem.poses;
    const auto prior_cost = [&](const std::vector<Pose>& poses) {
        if (options.prior_weight <= 0.0) return 0.0;
        double c = 0.0;
        for (size_t i = 0; i < poses.size(); ++i)
            if (!problem.fixed[i])
                c += options.prior_weight * (poses[i].s - init[i].s).squaredNorm();
        return c;
    };

    RefineReport report;
    Eigen::VectorXd r = residuals(work);
    double cost = r.squaredNorm() + prior_cost(work.poses);
    report.initial_cost = cost;
    report.final_cost = cost;

    if (work.free_pose_count() == 0) {
        report.converged = true;
        return {work.poses, report};
    }

    for (int it = 0; it < options.max_iterations; ++it) {
        const Eigen::MatrixXd J = jacobian(work, options);
        Eigen::MatrixXd jtj = J.transpose() * J;
        Eigen::VectorXd jtr = J.transpose() * r;
        if (options.prior_weight > 0.0)
            for (size_t i = 0; i < work.poses.size(); ++i) {
                if (off[i] < 0) continue;
                jtj.block<3, 3>(off[i], off[i]) +=
                    options.prior_weight * Mat3::Identity();
                jtr.segment<3>(off[i]) +=
                    options.prior_weight * (work.poses[i].s - init[i].s);
            }

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jtj);
        const auto& ev = eig.eigenvalues();
        const double ev_max = ev(ev.size() - 1);
        if (!(ev_max > 1e-20))
            throw SingularNormalEquationsError(
                "refine: normal equations numerically singular (degenerate geometry)");

        // Truncated pseudo-inverse step: directions with negligible curvature
        // are unobservable (e.g. position along a straight path, where every
        // epipolar plane contains the whole baseline line) and must be left
        // where the motion prior put them.
        Eigen::VectorXd inv(ev.size());
        for (int k = 0; k < ev.size(); ++k)
            inv(k) = ev(k) > ev_max * 1e-6 ? 1.0 / ev(k) : 0.0;
        const Eigen::VectorXd step =
            eig.eigenvectors() *
            (inv.asDiagonal() * (eig.eigenvectors().transpose() * -jtr));
        double alpha = 1.0;
        bool accepted = false;
        for (int h = 0; h <= options.damping; ++h, alpha *= 0.5) {
            const auto trial =
                apply_step(work, off, alpha * step, options.refine_rotations);
            WindowProblem trial_problem = work;
            trial_problem.poses = trial;
            const Eigen::VectorXd tr = residuals(trial_problem);
            const double tcost = tr.squaredNorm() + prior_cost(trial);
            if (tcost <= cost) {
                work.poses = trial;
                r = tr;
                const double decrease = cost - tcost;
                cost = tcost;
                report.iterations = it + 1;
                accepted = true;
                if (decrease <= options.cost_tolerance * std::max(cost, 1e-300) ||
                    (alpha * step).norm() < options.step_tolerance)
                    report.converged = true;
                break;
            }
        }
        if (!accepted) {
            report.converged = true;  // no descent direction left
            break;
        }
        if (report.converged) break;
    }

    if (options.refine_rotations)
        for (auto& p : work.poses) p.r = Rotation::project(p.r.m);

    report.final_cost = cost;
    return {work.poses, report};
}

}  // namespace shorevo
