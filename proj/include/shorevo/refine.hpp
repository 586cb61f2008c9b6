#ifndef SHOREVO_REFINE_HPP
#define SHOREVO_REFINE_HPP

#include <Eigen/Core>
#include <vector>

#include "shorevo/types.hpp"

namespace shorevo {

/// One epipolar observation between a home view and a later view, both
/// indexing into WindowProblem::poses.
struct WindowObservation {
    int feature_id = 0;
    int home = 0;  // index of the home view
    NormalizedProjection m_home;
    int cur = 0;   // index of the current view, home < cur
    NormalizedProjection m_cur;
};

struct WindowProblem {
    std::vector<Pose> poses;
    std::vector<bool> fixed;  // per-pose; at least one fixed when n > 2
    std::vector<WindowObservation> observations;
    bool normalize_by_baseline = true;

    /// Validates invariants; throws Error. A two-pose window with both poses
    /// free is scale-unaware and is rejected.
    void validate() const;

    int free_pose_count() const;
};

struct RefineOptions {
    int max_iterations = 10;
    double cost_tolerance = 1e-12;   // relative decrease
    double step_tolerance = 1e-10;
    bool refine_rotations = false;
    int damping = 8;                 // step-halving budget
    // Quadratic anchor pulling each free position toward its initial value,
    // added to the cost as prior_weight * |s - s_init|^2. The window has
    // nearly unobservable directions (along-track, and along the rays at
    // short baselines) where the data minimum is displaced by amplified
    // measurement noise; the anchor keeps those directions near the motion
    // prior while leaving well-observed directions to the data. Zero
    // disables it.
    double prior_weight = 0.0;
};

struct RefineReport {
    double initial_cost = 0.0;
    double final_cost = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Epipolar-constraint residual of one observation: the scalar triple product
/// of the two world rays and the baseline, optionally normalized by the
/// baseline length. Zero exactly when rays and baseline are coplanar.
double residual(const WindowObservation& obs,
                const std::vector<Pose>& poses,
                bool normalize_by_baseline = true);

/// Stacked residual vector.
Eigen::VectorXd residuals(const WindowProblem& problem);

/// Analytic Jacobian of the residual vector with respect to the free pose
/// parameters (positions, then axis-angle rotation coordinates when enabled).
Eigen::MatrixXd jacobian(const WindowProblem& problem,
                         const RefineOptions& options = {});

/// Damped Gauss-Newton with step halving; the cost never increases across
/// accepted iterations.
std::pair<std::vector<Pose>, RefineReport> refine(const WindowProblem& problem,
                                                  const RefineOptions& options);

}  // namespace shorevo

#endif
