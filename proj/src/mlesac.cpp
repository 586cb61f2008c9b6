#include "shorevo/mlesac.hpp"

#include <algorithm>
#include <random>

namespace shorevo {

std::pair<double, std::vector<int>> score_hypothesis(
    const Vec3& position,
    const std::vector<Correspondence>& cs,
    double cutoff) {
    const double cap = 1.0 - cutoff;
    double score = 0.0;
    std::vector<int> inliers;
    int nonzero_baselines = 0;
    for (int i = 0; i < static_cast<int>(cs.size()); ++i) {
        const auto& c = cs[static_cast<size_t>(i)];
        const Vec3 b_world = position - c.s_home;
        double e = cap;
        if (b_world.norm() >= 1e-9) {
            ++nonzero_baselines;
            const Vec3 b_home = (c.r_home.m.transpose() * b_world).normalized();
            try {
                const Rotation r_rel = relative_rotation(c.r_home, c.r_cur);
                e = 1.0 - epipolar_cos(c.home, c.cur, r_rel, b_home);
            } catch (const DegenerateRayError&) {
                e = cap;  // epipole: cannot discriminate, count as outlier
            }
        }
        if (e <= cap) inliers.push_back(i);
        score += std::min(e, cap);
    }
    if (nonzero_baselines == 0)
        throw ZeroBaselineError("score_hypothesis: position coincides with every home view");
    return {score, inliers};
}

namespace {

// Minimal-model solve on a subset. Homogeneous mode assumes the subset shares
// a single home view (the initializing pair).
Vec3 solve_subset(const std::vector<Correspondence>& subset, bool anchored) {
    if (anchored) return solve_baseline_anchored(subset);
    std::vector<BaselineEquationRow> rows;
    rows.reserve(subset.size());
    for (const auto& c : subset) rows.push_back(baseline_row(c));
    const Vec3 dir_home = solve_baseline_homogeneous(rows);
    const Vec3 dir_world = subset.front().r_home.m * dir_home;
    return subset.front().s_home + vote_sign(dir_world, subset);
}

int adaptive_iterations(double inlier_ratio, int subset_size, int cap) {
    if (inlier_ratio <= 0.0) return cap;
    const double w = std::pow(inlier_ratio, subset_size);
    if (w >= 1.0 - 1e-12) return 1;
    const double n = std::log(0.01) / std::log(1.0 - w);
    if (!std::isfinite(n) || n >= static_cast<double>(cap)) return cap;
    return std::max(1, static_cast<int>(std::ceil(n)));
}

}  // namespace

RobustEstimate mlesac_position(const std::vector<Correspondence>& cs,
                               const MlesacParams& params,
                               bool anchored) {
    const int n = static_cast<int>(cs.size());
    const int m = std::max(params.min_subset, anchored ? 3 : 2);
    if (n < m)
        throw InsufficientDataError("mlesac: fewer correspondences than subset size");

    std::mt19937_64 rng(params.seed);
    std::vector<int> indices(cs.size());
    for (int i = 0; i < n; ++i) indices[static_cast<size_t>(i)] = i;

    bool have_best = false;
    double best_score = 0.0;
    Vec3 best_position = Vec3::Zero();
    std::vector<int> best_inliers;
    int degenerate_subsets = 0;
    int iterations = 0;
    int bound = params.max_iterations;

    for (; iterations < bound; ++iterations) {
        // Partial Fisher-Yates keeps the draw deterministic per seed.
        for (int j = 0; j < m; ++j) {
            std::uniform_int_distribution<int> pick(j, n - 1);
            std::swap(indices[static_cast<size_t>(j)],
                      indices[static_cast<size_t>(pick(rng))]);
        }
        std::vector<Correspondence> subset;
        subset.reserve(static_cast<size_t>(m));
        for (int j = 0; j < m; ++j)
            subset.push_back(cs[static_cast<size_t>(indices[static_cast<size_t>(j)])]);

        Vec3 position;
        try {
            position = solve_subset(subset, anchored);
        } catch (const Error&) {
            ++degenerate_subsets;
            continue;
        }
        auto [score, inliers] = score_hypothesis(position, cs, params.cos_cutoff);
        if (!have_best || score < best_score) {
            have_best = true;
            best_score = score;
            best_position = position;
            best_inliers = std::move(inliers);
            const double ratio = static_cast<double>(best_inliers.size()) / n;
            bound = std::min(params.max_iterations,
                             iterations + 1 + adaptive_iterations(ratio, m, params.max_iterations));
        }
    }

    if (!have_best) {
        if (degenerate_subsets == iterations && iterations > 0)
            throw DegenerateSystemError("mlesac: every sampled subset degenerated");
        throw NoConsensusError("mlesac: no hypothesis could be scored");
    }

    // Least-squares polish on the consensus set, iterated until the inlier
    // set stops changing; each round is kept only if the score improves.
    // The solve itself uses a tighter core (1 degree) when enough points
    // qualify, so borderline inliers cannot drag the least squares.
    const double core_cutoff = std::max(params.cos_cutoff, std::cos(deg2rad(1.0)));
    for (int round = 0; round < 10; ++round) {
        if (static_cast<int>(best_inliers.size()) < m) break;
        std::vector<int> core = score_hypothesis(best_position, cs, core_cutoff).second;
        const std::vector<int>& fit_set =
            static_cast<int>(core.size()) >= m ? core : best_inliers;
        std::vector<Correspondence> consensus;
        consensus.reserve(fit_set.size());
        for (int i : fit_set) consensus.push_back(cs[static_cast<size_t>(i)]);
        bool changed = false;
        try {
            const Vec3 polished = solve_subset(consensus, anchored);
            auto [score, inliers] = score_hypothesis(polished, cs, params.cos_cutoff);
            if (score <= best_score) {
                changed = inliers != best_inliers;
                best_score = score;
                best_position = polished;
                best_inliers = std::move(inliers);
            }
        } catch (const Error&) {
            // keep the raw hypothesis
        }
        if (!changed) break;
    }

    if (static_cast<int>(best_inliers.size()) < params.min_inliers)
        throw NoConsensusError("mlesac: consensus below min_inliers");

    RobustEstimate est;
    est.position = best_position;
    est.inliers = std::move(best_inliers);
    est.score = best_score;
    est.iterations_used = iterations;
    return est;
}

}  // namespace shorevo
