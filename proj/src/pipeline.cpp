#include "shorevo/pipeline.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <random>
#include <unordered_map>

#include "shorevo/refine.hpp"

namespace shorevo {

NormalizedProjection normalize(double u_px, double v_px,
                               const CameraIntrinsics& k) {
    return NormalizedProjection((u_px - k.cx) / k.fx, (v_px - k.cy) / k.fy);
}

OdometryPipeline::OdometryPipeline(const Dataset& ds) : ds_(ds) {
    const int n = static_cast<int>(ds.frames.size());
    if (n < 2 || ds.tracks.empty())
        throw InsufficientDataError("pipeline: need at least 2 frames with tracks");

    std::unordered_map<int, int> frame_pos;
    for (int i = 0; i < n; ++i) frame_pos[ds.frames[static_cast<size_t>(i)].frame_index] = i;

    // Group raw observations into tracks, normalized through the intrinsics.
    std::map<int, FeatureTrack> by_id;
    for (const auto& obs : ds.tracks) {
        const int pos = frame_pos.at(obs.frame);
        auto [it, fresh] = by_id.try_emplace(obs.feature_id);
        FeatureTrack& tr = it->second;
        if (fresh) {
            tr.id = obs.feature_id;
            tr.home_frame = pos;
        } else if (pos != tr.home_frame + static_cast<int>(tr.obs.size())) {
            throw ConsistencyError("pipeline: track " + std::to_string(obs.feature_id) +
                                   " observations are not consecutive");
        }
        tr.obs.push_back(normalize(obs.u_px, obs.v_px, ds.config.intrinsics));
        if (static_cast<int>(tr.obs.size()) > ds.config.track_max)
            throw ConsistencyError("pipeline: track " + std::to_string(obs.feature_id) +
                                   " exceeds track_max");
    }
    tracks_.reserve(by_id.size());
    tracks_by_frame_.resize(static_cast<size_t>(n));
    for (auto& [id, tr] : by_id) {
        const int tidx = static_cast<int>(tracks_.size());
        for (int k = tr.home_frame;
             k < tr.home_frame + static_cast<int>(tr.obs.size()); ++k)
            tracks_by_frame_[static_cast<size_t>(k)].push_back(tidx);
        tracks_.push_back(std::move(tr));
    }

    // Per-frame orientation priors from the gyro stream.
    const auto oriented =
        integrate(ds.imu, ds.config.imu_alignment, ds.frames, Rotation());
    priors_.reserve(oriented.size());
    for (const auto& [frame, rot] : oriented) priors_.push_back(rot);

    poses_.resize(static_cast<size_t>(n));
}

const Pose& OdometryPipeline::pose(int pos) const {
    const auto& p = poses_[static_cast<size_t>(pos)];
    if (!p) throw Error("pipeline: pose not estimated at position " + std::to_string(pos));
    return *p;
}

MlesacParams OdometryPipeline::frame_params(int pos) const {
    MlesacParams p = ds_.config.mlesac;
    p.seed ^= 0x9E3779B97F4A7C15ull *
              static_cast<std::uint64_t>(ds_.frames[static_cast<size_t>(pos)].frame_index + 1);
    return p;
}

void OdometryPipeline::bootstrap() {
    const Pose pose0(priors_[0], Vec3::Zero());

    // A one-frame baseline (centimeters) gives disparities so small that the
    // truncated epipolar score cannot tell directions apart: every clean
    // point stays under the cutoff for any hypothesis and the score is
    // decided by outliers. But the first second of motion is straight to
    // within a degree, so every maximal track pair inside it shares one
    // baseline direction; stacking them makes the clean points dominate.
    const int n = static_cast<int>(ds_.frames.size());
    const int last = std::min(ds_.config.track_max - 1, n - 1);
    const int boot_end = std::min(n - 1, 25);
    std::vector<Correspondence> cs;
    for (int f = 1; f <= boot_end; ++f) {
        for (int tidx : tracks_by_frame_[static_cast<size_t>(f)]) {
            const FeatureTrack& tr = tracks_[static_cast<size_t>(tidx)];
            const int end = tr.home_frame + static_cast<int>(tr.obs.size()) - 1;
            if (std::min(end, boot_end) != f || tr.home_frame >= f) continue;
            Correspondence c;
            c.home = tr.at(tr.home_frame);
            c.cur = tr.at(f);
            c.r_home = priors_[static_cast<size_t>(tr.home_frame)];
            c.r_cur = priors_[static_cast<size_t>(f)];
            c.s_home = pose0.s;
            cs.push_back(c);
        }
    }
    if (static_cast<int>(cs.size()) < ds_.config.min_tracks_per_frame)
        throw NoConsensusError("bootstrap: too few track pairs in the first "
                               "window");

    // Scale from the last speed-over-ground reading before takeover.
    double sog = -1.0;
    for (const auto& fix : ds_.gps)
        if (fix.frame <= ds_.frames[0].frame_index) sog = fix.sog_mps;
    if (sog < 0.0 && !ds_.gps.empty()) sog = ds_.gps.front().sog_mps;
    if (sog <= 0.05)
        throw ZeroSpeedError("bootstrap: speed over ground too small to fix scale");

    // The truncated epipolar score cannot pick the direction here: no clean
    // point ever reaches the cutoff at these disparities (e = 1 - cos is
    // quadratic), so a direction that happens to thread a couple of outliers
    // under the cap beats the truth. Instead treat each pair as a linear row
    // a = u x w (parallel to b x w with magnitude ~ disparity) and solve for
    // the null direction. Only rows well above the angular noise floor carry
    // signal; the residual is divided by |d x w| because a candidate near
    // the ray direction annihilates the row regardless of the motion (d in
    // span{b, w} zeroes d.a), which would otherwise make the ray cluster's
    // mean direction a spurious null.
    std::vector<Vec3> rows(cs.size()), rays(cs.size());
    std::vector<double> row_norms(cs.size());
    for (size_t i = 0; i < cs.size(); ++i) {
        const Vec3 u = cs[i].r_cur.m * cs[i].cur.lift().normalized();
        const Vec3 w = cs[i].r_home.m * cs[i].home.lift().normalized();
        rows[i] = u.cross(w);
        rays[i] = w;
        row_norms[i] = rows[i].norm();
    }
    std::vector<double> srt = row_norms;
    std::nth_element(srt.begin(), srt.begin() + srt.size() / 2, srt.end());
    const double floor_norm = std::max(0.005, 3.0 * srt[srt.size() / 2]);
    std::vector<Vec3> inf_rows, inf_rays;
    for (size_t i = 0; i < rows.size(); ++i)
        if (row_norms[i] >= floor_norm && row_norms[i] <= 0.3) {
            inf_rows.push_back(rows[i]);
            inf_rays.push_back(rays[i]);
        }

    Vec3 direction;
    double boot_score = 0.0;
    int boot_inliers = 0, boot_iterations = 0;
    if (static_cast<int>(inf_rows.size()) < ds_.config.min_tracks_per_frame) {
        const RobustEstimate est = mlesac_position(cs, frame_params(1), false);
        direction = (est.position - pose0.s).normalized();
        boot_score = est.score;
        boot_inliers = static_cast<int>(est.inliers.size());
        boot_iterations = est.iterations_used;
    } else {
        const double tau = 4e-3;  // ~3x the per-row angular noise
        const auto res_of = [&](const Vec3& d, size_t i) {
            const double den = d.cross(inf_rays[i]).norm();
            return den < 0.1 ? tau : std::min(std::abs(d.dot(inf_rows[i])) / den, tau);
        };
        std::mt19937_64 rng(ds_.config.mlesac.seed);
        std::uniform_int_distribution<size_t> pick(0, inf_rows.size() - 1);
        Vec3 d_est = Vec3::UnitX();
        double best = std::numeric_limits<double>::max();
        for (int it = 0; it < 400; ++it) {
            const size_t i = pick(rng), j = pick(rng);
            if (i == j) continue;
            Vec3 d = inf_rows[i].cross(inf_rows[j]);
            if (d.norm() < 1e-6) continue;
            d.normalize();
            double s = 0.0;
            for (size_t k = 0; k < inf_rows.size(); ++k) {
                const double r = res_of(d, k);
                s += r * r;
            }
            ++boot_iterations;
            if (s < best) {
                best = s;
                d_est = d;
            }
        }
        // Reweighted null-space polish on the rows consistent with the vote.
        for (int it = 0; it < 6; ++it) {
            Mat3 ata = Mat3::Zero();
            for (size_t i = 0; i < inf_rows.size(); ++i) {
                const double den = d_est.cross(inf_rays[i]).norm();
                if (den < 0.1 || res_of(d_est, i) >= tau) continue;
                ata += (inf_rows[i] / den) * (inf_rows[i] / den).transpose();
            }
            if (!(ata.trace() > 1e-12)) break;
            Eigen::SelfAdjointEigenSolver<Mat3> eig(ata);
            d_est = eig.eigenvectors().col(0);
        }
        direction = vote_sign(d_est, cs).normalized();
        const auto [score, inl] =
            score_hypothesis(direction, cs, ds_.config.mlesac.cos_cutoff);
        boot_score = score;
        boot_inliers = static_cast<int>(inl.size());
    }

    poses_[0] = pose0;
    // Fill every window frame along the estimated direction at the sog
    // scale; the stepper re-estimates them once anchors exist.
    for (int k = 1; k <= last; ++k) {
        const double dt = ds_.frames[static_cast<size_t>(k)].t - ds_.frames[0].t;
        poses_[static_cast<size_t>(k)] =
            Pose(priors_[static_cast<size_t>(k)], pose0.s + direction * (sog * dt));
    }

    FrameDiagnostics d;
    d.frame = ds_.frames[1].frame_index;
    d.correspondences = static_cast<int>(cs.size());
    d.inliers = boot_inliers;
    d.mlesac_score = boot_score;
    d.mlesac_iterations = boot_iterations;
    diags_.push_back(d);
}

std::vector<Correspondence> OdometryPipeline::correspondences_for(
    int pos, std::vector<int>* homes) const {
    std::vector<Correspondence> cs;
    for (int tidx : tracks_by_frame_[static_cast<size_t>(pos)]) {
        const FeatureTrack& tr = tracks_[static_cast<size_t>(tidx)];
        if (tr.home_frame >= pos) continue;
        if (!poses_[static_cast<size_t>(tr.home_frame)]) continue;
        const Pose& home_pose = *poses_[static_cast<size_t>(tr.home_frame)];
        Correspondence c;
        c.home = tr.at(tr.home_frame);
        c.cur = tr.at(pos);
        c.r_home = home_pose.r;
        c.r_cur = priors_[static_cast<size_t>(pos)];
        c.s_home = home_pose.s;
        cs.push_back(c);
        if (homes) homes->push_back(tr.home_frame);
    }
    return cs;
}

std::optional<Vec3> OdometryPipeline::predict(int pos) const {
    if (pos < 2 || !poses_[static_cast<size_t>(pos - 1)] ||
        !poses_[static_cast<size_t>(pos - 2)])
        return std::nullopt;
    const double dt = ds_.frames[static_cast<size_t>(pos)].t -
                      ds_.frames[static_cast<size_t>(pos - 1)].t;
    // Velocity from a ~1 s chord, not adjacent frames: a single-frame
    // difference hands every per-frame estimation error straight to the next
    // prediction and the velocity direction random-walks away. The chord
    // averages that noise, and even at full rudder it lags the tangent by
    // less than a degree.
    int back = pos - 2;
    const double t1 = ds_.frames[static_cast<size_t>(pos - 1)].t;
    while (back > 0 && poses_[static_cast<size_t>(back - 1)] &&
           t1 - ds_.frames[static_cast<size_t>(back - 1)].t <= 1.0)
        --back;
    const double dt_prev = t1 - ds_.frames[static_cast<size_t>(back)].t;
    if (dt_prev <= 0.0) return std::nullopt;
    Vec3 v_prev = (poses_[static_cast<size_t>(pos - 1)]->s -
                   poses_[static_cast<size_t>(back)]->s) / dt_prev;
    // Differenced speed integrates estimation noise twice along the path;
    // the GPS speed over ground bounds it, so prefer the latest reading.
    double sog = -1.0;
    for (const auto& fix : ds_.gps) {
        if (fix.frame > ds_.frames[static_cast<size_t>(pos)].frame_index) break;
        sog = fix.sog_mps;
    }
    if (sog > 0.05 && v_prev.norm() > 1e-9) v_prev = v_prev.normalized() * sog;
    return poses_[static_cast<size_t>(pos - 1)]->s + v_prev * dt;
}

std::optional<Vec3> OdometryPipeline::robust_position(
    const std::vector<Correspondence>& cs, const Vec3& s_pred,
    const Vec3& v_hat) const {
    // Each correspondence gives one linear row (w x u) . (s - s_home) = 0 in
    // world frame, with residual noise ~ ray noise x baseline regardless of
    // the row norm, so weighting by 1 / baseline is homoskedastic. The
    // prediction is millimeter-accurate frame to frame, which makes outlier
    // rejection around it far sharper than any consensus score at these
    // disparities.
    struct Row {
        Vec3 g;
        Vec3 u, w;
        Vec3 s_home;
        double sigma;
    };
    std::vector<Row> rows;
    for (const auto& c : cs) {
        const Vec3 u = c.r_cur.m * c.cur.lift().normalized();
        const Vec3 w = c.r_home.m * c.home.lift().normalized();
        const Vec3 g = w.cross(u);
        // Random pairings produce ray angles far beyond any real disparity.
        if (g.norm() < 1e-12 || g.norm() > 0.3) continue;
        const double baseline = std::max((s_pred - c.s_home).norm(), 0.05);
        rows.push_back({g, u, w, c.s_home, baseline * 2e-3});
    }

    Vec3 s = s_pred;
    std::vector<double> zs;
    for (int it = 0; it < 4; ++it) {
        // Gate on the measured residual spread, not the model sigma alone: a
        // coherent heading lag (mid-turn) inflates every clean residual at
        // once, and a fixed gate would then reject exactly the rows that pull
        // the estimate back.
        zs.clear();
        for (const auto& row : rows)
            zs.push_back(std::abs(row.g.dot(s - row.s_home)) / row.sigma);
        std::vector<double> sorted = zs;
        std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                         sorted.end());
        const double med = sorted[sorted.size() / 2];
        const double gate = 3.0 * std::max(1.4826 * med, 1.0);

        // The rows are errors-in-variables: g = w x u carries the ray noise,
        // so E[g g^T] = g0 g0^T + sigma_ray^2 (P_u + P_w) with P the
        // projectors orthogonal to each ray. In the right-hand side that
        // noise term multiplies the along-track offset s_home - s_pred into
        // a spurious pull -- quadratic in the pixel noise, and laterally
        // biased wherever the rays are asymmetric across the field of view.
        // Subtract the estimated term there; in the normal matrix the same
        // term only stiffens the solve, which is the safe side.
        const double sigma_ray = std::min(1.4826 * med, 1.0) * 2e-3;
        Mat3 ata = Mat3::Zero();
        Vec3 atb = Vec3::Zero();
        int used = 0;
        for (size_t i = 0; i < rows.size(); ++i) {
            const Row& row = rows[i];
            if (zs[i] > gate) continue;
            const double wgt = 1.0 / (row.sigma * row.sigma);
            const Vec3 h = row.s_home - s_pred;
            const Vec3 noise_pull =
                sigma_ray * sigma_ray *
                (2.0 * h - row.u * row.u.dot(h) - row.w * row.w.dot(h));
            ata += wgt * row.g * row.g.transpose();
            atb += wgt * (row.g * row.g.dot(h) - noise_pull);
            ++used;
        }
        if (used < 3) return std::nullopt;
        // Home anchors lie nearly on a line for marine motion (even through
        // a turn the 5-frame chord sagitta is sub-millimeter), so the rows
        // barely constrain the position along the path: every epipolar plane
        // contains the whole baseline line. Solve for the offset from the
        // prediction and truncate the unobserved directions, which leaves
        // them at the predicted position.
        // Ridge toward the prediction: the rows are whitened, so the prior
        // weight is 1 / sigma_pred^2 with sigma_pred ~ 3 mm of
        // constant-velocity prediction error. Weakly observed directions
        // (along-track, and along the rays at short baselines) then keep a
        // small but nonzero gain: enough to bleed off accumulated error in a
        // turn, without letting amplified ray noise through.
        const double prior_weight = 1.0 / (5e-2 * 5e-2);
        ata += prior_weight * Mat3::Identity();
        // The data carries no along-track information (every epipolar plane
        // contains the baseline), so anything the solve puts there is leaked
        // noise, while the sog-anchored prediction is exact along the path by
        // construction. Solve only in the plane transverse to the predicted
        // direction.
        Vec3 delta = Vec3::Zero();
        if (v_hat.norm() > 0.5) {
            const Mat3 P = Mat3::Identity() - v_hat * v_hat.transpose();
            const Mat3 ata_p =
                P * ata * P + prior_weight * v_hat * v_hat.transpose();
            delta = P * ata_p.ldlt().solve(P * atb);
        } else {
            delta = ata.ldlt().solve(atb);
        }
        s = s_pred + delta;
    }
    return s;
}

void OdometryPipeline::step(int pos) {
    FrameDiagnostics d;
    d.frame = ds_.frames[static_cast<size_t>(pos)].frame_index;

    std::vector<int> homes;
    const std::vector<Correspondence> cs = correspondences_for(pos, &homes);
    d.correspondences = static_cast<int>(cs.size());

    const std::optional<Vec3> pred = predict(pos);

    std::optional<Vec3> position;
    if (static_cast<int>(cs.size()) >= ds_.config.mlesac.min_subset && pred) {
        // MLESAC supplies the consensus diagnostics; the position itself
        // comes from the prediction-seeded robust solve, because at these
        // baselines the truncated epipolar score cannot separate the true
        // position from one that happens to thread a couple of outliers.
        try {
            const RobustEstimate est =
                mlesac_position(cs, frame_params(pos), true);
            d.inliers = static_cast<int>(est.inliers.size());
            d.mlesac_score = est.score;
            d.mlesac_iterations = est.iterations_used;
        } catch (const Error&) {
        }
        const Vec3 v_hat = poses_[static_cast<size_t>(pos - 1)]
                               ? (*pred - poses_[static_cast<size_t>(pos - 1)]->s)
                                     .normalized()
                               : Vec3::Zero();
        position = robust_position(cs, *pred, v_hat);
    }

    // A solution far from the constant-velocity prediction is an artifact,
    // not a maneuver (a vessel moves millimeters off the prediction per
    // frame); coast instead of accepting it.
    if (position && pred && (*position - *pred).norm() > 0.5) position.reset();

    if (!position) {
        // Coast on constant velocity for at most 3 frames.
        ++coast_count_;
        if (coast_count_ > 3)
            throw TrackingLostError("step: consensus lost for more than 3 frames");
        if (!pred)
            throw TrackingLostError("step: cannot coast without two prior poses");
        position = *pred;
        d.coasting = true;
    } else {
        coast_count_ = 0;
    }

    poses_[static_cast<size_t>(pos)] =
        Pose(priors_[static_cast<size_t>(pos)], *position);

    diags_.push_back(d);
    if (!d.coasting) refine_window(pos);
}

void OdometryPipeline::refine_window(int pos) {
    const int w = ds_.config.refine_window;
    const int first = pos - w + 1;
    if (first < 0) return;
    for (int k = first; k <= pos; ++k)
        if (!poses_[static_cast<size_t>(k)]) return;

    // Poses referenced by observations: out-of-window homes are constants,
    // the oldest in-window pose is the gauge anchor.
    std::vector<int> pose_positions;
    std::vector<WindowObservation> observations;
    std::unordered_map<int, int> index_of;
    auto intern = [&](int p) {
        auto it = index_of.find(p);
        if (it != index_of.end()) return it->second;
        const int idx = static_cast<int>(pose_positions.size());
        index_of[p] = idx;
        pose_positions.push_back(p);
        return idx;
    };

    for (const auto& tr : tracks_) {
        if (!poses_[static_cast<size_t>(tr.home_frame)]) continue;
        const int last = tr.home_frame + static_cast<int>(tr.obs.size()) - 1;
        for (int k = std::max(first, tr.home_frame + 1); k <= std::min(pos, last); ++k) {
            if (!poses_[static_cast<size_t>(k)]) continue;
            WindowObservation obs;
            obs.feature_id = tr.id;
            obs.home = intern(tr.home_frame);
            obs.m_home = tr.at(tr.home_frame);
            obs.cur = intern(k);
            obs.m_cur = tr.at(k);
            observations.push_back(obs);
        }
    }
    if (observations.empty()) return;

    // Reindex so home < cur holds in list order.
    std::vector<int> order(pose_positions.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return pose_positions[static_cast<size_t>(a)] < pose_positions[static_cast<size_t>(b)];
    });
    std::vector<int> rank(order.size());
    for (size_t i = 0; i < order.size(); ++i) rank[static_cast<size_t>(order[i])] = static_cast<int>(i);

    WindowProblem problem;
    problem.poses.resize(pose_positions.size());
    problem.fixed.resize(pose_positions.size());
    for (size_t i = 0; i < pose_positions.size(); ++i) {
        const int p = pose_positions[i];
        problem.poses[static_cast<size_t>(rank[i])] = *poses_[static_cast<size_t>(p)];
        problem.fixed[static_cast<size_t>(rank[i])] = (p <= first);
    }
    for (auto& obs : observations) {
        obs.home = rank[static_cast<size_t>(obs.home)];
        obs.cur = rank[static_cast<size_t>(obs.cur)];
    }
    // The window cost is an unbounded quadratic, so feed it only
    // observations already consistent with the estimated poses (clean
    // baseline-normalized residuals sit around 1e-3 at half-pixel noise); a
    // single tracker outlier would otherwise dominate every step.
    for (const auto& obs : observations)
        if (std::abs(residual(obs, problem.poses, true)) < 3e-3)
            problem.observations.push_back(obs);
    if (problem.observations.empty()) return;

    // A single fixed anchor leaves an exact scale gauge (scaling the free
    // positions about it preserves every baseline direction), so make sure
    // two poses are held constant.
    int fixed_count = 0;
    for (bool f : problem.fixed)
        if (f) ++fixed_count;
    if (fixed_count < 2) {
        if (problem.poses.size() < 3) return;
        problem.fixed[1] = true;
    }

    if (problem.free_pose_count() == 0) return;

    // Anchor the free positions to the stepper estimate in proportion to the
    // measured residual noise: with clean data the anchor vanishes and the
    // window converges to the exact geometry; with noisy data it keeps the
    // weakly observed directions (where the data minimum sits noise * 1 /
    // sqrt(curvature) away, centimeters here) near the motion prior.
    std::vector<double> absr;
    absr.reserve(problem.observations.size());
    for (const auto& obs : problem.observations)
        absr.push_back(std::abs(residual(obs, problem.poses, true)));
    std::nth_element(absr.begin(), absr.begin() + absr.size() / 2, absr.end());
    const double sigma_r = 1.4826 * absr[absr.size() / 2];
    RefineOptions opt = ds_.config.gn;
    opt.prior_weight = (sigma_r * sigma_r) / (1e-2 * 1e-2);

    try {
        auto [poses, report] = refine(problem, opt);
        // Safety net: the incoming poses are centimeter-accurate, so a large
        // excursion is noise amplification, not a correction.
        for (size_t i = 0; i < poses.size(); ++i)
            if ((poses[i].s - problem.poses[i].s).norm() > 0.2) return;
        for (size_t i = 0; i < pose_positions.size(); ++i)
            poses_[static_cast<size_t>(pose_positions[i])] =
                poses[static_cast<size_t>(rank[i])];
        if (!diags_.empty()) {
            diags_.back().refine_initial_cost = report.initial_cost;
            diags_.back().refine_final_cost = report.final_cost;
        }
    } catch (const SingularNormalEquationsError&) {
        // Degenerate window geometry: keep the MLESAC poses.
    }
}

RunResult OdometryPipeline::run_all() {
    RunResult result;
    bootstrap();
    const int n = static_cast<int>(ds_.frames.size());
    for (int pos = 2; pos < n; ++pos) {
        try {
            step(pos);
        } catch (const TrackingLostError& e) {
            result.tracking_lost = true;
            result.failure = e.what();
            break;
        }
    }
    for (int pos = 0; pos < n; ++pos) {
        if (!poses_[static_cast<size_t>(pos)]) break;
        const Pose& p = *poses_[static_cast<size_t>(pos)];
        TrajectoryEntry e;
        e.frame = ds_.frames[static_cast<size_t>(pos)].frame_index;
        e.position = p.s;
        e.orientation = Eigen::Quaterniond(p.r.m);
        result.trajectory.push_back(e);
    }
    result.diagnostics = diags_;
    return result;
}

RunResult run(const Dataset& ds) {
    OdometryPipeline pipeline(ds);
    return pipeline.run_all();
}

}  // namespace shorevo
