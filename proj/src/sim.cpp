#include "shorevo/sim.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <fstream>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "shorevo/geometry.hpp"

namespace shorevo {

namespace {

constexpr int kDetectionsPerFrame = 60;

Mat3 rot_z(double a) {
    return Eigen::AngleAxisd(a, Vec3::UnitZ()).toRotationMatrix();
}
Mat3 rot_y(double a) {
    return Eigen::AngleAxisd(a, Vec3::UnitY()).toRotationMatrix();
}
Mat3 rot_x(double a) {
    return Eigen::AngleAxisd(a, Vec3::UnitX()).toRotationMatrix();
}

// Heading and planar position of the boat at time t for a piecewise-constant
// yaw-rate profile, integrated segment by segment in closed form.
void boat_state(const MotionParams& m, double t, double* yaw, Vec2* position) {
    double psi = 0.0;
    Vec2 p = Vec2::Zero();
    for (size_t i = 0; i < m.yaw_profile.size(); ++i) {
        const double t0 = m.yaw_profile[i].t_start;
        if (t <= t0) break;
        const double t1 = (i + 1 < m.yaw_profile.size())
                              ? std::min(t, m.yaw_profile[i + 1].t_start)
                              : t;
        const double dt = t1 - t0;
        if (dt <= 0.0) continue;
        const double rate = deg2rad(m.yaw_profile[i].rate_deg_s);
        if (std::abs(rate) < 1e-12) {
            p += m.speed * dt * Vec2(std::cos(psi), std::sin(psi));
        } else {
            // Circular arc of radius speed / rate.
            const double r = m.speed / rate;
            const double psi1 = psi + rate * dt;
            p += r * Vec2(std::sin(psi1) - std::sin(psi),
                          -std::cos(psi1) + std::cos(psi));
            psi = psi1;
            continue;
        }
        psi += rate * dt;
    }
    *yaw = psi;
    *position = p;
}

Mat3 camera_mount(bool shore_on_left) {
    // Camera optical axis points sideways out of the hull, image y down.
    Mat3 mount;
    if (shore_on_left) {
        mount.col(0) = Vec3(1, 0, 0);    // image x: boat forward
        mount.col(1) = Vec3(0, 0, -1);   // image y: down
        mount.col(2) = Vec3(0, 1, 0);    // optical axis: boat left
    } else {
        mount.col(0) = Vec3(-1, 0, 0);
        mount.col(1) = Vec3(0, 0, -1);
        mount.col(2) = Vec3(0, -1, 0);
    }
    return mount;
}

Mat3 boat_orientation(const MotionParams& m, double t, double yaw) {
    const double w = 2.0 * M_PI / m.wave_period_s;
    const double roll = deg2rad(m.wave_amplitude_deg) * std::sin(w * t);
    const double pitch =
        0.5 * deg2rad(m.wave_amplitude_deg) * std::sin(0.7 * w * t + 1.0);
    return rot_z(yaw) * rot_y(pitch) * rot_x(roll);
}

}  // namespace

Pose simulated_camera_pose(const MotionParams& motion, double t,
                           bool shore_on_left) {
    double yaw;
    Vec2 p;
    boat_state(motion, t, &yaw, &p);
    const Mat3 r = boat_orientation(motion, t, yaw) * camera_mount(shore_on_left);
    return Pose(Rotation::project(r), Vec3(p.x(), p.y(), 0.0));
}

SimResult generate(const SceneParams& scene, const MotionParams& motion,
                   const NoiseParams& noise, const CameraIntrinsics& k) {
    if (scene.depth_min <= 0.0 || scene.depth_min >= scene.depth_max)
        throw ParameterError("sim: require 0 < depth_min < depth_max");
    if (motion.fps <= 0.0 || motion.imu_rate < motion.fps ||
        motion.gps_rate <= 0.0)
        throw ParameterError("sim: rates must be positive with fps <= imu_rate");

    SimResult sim;
    std::mt19937_64 scene_rng(scene.seed);
    std::mt19937_64 detect_rng(scene.seed ^ 0x5DEECE66Dull);
    std::mt19937_64 noise_rng(noise.noise_seed);

    // Landmarks along a shore band beside the path, log-uniform in depth.
    const double path_length = motion.speed * motion.duration;
    std::uniform_real_distribution<double> along(-50.0, path_length + 200.0);
    std::uniform_real_distribution<double> logd(std::log(scene.depth_min),
                                                std::log(scene.depth_max));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double side = scene.shore_on_left ? 1.0 : -1.0;
    for (int i = 0; i < scene.landmark_count; ++i) {
        const double s = along(scene_rng);
        const double d = std::exp(logd(scene_rng));
        const double h = unit(scene_rng) * (5.0 + 0.02 * d);
        const double t_s =
            motion.speed > 1e-9 ? s / motion.speed
                                : unit(scene_rng) * motion.duration;
        double yaw;
        Vec2 p;
        boat_state(motion, t_s, &yaw, &p);
        const Vec2 lateral = side * d * Vec2(-std::sin(yaw), std::cos(yaw));
        sim.landmarks.push_back(
            {i, Vec3(p.x() + lateral.x(), p.y() + lateral.y(), h)});
    }

    // Frames and exact camera poses.
    const int n_frames = static_cast<int>(std::floor(motion.duration * motion.fps)) + 1;
    Dataset& ds = sim.dataset;
    for (int f = 0; f < n_frames; ++f) {
        const double t = f / motion.fps;
        ds.frames.push_back({f, t});
        sim.true_poses.push_back(simulated_camera_pose(motion, t, scene.shore_on_left));
    }

    // Gyro stream: camera-frame body rates remapped into IMU axes, plus bias
    // and white noise.
    const Mat3 m_imu_to_cam = ds.config.imu_alignment.m;  // identity fixture
    const double t_last = ds.frames.back().t;
    const double dt_imu = 1.0 / motion.imu_rate;
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double gyro_std = noise.gyro_sigma * std::sqrt(motion.imu_rate);
    const int n_imu = static_cast<int>(std::ceil(t_last * motion.imu_rate)) + 2;
    for (int i = 0; i < n_imu; ++i) {
        const double t = i * dt_imu;
        const double h = 1e-5;
        const Mat3 r0 =
            simulated_camera_pose(motion, std::max(0.0, t - h), scene.shore_on_left).r.m;
        const Mat3 r1 = simulated_camera_pose(motion, t + h, scene.shore_on_left).r.m;
        const double span = (t + h) - std::max(0.0, t - h);
        const Eigen::AngleAxisd aa(Mat3(r0.transpose() * r1));
        const Vec3 w_cam = aa.angle() / span * aa.axis();
        Vec3 w_imu = m_imu_to_cam.transpose() * w_cam + noise.gyro_bias;
        if (gyro_std > 0.0)
            w_imu += gyro_std * Vec3(gauss(noise_rng), gauss(noise_rng), gauss(noise_rng));
        ds.imu.push_back({t, w_imu});
    }

    // GPS fixes at gps_rate, aligned to frame indices.
    const int gps_stride =
        std::max(1, static_cast<int>(std::lround(motion.fps / motion.gps_rate)));
    for (int f = 0; f < n_frames; f += gps_stride) {
        const Pose& p = sim.true_poses[static_cast<size_t>(f)];
        GpsFix fix;
        fix.frame = f;
        fix.east_m = p.s.x();
        fix.north_m = p.s.y();
        fix.sog_mps = motion.speed;
        if (noise.gps_sigma > 0.0) {
            fix.east_m += noise.gps_sigma * gauss(noise_rng);
            fix.north_m += noise.gps_sigma * gauss(noise_rng);
        }
        if (noise.sog_sigma > 0.0) fix.sog_mps += noise.sog_sigma * gauss(noise_rng);
        ds.gps.push_back(fix);
    }

    // Feature tracks: exact pinhole projection, expiry at track_max or on
    // leaving the frustum, fresh detections every frame.
    const int track_max = ds.config.track_max;
    struct Active {
        int feature_id;
        int length;
    };
    std::unordered_map<int, Active> active;  // landmark id -> track state
    int next_serial = 0;
    std::uniform_real_distribution<double> upx(0.0, k.width);
    std::uniform_real_distribution<double> vpx(0.0, k.height);
    bool any_visible = false;

    for (int f = 0; f < n_frames; ++f) {
        const Pose& pose = sim.true_poses[static_cast<size_t>(f)];
        std::unordered_map<int, Vec2> visible;  // landmark id -> true pixel
        std::vector<int> visible_order;
        for (const auto& lm : sim.landmarks) {
            const Vec3 x_cam = pose.r.m.transpose() * (lm.position - pose.s);
            if (x_cam.z() < 2.0) continue;
            const double u = k.fx * x_cam.x() / x_cam.z() + k.cx;
            const double v = k.fy * x_cam.y() / x_cam.z() + k.cy;
            if (u < 0.0 || u >= k.width || v < 0.0 || v >= k.height) continue;
            visible.emplace(lm.id, Vec2(u, v));
            visible_order.push_back(lm.id);
        }
        if (!visible.empty()) any_visible = true;

        // Extend surviving tracks, expire the rest.
        std::vector<std::pair<int, int>> emit;  // (feature_id, landmark_id)
        for (auto it = active.begin(); it != active.end();) {
            if (visible.count(it->first) && it->second.length < track_max) {
                ++it->second.length;
                emit.emplace_back(it->second.feature_id, it->first);
                ++it;
            } else {
                it = active.erase(it);
            }
        }

        // Fresh detections to keep the per-frame count up.
        if (static_cast<int>(emit.size()) < kDetectionsPerFrame) {
            std::vector<int> candidates;
            for (int id : visible_order)
                if (!active.count(id)) candidates.push_back(id);
            std::shuffle(candidates.begin(), candidates.end(), detect_rng);
            std::uniform_int_distribution<int> age(0, track_max - 1);
            for (int id : candidates) {
                if (static_cast<int>(emit.size()) >= kDetectionsPerFrame) break;
                const int feature_id = next_serial++;
                sim.feature_landmark.emplace(feature_id, id);
                // Pre-age the first frame's detections: otherwise every track
                // expires on the same frame forever and each frame sees only a
                // single home view.
                active[id] = {feature_id, f == 0 ? 1 + age(detect_rng) : 1};
                emit.emplace_back(feature_id, id);
            }
        }

        std::sort(emit.begin(), emit.end());
        for (const auto& [feature_id, lm_id] : emit) {
            Vec2 px = visible.at(lm_id);
            if (noise.outlier_rate > 0.0 && unit(noise_rng) < noise.outlier_rate) {
                px = Vec2(upx(noise_rng), vpx(noise_rng));
                sim.outliers.insert({f, feature_id});
            } else if (noise.pixel_sigma > 0.0) {
                px += noise.pixel_sigma * Vec2(gauss(noise_rng), gauss(noise_rng));
            }
            ds.tracks.push_back({f, feature_id, px.x(), px.y()});
        }
    }

    if (!any_visible)
        throw ParameterError("sim: no landmark ever enters the camera frustum");

    ds.config.intrinsics = k;
    ds.config.mlesac.seed = scene.seed;
    return sim;
}

void write_sim(const SimResult& sim, const std::filesystem::path& dir) {
    save_dataset(sim.dataset, dir);
    {
        std::ofstream out(dir / "ground_truth.csv");
        out << "frame,x,y,z,qw,qx,qy,qz\n";
        for (size_t f = 0; f < sim.true_poses.size(); ++f) {
            const Pose& p = sim.true_poses[f];
            const Eigen::Quaterniond q(p.r.m);
            out << sim.dataset.frames[f].frame_index;
            for (int i = 0; i < 3; ++i) out << "," << format_double(p.s(i));
            out << "," << format_double(q.w()) << "," << format_double(q.x())
                << "," << format_double(q.y()) << "," << format_double(q.z())
                << "\n";
        }
    }
    {
        std::ofstream out(dir / "landmarks.csv");
        out << "id,x,y,z\n";
        for (const auto& lm : sim.landmarks) {
            out << lm.id;
            for (int i = 0; i < 3; ++i) out << "," << format_double(lm.position(i));
            out << "\n";
        }
    }
}

OracleReport oracle_check(const SimResult& sim, const NoiseParams& noise) {
    OracleReport rep;
    const Dataset& ds = sim.dataset;
    const CameraIntrinsics& k = ds.config.intrinsics;

    std::unordered_map<int, const Landmark*> lm_by_id;
    for (const auto& lm : sim.landmarks) lm_by_id[lm.id] = &lm;
    std::unordered_map<int, size_t> frame_pos;
    for (size_t i = 0; i < ds.frames.size(); ++i)
        frame_pos[ds.frames[i].frame_index] = i;

    double sum = 0.0, sum_sq = 0.0;
    int count = 0;
    for (size_t row = 0; row < ds.tracks.size(); ++row) {
        const auto& obs = ds.tracks[row];
        if (sim.outliers.count({obs.frame, obs.feature_id})) continue;
        const Landmark* lm = lm_by_id.at(sim.landmark_of_feature(obs.feature_id));
        const Pose& pose = sim.true_poses[frame_pos.at(obs.frame)];
        const Vec3 x_cam = pose.r.m.transpose() * (lm->position - pose.s);
        if (x_cam.z() <= 0.0)
            throw ConsistencyError("oracle: tracked point behind camera at tracks.csv row " +
                                   std::to_string(row + 2));
        const double du = obs.u_px - (k.fx * x_cam.x() / x_cam.z() + k.cx);
        const double dv = obs.v_px - (k.fy * x_cam.y() / x_cam.z() + k.cy);
        const double r2 = du * du + dv * dv;
        if (noise.pixel_sigma == 0.0 && r2 > 1e-18)
            throw ConsistencyError("oracle: nonzero reprojection residual at "
                                   "tracks.csv row " + std::to_string(row + 2));
        if (noise.pixel_sigma > 0.0 && r2 > 64.0 * noise.pixel_sigma * noise.pixel_sigma)
            throw ConsistencyError("oracle: outlier-sized residual on a clean "
                                   "observation at tracks.csv row " + std::to_string(row + 2));
        sum += du + dv;
        sum_sq += r2;
        count += 2;
    }
    rep.checked_observations = count / 2;
    if (count > 0) {
        rep.reprojection_rms_px = std::sqrt(sum_sq / count);
        const double mean = sum / count;
        rep.reprojection_std_px = std::sqrt(std::max(0.0, sum_sq / count - mean * mean));
    }
    if (noise.pixel_sigma > 0.0 && count >= 10000 &&
        std::abs(rep.reprojection_std_px - noise.pixel_sigma) > 0.1 * noise.pixel_sigma)
        throw ConsistencyError("oracle: reprojection noise level inconsistent "
                               "with pixel_sigma");

    // Gyro integral against the true final orientation.
    const auto oriented =
        integrate(ds.imu, ds.config.imu_alignment, ds.frames, sim.true_poses.front().r);
    const Mat3 err =
        oriented.back().second.m.transpose() * sim.true_poses.back().r.m;
    rep.gyro_final_error_deg = Eigen::AngleAxisd(err).angle() * 180.0 / M_PI;
    if (noise.gyro_sigma == 0.0 && noise.gyro_bias.norm() == 0.0 &&
        rep.gyro_final_error_deg > 0.05)
        throw ConsistencyError("oracle: gyro integral deviates from the true "
                               "orientation by more than 0.05 degrees");

    // GPS residual statistics.
    double g_sum_sq = 0.0;
    int g_count = 0;
    for (const auto& fix : ds.gps) {
        const Pose& pose = sim.true_poses[frame_pos.at(fix.frame)];
        const double de = fix.east_m - pose.s.x();
        const double dn = fix.north_m - pose.s.y();
        if (noise.gps_sigma == 0.0 && de * de + dn * dn > 1e-18)
            throw ConsistencyError("oracle: GPS residual on a noise-free fix");
        if (noise.gps_sigma > 0.0 &&
            std::abs(de) + std::abs(dn) > 8.0 * noise.gps_sigma)
            throw ConsistencyError("oracle: GPS residual beyond 4 sigma per axis");
        g_sum_sq += de * de + dn * dn;
        g_count += 2;
    }
    if (g_count > 0) rep.gps_residual_std = std::sqrt(g_sum_sq / g_count);
    if (noise.gps_sigma > 0.0 && g_count >= 60 &&
        (rep.gps_residual_std < 0.6 * noise.gps_sigma ||
         rep.gps_residual_std > 1.4 * noise.gps_sigma))
        throw ConsistencyError("oracle: GPS residual spread inconsistent with gps_sigma");

    return rep;
}

}  // namespace shorevo
