#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

#include "shorevo/geometry.hpp"
#include "shorevo/sim.hpp"

using namespace shorevo;

namespace {

SceneParams small_scene(std::uint64_t seed = 7) {
    SceneParams s;
    s.landmark_count = 500;
    s.depth_max = 400.0;  // keeps most landmarks resolvable in a short run
    s.seed = seed;
    return s;
}

MotionParams short_motion(double duration = 15.0) {
    MotionParams m;
    m.duration = duration;
    m.yaw_profile = {{0.0, 0.0}, {5.0, 1.0}};
    return m;
}

Vec3 lift_pixel(const CameraIntrinsics& k, double u, double v) {
    return Vec3((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
}

}  // namespace

TEST_CASE("generate: noise-free tracks reproject exactly") {
    MotionParams motion = short_motion(10.0);
    motion.yaw_profile = {{0.0, 0.0}};  // straight run
    const SimResult sim = generate(small_scene(), motion, NoiseParams{},
                                   CameraIntrinsics{});
    const CameraIntrinsics& k = sim.dataset.config.intrinsics;

    std::unordered_map<int, Vec3> lm;
    for (const auto& l : sim.landmarks) lm[l.id] = l.position;
    REQUIRE(!sim.dataset.tracks.empty());
    CHECK(sim.outliers.empty());
    for (const auto& obs : sim.dataset.tracks) {
        const Pose& pose = sim.true_poses[static_cast<size_t>(obs.frame)];
        const Vec3 x_cam =
            pose.r.m.transpose() *
            (lm.at(sim.landmark_of_feature(obs.feature_id)) - pose.s);
        REQUIRE(x_cam.z() > 0.0);
        CHECK(std::abs(obs.u_px - (k.fx * x_cam.x() / x_cam.z() + k.cx)) < 1e-12);
        CHECK(std::abs(obs.v_px - (k.fy * x_cam.y() / x_cam.z() + k.cy)) < 1e-12);
    }
    const OracleReport rep = oracle_check(sim, NoiseParams{});
    CHECK(rep.reprojection_rms_px < 1e-9);
    CHECK(rep.gyro_final_error_deg < 0.05);
}

TEST_CASE("generate: pure rotation leaves all correspondences collinear") {
    SceneParams scene = small_scene(11);
    MotionParams motion;
    motion.duration = 10.0;
    motion.speed = 0.0;
    motion.yaw_profile = {{0.0, 10.0}};  // spin in place
    const SimResult sim =
        generate(scene, motion, NoiseParams{}, CameraIntrinsics{});
    const CameraIntrinsics& k = sim.dataset.config.intrinsics;

    // With zero baseline every view of a landmark shares the same world ray.
    std::map<int, std::pair<int, Vec3>> last;  // feature -> (frame, world ray)
    int pairs = 0;
    for (const auto& obs : sim.dataset.tracks) {
        const Pose& pose = sim.true_poses[static_cast<size_t>(obs.frame)];
        const Vec3 ray =
            (pose.r.m * lift_pixel(k, obs.u_px, obs.v_px)).normalized();
        const auto it = last.find(obs.feature_id);
        if (it != last.end() && it->second.first == obs.frame - 1) {
            CHECK(ray.cross(it->second.second).norm() < 1e-9);
            ++pairs;
        }
        last[obs.feature_id] = {obs.frame, ray};
    }
    CHECK(pairs > 1000);
}

TEST_CASE("oracle_check: corrupted track row fails naming the row") {
    SimResult sim = generate(small_scene(), short_motion(5.0), NoiseParams{},
                             CameraIntrinsics{});
    const size_t row = 100;
    sim.dataset.tracks[row].u_px += 5.0;
    try {
        oracle_check(sim, NoiseParams{});
        FAIL("expected ConsistencyError");
    } catch (const ConsistencyError& e) {
        CHECK(std::string(e.what()).find("row " + std::to_string(row + 2)) !=
              std::string::npos);
    }
}

TEST_CASE("generate: reprojection noise matches pixel_sigma") {
    NoiseParams noise;
    noise.pixel_sigma = 0.5;
    noise.outlier_rate = 0.1;
    noise.gps_sigma = 1.5;
    const SimResult sim =
        generate(small_scene(), short_motion(15.0), noise, CameraIntrinsics{});

    // Independent residual statistics over the clean observations.
    std::unordered_map<int, Vec3> lm;
    for (const auto& l : sim.landmarks) lm[l.id] = l.position;
    const CameraIntrinsics& k = sim.dataset.config.intrinsics;
    double sum = 0.0, sum_sq = 0.0;
    int n = 0;
    int outliers_seen = 0;
    for (const auto& obs : sim.dataset.tracks) {
        if (sim.outliers.count({obs.frame, obs.feature_id})) {
            ++outliers_seen;
            continue;
        }
        const Pose& pose = sim.true_poses[static_cast<size_t>(obs.frame)];
        const Vec3 x_cam =
            pose.r.m.transpose() *
            (lm.at(sim.landmark_of_feature(obs.feature_id)) - pose.s);
        const double du = obs.u_px - (k.fx * x_cam.x() / x_cam.z() + k.cx);
        const double dv = obs.v_px - (k.fy * x_cam.y() / x_cam.z() + k.cy);
        sum += du + dv;
        sum_sq += du * du + dv * dv;
        n += 2;
    }
    REQUIRE(n >= 10000);
    const double mean = sum / n;
    const double std_px = std::sqrt(sum_sq / n - mean * mean);
    CHECK(std::abs(std_px - noise.pixel_sigma) < 0.1 * noise.pixel_sigma);

    // Labeled outlier fraction tracks outlier_rate.
    const double frac =
        static_cast<double>(outliers_seen) / sim.dataset.tracks.size();
    CHECK(frac > 0.08);
    CHECK(frac < 0.12);

    CHECK_NOTHROW(oracle_check(sim, noise));
}

TEST_CASE("generate: deterministic per seed, noise stream independent") {
    NoiseParams noise;
    noise.pixel_sigma = 0.5;
    noise.gps_sigma = 1.5;
    const SimResult a =
        generate(small_scene(5), short_motion(5.0), noise, CameraIntrinsics{});
    const SimResult b =
        generate(small_scene(5), short_motion(5.0), noise, CameraIntrinsics{});
    REQUIRE(a.dataset.tracks.size() == b.dataset.tracks.size());
    for (size_t i = 0; i < a.dataset.tracks.size(); ++i) {
        CHECK(a.dataset.tracks[i].u_px == b.dataset.tracks[i].u_px);
        CHECK(a.dataset.tracks[i].v_px == b.dataset.tracks[i].v_px);
    }

    NoiseParams other = noise;
    other.noise_seed = 99;
    const SimResult c =
        generate(small_scene(5), short_motion(5.0), other, CameraIntrinsics{});
    // Geometry untouched, noise realization changed.
    REQUIRE(c.landmarks.size() == a.landmarks.size());
    for (size_t i = 0; i < a.landmarks.size(); ++i)
        CHECK((c.landmarks[i].position - a.landmarks[i].position).norm() == 0.0);
    for (size_t i = 0; i < a.true_poses.size(); ++i)
        CHECK((c.true_poses[i].s - a.true_poses[i].s).norm() == 0.0);
    bool any_diff = false;
    for (size_t i = 0; i < a.dataset.tracks.size() && i < c.dataset.tracks.size();
         ++i)
        if (a.dataset.tracks[i].u_px != c.dataset.tracks[i].u_px) any_diff = true;
    CHECK(any_diff);
}

TEST_CASE("generate: track invariants hold") {
    const SimResult sim = generate(small_scene(), short_motion(10.0),
                                   NoiseParams{}, CameraIntrinsics{});
    const int track_max = sim.dataset.config.track_max;

    std::map<int, std::pair<int, int>> spans;  // feature -> (last frame, length)
    std::map<int, int> per_frame;
    for (const auto& obs : sim.dataset.tracks) {
        ++per_frame[obs.frame];
        auto it = spans.find(obs.feature_id);
        if (it == spans.end()) {
            spans[obs.feature_id] = {obs.frame, 1};
        } else {
            CHECK(obs.frame == it->second.first + 1);  // consecutive frames
            it->second.first = obs.frame;
            ++it->second.second;
        }
    }
    for (const auto& [id, span] : spans) CHECK(span.second <= track_max);
    for (const auto& [frame, count] : per_frame)
        CHECK(count >= sim.dataset.config.min_tracks_per_frame);
}

TEST_CASE("generate: parameter validation") {
    SceneParams bad_scene = small_scene();
    bad_scene.depth_min = 10.0;
    bad_scene.depth_max = 5.0;
    CHECK_THROWS_AS(
        generate(bad_scene, short_motion(5.0), NoiseParams{}, CameraIntrinsics{}),
        ParameterError);

    MotionParams bad_motion = short_motion(5.0);
    bad_motion.imu_rate = 10.0;  // below fps
    CHECK_THROWS_AS(
        generate(small_scene(), bad_motion, NoiseParams{}, CameraIntrinsics{}),
        ParameterError);

    SceneParams empty = small_scene();
    empty.landmark_count = 0;
    CHECK_THROWS_AS(
        generate(empty, short_motion(5.0), NoiseParams{}, CameraIntrinsics{}),
        ParameterError);
}

TEST_CASE("generate: GPS stream rate, truth and noise statistics") {
    const MotionParams motion = short_motion(20.0);
    const SimResult clean =
        generate(small_scene(), motion, [] {
            NoiseParams n;
            n.gps_sigma = 0.0;
            return n;
        }(), CameraIntrinsics{});
    REQUIRE(!clean.dataset.gps.empty());
    // 1 Hz against 25 fps: one fix every 25 frames, sog equals true speed.
    CHECK(clean.dataset.gps[1].frame - clean.dataset.gps[0].frame == 25);
    for (const auto& fix : clean.dataset.gps) {
        const Pose& p = clean.true_poses[static_cast<size_t>(fix.frame)];
        CHECK(std::abs(fix.east_m - p.s.x()) < 1e-12);
        CHECK(std::abs(fix.north_m - p.s.y()) < 1e-12);
        CHECK(fix.sog_mps == motion.speed);
    }

    NoiseParams noisy;
    noisy.gps_sigma = 1.5;
    const SimResult sim =
        generate(small_scene(), motion, noisy, CameraIntrinsics{});
    const OracleReport rep = oracle_check(sim, noisy);
    CHECK(rep.gps_residual_std > 0.6 * noisy.gps_sigma);
    CHECK(rep.gps_residual_std < 1.4 * noisy.gps_sigma);
}
