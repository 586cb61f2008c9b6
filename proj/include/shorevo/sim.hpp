#ifndef SHOREVO_SIM_HPP
#define SHOREVO_SIM_HPP

#include <cstdint>
#include <set>
#include <unordered_map>
#include <string>
#include <vector>

#include "shorevo/io.hpp"
#include "shorevo/pipeline.hpp"

namespace shorevo {

struct SceneParams {
    int landmark_count = 600;
    double depth_min = 5.0;     // meters
    double depth_max = 3000.0;  // meters
    bool shore_on_left = true;
    std::uint64_t seed = 1;
};

/// One piece of the piecewise-constant yaw-rate profile.
struct YawSegment {
    double t_start = 0.0;     // seconds
    double rate_deg_s = 0.0;  // heading rate
};

struct MotionParams {
    double duration = 60.0;   // seconds
    double fps = 25.0;
    double imu_rate = 150.0;  // Hz
    double gps_rate = 1.0;    // Hz
    double speed = 3.1;       // m/s
    std::vector<YawSegment> yaw_profile = {{0.0, 0.0}, {15.0, 1.5}, {40.0, -1.0}};
    double wave_amplitude_deg = 3.0;
    double wave_period_s = 2.0;
};

struct NoiseParams {
    double pixel_sigma = 0.0;    // px
    double outlier_rate = 0.0;   // fraction of observations
    double gyro_sigma = 0.0;     // rad/s/sqrt(Hz)
    Vec3 gyro_bias = Vec3::Zero();  // rad/s, IMU axes
    double sog_sigma = 0.0;      // m/s
    double gps_sigma = 1.5;      // m
    std::uint64_t noise_seed = 2;
};

struct Landmark {
    int id = 0;
    Vec3 position = Vec3::Zero();
};

struct SimResult {
    Dataset dataset;
    std::vector<Pose> true_poses;  // camera pose per frame
    std::vector<Landmark> landmarks;
    std::set<std::pair<int, int>> outliers;  // (frame, feature_id)
    std::unordered_map<int, int> feature_landmark;  // feature_id -> landmark id
    int landmark_of_feature(int feature_id) const {
        return feature_landmark.at(feature_id);
    }
};

struct OracleReport {
    double reprojection_rms_px = 0.0;
    double reprojection_std_px = 0.0;
    double gyro_final_error_deg = 0.0;
    double gps_residual_std = 0.0;
    int checked_observations = 0;
};

/// Camera world pose of the simulated boat at time t.
Pose simulated_camera_pose(const MotionParams& motion, double t,
                           bool shore_on_left);

/// Deterministic estuarine dataset: shore landmarks with log-uniform depth,
/// side-mounted camera, feature tracks from exact pinhole projection plus
/// noise and outliers, gyro and GPS streams, exact per-frame poses.
SimResult generate(const SceneParams& scene, const MotionParams& motion,
                   const NoiseParams& noise, const CameraIntrinsics& k);

/// Writes dataset files plus ground_truth.csv and landmarks.csv.
void write_sim(const SimResult& sim, const std::filesystem::path& dir);

/// Self-consistency checks: clean-track reprojection against the true poses
/// and landmarks, gyro integral against the true orientation, GPS residual
/// statistics. Throws ConsistencyError naming the first violated check.
OracleReport oracle_check(const SimResult& sim, const NoiseParams& noise);

}  // namespace shorevo

#endif
