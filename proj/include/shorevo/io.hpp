#ifndef SHOREVO_IO_HPP
#define SHOREVO_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "shorevo/imu.hpp"
#include "shorevo/mlesac.hpp"
#include "shorevo/refine.hpp"
#include "shorevo/types.hpp"

namespace shorevo {

struct CameraIntrinsics {
    double fx = 700.0;
    double fy = 700.0;
    double cx = 400.0;
    double cy = 300.0;
    int width = 800;
    int height = 600;

    bool valid() const {
        return fx > 0.0 && fy > 0.0 && cx > 0.0 && cx < width && cy > 0.0 &&
               cy < height;
    }
};

struct TrackObservation {
    int frame = 0;
    int feature_id = 0;
    double u_px = 0.0;
    double v_px = 0.0;
};

struct GpsFix {
    int frame = 0;
    double east_m = 0.0;
    double north_m = 0.0;
    double sog_mps = 0.0;
};

struct PipelineConfig {
    int track_max = 5;
    int refine_window = 3;
    int min_tracks_per_frame = 12;
    MlesacParams mlesac;
    RefineOptions gn;
    CameraIntrinsics intrinsics;
    ImuAlignment imu_alignment;
    int eval_samples = 200;
    int histogram_bins = 20;
    bool allow_cutoff_override = false;

    void validate() const;
};

struct Dataset {
    std::vector<FrameClock> frames;
    std::vector<TrackObservation> tracks;
    std::vector<GyroSample> imu;
    std::vector<GpsFix> gps;
    PipelineConfig config;
};

struct TrajectoryEntry {
    int frame = 0;
    Vec3 position = Vec3::Zero();
    Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
};

using Trajectory = std::vector<TrajectoryEntry>;

/// Full-precision decimal formatting (17 significant digits) so determinism
/// survives the file boundary.
std::string format_double(double v);

/// Loads and cross-validates a dataset directory (frames.csv, tracks.csv,
/// imu.csv, gps.csv, config.json).
Dataset load_dataset(const std::filesystem::path& dir);

/// Writes the dataset files into dir (created if absent).
void save_dataset(const Dataset& ds, const std::filesystem::path& dir);

PipelineConfig load_config(const std::filesystem::path& file);
void save_config(const PipelineConfig& cfg, const std::filesystem::path& file);

Trajectory load_trajectory(const std::filesystem::path& file);
void save_trajectory(const Trajectory& traj, const std::filesystem::path& file);

std::vector<GpsFix> load_gps(const std::filesystem::path& file);

/// SHOREVO_SEED, when set, overrides every configured seed.
bool seed_override(std::uint64_t* seed);

}  // namespace shorevo

#endif
