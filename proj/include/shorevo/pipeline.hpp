#ifndef SHOREVO_PIPELINE_HPP
#define SHOREVO_PIPELINE_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shorevo/geometry.hpp"
#include "shorevo/io.hpp"

namespace shorevo {

/// One feature's home frame plus its normalized projections over consecutive
/// frames (at most track_max of them).
struct FeatureTrack {
    int id = 0;
    int home_frame = 0;  // position in the frames list, not the raw index
    std::vector<NormalizedProjection> obs;

    bool observed_at(int frame_pos) const {
        return frame_pos >= home_frame &&
               frame_pos < home_frame + static_cast<int>(obs.size());
    }
    const NormalizedProjection& at(int frame_pos) const {
        return obs[static_cast<size_t>(frame_pos - home_frame)];
    }
};

struct FrameDiagnostics {
    int frame = 0;
    int correspondences = 0;
    int inliers = 0;
    double mlesac_score = 0.0;
    int mlesac_iterations = 0;
    double refine_initial_cost = 0.0;
    double refine_final_cost = 0.0;
    bool coasting = false;
};

struct RunResult {
    Trajectory trajectory;
    std::vector<FrameDiagnostics> diagnostics;
    bool tracking_lost = false;
    std::string failure;
};

NormalizedProjection normalize(double u_px, double v_px,
                               const CameraIntrinsics& k);

/// Frame-by-frame estimator: two-view bootstrap with GPS scale, anchored
/// MLESAC per frame, sliding-window refinement, coast-on-failure.
class OdometryPipeline {
public:
    explicit OdometryPipeline(const Dataset& ds);

    /// Estimates poses for the first two frames; the world frame is anchored
    /// at frame 0 (IMU prior orientation, origin).
    void bootstrap();

    /// Estimates the pose of the frame at position `pos` in the frames list.
    void step(int pos);

    /// bootstrap + fold of step over all frames.
    RunResult run_all();

    const std::vector<FeatureTrack>& tracks() const { return tracks_; }
    const Pose& pose(int pos) const;

private:
    const Dataset& ds_;
    std::vector<FeatureTrack> tracks_;
    std::vector<std::vector<int>> tracks_by_frame_;  // track ids observed per frame
    std::vector<Rotation> priors_;
    std::vector<std::optional<Pose>> poses_;
    std::vector<FrameDiagnostics> diags_;
    int coast_count_ = 0;

    std::vector<Correspondence> correspondences_for(int pos,
                                                    std::vector<int>* homes) const;
    std::optional<Vec3> predict(int pos) const;
    std::optional<Vec3> robust_position(const std::vector<Correspondence>& cs,
                                        const Vec3& s_pred,
                                        const Vec3& v_hat) const;
    void refine_window(int pos);
    MlesacParams frame_params(int pos) const;
    friend RunResult run(const Dataset& ds);
};

/// Loads nothing itself: takes a validated dataset and produces the
/// trajectory plus per-frame diagnostics. Estimation failures after the
/// coast budget mark the result instead of throwing, so the partial
/// trajectory is still available.
RunResult run(const Dataset& ds);

}  // namespace shorevo

#endif
