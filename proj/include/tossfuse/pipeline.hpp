#pragma once

#include "tossfuse/dataset.hpp"
#include "tossfuse/learning.hpp"
#include "tossfuse/metrics.hpp"
#include "tossfuse/tracker.hpp"

#include <string>
#include <vector>

namespace tossfuse {

struct CycleConfig {
    char variant = 'g';  // Table-style ablation variant, one of b..g
    int cycles = 1;
    TrackConfig track;
    TrainConfig train_cfg;
    ReconstructConfig recon;
    IcpConfig refine_icp{50, 1e-6, 0.05, 10};
    int polytope_k = 8;
    double mu_init = 0.5;
    int splat_radius = 1;
    std::size_t eval_points = 512;       // geometry samples for ADD/ADD-S
    std::size_t chamfer_samples = 10000;
    std::uint64_t seed = 42;

    void validate() const;
};

struct StageReport {
    std::string name;
    std::vector<RigidPose> poses;  // clip-0 trajectory at this stage
    std::vector<double> rms;
    TriangleMesh mesh;             // geometry artifact of the stage
    std::vector<DepthMap> depth;   // refined frames, when the stage makes them
    std::vector<Mask> mask;
    EvalReport eval;
    bool has_eval = false;
    double seconds = 0.0;
};

struct CycleReport {
    std::vector<StageReport> stages;

    const StageReport& final_stage() const { return stages.back(); }
};

// Depth/mask renders of the geometry at each frame pose.
std::vector<std::pair<DepthMap, Mask>> reproject_refined(const TriangleMesh& geom,
                                                         const std::vector<RigidPose>& poses,
                                                         const CameraIntrinsics& K);

struct RefinedFrames {
    std::vector<DepthMap> depth;
    std::vector<Mask> mask;
    std::vector<RigidPose> corrections;  // applied to the predicted cloud
    std::vector<bool> fallback;          // insufficient overlap, prediction kept
};

// Aligns each predicted depth to the observed one with ICP and re-renders the
// corrected prediction (point splats) as the refined frame.
RefinedFrames icp_refine_frames(const std::vector<std::pair<DepthMap, Mask>>& observed,
                                const std::vector<std::pair<DepthMap, Mask>>& predicted,
                                const CameraIntrinsics& K,
                                const IcpConfig& cfg = IcpConfig{50, 1e-6, 0.05, 10},
                                int splat_radius = 1,
                                std::size_t max_cloud_points = 1200);

// Executes the ablation variant's stage list on the dataset; clip 0 is the
// evaluation toss throughout.
CycleReport run_cycle(const TossDataset& dataset, const CycleConfig& cfg);

// Applies trained artifacts to a clip outside the training set: baseline
// frame-to-frame track, reprojection of the refined geometry, per-frame ICP
// refinement, then model-to-frame re-tracking on the refined frames.
struct NewClipResult {
    TrackResult baseline;   // frame-to-frame, no prior
    TrackResult refined;    // final model-to-frame result
    EvalReport baseline_eval;
    EvalReport refined_eval;
    bool has_eval = false;
};

NewClipResult apply_to_new_clip(const ContactModel& model, const TriangleMesh& geom,
                                const Clip& clip, const TossDataset& dataset,
                                const CycleConfig& cfg = CycleConfig());

}  // namespace tossfuse
