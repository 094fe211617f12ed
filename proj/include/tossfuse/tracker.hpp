#pragma once

#include "tossfuse/dataset.hpp"
#include "tossfuse/icp.hpp"
#include "tossfuse/sdf.hpp"

#include <optional>

namespace tossfuse {

struct TrackConfig {
    IcpConfig icp{50, 1e-6, 0.03, 10};
    int min_mask_pixels = 50;       // below this a frame is skipped and interpolated
    std::size_t max_cloud_points = 1200;  // deterministic stride subsampling
    bool constant_velocity_seed = true;
};

struct ReconstructConfig {
    int grid_dims = 64;
    double trunc_voxels = 5.0;
    int frame_stride = 1;
};

struct TrackResult {
    std::vector<RigidPose> poses;   // camera_from_object per frame
    std::vector<double> rms;        // ICP fit error per frame (0 where skipped)
    std::vector<bool> skipped;      // mask below threshold, pose interpolated
    std::optional<std::pair<SdfGrid, TriangleMesh>> reconstruction;
};

// Depth-ICP pose tracking through one clip. Frame 0 keeps initial_pose
// exactly. Without a shape prior, consecutive masked depth clouds are aligned
// frame to frame; with one, the prior rendered at the predicted pose is
// aligned to the observed cloud (no drift accumulation).
TrackResult track_clip(const Clip& clip, const CameraIntrinsics& K,
                       const RigidPose& initial_pose, const TrackConfig& cfg = TrackConfig(),
                       const TriangleMesh* shape_prior = nullptr);

// TSDF fusion of the clips' frames in the object frame defined by the poses,
// then surface extraction.
std::pair<SdfGrid, TriangleMesh> reconstruct(const std::vector<const Clip*>& clips,
                                             const std::vector<std::vector<RigidPose>>& poses,
                                             const CameraIntrinsics& K,
                                             const ReconstructConfig& cfg = ReconstructConfig());

// Deterministic stride subsample keeping at most max_points.
PointCloud subsample_cloud(const PointCloud& cloud, std::size_t max_points);

}  // namespace tossfuse
