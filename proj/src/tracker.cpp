#include "tossfuse/tracker.hpp"

#include "tossfuse/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace tossfuse {

PointCloud subsample_cloud(const PointCloud& cloud, std::size_t max_points) {
    if (cloud.size() <= max_points || max_points == 0) return cloud;
    const std::size_t stride = (cloud.size() + max_points - 1) / max_points;
    PointCloud out;
    out.reserve(cloud.size() / stride + 1);
    for (std::size_t i = 0; i < cloud.size(); i += stride) out.push_back(cloud[i]);
    return out;
}

namespace {

RigidPose interpolate_pose(const RigidPose& a, const RigidPose& b, double t) {
    RigidPose out;
    out.rotation = a.rotation.slerp(t, b.rotation);
    out.translation = (1.0 - t) * a.translation + t * b.translation;
    return out;
}

}  // namespace

TrackResult track_clip(const Clip& clip, const CameraIntrinsics& K,
                       const RigidPose& initial_pose, const TrackConfig& cfg,
                       const TriangleMesh* shape_prior) {
    if (clip.frames.empty()) throw InvalidInput("track_clip: empty clip");
    if (clip.frames[0].mask.area() == 0)
        throw InvalidInput("track_clip: frame 0 has an empty mask");

    const std::size_t n = clip.frames.size();
    TrackResult result;
    result.poses.assign(n, RigidPose::identity());
    result.rms.assign(n, 0.0);
    result.skipped.assign(n, false);
    result.poses[0] = initial_pose;

    auto observed_cloud = [&](std::size_t k) {
        return subsample_cloud(backproject(clip.frames[k].depth, clip.frames[k].mask, K),
                               cfg.max_cloud_points);
    };

    std::size_t last_good = 0;
    PointCloud last_cloud = observed_cloud(0);
    RigidPose velocity_delta;  // camera-frame pose delta per frame

    for (std::size_t k = 1; k < n; ++k) {
        const RigidPose predicted =
            cfg.constant_velocity_seed ? compose(velocity_delta, result.poses[k - 1])
                                       : result.poses[k - 1];

        if (clip.frames[k].mask.area() < static_cast<std::size_t>(cfg.min_mask_pixels)) {
            result.skipped[k] = true;
            result.poses[k] = predicted;
            continue;
        }

        const PointCloud target = observed_cloud(k);
        try {
            if (shape_prior) {
                // Model-to-frame: align the prior rendered at the prediction.
                const DepthMap pred_depth = render_depth(*shape_prior, predicted, K);
                const PointCloud source =
                    subsample_cloud(backproject(pred_depth, derive_mask(pred_depth), K),
                                    cfg.max_cloud_points);
                const IcpResult icp = icp_align(source, target, cfg.icp);
                result.poses[k] = compose(icp.pose, predicted);
                result.rms[k] = icp.rms_error;
            } else {
                // Frame-to-frame odometry from the last tracked frame.
                const RigidPose seed = compose(predicted, invert(result.poses[last_good]));
                const IcpResult icp = icp_align(last_cloud, target, cfg.icp, seed);
                result.poses[k] = compose(icp.pose, result.poses[last_good]);
                result.rms[k] = icp.rms_error;
            }
        } catch (const InsufficientOverlap& e) {
            throw TrackingLost(std::string("track_clip: ") + e.what() + " at frame " +
                                   std::to_string(k),
                               last_good);
        }

        velocity_delta = compose(result.poses[k], invert(result.poses[k - 1]));
        last_good = k;
        if (!shape_prior) last_cloud = target;
    }

    // Fill skipped frames by interpolating between the bracketing tracked
    // frames; leading/trailing runs keep the constant-velocity prediction.
    for (std::size_t k = 1; k < n; ++k) {
        if (!result.skipped[k]) continue;
        std::size_t prev = k;
        while (prev > 0 && result.skipped[prev]) --prev;
        std::size_t next = k;
        while (next < n && result.skipped[next]) ++next;
        if (next < n && !result.skipped[prev]) {
            const double t = static_cast<double>(k - prev) / static_cast<double>(next - prev);
            result.poses[k] = interpolate_pose(result.poses[prev], result.poses[next], t);
        }
    }

    return result;
}

std::pair<SdfGrid, TriangleMesh> reconstruct(const std::vector<const Clip*>& clips,
                                             const std::vector<std::vector<RigidPose>>& poses,
                                             const CameraIntrinsics& K,
                                             const ReconstructConfig& cfg) {
    if (clips.empty()) throw InvalidInput("reconstruct: no clips");
    if (clips.size() != poses.size())
        throw InvalidInput("reconstruct: clip/pose list size mismatch");
    std::size_t total_frames = 0;
    for (std::size_t c = 0; c < clips.size(); ++c) {
        if (!clips[c]) throw InvalidInput("reconstruct: null clip");
        if (clips[c]->frames.size() != poses[c].size())
            throw InvalidInput("reconstruct: pose count does not match frame count");
        total_frames += clips[c]->frames.size();
    }
    if (total_frames == 0) throw InvalidInput("reconstruct: zero frames");

    // Bound the object in its own frame from the posed observations.
    PointCloud object_points;
    for (std::size_t c = 0; c < clips.size(); ++c) {
        for (std::size_t k = 0; k < clips[c]->frames.size(); k += 5) {
            const Frame& f = clips[c]->frames[k];
            const PointCloud cam = subsample_cloud(backproject(f.depth, f.mask, K), 300);
            const RigidPose object_from_camera = invert(poses[c][k]);
            for (const Vec3& p : cam) object_points.push_back(object_from_camera.apply(p));
        }
    }
    if (object_points.empty()) throw InvalidInput("reconstruct: no valid depth samples");

    Vec3 centroid = Vec3::Zero();
    for (const Vec3& p : object_points) centroid += p;
    centroid /= static_cast<double>(object_points.size());

    std::vector<double> dist;
    dist.reserve(object_points.size());
    for (const Vec3& p : object_points) dist.push_back((p - centroid).norm());
    std::sort(dist.begin(), dist.end());
    // 98th percentile rejects stray noise/drift outliers that would dilate
    // the voxel size.
    const double radius =
        std::clamp(dist[static_cast<std::size_t>(0.98 * (dist.size() - 1))], 0.02, 1.0);

    SdfGrid grid = make_centered_grid(centroid, radius, cfg.grid_dims, cfg.trunc_voxels);
    for (std::size_t c = 0; c < clips.size(); ++c)
        for (std::size_t k = 0; k < clips[c]->frames.size();
             k += static_cast<std::size_t>(std::max(1, cfg.frame_stride)))
            tsdf_integrate(grid, clips[c]->frames[k].depth, clips[c]->frames[k].mask, K,
                           poses[c][k]);

    TriangleMesh mesh = extract_surface(grid);
    return {std::move(grid), std::move(mesh)};
}

}  // namespace tossfuse
