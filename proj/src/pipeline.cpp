#include "tossfuse/pipeline.hpp"

#include "tossfuse/parallel.hpp"

#include <chrono>
#include <cmath>

namespace tossfuse {

void CycleConfig::validate() const {
    if (variant < 'b' || variant > 'g') throw InvalidInput("CycleConfig: variant must be b..g");
    if (cycles < 1) throw InvalidInput("CycleConfig: cycles must be >= 1");
    if (polytope_k < 4) throw InvalidInput("CycleConfig: polytope_k must be >= 4");
    refine_icp.validate();
    track.icp.validate();
}

std::vector<std::pair<DepthMap, Mask>> reproject_refined(const TriangleMesh& geom,
                                                         const std::vector<RigidPose>& poses,
                                                         const CameraIntrinsics& K) {
    if (geom.empty()) throw InvalidInput("reproject_refined: empty geometry");
    std::vector<std::pair<DepthMap, Mask>> out(poses.size());
    parallel_for(poses.size(), [&](std::size_t k) {
        DepthMap d = render_depth(geom, poses[k], K);
        Mask m = derive_mask(d);
        out[k] = {std::move(d), std::move(m)};
    });
    return out;
}

RefinedFrames icp_refine_frames(const std::vector<std::pair<DepthMap, Mask>>& observed,
                                const std::vector<std::pair<DepthMap, Mask>>& predicted,
                                const CameraIntrinsics& K, const IcpConfig& cfg,
                                int splat_radius, std::size_t max_cloud_points) {
    if (observed.size() != predicted.size())
        throw InvalidInput("icp_refine_frames: frame count mismatch");

    const std::size_t n = observed.size();
    RefinedFrames out;
    out.depth.resize(n);
    out.mask.resize(n);
    out.corrections.assign(n, RigidPose::identity());
    out.fallback.assign(n, false);

    parallel_for(n, [&](std::size_t k) {
        const PointCloud source_full =
            backproject(predicted[k].first, predicted[k].second, K);
        try {
            const PointCloud source = subsample_cloud(source_full, max_cloud_points);
            const PointCloud target = subsample_cloud(
                backproject(observed[k].first, observed[k].second, K), max_cloud_points);
            if (source.size() < static_cast<std::size_t>(cfg.min_correspondences) ||
                target.size() < static_cast<std::size_t>(cfg.min_correspondences))
                throw InsufficientOverlap("icp_refine_frames: too few points");
            const IcpResult icp = icp_align(source, target, cfg);
            out.corrections[k] = icp.pose;
            out.depth[k] =
                render_depth_splat(transform_points(icp.pose, source_full), K, splat_radius);
            out.mask[k] = derive_mask(out.depth[k]);
        } catch (const InsufficientOverlap&) {
            out.fallback[k] = true;
            out.depth[k] = predicted[k].first;
            out.mask[k] = predicted[k].second;
        }
    });
    return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct CycleContext {
    const TossDataset& ds;
    const CycleConfig& cfg;
    PointCloud eval_geom;       // GT geometry samples for ADD/ADD-S
    TriangleMesh gt_mesh;       // GT hull for Chamfer
    bool has_gt = false;
};

EvalReport evaluate_stage(const CycleContext& ctx, const std::vector<RigidPose>& poses,
                          const TriangleMesh& mesh) {
    EvalReport report;
    const Clip& clip0 = ctx.ds.clips[0];
    if (!poses.empty() && !clip0.gt_poses.empty())
        report = evaluate_trajectory(poses, clip0.gt_poses, ctx.eval_geom);
    if (!mesh.empty() && !ctx.gt_mesh.empty())
        report.chamfer_cm =
            100.0 * chamfer_mesh(mesh, ctx.gt_mesh, ctx.cfg.chamfer_samples, ctx.cfg.seed);
    return report;
}

StageReport make_stage(const CycleContext& ctx, std::string name,
                       std::vector<RigidPose> poses, std::vector<double> rms,
                       TriangleMesh mesh, Clock::time_point t0) {
    StageReport s;
    s.name = std::move(name);
    s.poses = std::move(poses);
    s.rms = std::move(rms);
    s.mesh = std::move(mesh);
    if (ctx.has_gt) {
        s.eval = evaluate_stage(ctx, s.poses, s.mesh);
        s.has_eval = true;
    }
    s.seconds = seconds_since(t0);
    return s;
}

// Refined dataset clip: refined depth/mask frames, original timestamps, RGB
// and initial pose carried over.
Clip make_refined_clip(const Clip& original, const std::vector<DepthMap>& depth,
                       const std::vector<Mask>& mask) {
    Clip refined;
    refined.initial_pose = original.initial_pose;
    refined.gt_poses = original.gt_poses;
    refined.frames.resize(original.frames.size());
    for (std::size_t k = 0; k < original.frames.size(); ++k) {
        refined.frames[k].depth = depth[k];
        refined.frames[k].mask = mask[k];
        refined.frames[k].timestamp = original.frames[k].timestamp;
        refined.frames[k].rgb = original.frames[k].rgb;
    }
    return refined;
}

std::vector<std::pair<DepthMap, Mask>> clip_frames(const Clip& clip) {
    std::vector<std::pair<DepthMap, Mask>> out;
    out.reserve(clip.frames.size());
    for (const Frame& f : clip.frames) out.emplace_back(f.depth, f.mask);
    return out;
}

ContactModel train_on_clip0(const CycleContext& ctx, const std::vector<RigidPose>& clip0_poses,
                            const TriangleMesh& shape_prior_mesh,
                            const ContactModel* continue_from) {
    if (!ctx.ds.gt_model)
        throw InvalidInput("run_cycle: dynamics training needs known mass/inertia (gt_model.txt)");

    ContactModel init;
    if (continue_from) {
        init = *continue_from;
    } else {
        init.mass = ctx.ds.gt_model->mass;
        init.inertia = ctx.ds.gt_model->inertia;
        init.mu = ctx.cfg.mu_init;
        init.vertices.clear();
        for (const Vec3& v : decimate_to_polytope(shape_prior_mesh,
                                                  static_cast<std::size_t>(ctx.cfg.polytope_k)))
            init.vertices.push_back(v);
    }

    const Clip& clip0 = ctx.ds.clips[0];
    const RigidPose world_from_camera = invert(ctx.ds.camera_from_world);
    std::vector<RigidPose> world_poses;
    std::vector<double> times;
    for (std::size_t k = 0; k < clip0_poses.size(); ++k) {
        world_poses.push_back(compose(world_from_camera, clip0_poses[k]));
        times.push_back(clip0.frames[k].timestamp);
    }
    const auto transitions = transitions_from_trajectory(world_poses, times);
    return train(init, transitions, ctx.cfg.train_cfg).model;
}

}  // namespace

CycleReport run_cycle(const TossDataset& dataset, const CycleConfig& cfg) {
    cfg.validate();
    dataset.validate();
    if (dataset.clips.empty()) throw InvalidInput("run_cycle: dataset has no clips");

    CycleContext ctx{dataset, cfg, {}, {}, false};
    if (dataset.gt_model && !dataset.clips[0].gt_poses.empty()) {
        ctx.gt_mesh = refined_geometry(*dataset.gt_model);
        ctx.eval_geom = sample_mesh_surface(ctx.gt_mesh, cfg.eval_points, cfg.seed);
        ctx.has_gt = true;
    }

    const Clip& clip0 = dataset.clips[0];
    CycleReport report;

    // Baseline: track the evaluation toss alone and reconstruct from it.
    auto t0 = Clock::now();
    const TrackResult track0 = track_clip(clip0, dataset.intrinsics, clip0.initial_pose, cfg.track);
    if (cfg.variant == 'b') {
        TriangleMesh mesh =
            reconstruct({&clip0}, {track0.poses}, dataset.intrinsics, cfg.recon).second;
        report.stages.push_back(make_stage(ctx, "track_1toss", track0.poses, track0.rms,
                                           std::move(mesh), t0));
        return report;
    }

    // Track every clip and fuse them all.
    std::vector<std::vector<RigidPose>> all_poses(dataset.clips.size());
    std::vector<const Clip*> clip_ptrs(dataset.clips.size());
    all_poses[0] = track0.poses;
    clip_ptrs[0] = &clip0;
    for (std::size_t c = 1; c < dataset.clips.size(); ++c) {
        const TrackResult tr = track_clip(dataset.clips[c], dataset.intrinsics,
                                          dataset.clips[c].initial_pose, cfg.track);
        all_poses[c] = tr.poses;
        clip_ptrs[c] = &dataset.clips[c];
    }
    const TriangleMesh mesh_all =
        reconstruct(clip_ptrs, all_poses, dataset.intrinsics, cfg.recon).second;
    report.stages.push_back(
        make_stage(ctx, "track_all", track0.poses, track0.rms, mesh_all, t0));
    if (cfg.variant == 'c') return report;

    std::vector<RigidPose> current_poses = track0.poses;
    const ContactModel* continue_model = nullptr;
    ContactModel learned;
    TriangleMesh refined_mesh;  // geometry to reproject in the refine step

    for (int cycle = 0; cycle < cfg.cycles; ++cycle) {
        const std::string suffix = cycle == 0 ? "" : "_cycle" + std::to_string(cycle + 1);

        if (cfg.variant != 'e') {
            t0 = Clock::now();
            learned = train_on_clip0(ctx, current_poses, mesh_all, continue_model);
            continue_model = &learned;
            refined_mesh = refined_geometry(learned);
            report.stages.push_back(make_stage(ctx, "train" + suffix, current_poses, {},
                                               refined_mesh, t0));
            if (cfg.variant == 'd') return report;
        } else {
            refined_mesh = mesh_all;
        }

        // Rebuild the evaluation toss from the refined geometry.
        t0 = Clock::now();
        const auto predicted = reproject_refined(refined_mesh, current_poses, dataset.intrinsics);
        std::vector<DepthMap> refined_depth;
        std::vector<Mask> refined_mask;
        if (cfg.variant != 'f') {
            RefinedFrames refined =
                icp_refine_frames(clip_frames(clip0), predicted, dataset.intrinsics,
                                  cfg.refine_icp, cfg.splat_radius, cfg.track.max_cloud_points);
            std::vector<RigidPose> folded(current_poses.size());
            for (std::size_t k = 0; k < current_poses.size(); ++k)
                folded[k] = compose(refined.corrections[k], current_poses[k]);
            refined_depth = std::move(refined.depth);
            refined_mask = std::move(refined.mask);
            StageReport stage =
                make_stage(ctx, "refine" + suffix, folded, {}, refined_mesh, t0);
            stage.depth = refined_depth;
            stage.mask = refined_mask;
            report.stages.push_back(std::move(stage));
        } else {
            refined_depth.reserve(predicted.size());
            refined_mask.reserve(predicted.size());
            for (const auto& [d, m] : predicted) {
                refined_depth.push_back(d);
                refined_mask.push_back(m);
            }
            StageReport stage =
                make_stage(ctx, "reproject" + suffix, current_poses, {}, refined_mesh, t0);
            stage.depth = refined_depth;
            stage.mask = refined_mask;
            report.stages.push_back(std::move(stage));
        }

        // Re-track the refined toss with the refined geometry as prior, then
        // reconstruct from it.
        t0 = Clock::now();
        const Clip refined_clip = make_refined_clip(clip0, refined_depth, refined_mask);
        const TrackResult retrack = track_clip(refined_clip, dataset.intrinsics,
                                               refined_clip.initial_pose, cfg.track,
                                               &refined_mesh);
        TriangleMesh mesh_re =
            reconstruct({&refined_clip}, {retrack.poses}, dataset.intrinsics, cfg.recon).second;
        report.stages.push_back(make_stage(ctx, "retrack" + suffix, retrack.poses, retrack.rms,
                                           std::move(mesh_re), t0));
        current_poses = retrack.poses;
        if (cfg.variant == 'e' || cfg.variant == 'f') break;
    }
    return report;
}

NewClipResult apply_to_new_clip(const ContactModel& model, const TriangleMesh& geom,
                                const Clip& clip, const TossDataset& dataset,
                                const CycleConfig& cfg) {
    (void)model;  // the geometry hull is the tracking artifact
    if (clip.frames.empty()) throw InvalidInput("apply_to_new_clip: empty clip");
    if (geom.empty()) throw InvalidInput("apply_to_new_clip: empty geometry");

    NewClipResult out;
    out.baseline = track_clip(clip, dataset.intrinsics, clip.initial_pose, cfg.track);

    const auto predicted = reproject_refined(geom, out.baseline.poses, dataset.intrinsics);
    RefinedFrames refined =
        icp_refine_frames(clip_frames(clip), predicted, dataset.intrinsics, cfg.refine_icp,
                          cfg.splat_radius, cfg.track.max_cloud_points);
    const Clip refined_clip = make_refined_clip(clip, refined.depth, refined.mask);
    out.refined = track_clip(refined_clip, dataset.intrinsics, refined_clip.initial_pose,
                             cfg.track, &geom);

    if (!clip.gt_poses.empty() && dataset.gt_model) {
        const TriangleMesh gt_mesh = refined_geometry(*dataset.gt_model);
        const PointCloud eval_geom = sample_mesh_surface(gt_mesh, cfg.eval_points, cfg.seed);
        out.baseline_eval = evaluate_trajectory(out.baseline.poses, clip.gt_poses, eval_geom);
        out.refined_eval = evaluate_trajectory(out.refined.poses, clip.gt_poses, eval_geom);
        out.has_eval = true;
    }
    return out;
}

}  // namespace tossfuse
