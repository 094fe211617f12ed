#include "tossfuse/synth.hpp"

#include "tossfuse/learning.hpp"
#include "tossfuse/rng.hpp"

#include <cmath>

namespace tossfuse {

void SynthConfig::validate() const {
    if (n_tosses < 1) throw InvalidInput("SynthConfig: n_tosses must be >= 1");
    if (frames_per_clip < 3) throw InvalidInput("SynthConfig: need at least 3 frames per clip");
    if (fps <= 0.0 || substeps < 1) throw InvalidInput("SynthConfig: bad fps/substeps");
    noise.validate();
}

RigidPose look_at_camera(const Vec3& eye, const Vec3& target) {
    const Vec3 forward = (target - eye).normalized();
    if (std::abs(forward.z()) > 0.999)
        throw InvalidInput("look_at_camera: view direction too close to vertical");
    const Vec3 right = forward.cross(Vec3::UnitZ()).normalized();
    const Vec3 down = forward.cross(right);
    Mat3 world_from_cam;
    world_from_cam.col(0) = right;
    world_from_cam.col(1) = down;
    world_from_cam.col(2) = forward;
    RigidPose camera_from_world;
    camera_from_world.rotation = Quat(world_from_cam.transpose()).normalized();
    camera_from_world.translation = -(world_from_cam.transpose() * eye);
    return camera_from_world;
}

CameraIntrinsics default_intrinsics() {
    CameraIntrinsics k;
    k.fx = k.fy = 400.0;
    k.cx = 160.0;
    k.cy = 120.0;
    k.rows = 240;
    k.cols = 320;
    return k;
}

RigidPose default_camera_pose() {
    return look_at_camera(Vec3(1.05, 0.0, 0.38), Vec3(0.1, 0.0, 0.08));
}

ContactModel default_cube_model() { return make_cube_model(0.06, 0.1, 0.3); }

BodyState sample_toss_state(std::uint64_t seed, int index) {
    Rng rng(Rng::derive(seed, 1000 + static_cast<std::uint64_t>(index)));
    BodyState s;
    s.position = rng.uniform_in_box(Vec3(-0.05, -0.08, 0.3), Vec3(0.08, 0.08, 0.6));
    s.orientation = rng.unit_quaternion();
    s.lin_vel = Vec3(rng.uniform(0.1, 0.8), rng.uniform(-0.15, 0.15), rng.uniform(-0.3, 0.1));
    s.ang_vel = rng.unit_vector() * rng.uniform(0.0, 10.0);
    return s;
}

TossDataset generate_toss_dataset(const ContactModel& true_model,
                                  const CameraIntrinsics& intrinsics,
                                  const RigidPose& camera_from_world, const SynthConfig& cfg) {
    cfg.validate();
    true_model.validate();
    intrinsics.validate();

    const TriangleMesh object_mesh = refined_geometry(true_model);
    const double dt = 1.0 / cfg.fps;

    TossDataset ds;
    ds.intrinsics = intrinsics;
    ds.camera_from_world = camera_from_world;
    ds.dt = dt;
    ds.noise = cfg.noise;
    ds.seed = cfg.seed;
    ds.gt_model = true_model;

    for (int toss = 0; toss < cfg.n_tosses; ++toss) {
        const BodyState init = sample_toss_state(cfg.seed, toss);
        const auto states = rollout(true_model, init, cfg.frames_per_clip - 1, dt, cfg.substeps);

        Rng noise_rng(Rng::derive(cfg.noise.seed ? cfg.noise.seed : cfg.seed,
                                  2000 + static_cast<std::uint64_t>(toss)));
        Clip clip;
        const double t0 = static_cast<double>(toss) * cfg.frames_per_clip * dt;
        for (int k = 0; k < cfg.frames_per_clip; ++k) {
            const RigidPose world_from_object = states[static_cast<std::size_t>(k)].pose();
            const RigidPose camera_from_object = compose(camera_from_world, world_from_object);

            Frame frame;
            frame.timestamp = t0 + k * dt;
            frame.depth = render_depth(object_mesh, camera_from_object, intrinsics);
            const Mask clean_mask = derive_mask(frame.depth);
            if (k == 0 && clean_mask.area() < 50)
                throw InvalidInput("generate_toss_dataset: object off-screen at t=0");

            for (float& d : frame.depth.data) {
                if (d == 0.0f) continue;
                if (cfg.noise.depth_sigma > 0.0)
                    d += static_cast<float>(cfg.noise.depth_sigma * noise_rng.gaussian());
                if (d <= 0.0f) d = 0.0f;
                if (cfg.noise.dropout_rate > 0.0 && noise_rng.uniform() < cfg.noise.dropout_rate)
                    d = 0.0f;
            }
            frame.mask = cfg.noise.mask_boundary_erosion > 0
                             ? erode_mask(clean_mask, cfg.noise.mask_boundary_erosion)
                             : clean_mask;

            clip.gt_poses.push_back(camera_from_object);
            clip.frames.push_back(std::move(frame));
        }
        clip.initial_pose = clip.gt_poses.front();
        ds.clips.push_back(std::move(clip));
    }

    ds.validate();
    return ds;
}

}  // namespace tossfuse
