#pragma once

#include "tossfuse/dataset.hpp"

#include <cstdint>

namespace tossfuse {

struct SynthConfig {
    int n_tosses = 10;
    int frames_per_clip = 100;
    double fps = 30.0;
    int substeps = 10;  // simulator substeps per frame
    NoiseConfig noise;
    std::uint64_t seed = 42;

    void validate() const;
};

// Camera looking from eye toward target, x right, y down, z forward.
RigidPose look_at_camera(const Vec3& eye, const Vec3& target);

CameraIntrinsics default_intrinsics();
RigidPose default_camera_pose();
ContactModel default_cube_model();  // 6 cm side, 0.1 kg, mu 0.3

// Simulated tosses of the model rendered to depth/mask frames with noise;
// per-frame ground truth and the model are stored alongside.
TossDataset generate_toss_dataset(const ContactModel& true_model,
                                  const CameraIntrinsics& intrinsics,
                                  const RigidPose& camera_from_world, const SynthConfig& cfg);

// Seeded initial state of toss `index` (release pose and velocities).
BodyState sample_toss_state(std::uint64_t seed, int index);

}  // namespace tossfuse
