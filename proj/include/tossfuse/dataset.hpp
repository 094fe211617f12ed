#pragma once

#include "tossfuse/camera.hpp"
#include "tossfuse/dynamics.hpp"
#include "tossfuse/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace tossfuse {

struct NoiseConfig {
    double depth_sigma = 0.002;      // meters
    double dropout_rate = 0.01;      // fraction of valid pixels zeroed
    int mask_boundary_erosion = 1;   // pixels
    std::uint64_t seed = 0;

    void validate() const;
};

struct Frame {
    DepthMap depth;
    Mask mask;
    double timestamp = 0.0;          // seconds
    std::vector<std::uint8_t> rgb;   // opaque passthrough, may be empty
};

struct Clip {
    std::vector<Frame> frames;
    RigidPose initial_pose;                // camera_from_object at frame 0
    std::vector<RigidPose> gt_poses;       // camera_from_object; empty when unknown
};

struct TossDataset {
    std::vector<Clip> clips;
    CameraIntrinsics intrinsics;
    RigidPose camera_from_world;
    double dt = 1.0 / 30.0;
    NoiseConfig noise;
    std::uint64_t seed = 0;
    std::optional<ContactModel> gt_model;  // synthetic datasets only

    void validate() const;
};

// Directory layout: clip_<i>/frame_<k>.dpt + .pgm (+ .rgb), per-clip
// gt_trajectory.csv, top-level dataset.json and gt_model.txt.
void save_dataset(const std::filesystem::path& dir, const TossDataset& dataset);
TossDataset load_dataset(const std::filesystem::path& dir);

}  // namespace tossfuse
