#pragma once

#include "tossfuse/camera.hpp"
#include "tossfuse/dynamics.hpp"
#include "tossfuse/geometry.hpp"
#include "tossfuse/sdf.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tossfuse {

// ASCII OBJ, `v x y z` / `f i j k`, 1-based indices.
void save_obj(const std::filesystem::path& path, const TriangleMesh& mesh);
TriangleMesh load_obj(const std::filesystem::path& path);

// ASCII PLY point cloud export.
void save_ply(const std::filesystem::path& path, const PointCloud& cloud);

// Little-endian binary depth map: "DPT1", u32 rows, u32 cols, f32 meters
// row-major.
void save_depth(const std::filesystem::path& path, const DepthMap& depth);
DepthMap load_depth(const std::filesystem::path& path);

// Binary PGM (P5), 0 = background, 255 = object.
void save_mask(const std::filesystem::path& path, const Mask& mask);
Mask load_mask(const std::filesystem::path& path);

// Little-endian grid snapshot: "SDF1", 3xu32 dims, f32 origin[3],
// f32 voxel_size, f32 truncation, f32 values (x fastest), f32 weights.
void save_sdf(const std::filesystem::path& path, const SdfGrid& grid);
SdfGrid load_sdf(const std::filesystem::path& path);

struct Trajectory {
    std::vector<RigidPose> poses;
    std::vector<double> rms;
};

// CSV with header frame,qw,qx,qy,qz,tx,ty,tz,rms.
void save_trajectory(const std::filesystem::path& path, const Trajectory& traj);
Trajectory load_trajectory(const std::filesystem::path& path);

// Key/value text: mass, mu, inertia (9 values), vertices count + K rows.
void save_model(const std::filesystem::path& path, const ContactModel& model);
ContactModel load_model(const std::filesystem::path& path);

// FNV-1a 64 over a file's bytes, hex string; used for run manifests.
std::string file_hash(const std::filesystem::path& path);

// Formats a double so that reading it back reproduces the exact value.
std::string format_double(double v);

}  // namespace tossfuse
