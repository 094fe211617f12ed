#pragma once

#include "tossfuse/geometry.hpp"

#include <cstdint>
#include <vector>

namespace tossfuse {

struct CameraIntrinsics {
    double fx = 0.0, fy = 0.0;
    double cx = 0.0, cy = 0.0;
    int rows = 0, cols = 0;

    void validate() const;
};

// Per-pixel depth in meters, row-major, background sentinel 0.
struct DepthMap {
    int rows = 0, cols = 0;
    std::vector<float> data;  // rows*cols

    DepthMap() = default;
    DepthMap(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0f) {}

    float& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    float at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
    bool valid(int r, int c) const { return at(r, c) > 0.0f; }
};

// Binary object mask, row-major, values 0/1.
struct Mask {
    int rows = 0, cols = 0;
    std::vector<std::uint8_t> data;

    Mask() = default;
    Mask(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0) {}

    std::uint8_t& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    std::uint8_t at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
    std::size_t area() const;
};

struct PixelProjection {
    double u = 0.0, v = 0.0;  // pixel coordinates, u along columns, v along rows
    double depth = 0.0;       // meters
};

// Pinhole projection of a camera-frame point; throws InvalidInput when z <= 0.
PixelProjection project_point(const CameraIntrinsics& K, const Vec3& w);

// Rasterizes the mesh posed by camera_from_object into a depth map
// (nearest-surface depth per pixel, pixel centers at (u+0.5, v+0.5)).
DepthMap render_depth(const TriangleMesh& mesh, const RigidPose& camera_from_object,
                      const CameraIntrinsics& K);

// Point-splat rendering of a camera-frame cloud; each point covers a square of
// +-radius_px pixels around its projection, nearest depth wins.
DepthMap render_depth_splat(const PointCloud& camera_points, const CameraIntrinsics& K,
                            int radius_px = 1);

Mask derive_mask(const DepthMap& depth);

// Erodes the mask by `pixels` 4-neighbourhood steps.
Mask erode_mask(const Mask& mask, int pixels);

// One camera-frame point per masked valid pixel, row-major pixel order.
PointCloud backproject(const DepthMap& depth, const Mask& mask, const CameraIntrinsics& K);

}  // namespace tossfuse
