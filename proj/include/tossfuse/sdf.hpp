#pragma once

#include "tossfuse/camera.hpp"
#include "tossfuse/geometry.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace tossfuse {

struct SdfSample {
    double value = 0.0;
    bool in_bounds = false;
};

// Truncated signed distance field on a regular voxel grid. Voxel (x,y,z)
// center sits at origin + voxel_size*(x,y,z); storage is x-fastest row-major,
// matching the SDF1 snapshot layout.
struct SdfGrid {
    Vec3 origin = Vec3::Zero();
    double voxel_size = 0.0;
    std::array<int, 3> dims = {0, 0, 0};
    double truncation = 0.0;
    std::vector<float> values;   // clamped to [-truncation, truncation]
    std::vector<float> weights;  // accumulation weights, >= 0

    static SdfGrid create(const Vec3& origin, double voxel_size, std::array<int, 3> dims,
                          double truncation);

    std::size_t index(int x, int y, int z) const {
        return (static_cast<std::size_t>(z) * dims[1] + y) * dims[0] + x;
    }
    Vec3 voxel_center(int x, int y, int z) const {
        return origin + voxel_size * Vec3(x, y, z);
    }
    std::size_t voxel_count() const {
        return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    }

    // Overwrites values with f(voxel_center); weights untouched.
    void fill_analytic(const std::function<double(const Vec3&)>& f);
};

// Cubic grid of `dims` voxels per axis centered on `center`, sized so the
// voxel-center extent is 2.5x the bounding radius; truncation is
// trunc_voxels * voxel_size.
SdfGrid make_centered_grid(const Vec3& center, double bounding_radius, int dims = 64,
                           double trunc_voxels = 5.0);

// Weighted running-average TSDF update of all voxels that project inside the
// mask with valid depth. camera_from_object maps grid (object) coordinates
// into the camera frame.
void tsdf_integrate(SdfGrid& grid, const DepthMap& depth, const Mask& mask,
                    const CameraIntrinsics& K, const RigidPose& camera_from_object);

// Trilinear interpolation of the field; out-of-bounds points report
// +truncation with in_bounds=false.
SdfSample sdf_query(const SdfGrid& grid, const Vec3& x);

// Marching-cubes zero level set. Cells touching never-observed voxels are
// skipped when the grid carries any weights. Throws EmptySurface when no zero
// crossing exists.
TriangleMesh extract_surface(const SdfGrid& grid);

struct EikonalStats {
    std::vector<double> residuals;  // (||grad|| - 1)^2 per included sample
    double mean = 0.0;
    double max = 0.0;
    std::size_t excluded = 0;  // outside the grid or the truncation band
};

// Central-difference Eikonal residual at the given samples (diagnostic only).
EikonalStats eikonal_residual(const SdfGrid& grid, const PointCloud& samples);

// Farthest-point subsample of the mesh vertices, deterministic: starts at the
// lexicographically smallest vertex, ties broken by lowest index.
PointCloud decimate_to_polytope(const TriangleMesh& mesh, std::size_t k);

}  // namespace tossfuse
