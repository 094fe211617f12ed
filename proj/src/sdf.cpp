#include "tossfuse/sdf.hpp"

#include "marching_tables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace tossfuse {

SdfGrid SdfGrid::create(const Vec3& origin, double voxel_size, std::array<int, 3> dims,
                        double truncation) {
    if (dims[0] < 2 || dims[1] < 2 || dims[2] < 2)
        throw InvalidInput("SdfGrid: dims must be >= 2 per axis");
    if (voxel_size <= 0.0) throw InvalidInput("SdfGrid: voxel_size must be positive");
    if (truncation <= 0.0) throw InvalidInput("SdfGrid: truncation must be positive");
    SdfGrid g;
    g.origin = origin;
    g.voxel_size = voxel_size;
    g.dims = dims;
    g.truncation = truncation;
    g.values.assign(g.voxel_count(), static_cast<float>(truncation));
    g.weights.assign(g.voxel_count(), 0.0f);
    return g;
}

void SdfGrid::fill_analytic(const std::function<double(const Vec3&)>& f) {
    for (int z = 0; z < dims[2]; ++z)
        for (int y = 0; y < dims[1]; ++y)
            for (int x = 0; x < dims[0]; ++x) {
                const double v = std::clamp(f(voxel_center(x, y, z)), -truncation, truncation);
                values[index(x, y, z)] = static_cast<float>(v);
            }
}

SdfGrid make_centered_grid(const Vec3& center, double bounding_radius, int dims,
                           double trunc_voxels) {
    if (bounding_radius <= 0.0) throw InvalidInput("make_centered_grid: radius must be positive");
    const double voxel = bounding_radius * 2.5 / dims;
    const Vec3 origin = center - 0.5 * voxel * (dims - 1) * Vec3::Ones();
    return SdfGrid::create(origin, voxel, {dims, dims, dims}, trunc_voxels * voxel);
}

namespace {

// Ray-obliquity correction per pixel: the z-difference between a voxel and
// the measured surface overestimates true distance by 1/cos(view angle).
// The factor |n . x_ray| (surface normal from depth-map differences, ray at
// unit z) converts it to point-to-plane distance; 1 where no reliable normal
// exists.
std::vector<float> obliquity_scale_map(const DepthMap& depth, const CameraIntrinsics& K) {
    std::vector<float> scale(depth.data.size(), 1.0f);
    auto point_at = [&](int v, int u) {
        const double z = depth.at(v, u);
        return Vec3((u - K.cx) * z / K.fx, (v - K.cy) * z / K.fy, z);
    };
    constexpr float kDepthJump = 0.02f;  // discontinuity guard, meters
    for (int v = 1; v + 1 < depth.rows; ++v) {
        for (int u = 1; u + 1 < depth.cols; ++u) {
            const float d = depth.at(v, u);
            if (d <= 0.0f) continue;
            const float du0 = depth.at(v, u - 1), du1 = depth.at(v, u + 1);
            const float dv0 = depth.at(v - 1, u), dv1 = depth.at(v + 1, u);
            if (du0 <= 0.0f || du1 <= 0.0f || dv0 <= 0.0f || dv1 <= 0.0f) continue;
            if (std::abs(du1 - du0) > kDepthJump || std::abs(dv1 - dv0) > kDepthJump) continue;
            const Vec3 tangent_u = point_at(v, u + 1) - point_at(v, u - 1);
            const Vec3 tangent_v = point_at(v + 1, u) - point_at(v - 1, u);
            Vec3 normal = tangent_u.cross(tangent_v);
            const double len = normal.norm();
            if (len < 1e-12) continue;
            normal /= len;
            const Vec3 ray((u - K.cx) / K.fx, (v - K.cy) / K.fy, 1.0);
            scale[static_cast<std::size_t>(v) * depth.cols + u] = static_cast<float>(
                std::clamp(std::abs(normal.dot(ray)), 0.05, 1.5));
        }
    }
    return scale;
}

}  // namespace

void tsdf_integrate(SdfGrid& grid, const DepthMap& depth, const Mask& mask,
                    const CameraIntrinsics& K, const RigidPose& camera_from_object) {
    K.validate();
    if (depth.rows != K.rows || depth.cols != K.cols || mask.rows != K.rows ||
        mask.cols != K.cols)
        throw InvalidInput("tsdf_integrate: depth/mask dimensions do not match intrinsics");
    if (grid.truncation <= grid.voxel_size)
        throw InvalidInput("tsdf_integrate: truncation must exceed voxel size");

    const Mat3 R = camera_from_object.rotation.toRotationMatrix();
    const Vec3& t = camera_from_object.translation;
    const Vec3 step_x = R.col(0) * grid.voxel_size;
    const float trunc = static_cast<float>(grid.truncation);
    const std::vector<float> scale = obliquity_scale_map(depth, K);

    for (int z = 0; z < grid.dims[2]; ++z) {
        for (int y = 0; y < grid.dims[1]; ++y) {
            Vec3 cam = R * grid.voxel_center(0, y, z) + t;
            for (int x = 0; x < grid.dims[0]; ++x, cam += step_x) {
                if (cam.z() <= 0.0) continue;
                const int u = static_cast<int>(std::lround(K.fx * cam.x() / cam.z() + K.cx));
                const int v = static_cast<int>(std::lround(K.fy * cam.y() / cam.z() + K.cy));
                if (u < 0 || u >= K.cols || v < 0 || v >= K.rows) continue;
                if (!mask.at(v, u)) continue;
                const float d = depth.at(v, u);
                if (d <= 0.0f) continue;
                const float sdf = (d - static_cast<float>(cam.z())) *
                                  scale[static_cast<std::size_t>(v) * K.cols + u];
                if (sdf < -trunc) continue;  // behind the surface beyond the band
                const float clamped = std::min(sdf, trunc);
                const std::size_t i = grid.index(x, y, z);
                const float w = grid.weights[i];
                grid.values[i] = (w * grid.values[i] + clamped) / (w + 1.0f);
                grid.weights[i] = w + 1.0f;
            }
        }
    }
}

SdfSample sdf_query(const SdfGrid& grid, const Vec3& x) {
    SdfSample out;
    const Vec3 g = (x - grid.origin) / grid.voxel_size;
    if (g.x() < 0.0 || g.y() < 0.0 || g.z() < 0.0 || g.x() > grid.dims[0] - 1 ||
        g.y() > grid.dims[1] - 1 || g.z() > grid.dims[2] - 1) {
        out.value = grid.truncation;
        out.in_bounds = false;
        return out;
    }
    const int ix = std::min(static_cast<int>(g.x()), grid.dims[0] - 2);
    const int iy = std::min(static_cast<int>(g.y()), grid.dims[1] - 2);
    const int iz = std::min(static_cast<int>(g.z()), grid.dims[2] - 2);
    const double fx = g.x() - ix, fy = g.y() - iy, fz = g.z() - iz;

    auto v = [&](int dx, int dy, int dz) {
        return static_cast<double>(grid.values[grid.index(ix + dx, iy + dy, iz + dz)]);
    };
    const double c00 = v(0, 0, 0) * (1 - fx) + v(1, 0, 0) * fx;
    const double c10 = v(0, 1, 0) * (1 - fx) + v(1, 1, 0) * fx;
    const double c01 = v(0, 0, 1) * (1 - fx) + v(1, 0, 1) * fx;
    const double c11 = v(0, 1, 1) * (1 - fx) + v(1, 1, 1) * fx;
    out.value = (c00 * (1 - fy) + c10 * fy) * (1 - fz) + (c01 * (1 - fy) + c11 * fy) * fz;
    out.in_bounds = true;
    return out;
}

namespace {

constexpr int kCornerOffset[8][3] = {
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
    {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1},
};

constexpr int kEdgeCorners[12][2] = {
    {0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
    {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7},
};

}  // namespace

TriangleMesh extract_surface(const SdfGrid& grid) {
    bool any_weight = false;
    for (float w : grid.weights)
        if (w > 0.0f) {
            any_weight = true;
            break;
        }

    TriangleMesh mesh;
    // Key: (corner voxel index) * 3 + axis of the edge, so shared vertices merge.
    std::unordered_map<std::uint64_t, std::uint32_t> edge_vertex;
    auto edge_key = [&](int x, int y, int z, int c0, int c1) -> std::uint64_t {
        const int ax = kCornerOffset[c1][0] - kCornerOffset[c0][0];
        const int ay = kCornerOffset[c1][1] - kCornerOffset[c0][1];
        int axis;
        const int* lo = kCornerOffset[c0];
        const int* hi = kCornerOffset[c1];
        if (ax != 0) axis = 0;
        else if (ay != 0) axis = 1;
        else axis = 2;
        // Use the lower corner of the edge as anchor.
        const int bx = x + std::min(lo[0], hi[0]);
        const int by = y + std::min(lo[1], hi[1]);
        const int bz = z + std::min(lo[2], hi[2]);
        return (static_cast<std::uint64_t>(grid.index(bx, by, bz)) << 2) | axis;
    };

    bool any_pos = false, any_neg = false;
    for (int z = 0; z + 1 < grid.dims[2]; ++z) {
        for (int y = 0; y + 1 < grid.dims[1]; ++y) {
            for (int x = 0; x + 1 < grid.dims[0]; ++x) {
                double val[8];
                bool observed = true;
                int case_index = 0;
                for (int c = 0; c < 8; ++c) {
                    const std::size_t i = grid.index(x + kCornerOffset[c][0],
                                                     y + kCornerOffset[c][1],
                                                     z + kCornerOffset[c][2]);
                    val[c] = grid.values[i];
                    if (any_weight && grid.weights[i] <= 0.0f) observed = false;
                    if (val[c] < 0.0) case_index |= (1 << c);
                }
                if (!observed) continue;
                for (int c = 0; c < 8; ++c) {
                    any_pos |= val[c] >= 0.0;
                    any_neg |= val[c] < 0.0;
                }
                const int edges = mc::kEdgeTable[case_index];
                if (edges == 0) continue;

                std::uint32_t edge_vtx[12];
                for (int e = 0; e < 12; ++e) {
                    if (!(edges & (1 << e))) continue;
                    const std::uint64_t key =
                        edge_key(x, y, z, kEdgeCorners[e][0], kEdgeCorners[e][1]);
                    auto it = edge_vertex.find(key);
                    if (it != edge_vertex.end()) {
                        edge_vtx[e] = it->second;
                        continue;
                    }
                    const int c0 = kEdgeCorners[e][0], c1 = kEdgeCorners[e][1];
                    const Vec3 p0 = grid.voxel_center(x + kCornerOffset[c0][0],
                                                      y + kCornerOffset[c0][1],
                                                      z + kCornerOffset[c0][2]);
                    const Vec3 p1 = grid.voxel_center(x + kCornerOffset[c1][0],
                                                      y + kCornerOffset[c1][1],
                                                      z + kCornerOffset[c1][2]);
                    const double denom = val[c1] - val[c0];
                    const double t = std::clamp(
                        std::abs(denom) < 1e-300 ? 0.5 : -val[c0] / denom, 0.0, 1.0);
                    const std::uint32_t idx = static_cast<std::uint32_t>(mesh.vertices.size());
                    mesh.vertices.push_back(p0 + t * (p1 - p0));
                    edge_vertex.emplace(key, idx);
                    edge_vtx[e] = idx;
                }
                for (const int* tri = mc::kTriTable[case_index]; *tri != -1; tri += 3) {
                    mesh.faces.push_back({edge_vtx[tri[0]], edge_vtx[tri[1]], edge_vtx[tri[2]]});
                }
            }
        }
    }

    mesh.remove_degenerate_faces();
    if (mesh.empty()) {
        throw EmptySurface(any_pos && any_neg
                               ? "extract_surface: no triangulable zero crossing"
                               : "extract_surface: grid has no zero crossing");
    }
    return mesh;
}

EikonalStats eikonal_residual(const SdfGrid& grid, const PointCloud& samples) {
    EikonalStats stats;
    const double h = grid.voxel_size;
    for (const Vec3& s : samples) {
        const SdfSample center = sdf_query(grid, s);
        if (!center.in_bounds || std::abs(center.value) >= grid.truncation) {
            ++stats.excluded;
            continue;
        }
        Vec3 grad;
        bool ok = true;
        for (int axis = 0; axis < 3 && ok; ++axis) {
            Vec3 lo = s, hi = s;
            lo[axis] -= h;
            hi[axis] += h;
            const SdfSample a = sdf_query(grid, lo);
            const SdfSample b = sdf_query(grid, hi);
            if (!a.in_bounds || !b.in_bounds) ok = false;
            grad[axis] = (b.value - a.value) / (2.0 * h);
        }
        if (!ok) {
            ++stats.excluded;
            continue;
        }
        const double r = grad.norm() - 1.0;
        stats.residuals.push_back(r * r);
    }
    if (!stats.residuals.empty()) {
        double sum = 0.0;
        for (double r : stats.residuals) {
            sum += r;
            stats.max = std::max(stats.max, r);
        }
        stats.mean = sum / static_cast<double>(stats.residuals.size());
    }
    return stats;
}

PointCloud decimate_to_polytope(const TriangleMesh& mesh, std::size_t k) {
    if (k < 4) throw InvalidInput("decimate_to_polytope: need at least 4 vertices");
    const auto& verts = mesh.vertices;
    if (verts.size() < k) throw InvalidInput("decimate_to_polytope: mesh has fewer vertices than requested");

    std::size_t seed = 0;
    for (std::size_t i = 1; i < verts.size(); ++i) {
        const Vec3 &a = verts[i], &b = verts[seed];
        if (std::tie(a.x(), a.y(), a.z()) < std::tie(b.x(), b.y(), b.z())) seed = i;
    }

    std::vector<double> min_dist(verts.size(), std::numeric_limits<double>::infinity());
    PointCloud out;
    out.reserve(k);
    std::size_t current = seed;
    for (std::size_t picked = 0; picked < k; ++picked) {
        out.push_back(verts[current]);
        for (std::size_t i = 0; i < verts.size(); ++i)
            min_dist[i] = std::min(min_dist[i], (verts[i] - verts[current]).squaredNorm());
        std::size_t next = 0;
        for (std::size_t i = 1; i < verts.size(); ++i)
            if (min_dist[i] > min_dist[next]) next = i;
        current = next;
    }
    return out;
}

}  // namespace tossfuse
