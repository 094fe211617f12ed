#pragma once

#include "tossfuse/common.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace tossfuse {

// Rigid transform: x_out = rotation * x_in + translation. Naming convention
// for variables of this type is <out>_from_<in>, e.g. camera_from_object.
struct RigidPose {
    Quat rotation = Quat::Identity();
    Vec3 translation = Vec3::Zero();

    static RigidPose identity() { return {}; }

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

    bool is_normalized(double tol = 1e-9) const {
        return std::abs(rotation.norm() - 1.0) <= tol;
    }

    void normalize() { rotation.normalize(); }
};

RigidPose compose(const RigidPose& a, const RigidPose& b);
RigidPose invert(const RigidPose& a);

// a then b applied? No: compose(a, b).apply(x) == a.apply(b.apply(x)).
inline RigidPose operator*(const RigidPose& a, const RigidPose& b) { return compose(a, b); }

using PointCloud = std::vector<Vec3>;

PointCloud transform_points(const RigidPose& pose, const PointCloud& cloud);

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::uint32_t, 3>> faces;

    bool empty() const { return vertices.empty() || faces.empty(); }

    double face_area(std::size_t f) const;
    double surface_area() const;

    // Drops faces with out-of-range indices or (near-)zero area.
    void remove_degenerate_faces(double min_area = 1e-14);
};

// Axis-aligned box mesh centered at `center`, 12 triangles.
TriangleMesh make_box_mesh(const Vec3& center, const Vec3& half_extents);

// Area-weighted surface sampling, deterministic for a given seed.
PointCloud sample_mesh_surface(const TriangleMesh& mesh, std::size_t n_samples,
                               std::uint64_t seed = 42);

// Unsigned distance from a point to the closest triangle of the mesh.
double point_to_mesh_distance(const Vec3& p, const TriangleMesh& mesh);

// Rotation vector (axis * angle, radians) of q, shortest arc.
Vec3 quaternion_log(const Quat& q);
// Inverse of quaternion_log.
Quat quaternion_exp(const Vec3& rotvec);

}  // namespace tossfuse
