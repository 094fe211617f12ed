#include "tossfuse/geometry.hpp"

#include "tossfuse/rng.hpp"

#include <cmath>
#include <limits>

namespace tossfuse {

RigidPose compose(const RigidPose& a, const RigidPose& b) {
    RigidPose out;
    out.rotation = (a.rotation * b.rotation).normalized();
    out.translation = a.rotation * b.translation + a.translation;
    return out;
}

RigidPose invert(const RigidPose& a) {
    RigidPose out;
    out.rotation = a.rotation.conjugate();
    out.translation = -(out.rotation * a.translation);
    return out;
}

PointCloud transform_points(const RigidPose& pose, const PointCloud& cloud) {
    PointCloud out;
    out.reserve(cloud.size());
    const Mat3 R = pose.rotation.toRotationMatrix();
    for (const Vec3& p : cloud) out.push_back(R * p + pose.translation);
    return out;
}

double TriangleMesh::face_area(std::size_t f) const {
    const auto& tri = faces[f];
    const Vec3& a = vertices[tri[0]];
    const Vec3& b = vertices[tri[1]];
    const Vec3& c = vertices[tri[2]];
    return 0.5 * (b - a).cross(c - a).norm();
}

double TriangleMesh::surface_area() const {
    double total = 0.0;
    for (std::size_t f = 0; f < faces.size(); ++f) total += face_area(f);
    return total;
}

void TriangleMesh::remove_degenerate_faces(double min_area) {
    std::vector<std::array<std::uint32_t, 3>> kept;
    kept.reserve(faces.size());
    const auto n = static_cast<std::uint32_t>(vertices.size());
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const auto& tri = faces[f];
        if (tri[0] >= n || tri[1] >= n || tri[2] >= n) continue;
        if (face_area(f) < min_area) continue;
        kept.push_back(tri);
    }
    faces = std::move(kept);
}

TriangleMesh make_box_mesh(const Vec3& center, const Vec3& half) {
    TriangleMesh mesh;
    for (int i = 0; i < 8; ++i) {
        mesh.vertices.push_back(center + Vec3((i & 1) ? half.x() : -half.x(),
                                              (i & 2) ? half.y() : -half.y(),
                                              (i & 4) ? half.z() : -half.z()));
    }
    // Outward-facing winding per face pair.
    const std::array<std::array<std::uint32_t, 3>, 12> tris = {{
        {0, 2, 1}, {1, 2, 3},  // z-
        {4, 5, 6}, {5, 7, 6},  // z+
        {0, 1, 4}, {1, 5, 4},  // y-
        {2, 6, 3}, {3, 6, 7},  // y+
        {0, 4, 2}, {2, 4, 6},  // x-
        {1, 3, 5}, {3, 7, 5},  // x+
    }};
    mesh.faces.assign(tris.begin(), tris.end());
    return mesh;
}

PointCloud sample_mesh_surface(const TriangleMesh& mesh, std::size_t n_samples,
                               std::uint64_t seed) {
    if (mesh.empty()) throw InvalidInput("sample_mesh_surface: empty mesh");
    std::vector<double> cumulative(mesh.faces.size());
    double total = 0.0;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        total += mesh.face_area(f);
        cumulative[f] = total;
    }
    if (total <= 0.0) throw InvalidInput("sample_mesh_surface: zero-area mesh");

    Rng rng(seed);
    PointCloud out;
    out.reserve(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double pick = rng.uniform(0.0, total);
        const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), pick);
        const std::size_t f =
            std::min<std::size_t>(mesh.faces.size() - 1,
                                  static_cast<std::size_t>(it - cumulative.begin()));
        const auto& tri = mesh.faces[f];
        double u = rng.uniform(), v = rng.uniform();
        if (u + v > 1.0) {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        const Vec3& a = mesh.vertices[tri[0]];
        const Vec3& b = mesh.vertices[tri[1]];
        const Vec3& c = mesh.vertices[tri[2]];
        out.push_back(a + u * (b - a) + v * (c - a));
    }
    return out;
}

namespace {

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    // Ericson, Real-Time Collision Detection, closest point on triangle.
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return (p - a).norm();

    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return (p - b).norm();

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        const double v = d1 / (d1 - d3);
        return (p - (a + v * ab)).norm();
    }

    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return (p - c).norm();

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        const double w = d2 / (d2 - d6);
        return (p - (a + w * ac)).norm();
    }

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (p - (b + w * (c - b))).norm();
    }

    const double denom = 1.0 / (va + vb + vc);
    const double v = vb * denom, w = vc * denom;
    return (p - (a + v * ab + w * ac)).norm();
}

}  // namespace

double point_to_mesh_distance(const Vec3& p, const TriangleMesh& mesh) {
    if (mesh.empty()) throw InvalidInput("point_to_mesh_distance: empty mesh");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& tri : mesh.faces) {
        best = std::min(best, point_triangle_distance(p, mesh.vertices[tri[0]],
                                                      mesh.vertices[tri[1]],
                                                      mesh.vertices[tri[2]]));
    }
    return best;
}

Vec3 quaternion_log(const Quat& q_in) {
    Quat q = q_in.normalized();
    if (q.w() < 0.0) q.coeffs() = -q.coeffs();
    const double vnorm = q.vec().norm();
    if (vnorm < 1e-14) return Vec3::Zero();
    const double angle = 2.0 * std::atan2(vnorm, q.w());
    return q.vec() * (angle / vnorm);
}

Quat quaternion_exp(const Vec3& rotvec) {
    const double angle = rotvec.norm();
    if (angle < 1e-14) {
        Quat q(1.0, 0.5 * rotvec.x(), 0.5 * rotvec.y(), 0.5 * rotvec.z());
        return q.normalized();
    }
    const Vec3 axis = rotvec / angle;
    return Quat(Eigen::AngleAxisd(angle, axis));
}

}  // namespace tossfuse
