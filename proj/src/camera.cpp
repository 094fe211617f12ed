#include "tossfuse/camera.hpp"

#include <algorithm>
#include <cmath>

namespace tossfuse {

void CameraIntrinsics::validate() const {
    if (fx <= 0.0 || fy <= 0.0) throw InvalidInput("intrinsics: focal lengths must be positive");
    if (rows <= 0 || cols <= 0) throw InvalidInput("intrinsics: image size must be positive");
    if (cx < 0.0 || cx >= cols || cy < 0.0 || cy >= rows)
        throw InvalidInput("intrinsics: principal point outside image");
}

std::size_t Mask::area() const {
    std::size_t n = 0;
    for (auto v : data) n += (v != 0);
    return n;
}

PixelProjection project_point(const CameraIntrinsics& K, const Vec3& w) {
    if (w.z() <= 0.0) throw InvalidInput("project_point: point behind camera");
    PixelProjection p;
    p.u = K.fx * w.x() / w.z() + K.cx;
    p.v = K.fy * w.y() / w.z() + K.cy;
    p.depth = w.z();
    return p;
}

namespace {

constexpr double kNearPlane = 1e-6;

// Clips a camera-frame triangle against z >= near. Returns 0, 3 or 4 vertices
// of the clipped polygon.
int clip_near(const Vec3 in[3], Vec3 out[4]) {
    int n = 0;
    for (int i = 0; i < 3; ++i) {
        const Vec3& a = in[i];
        const Vec3& b = in[(i + 1) % 3];
        const bool a_in = a.z() >= kNearPlane;
        const bool b_in = b.z() >= kNearPlane;
        if (a_in) out[n++] = a;
        if (a_in != b_in) {
            const double t = (kNearPlane - a.z()) / (b.z() - a.z());
            out[n++] = a + t * (b - a);
        }
    }
    return n;
}

// Rasterizes one camera-frame triangle into the z-buffer. Inverse depth is
// interpolated linearly in screen space (exact for planar triangles). Pixel
// (u, v) samples the ray through continuous image coordinates (u, v), the
// exact inverse of the backprojection formula.
void raster_triangle(const Vec3& a, const Vec3& b, const Vec3& c, const CameraIntrinsics& K,
                     DepthMap& depth) {
    const double inv_za = 1.0 / a.z(), inv_zb = 1.0 / b.z(), inv_zc = 1.0 / c.z();
    const Vec2 pa(K.fx * a.x() * inv_za + K.cx, K.fy * a.y() * inv_za + K.cy);
    const Vec2 pb(K.fx * b.x() * inv_zb + K.cx, K.fy * b.y() * inv_zb + K.cy);
    const Vec2 pc(K.fx * c.x() * inv_zc + K.cx, K.fy * c.y() * inv_zc + K.cy);

    const double area2 = (pb.x() - pa.x()) * (pc.y() - pa.y()) -
                         (pb.y() - pa.y()) * (pc.x() - pa.x());
    if (std::abs(area2) < 1e-14) return;  // edge-on

    const int u0 = std::max(0, static_cast<int>(std::floor(std::min({pa.x(), pb.x(), pc.x()}))));
    const int u1 = std::min(K.cols - 1,
                            static_cast<int>(std::ceil(std::max({pa.x(), pb.x(), pc.x()}))));
    const int v0 = std::max(0, static_cast<int>(std::floor(std::min({pa.y(), pb.y(), pc.y()}))));
    const int v1 = std::min(K.rows - 1,
                            static_cast<int>(std::ceil(std::max({pa.y(), pb.y(), pc.y()}))));

    const double inv_area2 = 1.0 / area2;
    for (int v = v0; v <= v1; ++v) {
        for (int u = u0; u <= u1; ++u) {
            const Vec2 p(u, v);
            // Signed barycentric weights, normalized by the triangle's own
            // orientation so both winding orders rasterize.
            double w0 = ((pb.x() - p.x()) * (pc.y() - p.y()) - (pb.y() - p.y()) * (pc.x() - p.x())) * inv_area2;
            double w1 = ((pc.x() - p.x()) * (pa.y() - p.y()) - (pc.y() - p.y()) * (pa.x() - p.x())) * inv_area2;
            double w2 = 1.0 - w0 - w1;
            if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
            const double inv_z = w0 * inv_za + w1 * inv_zb + w2 * inv_zc;
            if (inv_z <= 0.0) continue;
            const float z = static_cast<float>(1.0 / inv_z);
            float& cell = depth.at(v, u);
            if (cell == 0.0f || z < cell) cell = z;
        }
    }
}

}  // namespace

DepthMap render_depth(const TriangleMesh& mesh, const RigidPose& camera_from_object,
                      const CameraIntrinsics& K) {
    K.validate();
    if (mesh.empty()) throw InvalidInput("render_depth: empty mesh");

    DepthMap depth(K.rows, K.cols);
    const Mat3 R = camera_from_object.rotation.toRotationMatrix();
    const Vec3& t = camera_from_object.translation;

    for (const auto& tri : mesh.faces) {
        const Vec3 cam[3] = {R * mesh.vertices[tri[0]] + t, R * mesh.vertices[tri[1]] + t,
                             R * mesh.vertices[tri[2]] + t};
        Vec3 clipped[4];
        const int n = clip_near(cam, clipped);
        for (int i = 2; i < n; ++i) raster_triangle(clipped[0], clipped[i - 1], clipped[i], K, depth);
    }
    return depth;
}

DepthMap render_depth_splat(const PointCloud& camera_points, const CameraIntrinsics& K,
                            int radius_px) {
    K.validate();
    DepthMap depth(K.rows, K.cols);
    for (const Vec3& w : camera_points) {
        if (w.z() <= kNearPlane) continue;
        const double u = K.fx * w.x() / w.z() + K.cx;
        const double v = K.fy * w.y() / w.z() + K.cy;
        const int uc = static_cast<int>(std::lround(u));
        const int vc = static_cast<int>(std::lround(v));
        const float z = static_cast<float>(w.z());
        for (int dv = -radius_px; dv <= radius_px; ++dv) {
            for (int du = -radius_px; du <= radius_px; ++du) {
                const int uu = uc + du, vv = vc + dv;
                if (uu < 0 || uu >= K.cols || vv < 0 || vv >= K.rows) continue;
                float& cell = depth.at(vv, uu);
                if (cell == 0.0f || z < cell) cell = z;
            }
        }
    }
    return depth;
}

Mask derive_mask(const DepthMap& depth) {
    Mask mask(depth.rows, depth.cols);
    for (std::size_t i = 0; i < depth.data.size(); ++i) mask.data[i] = depth.data[i] != 0.0f;
    return mask;
}

Mask erode_mask(const Mask& mask, int pixels) {
    Mask cur = mask;
    for (int it = 0; it < pixels; ++it) {
        Mask next = cur;
        for (int r = 0; r < cur.rows; ++r) {
            for (int c = 0; c < cur.cols; ++c) {
                if (!cur.at(r, c)) continue;
                const bool boundary = r == 0 || r == cur.rows - 1 || c == 0 || c == cur.cols - 1 ||
                                      !cur.at(r - 1, c) || !cur.at(r + 1, c) ||
                                      !cur.at(r, c - 1) || !cur.at(r, c + 1);
                if (boundary) next.at(r, c) = 0;
            }
        }
        cur = std::move(next);
    }
    return cur;
}

PointCloud backproject(const DepthMap& depth, const Mask& mask, const CameraIntrinsics& K) {
    K.validate();
    if (depth.rows != mask.rows || depth.cols != mask.cols || depth.rows != K.rows ||
        depth.cols != K.cols)
        throw InvalidInput("backproject: dimension mismatch");
    PointCloud cloud;
    for (int v = 0; v < depth.rows; ++v) {
        for (int u = 0; u < depth.cols; ++u) {
            if (!mask.at(v, u)) continue;
            const double z = depth.at(v, u);
            if (z <= 0.0) continue;
            cloud.emplace_back((u - K.cx) * z / K.fx, (v - K.cy) * z / K.fy, z);
        }
    }
    return cloud;
}

}  // namespace tossfuse
