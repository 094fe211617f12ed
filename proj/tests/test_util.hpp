#pragma once

#include "tossfuse/geometry.hpp"
#include "tossfuse/rng.hpp"

#include <limits>
#include <utility>
#include <vector>

namespace tossfuse::testutil {

inline PointCloud random_cloud(Rng& rng, std::size_t n, double extent = 0.1) {
    PointCloud cloud;
    cloud.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        cloud.push_back(rng.uniform_in_box(Vec3::Constant(-extent), Vec3::Constant(extent)));
    return cloud;
}

inline RigidPose random_pose(Rng& rng, double max_angle_rad, double max_translation) {
    RigidPose pose;
    pose.rotation = quaternion_exp(rng.unit_vector() * rng.uniform(0.0, max_angle_rad));
    pose.translation = rng.unit_vector() * rng.uniform(0.0, max_translation);
    return pose;
}

// O(n^2) nearest-neighbour oracle with the same tie rule (lowest index).
inline std::vector<std::pair<std::size_t, std::size_t>> brute_force_nn(
    const PointCloud& source, const PointCloud& target, double max_dist) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    const double max_d2 = max_dist * max_dist;
    for (std::size_t s = 0; s < source.size(); ++s) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_t = 0;
        bool found = false;
        for (std::size_t t = 0; t < target.size(); ++t) {
            const double d2 = (target[t] - source[s]).squaredNorm();
            if (d2 <= max_d2 && d2 < best) {
                best = d2;
                best_t = t;
                found = true;
            }
        }
        if (found) pairs.emplace_back(s, best_t);
    }
    return pairs;
}

inline TriangleMesh transform_mesh(const RigidPose& pose, const TriangleMesh& mesh) {
    TriangleMesh out = mesh;
    for (Vec3& v : out.vertices) v = pose.apply(v);
    return out;
}

}  // namespace tossfuse::testutil
