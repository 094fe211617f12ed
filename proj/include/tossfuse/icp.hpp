#pragma once

#include "tossfuse/geometry.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace tossfuse {

struct IcpConfig {
    int max_iterations = 50;
    double convergence_tol = 1e-6;            // meters, RMS point-motion change
    double max_correspondence_distance = 0.05;  // meters
    int min_correspondences = 10;

    void validate() const;
};

struct IcpResult {
    RigidPose pose;           // maps source into target
    double rms_error = 0.0;   // root mean squared correspondence distance
    int iterations = 0;
    bool converged = false;
};

// Exact nearest target point per source point within max_dist, accelerated by
// a uniform spatial hash with cell size max_dist; ties resolved to the lowest
// target index.
std::vector<std::pair<std::size_t, std::size_t>> nearest_correspondences(
    const PointCloud& source, const PointCloud& target, double max_dist);

// Least-squares rigid transform (Kabsch/SVD) mapping the source points of the
// pairs onto the target points; det(R)=+1 enforced.
RigidPose best_rigid_transform(const std::vector<std::pair<Vec3, Vec3>>& pairs);

IcpResult icp_align(const PointCloud& source, const PointCloud& target, const IcpConfig& cfg,
                    const RigidPose& initial_guess = RigidPose::identity());

}  // namespace tossfuse
