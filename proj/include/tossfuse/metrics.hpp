#pragma once

#include "tossfuse/geometry.hpp"

#include <cstdint>
#include <vector>

namespace tossfuse {

struct EvalReport {
    double add_auc_percent = 0.0;
    double adds_auc_percent = 0.0;
    double sr_percent = 0.0;
    double chamfer_cm = 0.0;
    std::vector<double> add_errors;       // meters, per frame
    std::vector<double> adds_errors;      // meters, per frame
    std::vector<double> rotation_errors;  // degrees, per frame
    std::vector<double> translation_errors;  // meters, per frame
};

// Mean distance between the geometry points placed by the two poses.
double add_error(const RigidPose& pose_est, const RigidPose& pose_gt, const PointCloud& geom);

// Symmetric-tolerant variant: nearest-point matching.
double adds_error(const RigidPose& pose_est, const RigidPose& pose_gt, const PointCloud& geom);

// Area under the accuracy-vs-threshold curve over [0, max_threshold],
// trapezoid rule on a 1000-point grid, as a percentage.
double auc(const std::vector<double>& per_frame_errors, double max_threshold);

// Fraction of frames within 5 degrees and 5 cm, as a percentage.
double success_rate(const std::vector<RigidPose>& traj_est, const std::vector<RigidPose>& traj_gt);

// Symmetric Chamfer distance in meters.
double chamfer(const PointCloud& cloud_a, const PointCloud& cloud_b);

// Chamfer between meshes via seeded area-weighted surface sampling (meters).
double chamfer_mesh(const TriangleMesh& a, const TriangleMesh& b, std::size_t samples = 10000,
                    std::uint64_t seed = 42);

// Geodesic rotation error (degrees) and translation error (meters).
std::pair<double, double> rotation_translation_error(const RigidPose& pose_est,
                                                     const RigidPose& pose_gt);

// Full Table-style report for a trajectory pair plus geometry clouds.
EvalReport evaluate_trajectory(const std::vector<RigidPose>& traj_est,
                               const std::vector<RigidPose>& traj_gt, const PointCloud& geom,
                               double auc_max_threshold = 0.1);

inline constexpr double kAucMaxThreshold = 0.1;  // meters
inline constexpr double kSrRotationDeg = 5.0;
inline constexpr double kSrTranslationM = 0.05;

}  // namespace tossfuse
