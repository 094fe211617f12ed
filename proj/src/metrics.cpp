#include "tossfuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tossfuse {

double add_error(const RigidPose& pose_est, const RigidPose& pose_gt, const PointCloud& geom) {
    if (geom.empty()) throw InvalidInput("add_error: empty geometry");
    double sum = 0.0;
    for (const Vec3& w : geom) sum += (pose_est.apply(w) - pose_gt.apply(w)).norm();
    return sum / static_cast<double>(geom.size());
}

double adds_error(const RigidPose& pose_est, const RigidPose& pose_gt, const PointCloud& geom) {
    if (geom.empty()) throw InvalidInput("adds_error: empty geometry");
    const PointCloud est = transform_points(pose_est, geom);
    const PointCloud gt = transform_points(pose_gt, geom);
    double sum = 0.0;
    for (const Vec3& e : est) {
        double best = std::numeric_limits<double>::infinity();
        for (const Vec3& g : gt) best = std::min(best, (e - g).squaredNorm());
        sum += std::sqrt(best);
    }
    return sum / static_cast<double>(geom.size());
}

double auc(const std::vector<double>& per_frame_errors, double max_threshold) {
    if (per_frame_errors.empty()) throw InvalidInput("auc: empty error list");
    if (max_threshold <= 0.0) throw InvalidInput("auc: threshold must be positive");

    const double n = static_cast<double>(per_frame_errors.size());
    auto accuracy = [&](double tau) {
        std::size_t hits = 0;
        for (double e : per_frame_errors) hits += (e <= tau);
        return static_cast<double>(hits) / n;
    };

    constexpr int kGrid = 1000;
    double integral = 0.0;
    double prev = accuracy(0.0);
    for (int i = 1; i < kGrid; ++i) {
        const double tau = max_threshold * i / (kGrid - 1);
        const double cur = accuracy(tau);
        integral += 0.5 * (prev + cur) * (max_threshold / (kGrid - 1));
        prev = cur;
    }
    return 100.0 * integral / max_threshold;
}

double success_rate(const std::vector<RigidPose>& traj_est,
                    const std::vector<RigidPose>& traj_gt) {
    if (traj_est.size() != traj_gt.size())
        throw InvalidInput("success_rate: trajectory length mismatch");
    if (traj_est.empty()) throw InvalidInput("success_rate: empty trajectories");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < traj_est.size(); ++i) {
        const auto [rot_deg, trans_m] = rotation_translation_error(traj_est[i], traj_gt[i]);
        hits += (rot_deg <= kSrRotationDeg && trans_m <= kSrTranslationM);
    }
    return 100.0 * static_cast<double>(hits) / static_cast<double>(traj_est.size());
}

double chamfer(const PointCloud& cloud_a, const PointCloud& cloud_b) {
    if (cloud_a.empty() || cloud_b.empty()) throw InvalidInput("chamfer: empty cloud");
    auto one_way = [](const PointCloud& from, const PointCloud& to) {
        double sum = 0.0;
        for (const Vec3& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const Vec3& q : to) best = std::min(best, (p - q).squaredNorm());
            sum += std::sqrt(best);
        }
        return sum / static_cast<double>(from.size());
    };
    return 0.5 * one_way(cloud_a, cloud_b) + 0.5 * one_way(cloud_b, cloud_a);
}

double chamfer_mesh(const TriangleMesh& a, const TriangleMesh& b, std::size_t samples,
                    std::uint64_t seed) {
    return chamfer(sample_mesh_surface(a, samples, seed), sample_mesh_surface(b, samples, seed));
}

std::pair<double, double> rotation_translation_error(const RigidPose& pose_est,
                                                     const RigidPose& pose_gt) {
    const Quat rel = pose_gt.rotation.conjugate() * pose_est.rotation;
    const double angle = 2.0 * std::atan2(rel.vec().norm(), std::abs(rel.w()));
    const double trans = (pose_est.translation - pose_gt.translation).norm();
    return {angle * 180.0 / M_PI, trans};
}

EvalReport evaluate_trajectory(const std::vector<RigidPose>& traj_est,
                               const std::vector<RigidPose>& traj_gt, const PointCloud& geom,
                               double auc_max_threshold) {
    if (traj_est.size() != traj_gt.size())
        throw InvalidInput("evaluate_trajectory: trajectory length mismatch");
    EvalReport report;
    for (std::size_t i = 0; i < traj_est.size(); ++i) {
        report.add_errors.push_back(add_error(traj_est[i], traj_gt[i], geom));
        report.adds_errors.push_back(adds_error(traj_est[i], traj_gt[i], geom));
        const auto [rot, trans] = rotation_translation_error(traj_est[i], traj_gt[i]);
        report.rotation_errors.push_back(rot);
        report.translation_errors.push_back(trans);
    }
    report.add_auc_percent = auc(report.add_errors, auc_max_threshold);
    report.adds_auc_percent = auc(report.adds_errors, auc_max_threshold);
    report.sr_percent = success_rate(traj_est, traj_gt);
    return report;
}

}  // namespace tossfuse
