#include "tossfuse/icp.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <unordered_map>

namespace tossfuse {

void IcpConfig::validate() const {
    if (max_iterations <= 0 || convergence_tol <= 0.0 || max_correspondence_distance <= 0.0 ||
        min_correspondences <= 0)
        throw InvalidInput("IcpConfig: all fields must be positive");
}

namespace {

struct CellHash {
    std::size_t operator()(const std::array<std::int64_t, 3>& c) const {
        std::uint64_t h = 1469598103934665603ULL;
        for (std::int64_t v : c) {
            h ^= static_cast<std::uint64_t>(v);
            h *= 1099511628211ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> nearest_correspondences(
    const PointCloud& source, const PointCloud& target, double max_dist) {
    if (source.empty() || target.empty())
        throw InvalidInput("nearest_correspondences: empty cloud");
    if (max_dist <= 0.0) throw InvalidInput("nearest_correspondences: max_dist must be positive");

    const double cell = max_dist;
    std::unordered_map<std::array<std::int64_t, 3>, std::vector<std::size_t>, CellHash> buckets;
    buckets.reserve(target.size());
    auto cell_of = [cell](const Vec3& p) -> std::array<std::int64_t, 3> {
        return {static_cast<std::int64_t>(std::floor(p.x() / cell)),
                static_cast<std::int64_t>(std::floor(p.y() / cell)),
                static_cast<std::int64_t>(std::floor(p.z() / cell))};
    };
    for (std::size_t i = 0; i < target.size(); ++i) buckets[cell_of(target[i])].push_back(i);

    const double max_d2 = max_dist * max_dist;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(source.size());
    for (std::size_t s = 0; s < source.size(); ++s) {
        const auto c = cell_of(source[s]);
        double best_d2 = std::numeric_limits<double>::infinity();
        std::size_t best_idx = 0;
        bool found = false;
        for (std::int64_t dz = -1; dz <= 1; ++dz)
            for (std::int64_t dy = -1; dy <= 1; ++dy)
                for (std::int64_t dx = -1; dx <= 1; ++dx) {
                    const auto it = buckets.find({c[0] + dx, c[1] + dy, c[2] + dz});
                    if (it == buckets.end()) continue;
                    for (std::size_t t : it->second) {
                        const double d2 = (target[t] - source[s]).squaredNorm();
                        if (d2 > max_d2) continue;
                        if (!found || d2 < best_d2 || (d2 == best_d2 && t < best_idx)) {
                            best_d2 = d2;
                            best_idx = t;
                            found = true;
                        }
                    }
                }
        if (found) pairs.emplace_back(s, best_idx);
    }
    return pairs;
}

RigidPose best_rigid_transform(const std::vector<std::pair<Vec3, Vec3>>& pairs) {
    if (pairs.size() < 3)
        throw DegenerateCorrespondences("best_rigid_transform: need at least 3 pairs");

    Vec3 mean_s = Vec3::Zero(), mean_t = Vec3::Zero();
    for (const auto& [s, t] : pairs) {
        mean_s += s;
        mean_t += t;
    }
    mean_s /= static_cast<double>(pairs.size());
    mean_t /= static_cast<double>(pairs.size());

    Mat3 cov = Mat3::Zero();
    double spread = 0.0;
    for (const auto& [s, t] : pairs) {
        cov += (t - mean_t) * (s - mean_s).transpose();
        spread += (s - mean_s).squaredNorm();
    }

    Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec3 sv = svd.singularValues();
    // Collinear sources leave a rotation about the line undetermined.
    if (sv(1) <= 1e-12 * std::max(sv(0), spread))
        throw DegenerateCorrespondences("best_rigid_transform: degenerate (collinear) pairs");

    Mat3 d = Mat3::Identity();
    if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) d(2, 2) = -1.0;
    const Mat3 R = svd.matrixU() * d * svd.matrixV().transpose();

    RigidPose pose;
    pose.rotation = Quat(R).normalized();
    pose.translation = mean_t - R * mean_s;
    return pose;
}

IcpResult icp_align(const PointCloud& source, const PointCloud& target, const IcpConfig& cfg,
                    const RigidPose& initial_guess) {
    cfg.validate();
    if (source.size() < static_cast<std::size_t>(cfg.min_correspondences) ||
        target.size() < static_cast<std::size_t>(cfg.min_correspondences))
        throw InsufficientOverlap("icp_align: cloud smaller than min_correspondences");

    IcpResult result;
    result.pose = initial_guess;
    PointCloud moved = transform_points(result.pose, source);

    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        const auto matches =
            nearest_correspondences(moved, target, cfg.max_correspondence_distance);
        if (matches.size() < static_cast<std::size_t>(cfg.min_correspondences))
            throw InsufficientOverlap("icp_align: correspondences fell below minimum");

        std::vector<std::pair<Vec3, Vec3>> pairs;
        pairs.reserve(matches.size());
        for (const auto& [s, t] : matches) pairs.emplace_back(moved[s], target[t]);
        const RigidPose delta = best_rigid_transform(pairs);

        result.pose = compose(delta, result.pose);
        result.iterations = iter + 1;

        // RMS of how far the update moved the matched points; below tol the
        // alignment is stationary.
        double move2 = 0.0, err2 = 0.0;
        for (const auto& [s, t] : pairs) {
            const Vec3 p = delta.apply(s);
            move2 += (p - s).squaredNorm();
            err2 += (p - t).squaredNorm();
        }
        const double n = static_cast<double>(pairs.size());
        result.rms_error = std::sqrt(err2 / n);
        const double rms_move = std::sqrt(move2 / n);

        moved = transform_points(result.pose, source);
        if (rms_move < cfg.convergence_tol) {
            result.converged = true;
            break;
        }
    }
    return result;
}

}  // namespace tossfuse
