#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tossfuse {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Quat = Eigen::Quaterniond;

// Input that violates an operation's preconditions (dimension mismatch,
// malformed file, out-of-range parameter).
class InvalidInput : public std::runtime_error {
public:
    explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};

// ICP could not find enough correspondences between the two clouds.
class InsufficientOverlap : public std::runtime_error {
public:
    explicit InsufficientOverlap(const std::string& what) : std::runtime_error(what) {}
};

// Matched point pairs are too few or collinear; no unique rigid transform.
class DegenerateCorrespondences : public std::runtime_error {
public:
    explicit DegenerateCorrespondences(const std::string& what) : std::runtime_error(what) {}
};

// Grid has no zero crossing.
class EmptySurface : public std::runtime_error {
public:
    explicit EmptySurface(const std::string& what) : std::runtime_error(what) {}
};

class TrackingLost : public std::runtime_error {
public:
    TrackingLost(const std::string& what, std::size_t last_good)
        : std::runtime_error(what), last_good_frame(last_good) {}
    std::size_t last_good_frame;
};

class SolverFailure : public std::runtime_error {
public:
    SolverFailure(const std::string& what, double res)
        : std::runtime_error(what), residual(res) {}
    double residual;
};

// Learned polytope vertices are coplanar; no 3D hull.
class DegenerateHull : public std::runtime_error {
public:
    explicit DegenerateHull(const std::string& what) : std::runtime_error(what) {}
};

// No contact-active transitions; nothing constrains the geometry.
class UninformativeData : public std::runtime_error {
public:
    explicit UninformativeData(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr const char* kToolVersion = "tossfuse 0.1.0";

}  // namespace tossfuse
