#pragma once

#include "tossfuse/geometry.hpp"

#include <vector>

namespace tossfuse {

inline constexpr double kGravity = 9.81;  // m/s^2, along -z

// Rigid body state. Positions/orientations map body frame to world frame;
// linear velocity is world-frame, angular velocity body-frame.
struct BodyState {
    Vec3 position = Vec3::Zero();
    Quat orientation = Quat::Identity();
    Vec3 lin_vel = Vec3::Zero();
    Vec3 ang_vel = Vec3::Zero();

    Vec6 velocity() const {
        Vec6 v;
        v << lin_vel, ang_vel;
        return v;
    }
    RigidPose pose() const { return {orientation, position}; }

    double kinetic_energy(double mass, const Mat3& inertia) const {
        return 0.5 * mass * lin_vel.squaredNorm() + 0.5 * ang_vel.dot(inertia * ang_vel);
    }
};

// Convex polytope contact model against the ground plane z=0. Vertices and mu
// are the learnable quantities; mass and inertia are known.
struct ContactModel {
    std::vector<Vec3> vertices;  // body frame, meters
    double mu = 0.0;
    double mass = 0.0;
    Mat3 inertia = Mat3::Zero();  // body frame, about the origin

    void validate() const;
    std::size_t num_contacts() const { return vertices.size(); }
};

// Uniform-density cube of the given side length; the default toss object.
ContactModel make_cube_model(double side, double mass, double mu);

struct ContactImpulse {
    // Per vertex: z = normal (>= 0), x/y = tangential; ||t|| <= mu * n.
    std::vector<double> normal;
    std::vector<Vec2> tangent;

    std::size_t size() const { return normal.size(); }
    static ContactImpulse zeros(std::size_t k);
};

// Signed height of each vertex above the ground plane.
Eigen::VectorXd phi(const ContactModel& model, const RigidPose& q);

// d(phi_k)/d(vertex_k); identical for every k at a given orientation.
Vec3 phi_gradient(const RigidPose& q);

// 3x6 Jacobian per vertex mapping [world linear vel; body angular vel] to the
// contact-point velocity in (normal, tangent1, tangent2) = (z, x, y) order.
std::vector<Eigen::Matrix<double, 3, 6>> contact_jacobian(const ContactModel& model,
                                                          const RigidPose& q);

struct StepResult {
    BodyState state;
    ContactImpulse impulse;
};

// One semi-implicit step with projected Gauss-Seidel contact impulses.
// Throws SolverFailure if the impulse iteration fails to converge.
StepResult simulate_step(const ContactModel& model, const BodyState& state, const Vec6& u,
                         double dt, double gravity = kGravity);

// steps * substeps simulate_step calls at dt/substeps; returns the initial
// state followed by the state after each of the `steps` outer steps.
std::vector<BodyState> rollout(const ContactModel& model, const BodyState& initial, int steps,
                               double dt, int substeps = 1, double gravity = kGravity);

struct RolloutErrorCurves {
    // Indexed by step, aggregated across rollouts.
    std::vector<double> mean_rotation_deg;
    std::vector<double> ci95_rotation_deg;
    std::vector<double> mean_translation_m;
    std::vector<double> ci95_translation_m;
    std::vector<double> final_rest_height_err_m;  // per rollout
};

// Rolls out the learned model against ground-truth trajectories from the true
// model, from the same initial conditions; reports per-step mean errors with
// 95% confidence intervals across rollouts.
RolloutErrorCurves evaluate_rollouts(const ContactModel& learned, const ContactModel& truth,
                                     const std::vector<BodyState>& initial_states, int steps,
                                     double dt, int substeps = 1);

}  // namespace tossfuse
