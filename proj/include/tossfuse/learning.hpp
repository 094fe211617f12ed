#pragma once

#include "tossfuse/dynamics.hpp"

#include <optional>
#include <vector>

namespace tossfuse {

struct StateTransition {
    BodyState x;
    Vec6 u = Vec6::Zero();  // known non-contact impulse over the step
    BodyState x_next;
    double dt = 0.0;
};

// Builds transitions from a uniformly timed world-frame pose sequence.
// Velocities by finite differences: central differences of positions in the
// interior (one-sided at the ends), quaternion log of relative rotations for
// the body-frame angular rate; u = 0 (post-release data).
std::vector<StateTransition> transitions_from_trajectory(
    const std::vector<RigidPose>& poses, const std::vector<double>& timestamps);

struct LossWeights {
    double pred = 1.0;
    double comp = 100.0;
    double pen = 100.0;
    double diss = 1.0;
};

struct LossComponents {
    double pred = 0.0;  // mass-weighted one-step velocity prediction residual
    double comp = 0.0;  // contact activation: impulses only at touching vertices
    double pen = 0.0;   // non-penetration of the post-state
    double diss = 0.0;  // maximal dissipation of friction
    double total = 0.0;
};

LossComponents contactnets_loss(const ContactModel& model, const StateTransition& transition,
                                const ContactImpulse& lambda,
                                const LossWeights& weights = LossWeights());

// Per-term analytic gradients at fixed lambda, wrt each vertex and mu.
struct LossGradients {
    std::vector<Vec3> pred, comp, pen, diss;  // one entry per vertex
    double mu_diss = 0.0;                     // the other terms do not involve mu
};

LossGradients contactnets_loss_gradients(const ContactModel& model,
                                         const StateTransition& transition,
                                         const ContactImpulse& lambda);

struct InnerSolveConfig {
    int max_iterations = 500;
    double kkt_tolerance = 1e-6;
};

struct InnerSolveResult {
    ContactImpulse lambda;
    bool converged = false;
    double kkt_residual = 0.0;
    LossComponents loss;
};

// Minimizes the loss over the friction cone in lambda (convex for a fixed
// model) by projected gradient descent with backtracking.
InnerSolveResult solve_impulses(const ContactModel& model, const StateTransition& transition,
                                const LossWeights& weights = LossWeights(),
                                const InnerSolveConfig& cfg = InnerSolveConfig(),
                                const ContactImpulse* warm_start = nullptr);

struct TrainConfig {
    int epochs = 500;
    double step_size = 1e-3;
    LossWeights weights;
    InnerSolveConfig inner;
    bool learn_vertices = true;
    bool learn_mu = true;
    double contact_margin = 0.02;     // meters; activity classification
    double early_stop_rel = 1e-6;     // relative loss change
    int early_stop_window = 20;       // epochs
};

struct TrainResult {
    ContactModel model;
    double initial_loss = 0.0;
    double final_loss = 0.0;
    std::vector<double> loss_history;
};

// Outer gradient descent on vertices and mu; inner impulses re-solved per
// transition each epoch (warm-started), gradients taken at the inner optimum.
// Returns the best model found; never worse than the initial model.
TrainResult train(const ContactModel& initial_model,
                  const std::vector<StateTransition>& transitions,
                  const TrainConfig& cfg = TrainConfig());

// Convex hull of the model vertices as a triangle mesh (outward winding).
TriangleMesh refined_geometry(const ContactModel& model);

// Convex hull of an arbitrary point set; DegenerateHull if coplanar.
TriangleMesh convex_hull(const PointCloud& points);

// Signed volume enclosed by a consistently outward-wound closed mesh.
double mesh_volume(const TriangleMesh& mesh);

}  // namespace tossfuse
