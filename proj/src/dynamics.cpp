#include "tossfuse/dynamics.hpp"

#include "tossfuse/metrics.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace tossfuse {

void ContactModel::validate() const {
    if (vertices.size() < 4) throw InvalidInput("ContactModel: need at least 4 vertices");
    if (mu < 0.0) throw InvalidInput("ContactModel: mu must be non-negative");
    if (mass <= 0.0) throw InvalidInput("ContactModel: mass must be positive");
    if ((inertia - inertia.transpose()).norm() > 1e-9 * (1.0 + inertia.norm()))
        throw InvalidInput("ContactModel: inertia must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat3> es(inertia);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw InvalidInput("ContactModel: inertia must be positive definite");
}

ContactModel make_cube_model(double side, double mass, double mu) {
    ContactModel m;
    const double h = 0.5 * side;
    for (int i = 0; i < 8; ++i)
        m.vertices.emplace_back((i & 1) ? h : -h, (i & 2) ? h : -h, (i & 4) ? h : -h);
    m.mu = mu;
    m.mass = mass;
    m.inertia = Mat3::Identity() * (mass * side * side / 6.0);
    return m;
}

ContactImpulse ContactImpulse::zeros(std::size_t k) {
    ContactImpulse imp;
    imp.normal.assign(k, 0.0);
    imp.tangent.assign(k, Vec2::Zero());
    return imp;
}

Eigen::VectorXd phi(const ContactModel& model, const RigidPose& q) {
    Eigen::VectorXd out(model.vertices.size());
    const Mat3 R = q.rotation.toRotationMatrix();
    for (std::size_t k = 0; k < model.vertices.size(); ++k)
        out[static_cast<Eigen::Index>(k)] = (R * model.vertices[k] + q.translation).z();
    return out;
}

Vec3 phi_gradient(const RigidPose& q) {
    return q.rotation.toRotationMatrix().transpose() * Vec3::UnitZ();
}

std::vector<Eigen::Matrix<double, 3, 6>> contact_jacobian(const ContactModel& model,
                                                          const RigidPose& q) {
    const Mat3 R = q.rotation.toRotationMatrix();
    std::vector<Eigen::Matrix<double, 3, 6>> out(model.vertices.size());
    for (std::size_t k = 0; k < model.vertices.size(); ++k) {
        const Vec3& w = model.vertices[k];
        Mat3 w_hat;
        w_hat << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
        // World velocity of the contact point: v_lin - R*[w]x * omega_body.
        const Mat3 ang = -R * w_hat;
        Eigen::Matrix<double, 3, 6>& J = out[k];
        // Rows in contact-frame order (normal=z, tangent1=x, tangent2=y).
        J.row(0) << 0, 0, 1, ang(2, 0), ang(2, 1), ang(2, 2);
        J.row(1) << 1, 0, 0, ang(0, 0), ang(0, 1), ang(0, 2);
        J.row(2) << 0, 1, 0, ang(1, 0), ang(1, 1), ang(1, 2);
    }
    return out;
}

namespace {

constexpr int kPgsMaxIterations = 200;
constexpr double kPgsTolerance = 1e-8;
constexpr double kPenetrationBias = 0.2;  // fraction of penetration removed per step

}  // namespace

StepResult simulate_step(const ContactModel& model, const BodyState& state, const Vec6& u,
                         double dt, double gravity) {
    model.validate();
    if (dt <= 0.0) throw InvalidInput("simulate_step: dt must be positive");

    const std::size_t K = model.num_contacts();
    const Mat3 inertia_inv = model.inertia.inverse();

    // Free velocity: gravity, gyroscopic torque and the known impulse u.
    const Vec3 gyro = -state.ang_vel.cross(model.inertia * state.ang_vel);
    Vec3 v_lin = state.lin_vel + dt * Vec3(0, 0, -gravity) + u.head<3>() / model.mass;
    Vec3 v_ang = state.ang_vel + dt * inertia_inv * gyro + inertia_inv * u.tail<3>();

    const RigidPose q = state.pose();
    const Eigen::VectorXd gaps = phi(model, q);
    const auto jacobians = contact_jacobian(model, q);

    // Allowed post-impulse normal velocity: approach down to the surface when
    // separated, a recovery push of kPenetrationBias*phi/dt when penetrating.
    Eigen::VectorXd rhs(K);
    for (std::size_t k = 0; k < K; ++k) {
        const double g = gaps[static_cast<Eigen::Index>(k)];
        rhs[static_cast<Eigen::Index>(k)] = g >= 0.0 ? -g / dt : kPenetrationBias * (-g) / dt;
    }

    ContactImpulse lam = ContactImpulse::zeros(K);

    // Per-contact effective-mass blocks A_k = J_k M^-1 J_k^T.
    std::vector<Mat3> blocks(K);
    std::vector<Eigen::Matrix<double, 6, 3>> minv_jt(K);
    for (std::size_t k = 0; k < K; ++k) {
        Eigen::Matrix<double, 6, 3> mj;
        mj.topRows<3>() = jacobians[k].transpose().topRows<3>() / model.mass;
        mj.bottomRows<3>() = inertia_inv * jacobians[k].transpose().bottomRows<3>();
        minv_jt[k] = mj;
        blocks[k] = jacobians[k] * mj;
    }

    double residual = 0.0;
    bool converged = false;
    for (int iter = 0; iter < kPgsMaxIterations; ++iter) {
        residual = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const Eigen::Index ke = static_cast<Eigen::Index>(k);
            Vec6 vel;
            vel << v_lin, v_ang;
            Vec3 vc = jacobians[k] * vel;

            // Normal row.
            const double dn = -(vc[0] - rhs[ke]) / blocks[k](0, 0);
            const double n_new = std::max(0.0, lam.normal[k] + dn);
            double delta_n = n_new - lam.normal[k];
            if (delta_n != 0.0) {
                v_lin += minv_jt[k].col(0).head<3>() * delta_n;
                v_ang += minv_jt[k].col(0).tail<3>() * delta_n;
                lam.normal[k] = n_new;
                residual = std::max(residual, std::abs(delta_n));
            }

            // Friction rows: 2x2 solve, then project to the disk.
            vel << v_lin, v_ang;
            vc = jacobians[k] * vel;
            Eigen::Matrix2d att = blocks[k].bottomRightCorner<2, 2>();
            const Vec2 dt_imp = att.ldlt().solve(Vec2(-vc[1], -vc[2]));
            Vec2 t_new = lam.tangent[k] + dt_imp;
            const double t_max = model.mu * lam.normal[k];
            const double t_norm = t_new.norm();
            if (t_norm > t_max) t_new *= (t_max / std::max(t_norm, 1e-300));
            const Vec2 delta_t = t_new - lam.tangent[k];
            if (delta_t.squaredNorm() != 0.0) {
                const Vec6 imp = minv_jt[k].col(1) * delta_t[0] + minv_jt[k].col(2) * delta_t[1];
                v_lin += imp.head<3>();
                v_ang += imp.tail<3>();
                lam.tangent[k] = t_new;
                residual = std::max(residual, delta_t.cwiseAbs().maxCoeff());
            }
        }
        if (residual < kPgsTolerance) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw SolverFailure("simulate_step: contact impulse iteration did not converge", residual);

    StepResult out;
    out.state.lin_vel = v_lin;
    out.state.ang_vel = v_ang;
    out.state.position = state.position + dt * v_lin;
    out.state.orientation = (state.orientation * quaternion_exp(dt * v_ang)).normalized();
    out.impulse = std::move(lam);
    return out;
}

std::vector<BodyState> rollout(const ContactModel& model, const BodyState& initial, int steps,
                               double dt, int substeps, double gravity) {
    if (steps < 1) throw InvalidInput("rollout: steps must be >= 1");
    if (substeps < 1) throw InvalidInput("rollout: substeps must be >= 1");
    std::vector<BodyState> traj;
    traj.reserve(static_cast<std::size_t>(steps) + 1);
    traj.push_back(initial);
    const double h = dt / substeps;
    const Vec6 no_impulse = Vec6::Zero();
    for (int s = 0; s < steps; ++s) {
        BodyState cur = traj.back();
        for (int i = 0; i < substeps; ++i) {
            try {
                cur = simulate_step(model, cur, no_impulse, h, gravity).state;
            } catch (SolverFailure& e) {
                throw SolverFailure(std::string(e.what()) + " at step " + std::to_string(s),
                                    e.residual);
            }
        }
        traj.push_back(cur);
    }
    return traj;
}

RolloutErrorCurves evaluate_rollouts(const ContactModel& learned, const ContactModel& truth,
                                     const std::vector<BodyState>& initial_states, int steps,
                                     double dt, int substeps) {
    if (initial_states.empty()) throw InvalidInput("evaluate_rollouts: no initial states");
    const std::size_t n = initial_states.size();
    std::vector<std::vector<double>> rot(n), trans(n);
    RolloutErrorCurves out;

    for (std::size_t i = 0; i < n; ++i) {
        const auto gt = rollout(truth, initial_states[i], steps, dt, substeps);
        const auto est = rollout(learned, initial_states[i], steps, dt, substeps);
        for (int s = 0; s <= steps; ++s) {
            const auto [r, t] = rotation_translation_error(est[s].pose(), gt[s].pose());
            rot[i].push_back(r);
            trans[i].push_back(t);
        }
        out.final_rest_height_err_m.push_back(est.back().position.z() - gt.back().position.z());
    }

    const double z95 = 1.96;
    for (int s = 0; s <= steps; ++s) {
        double mr = 0.0, mt = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mr += rot[i][s];
            mt += trans[i][s];
        }
        mr /= n;
        mt /= n;
        double vr = 0.0, vt = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            vr += (rot[i][s] - mr) * (rot[i][s] - mr);
            vt += (trans[i][s] - mt) * (trans[i][s] - mt);
        }
        const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
        out.mean_rotation_deg.push_back(mr);
        out.mean_translation_m.push_back(mt);
        out.ci95_rotation_deg.push_back(z95 * std::sqrt(vr / denom / n));
        out.ci95_translation_m.push_back(z95 * std::sqrt(vt / denom / n));
    }
    return out;
}

}  // namespace tossfuse
