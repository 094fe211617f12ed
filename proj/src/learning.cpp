#include "tossfuse/learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tossfuse {

std::vector<StateTransition> transitions_from_trajectory(
    const std::vector<RigidPose>& poses, const std::vector<double>& timestamps) {
    if (poses.size() < 3) throw InvalidInput("transitions_from_trajectory: need >= 3 poses");
    if (poses.size() != timestamps.size())
        throw InvalidInput("transitions_from_trajectory: pose/timestamp count mismatch");

    const std::size_t n = poses.size();
    double dt_sum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double d = timestamps[i + 1] - timestamps[i];
        if (d <= 0.0) throw InvalidInput("transitions_from_trajectory: non-increasing timestamps");
        dt_sum += d;
    }
    const double dt = dt_sum / static_cast<double>(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(timestamps[i + 1] - timestamps[i] - dt) > 0.01 * dt)
            throw InvalidInput("transitions_from_trajectory: timestamps jitter beyond 1%");
    }

    std::vector<BodyState> states(n);
    for (std::size_t i = 0; i < n; ++i) {
        states[i].position = poses[i].translation;
        states[i].orientation = poses[i].rotation.normalized();
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0) {
            states[i].lin_vel = (poses[1].translation - poses[0].translation) / dt;
            states[i].ang_vel =
                quaternion_log(poses[0].rotation.conjugate() * poses[1].rotation) / dt;
        } else if (i + 1 == n) {
            states[i].lin_vel = (poses[n - 1].translation - poses[n - 2].translation) / dt;
            states[i].ang_vel =
                quaternion_log(poses[n - 2].rotation.conjugate() * poses[n - 1].rotation) / dt;
        } else {
            states[i].lin_vel = (poses[i + 1].translation - poses[i - 1].translation) / (2.0 * dt);
            states[i].ang_vel =
                quaternion_log(poses[i - 1].rotation.conjugate() * poses[i + 1].rotation) /
                (2.0 * dt);
        }
    }

    std::vector<StateTransition> out;
    out.reserve(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        StateTransition tr;
        tr.x = states[i];
        tr.x_next = states[i + 1];
        tr.dt = dt;
        out.push_back(tr);
    }
    return out;
}

namespace {

// World-frame impulse of contact k; tangent axes are world x/y, normal is z.
Vec3 world_impulse(const ContactImpulse& lam, std::size_t k) {
    return {lam.tangent[k].x(), lam.tangent[k].y(), lam.normal[k]};
}

// Velocity prediction residual r = v' - v - dt*Minv*f_ext - Minv*J(q)^T lambda,
// in [world linear; body angular] coordinates.
Vec6 prediction_residual(const ContactModel& model, const StateTransition& t,
                         const ContactImpulse& lam) {
    const Mat3 inertia_inv = model.inertia.inverse();
    const Mat3 Rq = t.x.orientation.toRotationMatrix();

    Vec3 imp_lin = Vec3::Zero();
    Vec3 imp_ang = Vec3::Zero();
    for (std::size_t k = 0; k < model.vertices.size(); ++k) {
        const Vec3 f = world_impulse(lam, k);
        imp_lin += f;
        imp_ang += model.vertices[k].cross(Rq.transpose() * f);
    }

    const Vec3 gyro = -t.x.ang_vel.cross(model.inertia * t.x.ang_vel);
    Vec6 r;
    r.head<3>() = t.x_next.lin_vel - t.x.lin_vel - t.dt * Vec3(0, 0, -kGravity) -
                  t.u.head<3>() / model.mass - imp_lin / model.mass;
    r.tail<3>() = t.x_next.ang_vel - t.x.ang_vel - t.dt * inertia_inv * gyro -
                  inertia_inv * t.u.tail<3>() - inertia_inv * imp_ang;
    return r;
}

double mass_weighted_sq(const ContactModel& model, const Vec6& r) {
    return model.mass * r.head<3>().squaredNorm() + r.tail<3>().dot(model.inertia * r.tail<3>());
}

// Tangential velocity of contact k at the post state.
Vec2 tangential_velocity(const StateTransition& t, const Vec3& vertex) {
    const Mat3 Rn = t.x_next.orientation.toRotationMatrix();
    const Vec3 c = t.x_next.lin_vel + Rn * t.x_next.ang_vel.cross(vertex);
    return {c.x(), c.y()};
}

void check_cone(const ContactModel& model, const ContactImpulse& lam) {
    if (lam.size() != model.vertices.size())
        throw InvalidInput("contact impulse size does not match model");
    for (std::size_t k = 0; k < lam.size(); ++k) {
        const double slack = 1e-9 * (1.0 + lam.normal[k]);
        if (lam.normal[k] < -slack)
            throw InvalidInput("contact impulse violates normal non-negativity");
        if (lam.tangent[k].norm() > model.mu * lam.normal[k] + slack)
            throw InvalidInput("contact impulse violates the friction cone");
    }
}

}  // namespace

LossComponents contactnets_loss(const ContactModel& model, const StateTransition& t,
                                const ContactImpulse& lam, const LossWeights& w) {
    check_cone(model, lam);
    LossComponents out;

    out.pred = mass_weighted_sq(model, prediction_residual(model, t, lam));

    const Eigen::VectorXd gaps_next = phi(model, t.x_next.pose());
    for (std::size_t k = 0; k < model.vertices.size(); ++k) {
        const double g = gaps_next[static_cast<Eigen::Index>(k)];
        const double act = lam.normal[k] * g;
        out.comp += act * act;
        const double pen = std::max(0.0, -g);
        out.pen += pen * pen;
        const Vec2 vt = tangential_velocity(t, model.vertices[k]);
        const double s = lam.tangent[k].dot(vt) + model.mu * lam.normal[k] * vt.norm();
        out.diss += s * s;
    }
    out.total = w.pred * out.pred + w.comp * out.comp + w.pen * out.pen + w.diss * out.diss;
    return out;
}

LossGradients contactnets_loss_gradients(const ContactModel& model, const StateTransition& t,
                                         const ContactImpulse& lam) {
    check_cone(model, lam);
    const std::size_t K = model.vertices.size();
    LossGradients g;
    g.pred.assign(K, Vec3::Zero());
    g.comp.assign(K, Vec3::Zero());
    g.pen.assign(K, Vec3::Zero());
    g.diss.assign(K, Vec3::Zero());

    const Mat3 Rq = t.x.orientation.toRotationMatrix();
    const Mat3 Rn = t.x_next.orientation.toRotationMatrix();
    const Vec6 r = prediction_residual(model, t, lam);
    const Vec3 r_ang = r.tail<3>();
    const Vec3 dphi_dw = Rn.transpose() * Vec3::UnitZ();
    const Eigen::VectorXd gaps_next = phi(model, t.x_next.pose());

    for (std::size_t k = 0; k < K; ++k) {
        const Vec3 f_body = Rq.transpose() * world_impulse(lam, k);
        // d/dw of r^T M r: residual enters through -Minv*(w x R^T f); the
        // inertia weighting cancels against Minv.
        g.pred[k] = -2.0 * f_body.cross(r_ang);

        const double gap = gaps_next[static_cast<Eigen::Index>(k)];
        g.comp[k] = 2.0 * lam.normal[k] * lam.normal[k] * gap * dphi_dw;
        g.pen[k] = -2.0 * std::max(0.0, -gap) * dphi_dw;

        const Vec2 vt = tangential_velocity(t, model.vertices[k]);
        const double vt_norm = vt.norm();
        const double s = lam.tangent[k].dot(vt) + model.mu * lam.normal[k] * vt_norm;
        // dvt/dw = rows (x,y) of Rn * [omega']_x.
        const Vec3 om = t.x_next.ang_vel;
        Mat3 om_hat;
        om_hat << 0, -om.z(), om.y(), om.z(), 0, -om.x(), -om.y(), om.x(), 0;
        const Mat3 dvc_dw = Rn * om_hat;
        Eigen::Matrix<double, 2, 3> dvt_dw = dvc_dw.topRows<2>();
        Vec3 ds_dw = dvt_dw.transpose() * lam.tangent[k];
        if (vt_norm > 1e-12)
            ds_dw += model.mu * lam.normal[k] * (dvt_dw.transpose() * (vt / vt_norm));
        g.diss[k] = 2.0 * s * ds_dw;
        g.mu_diss += 2.0 * s * lam.normal[k] * vt_norm;
    }
    return g;
}

namespace {

// Projection onto the second-order cone ||t|| <= mu*n.
void project_cone(double mu, double& n, Vec2& t) {
    if (mu <= 0.0) {
        n = std::max(0.0, n);
        t.setZero();
        return;
    }
    const double tn = t.norm();
    if (tn <= mu * n) return;
    if (mu * tn <= -n) {
        n = 0.0;
        t.setZero();
        return;
    }
    const double n_proj = (mu * tn + n) / (mu * mu + 1.0);
    n = n_proj;
    t *= (mu * n_proj) / tn;
}

Eigen::VectorXd flatten(const ContactImpulse& lam) {
    Eigen::VectorXd v(3 * lam.size());
    for (std::size_t k = 0; k < lam.size(); ++k) {
        v[3 * k + 0] = lam.normal[k];
        v[3 * k + 1] = lam.tangent[k].x();
        v[3 * k + 2] = lam.tangent[k].y();
    }
    return v;
}

ContactImpulse unflatten(const Eigen::VectorXd& v) {
    ContactImpulse lam = ContactImpulse::zeros(static_cast<std::size_t>(v.size() / 3));
    for (std::size_t k = 0; k < lam.size(); ++k) {
        lam.normal[k] = v[3 * k + 0];
        lam.tangent[k] = Vec2(v[3 * k + 1], v[3 * k + 2]);
    }
    return lam;
}

void project_all(double mu, Eigen::VectorXd& v) {
    for (Eigen::Index k = 0; k + 2 < v.size(); k += 3) {
        double n = v[k];
        Vec2 t(v[k + 1], v[k + 2]);
        project_cone(mu, n, t);
        v[k] = n;
        v[k + 1] = t.x();
        v[k + 2] = t.y();
    }
}

struct InnerObjective {
    const ContactModel& model;
    const StateTransition& transition;
    const LossWeights& weights;
    Eigen::VectorXd gaps_next;
    std::vector<Vec2> vt;      // tangential velocity per contact at x_next
    std::vector<double> vt_norm;

    InnerObjective(const ContactModel& m, const StateTransition& t, const LossWeights& w)
        : model(m), transition(t), weights(w) {
        gaps_next = phi(m, t.x_next.pose());
        for (const Vec3& vert : m.vertices) {
            const Vec2 v = tangential_velocity(t, vert);
            vt.push_back(v);
            vt_norm.push_back(v.norm());
        }
    }

    double value(const Eigen::VectorXd& lam_vec) const {
        const ContactImpulse lam = unflatten(lam_vec);
        double pred = mass_weighted_sq(model, prediction_residual(model, transition, lam));
        double comp = 0.0, diss = 0.0;
        for (std::size_t k = 0; k < lam.size(); ++k) {
            const double act = lam.normal[k] * gaps_next[static_cast<Eigen::Index>(k)];
            comp += act * act;
            const double s = lam.tangent[k].dot(vt[k]) + model.mu * lam.normal[k] * vt_norm[k];
            diss += s * s;
        }
        // pen does not depend on lambda; constant offsets do not change argmin.
        return weights.pred * pred + weights.comp * comp + weights.diss * diss;
    }

    Eigen::VectorXd gradient(const Eigen::VectorXd& lam_vec) const {
        const ContactImpulse lam = unflatten(lam_vec);
        const Vec6 r = prediction_residual(model, transition, lam);
        const Mat3 Rq = transition.x.orientation.toRotationMatrix();

        Eigen::VectorXd grad(lam_vec.size());
        for (std::size_t k = 0; k < lam.size(); ++k) {
            // J_k(q) rows applied to the residual (mass weighting cancels).
            const Vec3 r_lin = r.head<3>();
            const Vec3 r_ang = r.tail<3>();
            const Vec3& w = model.vertices[k];
            auto contact_row = [&](const Vec3& axis) {
                return axis.dot(r_lin) + (w.cross(Rq.transpose() * axis)).dot(r_ang);
            };
            const double gp = -2.0 * weights.pred;
            double gn = gp * contact_row(Vec3::UnitZ());
            double gtx = gp * contact_row(Vec3::UnitX());
            double gty = gp * contact_row(Vec3::UnitY());

            const double gap = gaps_next[static_cast<Eigen::Index>(k)];
            gn += weights.comp * 2.0 * lam.normal[k] * gap * gap;

            const double s = lam.tangent[k].dot(vt[k]) + model.mu * lam.normal[k] * vt_norm[k];
            gn += weights.diss * 2.0 * s * model.mu * vt_norm[k];
            gtx += weights.diss * 2.0 * s * vt[k].x();
            gty += weights.diss * 2.0 * s * vt[k].y();

            grad[3 * k + 0] = gn;
            grad[3 * k + 1] = gtx;
            grad[3 * k + 2] = gty;
        }
        return grad;
    }
};

}  // namespace

InnerSolveResult solve_impulses(const ContactModel& model, const StateTransition& transition,
                                const LossWeights& weights, const InnerSolveConfig& cfg,
                                const ContactImpulse* warm_start) {
    model.validate();
    if (transition.dt <= 0.0) throw InvalidInput("solve_impulses: dt must be positive");

    const std::size_t K = model.vertices.size();
    InnerObjective obj(model, transition, weights);

    Eigen::VectorXd lam = warm_start && warm_start->size() == K ? flatten(*warm_start)
                                                                : Eigen::VectorXd::Zero(3 * K);
    project_all(model.mu, lam);

    double alpha = 1e-2;
    double value = obj.value(lam);
    InnerSolveResult result;
    result.kkt_residual = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        const Eigen::VectorXd grad = obj.gradient(lam);

        // Backtracking projected gradient step.
        Eigen::VectorXd next;
        double next_value = 0.0;
        for (int bt = 0; bt < 60; ++bt) {
            next = lam - alpha * grad;
            project_all(model.mu, next);
            next_value = obj.value(next);
            const Eigen::VectorXd d = next - lam;
            if (next_value <= value + grad.dot(d) + d.squaredNorm() / (2.0 * alpha) + 1e-18)
                break;
            alpha *= 0.5;
        }

        result.kkt_residual = (next - lam).lpNorm<Eigen::Infinity>() / alpha;
        lam = next;
        value = next_value;
        alpha = std::min(alpha * 1.3, 1e6);
        if (result.kkt_residual < cfg.kkt_tolerance) {
            result.converged = true;
            break;
        }
    }

    result.lambda = unflatten(lam);
    // Clean up projection round-off so the cone check is exact.
    for (std::size_t k = 0; k < K; ++k) {
        double n = result.lambda.normal[k];
        Vec2 t = result.lambda.tangent[k];
        project_cone(model.mu, n, t);
        result.lambda.normal[k] = n;
        result.lambda.tangent[k] = t;
    }
    result.loss = contactnets_loss(model, transition, result.lambda, weights);
    return result;
}

namespace {

bool contact_active(const ContactModel& model, const StateTransition& t, double margin) {
    return phi(model, t.x.pose()).minCoeff() < margin ||
           phi(model, t.x_next.pose()).minCoeff() < margin;
}

}  // namespace

TrainResult train(const ContactModel& initial_model,
                  const std::vector<StateTransition>& transitions, const TrainConfig& cfg) {
    initial_model.validate();
    if (transitions.empty()) throw InvalidInput("train: no transitions");
    if (cfg.contact_margin <= 0.0) throw InvalidInput("train: contact margin must be positive");

    bool any_active = false;
    for (const auto& t : transitions)
        if (contact_active(initial_model, t, cfg.contact_margin)) {
            any_active = true;
            break;
        }
    if (!any_active) throw UninformativeData("train: no contact-active transitions");

    // Free-flight prediction loss at lambda=0 is model-independent; cache it.
    std::vector<double> flight_pred(transitions.size());
    for (std::size_t j = 0; j < transitions.size(); ++j) {
        const ContactImpulse zero = ContactImpulse::zeros(initial_model.vertices.size());
        flight_pred[j] =
            mass_weighted_sq(initial_model, prediction_residual(initial_model, transitions[j], zero));
    }

    ContactModel model = initial_model;
    const std::size_t K = model.vertices.size();
    std::vector<ContactImpulse> warm(transitions.size(), ContactImpulse::zeros(K));

    auto evaluate = [&](const ContactModel& m, bool with_grad, std::vector<Vec3>& gv,
                        double& gmu) -> double {
        double total = 0.0;
        gv.assign(K, Vec3::Zero());
        gmu = 0.0;
        for (std::size_t j = 0; j < transitions.size(); ++j) {
            const auto& t = transitions[j];
            if (!contact_active(m, t, cfg.contact_margin)) {
                total += cfg.weights.pred * flight_pred[j];
                continue;
            }
            const auto inner = solve_impulses(m, t, cfg.weights, cfg.inner, &warm[j]);
            warm[j] = inner.lambda;
            total += inner.loss.total;
            if (!with_grad) continue;
            const LossGradients g = contactnets_loss_gradients(m, t, inner.lambda);
            for (std::size_t k = 0; k < K; ++k) {
                gv[k] += cfg.weights.pred * g.pred[k] + cfg.weights.comp * g.comp[k] +
                         cfg.weights.pen * g.pen[k] + cfg.weights.diss * g.diss[k];
            }
            gmu += cfg.weights.diss * g.mu_diss;
        }
        return total;
    };

    TrainResult result;
    std::vector<Vec3> gv;
    double gmu = 0.0;

    double best_loss = std::numeric_limits<double>::infinity();
    ContactModel best_model = initial_model;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double loss = evaluate(model, true, gv, gmu);
        result.loss_history.push_back(loss);
        if (epoch == 0) result.initial_loss = loss;
        if (loss < best_loss) {
            best_loss = loss;
            best_model = model;
        }

        if (epoch >= cfg.early_stop_window) {
            const double past =
                result.loss_history[result.loss_history.size() - 1 - cfg.early_stop_window];
            if (std::abs(past - loss) < cfg.early_stop_rel * std::max(std::abs(past), 1e-30))
                break;
        }

        if (cfg.learn_vertices)
            for (std::size_t k = 0; k < K; ++k) model.vertices[k] -= cfg.step_size * gv[k];
        if (cfg.learn_mu) model.mu = std::max(0.0, model.mu - cfg.step_size * gmu);
    }

    // The last update was never scored; give it a chance.
    const double final_eval = evaluate(model, false, gv, gmu);
    if (final_eval < best_loss) {
        best_loss = final_eval;
        best_model = model;
    }

    if (best_loss < result.initial_loss) {
        result.model = best_model;
        result.final_loss = best_loss;
    } else {
        result.model = initial_model;
        result.final_loss = result.initial_loss;
    }
    return result;
}

namespace {

// 2D convex hull (monotone chain) returning indices in counter-clockwise order.
std::vector<std::size_t> hull_2d(const std::vector<Vec2>& pts) {
    std::vector<std::size_t> idx(pts.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return std::tie(pts[a].x(), pts[a].y()) < std::tie(pts[b].x(), pts[b].y());
    });
    auto cross2 = [&](std::size_t o, std::size_t a, std::size_t b) {
        return (pts[a].x() - pts[o].x()) * (pts[b].y() - pts[o].y()) -
               (pts[a].y() - pts[o].y()) * (pts[b].x() - pts[o].x());
    };
    std::vector<std::size_t> h(2 * pts.size());
    std::size_t m = 0;
    for (std::size_t i : idx) {
        while (m >= 2 && cross2(h[m - 2], h[m - 1], i) <= 0) --m;
        h[m++] = i;
    }
    const std::size_t lower = m + 1;
    for (auto it = idx.rbegin(); it != idx.rend(); ++it) {
        while (m >= lower && cross2(h[m - 2], h[m - 1], *it) <= 0) --m;
        h[m++] = *it;
    }
    h.resize(m - 1);
    return h;
}

}  // namespace

TriangleMesh convex_hull(const PointCloud& points) {
    if (points.size() < 4) throw DegenerateHull("convex_hull: need at least 4 points");

    Vec3 lo = points[0], hi = points[0];
    for (const Vec3& p : points) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double scale = (hi - lo).norm();
    if (scale <= 0.0) throw DegenerateHull("convex_hull: all points coincide");
    const double eps = 1e-9 * scale;

    struct Plane {
        Vec3 normal;
        double offset;
    };
    std::vector<Plane> planes;
    auto add_plane = [&](const Vec3& n, double off) {
        for (const Plane& p : planes)
            if (p.normal.dot(n) > 1.0 - 1e-9 && std::abs(p.offset - off) <= eps) return;
        planes.push_back({n, off});
    };

    const std::size_t n = points.size();
    bool non_coplanar = false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t k = j + 1; k < n; ++k) {
                Vec3 nor = (points[j] - points[i]).cross(points[k] - points[i]);
                const double len = nor.norm();
                if (len <= eps * scale) continue;
                nor /= len;
                const double off = nor.dot(points[i]);
                double dmax = -std::numeric_limits<double>::infinity();
                double dmin = std::numeric_limits<double>::infinity();
                for (const Vec3& p : points) {
                    const double d = nor.dot(p) - off;
                    dmax = std::max(dmax, d);
                    dmin = std::min(dmin, d);
                }
                if (dmax > eps || dmin < -eps) non_coplanar = true;
                if (dmax <= eps) add_plane(nor, off);
                if (dmin >= -eps) add_plane(-nor, -off);
            }
        }
    }
    if (!non_coplanar || planes.empty())
        throw DegenerateHull("convex_hull: points are coplanar");

    TriangleMesh mesh;
    std::vector<int> vertex_map(n, -1);
    auto mesh_vertex = [&](std::size_t i) {
        if (vertex_map[i] < 0) {
            vertex_map[i] = static_cast<int>(mesh.vertices.size());
            mesh.vertices.push_back(points[i]);
        }
        return static_cast<std::uint32_t>(vertex_map[i]);
    };

    for (const Plane& plane : planes) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i)
            if (std::abs(plane.normal.dot(points[i]) - plane.offset) <= eps) members.push_back(i);
        if (members.size() < 3) continue;

        // Project onto the plane and keep only the convex outline.
        const Vec3 u0 = plane.normal.unitOrthogonal();
        const Vec3 v0 = plane.normal.cross(u0);
        std::vector<Vec2> flat;
        flat.reserve(members.size());
        for (std::size_t i : members)
            flat.emplace_back(u0.dot(points[i]), v0.dot(points[i]));
        const std::vector<std::size_t> outline = hull_2d(flat);
        if (outline.size() < 3) continue;

        for (std::size_t f = 1; f + 1 < outline.size(); ++f) {
            const std::size_t a = members[outline[0]];
            const std::size_t b = members[outline[f]];
            const std::size_t c = members[outline[f + 1]];
            const Vec3 face_n = (points[b] - points[a]).cross(points[c] - points[a]);
            if (face_n.dot(plane.normal) >= 0.0)
                mesh.faces.push_back({mesh_vertex(a), mesh_vertex(b), mesh_vertex(c)});
            else
                mesh.faces.push_back({mesh_vertex(a), mesh_vertex(c), mesh_vertex(b)});
        }
    }
    mesh.remove_degenerate_faces();
    if (mesh.faces.size() < 4) throw DegenerateHull("convex_hull: degenerate face set");
    return mesh;
}

TriangleMesh refined_geometry(const ContactModel& model) {
    model.validate();
    PointCloud pts(model.vertices.begin(), model.vertices.end());
    return convex_hull(pts);
}

double mesh_volume(const TriangleMesh& mesh) {
    double vol = 0.0;
    for (const auto& tri : mesh.faces) {
        const Vec3& a = mesh.vertices[tri[0]];
        const Vec3& b = mesh.vertices[tri[1]];
        const Vec3& c = mesh.vertices[tri[2]];
        vol += a.dot(b.cross(c)) / 6.0;
    }
    return vol;
}

}  // namespace tossfuse
