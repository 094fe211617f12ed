#include "tossfuse/dynamics.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace tossfuse;

namespace {

// Spec-scale cube: 10 cm side so the bottom face sits 0.05 below the center.
ContactModel big_cube() { return make_cube_model(0.1, 0.1, 0.3); }

BodyState resting_state(double half) {
    BodyState s;
    s.position = Vec3(0, 0, half);
    return s;
}

// Random state with all vertices at or above the ground.
BodyState random_airborne_state(Rng& rng, const ContactModel& model) {
    BodyState s;
    s.orientation = rng.unit_quaternion();
    s.position = Vec3(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), 0.0);
    const double low = phi(model, s.pose()).minCoeff();
    s.position.z() = rng.uniform(0.0, 0.3) - low;  // lift clear of the plane
    s.lin_vel = Vec3(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 0.5));
    s.ang_vel = rng.unit_vector() * rng.uniform(0.0, 10.0);
    return s;
}

}  // namespace

TEST_CASE("phi computes vertex heights") {
    const ContactModel cube = big_cube();

    SUBCASE("flat rest: four at zero, four at the top") {
        const Eigen::VectorXd gaps = phi(cube, resting_state(0.05).pose());
        int at_zero = 0, at_top = 0;
        for (int k = 0; k < gaps.size(); ++k) {
            if (std::abs(gaps[k]) < 1e-12) ++at_zero;
            if (std::abs(gaps[k] - 0.1) < 1e-12) ++at_top;
        }
        CHECK(at_zero == 4);
        CHECK(at_top == 4);
    }

    SUBCASE("high above the plane") {
        BodyState s;
        s.position = Vec3(0, 0, 1);
        CHECK(phi(cube, s.pose()).minCoeff() >= 0.95);
    }

    SUBCASE("45 degree tilt lowest corner") {
        BodyState s;
        s.orientation = Quat(Eigen::AngleAxisd(M_PI / 4, Vec3::UnitX()));
        const double h = 0.2;
        s.position = Vec3(0, 0, h);
        CHECK(phi(cube, s.pose()).minCoeff() ==
              doctest::Approx(h - 0.05 * std::sqrt(2.0)).epsilon(1e-12));
    }
}

TEST_CASE("contact_jacobian") {
    SUBCASE("vertex at the body origin, identity orientation") {
        ContactModel m = big_cube();
        m.vertices[0] = Vec3::Zero();
        const auto J = contact_jacobian(m, RigidPose::identity());
        Vec6 normal_row;
        normal_row << 0, 0, 1, 0, 0, 0;
        CHECK((J[0].row(0).transpose() - normal_row).norm() < 1e-12);
    }

    SUBCASE("pure linear velocity maps to tangent1") {
        const ContactModel m = big_cube();
        const auto J = contact_jacobian(m, RigidPose::identity());
        Vec6 vel;
        vel << 1, 0, 0, 0, 0, 0;
        for (const auto& Jk : J) {
            const Vec3 vc = Jk * vel;
            CHECK(vc[1] == doctest::Approx(1.0));  // tangent1 = x
            CHECK(vc[0] == doctest::Approx(0.0));
            CHECK(vc[2] == doctest::Approx(0.0));
        }
    }

    SUBCASE("matches finite differences of the contact point") {
        Rng rng(50);
        const ContactModel m = big_cube();
        for (int trial = 0; trial < 20; ++trial) {
            BodyState s = random_airborne_state(rng, m);
            const auto J = contact_jacobian(m, s.pose());
            const double h = 1e-6;

            BodyState stepped = s;
            stepped.position += h * s.lin_vel;
            stepped.orientation =
                (s.orientation * quaternion_exp(h * s.ang_vel)).normalized();

            for (std::size_t k = 0; k < m.vertices.size(); ++k) {
                const Vec3 before = s.pose().apply(m.vertices[k]);
                const Vec3 after = stepped.pose().apply(m.vertices[k]);
                const Vec3 fd = (after - before) / h;
                const Vec3 vc = J[k] * s.velocity();
                // contact frame rows are (z, x, y) of the world velocity
                CHECK(std::abs(vc[0] - fd.z()) < 1e-5);
                CHECK(std::abs(vc[1] - fd.x()) < 1e-5);
                CHECK(std::abs(vc[2] - fd.y()) < 1e-5);
            }
        }
    }
}

TEST_CASE("simulate_step") {
    const ContactModel cube = big_cube();
    const Vec6 no_impulse = Vec6::Zero();

    SUBCASE("free flight matches the semi-implicit recurrence") {
        BodyState s;
        s.position = Vec3(0, 0, 1);
        const StepResult r = simulate_step(cube, s, no_impulse, 0.01);
        CHECK(r.state.lin_vel.z() == doctest::Approx(-0.0981).epsilon(1e-12));
        CHECK(r.state.position.z() == doctest::Approx(0.999019).epsilon(1e-12));
        for (double n : r.impulse.normal) CHECK(n == 0.0);
    }

    SUBCASE("resting cube carries its weight") {
        const double dt = 0.01;
        const StepResult r = simulate_step(cube, resting_state(0.05), no_impulse, dt);
        double total_normal = 0.0;
        for (double n : r.impulse.normal) total_normal += n;
        CHECK(std::abs(total_normal - cube.mass * kGravity * dt) < 1e-8);
        CHECK((r.state.position - Vec3(0, 0, 0.05)).norm() < 1e-6);
        CHECK(r.state.lin_vel.norm() < 1e-6);
        CHECK(r.state.ang_vel.norm() < 1e-6);
    }

    SUBCASE("zero gravity and zero velocity leave the state unchanged") {
        BodyState s = resting_state(0.05);
        const StepResult r = simulate_step(cube, s, no_impulse, 0.01, 0.0);
        CHECK(r.state.position == s.position);
        CHECK(r.state.lin_vel == s.lin_vel);
        CHECK(r.state.ang_vel == s.ang_vel);
        CHECK(r.state.orientation.coeffs() == s.orientation.coeffs());
    }

    SUBCASE("rejects non-positive dt") {
        CHECK_THROWS_AS(simulate_step(cube, resting_state(0.05), no_impulse, 0.0), InvalidInput);
    }
}

TEST_CASE("simulate_step invariants over random steps") {
    const ContactModel cube = make_cube_model(0.06, 0.1, 0.3);
    const Vec6 no_impulse = Vec6::Zero();
    Rng rng(123);
    const double dt = 1.0 / 300.0;

    for (int trial = 0; trial < 500; ++trial) {
        const BodyState s = random_airborne_state(rng, cube);
        const StepResult r = simulate_step(cube, s, no_impulse, dt);

        // No deeper than 1 mm after the step.
        CHECK(phi(cube, r.state.pose()).minCoeff() >= -1e-3);

        // Impulses stay in the friction cone.
        for (std::size_t k = 0; k < r.impulse.size(); ++k) {
            CHECK(r.impulse.normal[k] >= 0.0);
            CHECK(r.impulse.tangent[k].norm() <= cube.mu * r.impulse.normal[k] + 1e-12);
        }

        // Energy never increases (semi-implicit gravity dissipates slightly).
        const double e0 = s.kinetic_energy(cube.mass, cube.inertia) +
                          cube.mass * kGravity * s.position.z();
        const double e1 = r.state.kinetic_energy(cube.mass, cube.inertia) +
                          cube.mass * kGravity * r.state.position.z();
        CHECK(e1 <= e0 + 1e-6);
    }
}

TEST_CASE("rollout") {
    const ContactModel cube = make_cube_model(0.06, 0.1, 0.3);

    SUBCASE("matches manual composition exactly") {
        BodyState s;
        s.position = Vec3(0, 0, 0.4);
        s.lin_vel = Vec3(0.5, 0, 0);
        s.ang_vel = Vec3(1, 2, 3);
        const auto traj = rollout(cube, s, 99, 1.0 / 30.0, 1);
        REQUIRE(traj.size() == 100);
        BodyState manual = s;
        const Vec6 u = Vec6::Zero();
        for (int k = 1; k < 100; ++k) {
            manual = simulate_step(cube, manual, u, 1.0 / 30.0).state;
            CHECK(manual.position == traj[k].position);
            CHECK(manual.lin_vel == traj[k].lin_vel);
            CHECK(manual.orientation.coeffs() == traj[k].orientation.coeffs());
        }
    }

    SUBCASE("a dropped cube comes to rest") {
        BodyState s;
        s.position = Vec3(0, 0, 0.4);
        s.orientation = Quat(Eigen::AngleAxisd(0.4, Vec3(1, 1, 0).normalized()));
        s.ang_vel = Vec3(2, -1, 3);
        const auto traj = rollout(cube, s, 90, 1.0 / 30.0, 10);
        for (std::size_t k = traj.size() - 10; k < traj.size(); ++k)
            CHECK(traj[k].kinetic_energy(cube.mass, cube.inertia) < 1e-6);
    }

    SUBCASE("rejects bad arguments") {
        CHECK_THROWS_AS(rollout(cube, BodyState{}, 0, 0.01), InvalidInput);
    }
}

TEST_CASE("rollout error curves have finite means and intervals") {
    const ContactModel truth = make_cube_model(0.06, 0.1, 0.3);
    ContactModel learned = truth;
    Rng rng(2);
    for (Vec3& v : learned.vertices)
        v += Vec3(rng.uniform(-0.002, 0.002), rng.uniform(-0.002, 0.002),
                  rng.uniform(-0.002, 0.002));

    std::vector<BodyState> inits;
    for (int i = 0; i < 3; ++i) inits.push_back(random_airborne_state(rng, truth));

    const RolloutErrorCurves curves = evaluate_rollouts(learned, truth, inits, 30, 1.0 / 30.0, 10);
    REQUIRE(curves.mean_rotation_deg.size() == 31);
    for (std::size_t i = 0; i < curves.mean_rotation_deg.size(); ++i) {
        CHECK(std::isfinite(curves.mean_rotation_deg[i]));
        CHECK(std::isfinite(curves.ci95_rotation_deg[i]));
        CHECK(std::isfinite(curves.mean_translation_m[i]));
        CHECK(std::isfinite(curves.ci95_translation_m[i]));
    }
    CHECK(curves.final_rest_height_err_m.size() == 3);
}
