#include "tossfuse/metrics.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace tossfuse;

namespace {

PointCloud cube_corners(double half) {
    PointCloud pts;
    for (int i = 0; i < 8; ++i)
        pts.emplace_back((i & 1) ? half : -half, (i & 2) ? half : -half, (i & 4) ? half : -half);
    return pts;
}

}  // namespace

TEST_CASE("add_error") {
    const PointCloud geom = cube_corners(0.03);
    Rng rng(4);
    const RigidPose gt = testutil::random_pose(rng, 1.0, 0.5);

    CHECK(add_error(gt, gt, geom) == 0.0);

    SUBCASE("pure translation shifts every point equally") {
        RigidPose est = gt;
        est.translation += Vec3(0.03, 0, 0);
        CHECK(add_error(est, gt, geom) == doctest::Approx(0.03).epsilon(1e-12));
    }

    SUBCASE("matches a direct per-point summation") {
        RigidPose est = gt;
        est.rotation = (gt.rotation *
                        Quat(Eigen::AngleAxisd(10.0 * M_PI / 180.0, Vec3::UnitY())))
                           .normalized();
        double expect = 0.0;
        for (const Vec3& w : geom) expect += (est.apply(w) - gt.apply(w)).norm();
        expect /= static_cast<double>(geom.size());
        CHECK(add_error(est, gt, geom) == doctest::Approx(expect).epsilon(1e-12));
    }

    SUBCASE("left-invariant under a common rigid motion") {
        const RigidPose est = testutil::random_pose(rng, 1.0, 0.5);
        const RigidPose g = testutil::random_pose(rng, 2.0, 1.0);
        const double base = add_error(est, gt, geom);
        const double moved = add_error(compose(g, est), compose(g, gt), geom);
        CHECK(std::abs(base - moved) < 1e-9);
    }

    CHECK_THROWS_AS(add_error(gt, gt, PointCloud{}), InvalidInput);
}

TEST_CASE("adds_error") {
    const PointCloud geom = cube_corners(0.03);
    Rng rng(14);
    const RigidPose gt = testutil::random_pose(rng, 1.0, 0.5);

    CHECK(adds_error(gt, gt, geom) == 0.0);

    SUBCASE("blind to a symmetry rotation") {
        // Cube corners are invariant under 90-degree z rotations.
        RigidPose est = gt;
        est.rotation = (gt.rotation * Quat(Eigen::AngleAxisd(M_PI / 2, Vec3::UnitZ()))).normalized();
        CHECK(adds_error(est, gt, geom) < 1e-12);
        CHECK(add_error(est, gt, geom) > 0.01);
    }

    SUBCASE("never exceeds ADD") {
        for (int trial = 0; trial < 50; ++trial) {
            const RigidPose a = testutil::random_pose(rng, 2.0, 0.3);
            const RigidPose b = testutil::random_pose(rng, 2.0, 0.3);
            CHECK(adds_error(a, b, geom) <= add_error(a, b, geom) + 1e-12);
        }
    }
}

TEST_CASE("auc") {
    SUBCASE("all zero errors give 100 percent") {
        CHECK(auc(std::vector<double>(20, 0.0), 0.1) == doctest::Approx(100.0));
    }

    SUBCASE("all errors above threshold give 0 percent") {
        CHECK(auc(std::vector<double>(20, 0.5), 0.1) == doctest::Approx(0.0));
    }

    SUBCASE("uniform errors give 50 percent") {
        std::vector<double> errors;
        const int n = 2000;
        for (int i = 0; i < n; ++i) errors.push_back((i + 0.5) * 0.1 / n);
        CHECK(auc(errors, 0.1) == doctest::Approx(50.0).epsilon(0.01));
    }

    SUBCASE("monotone: pointwise smaller errors never lower the AUC") {
        Rng rng(6);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> a, b;
            for (int i = 0; i < 50; ++i) {
                const double e = rng.uniform(0.0, 0.15);
                a.push_back(e);
                b.push_back(e * rng.uniform(0.0, 1.0));
            }
            CHECK(auc(b, 0.1) >= auc(a, 0.1) - 1e-12);
        }
    }

    CHECK_THROWS_AS(auc({}, 0.1), InvalidInput);
    CHECK_THROWS_AS(auc({0.1}, 0.0), InvalidInput);
}

TEST_CASE("success_rate thresholds behave exactly at 5 degrees / 5 cm") {
    const RigidPose identity;
    auto offset_pose = [&](double deg, double trans) {
        RigidPose p;
        p.rotation = Quat(Eigen::AngleAxisd(deg * M_PI / 180.0, Vec3::UnitX()));
        p.translation = Vec3(trans, 0, 0);
        return p;
    };

    CHECK(success_rate({offset_pose(4.0, 0.04)}, {identity}) == doctest::Approx(100.0));
    CHECK(success_rate({offset_pose(6.0, 0.01)}, {identity}) == doctest::Approx(0.0));
    CHECK(success_rate({offset_pose(1.0, 0.06)}, {identity}) == doctest::Approx(0.0));
    CHECK(success_rate({identity, identity}, {identity, identity}) == doctest::Approx(100.0));
    CHECK_THROWS_AS(success_rate({identity}, {identity, identity}), InvalidInput);
}

TEST_CASE("chamfer") {
    SUBCASE("identical clouds") {
        Rng rng(8);
        const PointCloud cloud = testutil::random_cloud(rng, 50);
        CHECK(chamfer(cloud, cloud) == 0.0);
    }

    SUBCASE("two single points") {
        CHECK(chamfer({Vec3::Zero()}, {Vec3(0.07, 0, 0)}) == doctest::Approx(0.07));
    }

    SUBCASE("matches the brute-force oracle and is symmetric") {
        Rng rng(18);
        for (int trial = 0; trial < 5; ++trial) {
            const PointCloud a = testutil::random_cloud(rng, 100);
            const PointCloud b = testutil::random_cloud(rng, 120);

            double ab = 0.0, ba = 0.0;
            for (const Vec3& p : a) {
                double best = std::numeric_limits<double>::infinity();
                for (const Vec3& q : b) best = std::min(best, (p - q).norm());
                ab += best;
            }
            for (const Vec3& q : b) {
                double best = std::numeric_limits<double>::infinity();
                for (const Vec3& p : a) best = std::min(best, (q - p).norm());
                ba += best;
            }
            const double expect = 0.5 * ab / a.size() + 0.5 * ba / b.size();
            CHECK(std::abs(chamfer(a, b) - expect) < 1e-12);
            CHECK(chamfer(a, b) == chamfer(b, a));
        }
    }

    CHECK_THROWS_AS(chamfer({}, {Vec3::Zero()}), InvalidInput);
}

TEST_CASE("rotation_translation_error") {
    const RigidPose identity;
    auto [r0, t0] = rotation_translation_error(identity, identity);
    CHECK(r0 == 0.0);
    CHECK(t0 == 0.0);

    RigidPose rot90;
    rot90.rotation = Quat(Eigen::AngleAxisd(M_PI / 2, Vec3::UnitZ()));
    auto [r1, t1] = rotation_translation_error(rot90, identity);
    CHECK(r1 == doctest::Approx(90.0));
    CHECK(t1 == 0.0);

    // Quaternion double cover: q and -q are the same rotation.
    RigidPose neg = rot90;
    neg.rotation.coeffs() = -neg.rotation.coeffs();
    auto [r2, t2] = rotation_translation_error(neg, rot90);
    CHECK(r2 < 1e-9);
    CHECK(t2 == 0.0);
}

TEST_CASE("evaluate_trajectory aggregates all metrics") {
    Rng rng(21);
    const PointCloud geom = cube_corners(0.03);
    std::vector<RigidPose> gt, est;
    for (int i = 0; i < 10; ++i) {
        gt.push_back(testutil::random_pose(rng, 1.0, 0.3));
        est.push_back(gt.back());
    }
    const EvalReport r = evaluate_trajectory(est, gt, geom);
    CHECK(r.add_auc_percent == doctest::Approx(100.0));
    CHECK(r.adds_auc_percent == doctest::Approx(100.0));
    CHECK(r.sr_percent == doctest::Approx(100.0));
    CHECK(r.add_errors.size() == 10);
}
