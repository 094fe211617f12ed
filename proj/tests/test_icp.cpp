#include "tossfuse/icp.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace tossfuse;

TEST_CASE("nearest_correspondences basics") {
    SUBCASE("identical clouds match index to index") {
        Rng rng(1);
        const PointCloud cloud = testutil::random_cloud(rng, 40);
        const auto pairs = nearest_correspondences(cloud, cloud, 0.01);
        REQUIRE(pairs.size() == cloud.size());
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            CHECK(pairs[i].first == i);
            CHECK(pairs[i].second == i);
        }
    }

    SUBCASE("near point matches, far point ignored") {
        const PointCloud source = {{0, 0, 0}};
        const PointCloud target = {{0, 0, 0.001}, {1, 1, 1}};
        const auto pairs = nearest_correspondences(source, target, 0.01);
        REQUIRE(pairs.size() == 1);
        CHECK(pairs[0] == std::make_pair<std::size_t, std::size_t>(0, 0));
    }

    SUBCASE("no match beyond max_dist") {
        const auto pairs = nearest_correspondences({{0, 0, 0}}, {{1, 1, 1}}, 0.1);
        CHECK(pairs.empty());
    }
}

TEST_CASE("nearest_correspondences matches brute force exactly") {
    Rng rng(1234);
    for (int trial = 0; trial < 10; ++trial) {
        const PointCloud source = testutil::random_cloud(rng, 200, 0.08);
        const PointCloud target = testutil::random_cloud(rng, 200, 0.08);
        const double max_dist = rng.uniform(0.01, 0.15);
        const auto got = nearest_correspondences(source, target, max_dist);
        const auto want = testutil::brute_force_nn(source, target, max_dist);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == want[i]);
    }
}

TEST_CASE("nearest_correspondences tie-breaks to the lowest index") {
    const PointCloud source = {{0, 0, 0}};
    const PointCloud target = {{0.001, 0, 0}, {-0.001, 0, 0}};
    const auto pairs = nearest_correspondences(source, target, 0.1);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].second == 0);
}

TEST_CASE("best_rigid_transform") {
    Rng rng(77);

    SUBCASE("aligned pairs give identity") {
        std::vector<std::pair<Vec3, Vec3>> pairs;
        for (int i = 0; i < 10; ++i) {
            const Vec3 p = rng.uniform_in_box(Vec3::Constant(-1), Vec3::Constant(1));
            pairs.emplace_back(p, p);
        }
        const RigidPose pose = best_rigid_transform(pairs);
        CHECK(pose.translation.norm() < 1e-9);
        CHECK(pose.rotation.angularDistance(Quat::Identity()) < 1e-9);
    }

    SUBCASE("recovers a known transform exactly") {
        const RigidPose truth = testutil::random_pose(rng, 1.5, 0.5);
        std::vector<std::pair<Vec3, Vec3>> pairs;
        for (int i = 0; i < 20; ++i) {
            const Vec3 s = rng.uniform_in_box(Vec3::Constant(-0.2), Vec3::Constant(0.2));
            pairs.emplace_back(s, truth.apply(s));
        }
        const RigidPose pose = best_rigid_transform(pairs);
        CHECK(pose.rotation.angularDistance(truth.rotation) < 1e-9);
        CHECK((pose.translation - truth.translation).norm() < 1e-9);
    }

    SUBCASE("noisy pairs: residual no worse than the true transform") {
        const RigidPose truth = testutil::random_pose(rng, 0.8, 0.3);
        std::vector<std::pair<Vec3, Vec3>> pairs;
        for (int i = 0; i < 100; ++i) {
            const Vec3 s = rng.uniform_in_box(Vec3::Constant(-0.2), Vec3::Constant(0.2));
            const Vec3 noise(0.001 * rng.gaussian(), 0.001 * rng.gaussian(),
                             0.001 * rng.gaussian());
            pairs.emplace_back(s, truth.apply(s) + noise);
        }
        const RigidPose est = best_rigid_transform(pairs);
        auto objective = [&](const RigidPose& p) {
            double sum = 0.0;
            for (const auto& [s, t] : pairs) sum += (t - p.apply(s)).squaredNorm();
            return sum;
        };
        CHECK(objective(est) <= objective(truth) + 1e-12);
    }

    SUBCASE("rotation is orthonormal with unit determinant") {
        for (int trial = 0; trial < 10; ++trial) {
            const RigidPose truth = testutil::random_pose(rng, 3.0, 1.0);
            std::vector<std::pair<Vec3, Vec3>> pairs;
            for (int i = 0; i < 5; ++i) {
                const Vec3 s = rng.uniform_in_box(Vec3::Constant(-1), Vec3::Constant(1));
                pairs.emplace_back(s, truth.apply(s));
            }
            const Mat3 R = best_rigid_transform(pairs).rotation.toRotationMatrix();
            CHECK((R.transpose() * R - Mat3::Identity()).norm() < 1e-9);
            CHECK(R.determinant() == doctest::Approx(1.0));
        }
    }

    SUBCASE("too few or collinear pairs are rejected") {
        std::vector<std::pair<Vec3, Vec3>> two = {{Vec3(0, 0, 0), Vec3(0, 0, 0)},
                                                  {Vec3(1, 0, 0), Vec3(1, 0, 0)}};
        CHECK_THROWS_AS(best_rigid_transform(two), DegenerateCorrespondences);

        std::vector<std::pair<Vec3, Vec3>> line;
        for (int i = 0; i < 10; ++i)
            line.emplace_back(Vec3(i * 0.1, 0, 0), Vec3(i * 0.1, 0, 0));
        CHECK_THROWS_AS(best_rigid_transform(line), DegenerateCorrespondences);
    }
}

TEST_CASE("icp_align") {
    Rng rng(2024);
    IcpConfig cfg;
    cfg.max_correspondence_distance = 0.5;

    SUBCASE("source equals target") {
        const PointCloud cloud = testutil::random_cloud(rng, 100);
        const IcpResult res = icp_align(cloud, cloud, cfg);
        CHECK(res.converged);
        CHECK(res.iterations == 1);
        CHECK(res.rms_error < 1e-12);
        CHECK(res.pose.translation.norm() < 1e-12);
    }

    SUBCASE("recovers a 10 degree + 2 cm perturbation") {
        const PointCloud source = testutil::random_cloud(rng, 300, 0.1);
        RigidPose truth;
        truth.rotation = Quat(Eigen::AngleAxisd(10.0 * M_PI / 180.0, Vec3(0.3, 1, 0.2).normalized()));
        truth.translation = Vec3(0.02, 0, 0.005);
        const PointCloud target = transform_points(truth, source);
        const IcpResult res = icp_align(source, target, cfg);
        CHECK(res.converged);
        CHECK(res.pose.rotation.angularDistance(truth.rotation) * 180.0 / M_PI < 0.5);
        CHECK((res.pose.translation - truth.translation).norm() < 1e-3);
    }

    SUBCASE("disjoint clouds raise insufficient overlap") {
        IcpConfig tight = cfg;
        tight.max_correspondence_distance = 0.05;
        PointCloud source = testutil::random_cloud(rng, 50, 0.05);
        PointCloud target = source;
        for (Vec3& p : target) p += Vec3(1, 0, 0);
        CHECK_THROWS_AS(icp_align(source, target, tight), InsufficientOverlap);
    }

    SUBCASE("cloud below min_correspondences rejected") {
        const PointCloud tiny = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
        CHECK_THROWS_AS(icp_align(tiny, tiny, cfg), InsufficientOverlap);
    }
}

TEST_CASE("icp objective is non-increasing across iterations") {
    // Instrumented replica of the icp_align loop: tracks the sum of squared
    // correspondence distances after each update.
    Rng rng(555);
    for (int trial = 0; trial < 20; ++trial) {
        const PointCloud source = testutil::random_cloud(rng, 150, 0.1);
        const RigidPose truth = testutil::random_pose(rng, 20.0 * M_PI / 180.0, 0.05);
        const PointCloud target = transform_points(truth, source);

        RigidPose pose;
        PointCloud moved = source;
        double prev = std::numeric_limits<double>::infinity();
        for (int iter = 0; iter < 15; ++iter) {
            const auto matches = nearest_correspondences(moved, target, 1.0);
            double objective = 0.0;
            std::vector<std::pair<Vec3, Vec3>> pairs;
            for (const auto& [s, t] : matches) {
                pairs.emplace_back(moved[s], target[t]);
                objective += (moved[s] - target[t]).squaredNorm();
            }
            CHECK(objective <= prev + 1e-12);
            prev = objective;
            pose = compose(best_rigid_transform(pairs), pose);
            moved = transform_points(pose, source);
        }
    }
}

TEST_CASE("icp is equivariant under a common rigid motion") {
    Rng rng(808);
    IcpConfig cfg;
    cfg.max_correspondence_distance = 0.5;
    for (int trial = 0; trial < 5; ++trial) {
        const PointCloud source = testutil::random_cloud(rng, 200, 0.1);
        const RigidPose truth = testutil::random_pose(rng, 0.2, 0.02);
        const PointCloud target = transform_points(truth, source);
        const RigidPose g = testutil::random_pose(rng, 1.0, 0.5);

        const IcpResult base = icp_align(source, target, cfg);
        const IcpResult moved =
            icp_align(transform_points(g, source), transform_points(g, target), cfg);

        const RigidPose expected = compose(g, compose(base.pose, invert(g)));
        CHECK(moved.pose.rotation.angularDistance(expected.rotation) < 1e-6);
        CHECK((moved.pose.translation - expected.translation).norm() < 1e-6);
    }
}
