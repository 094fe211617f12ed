#include "tossfuse/geometry.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace tossfuse;

TEST_CASE("transform_points basics") {
    PointCloud cloud = {{0, 0, 0}, {1, 0, 0}, {0.3, -0.2, 0.9}};

    SUBCASE("identity keeps the cloud") {
        const PointCloud out = transform_points(RigidPose::identity(), cloud);
        for (std::size_t i = 0; i < cloud.size(); ++i)
            CHECK((out[i] - cloud[i]).norm() == doctest::Approx(0.0));
    }

    SUBCASE("pure translation") {
        RigidPose pose;
        pose.translation = Vec3(0, 0, 1);
        const PointCloud out = transform_points(pose, {{0, 0, 0}});
        CHECK(out[0].isApprox(Vec3(0, 0, 1)));
    }

    SUBCASE("90 degree z rotation") {
        RigidPose pose;
        pose.rotation = Quat(Eigen::AngleAxisd(M_PI / 2, Vec3::UnitZ()));
        const PointCloud out = transform_points(pose, {{1, 0, 0}});
        CHECK((out[0] - Vec3(0, 1, 0)).norm() < 1e-12);
    }
}

TEST_CASE("transform_points preserves pairwise distances") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const PointCloud cloud = testutil::random_cloud(rng, 30, 0.5);
        const RigidPose pose = testutil::random_pose(rng, M_PI, 2.0);
        const PointCloud out = transform_points(pose, cloud);
        for (std::size_t i = 0; i + 1 < cloud.size(); i += 3) {
            const double before = (cloud[i] - cloud[i + 1]).norm();
            const double after = (out[i] - out[i + 1]).norm();
            CHECK(std::abs(before - after) < 1e-9);
        }
    }
}

TEST_CASE("compose and invert") {
    Rng rng(11);
    const RigidPose p = testutil::random_pose(rng, 2.0, 1.0);

    SUBCASE("identity is neutral") {
        const RigidPose q = compose(p, RigidPose::identity());
        CHECK((q.translation - p.translation).norm() < 1e-15);
        CHECK(q.rotation.angularDistance(p.rotation) < 1e-15);
    }

    SUBCASE("two-sided inverse") {
        for (const RigidPose& q : {compose(p, invert(p)), compose(invert(p), p)}) {
            CHECK(q.translation.norm() < 1e-9);
            CHECK(q.rotation.angularDistance(Quat::Identity()) < 1e-9);
        }
    }

    SUBCASE("z rotations add") {
        RigidPose r30, r60;
        r30.rotation = Quat(Eigen::AngleAxisd(M_PI / 6, Vec3::UnitZ()));
        r60.rotation = Quat(Eigen::AngleAxisd(M_PI / 3, Vec3::UnitZ()));
        const RigidPose r90 = compose(r30, r60);
        CHECK(r90.rotation.angularDistance(Quat(Eigen::AngleAxisd(M_PI / 2, Vec3::UnitZ()))) <
              1e-12);
    }

    SUBCASE("composition acts like chained application") {
        const RigidPose a = testutil::random_pose(rng, 2.0, 1.0);
        const RigidPose b = testutil::random_pose(rng, 2.0, 1.0);
        const PointCloud cloud = testutil::random_cloud(rng, 10);
        const PointCloud chained = transform_points(a, transform_points(b, cloud));
        const PointCloud composed = transform_points(compose(a, b), cloud);
        for (std::size_t i = 0; i < cloud.size(); ++i)
            CHECK((chained[i] - composed[i]).norm() < 1e-12);
    }

    SUBCASE("associativity") {
        const RigidPose a = testutil::random_pose(rng, 2.0, 1.0);
        const RigidPose b = testutil::random_pose(rng, 2.0, 1.0);
        const RigidPose c = testutil::random_pose(rng, 2.0, 1.0);
        const RigidPose left = compose(compose(a, b), c);
        const RigidPose right = compose(a, compose(b, c));
        CHECK((left.translation - right.translation).norm() < 1e-9);
        CHECK(left.rotation.angularDistance(right.rotation) < 1e-9);
    }
}

TEST_CASE("quaternion log/exp roundtrip") {
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const Vec3 rotvec = rng.unit_vector() * rng.uniform(0.0, 3.0);
        const Vec3 back = quaternion_log(quaternion_exp(rotvec));
        CHECK((back - rotvec).norm() < 1e-9);
    }
    CHECK(quaternion_log(Quat::Identity()).norm() == 0.0);

    // q and -q are the same rotation.
    const Quat q = quaternion_exp(Vec3(0.3, -0.2, 0.5));
    Quat neg = q;
    neg.coeffs() = -neg.coeffs();
    CHECK((quaternion_log(q) - quaternion_log(neg)).norm() < 1e-12);
}

TEST_CASE("box mesh and point-to-mesh distance") {
    const TriangleMesh box = make_box_mesh(Vec3::Zero(), Vec3::Constant(0.03));
    CHECK(box.vertices.size() == 8);
    CHECK(box.faces.size() == 12);
    CHECK(box.surface_area() == doctest::Approx(6 * 0.06 * 0.06));

    CHECK(point_to_mesh_distance(Vec3(0, 0, 0.05), box) == doctest::Approx(0.02));
    CHECK(point_to_mesh_distance(Vec3(0.03, 0.03, 0.03), box) == doctest::Approx(0.0));
    CHECK(point_to_mesh_distance(Vec3(0.05, 0.05, 0.03), box) ==
          doctest::Approx(std::sqrt(2) * 0.02));
}

TEST_CASE("mesh surface sampling is on-surface and seeded") {
    const TriangleMesh box = make_box_mesh(Vec3(0.1, 0, 0), Vec3::Constant(0.03));
    const PointCloud a = sample_mesh_surface(box, 500, 42);
    const PointCloud b = sample_mesh_surface(box, 500, 42);
    const PointCloud c = sample_mesh_surface(box, 500, 7);
    REQUIRE(a.size() == 500);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(point_to_mesh_distance(a[i], box) < 1e-12);
        CHECK(a[i] == b[i]);
    }
    CHECK(a[0] != c[0]);
}

TEST_CASE("degenerate faces are dropped") {
    TriangleMesh mesh;
    mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0.5, 0, 0}};
    mesh.faces = {{0, 1, 2}, {0, 1, 3}, {1, 1, 2}};
    mesh.remove_degenerate_faces();
    CHECK(mesh.faces.size() == 1);
}
