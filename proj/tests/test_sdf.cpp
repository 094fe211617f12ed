#include "tossfuse/sdf.hpp"

#include "tossfuse/metrics.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace tossfuse;

namespace {

SdfGrid sphere_grid(double radius = 0.05, int dims = 64) {
    SdfGrid g = make_centered_grid(Vec3::Zero(), radius * 1.3, dims);
    g.fill_analytic([&](const Vec3& x) { return x.norm() - radius; });
    return g;
}

CameraIntrinsics test_intrinsics() {
    CameraIntrinsics k;
    k.fx = k.fy = 300.0;
    k.cx = 80.0;
    k.cy = 60.0;
    k.rows = 120;
    k.cols = 160;
    return k;
}

// Renders the true cube from tumbling viewpoints covering all orientations
// (what a set of tosses shows the camera) and fuses every frame.
SdfGrid fused_cube_grid(double half = 0.03, int dims = 64, int views = 60) {
    const TriangleMesh cube = make_box_mesh(Vec3::Zero(), Vec3::Constant(half));
    const CameraIntrinsics K = test_intrinsics();
    SdfGrid grid = make_centered_grid(Vec3::Zero(), half * std::sqrt(3.0) * 1.1, dims);
    Rng rng(99);
    for (int i = 0; i < views; ++i) {
        RigidPose camera_from_object;
        camera_from_object.rotation = rng.unit_quaternion();
        camera_from_object.translation = Vec3(0, 0, rng.uniform(0.35, 0.5));
        const DepthMap d = render_depth(cube, camera_from_object, K);
        tsdf_integrate(grid, d, derive_mask(d), K, camera_from_object);
    }
    return grid;
}

}  // namespace

TEST_CASE("sdf_query interpolation") {
    SdfGrid g = SdfGrid::create(Vec3::Zero(), 0.01, {4, 4, 4}, 0.05);

    SUBCASE("voxel centers return stored values") {
        g.values[g.index(1, 2, 3)] = 0.017f;
        const SdfSample s = sdf_query(g, g.voxel_center(1, 2, 3));
        CHECK(s.in_bounds);
        CHECK(s.value == doctest::Approx(0.017).epsilon(1e-9));
    }

    SUBCASE("midpoint averages the two centers") {
        g.values[g.index(1, 1, 1)] = 0.02f;
        g.values[g.index(2, 1, 1)] = 0.04f;
        const Vec3 mid = 0.5 * (g.voxel_center(1, 1, 1) + g.voxel_center(2, 1, 1));
        CHECK(sdf_query(g, mid).value == doctest::Approx(0.03).epsilon(1e-9));
    }

    SUBCASE("outside points clamp to truncation and flag") {
        const SdfSample s = sdf_query(g, Vec3(1, 1, 1));
        CHECK_FALSE(s.in_bounds);
        CHECK(s.value == doctest::Approx(g.truncation));
    }

    SUBCASE("sphere query on axis") {
        const SdfGrid sphere = sphere_grid(0.05);
        const double v = sdf_query(sphere, Vec3(0.075, 0, 0)).value;
        CHECK(v == doctest::Approx(0.025).epsilon(0.05));
    }
}

TEST_CASE("sdf_query is Lipschitz inside the band") {
    const SdfGrid g = sphere_grid(0.05);
    Rng rng(31);
    for (int i = 0; i < 200; ++i) {
        const Vec3 x = rng.unit_vector() * rng.uniform(0.03, 0.07);
        const Vec3 step = rng.unit_vector() * 1e-4;
        const SdfSample a = sdf_query(g, x);
        const SdfSample b = sdf_query(g, x + step);
        if (!a.in_bounds || !b.in_bounds) continue;
        // Trilinear interpolation of an exact SDF keeps a near-unit Lipschitz
        // constant; allow directional slack from the cell corners.
        CHECK(std::abs(a.value - b.value) <= 1.9 * step.norm());
    }
}

TEST_CASE("tsdf_integrate") {
    const CameraIntrinsics K = test_intrinsics();

    SUBCASE("empty mask leaves the grid untouched") {
        SdfGrid g = make_centered_grid(Vec3::Zero(), 0.05, 16);
        const SdfGrid before = g;
        DepthMap d(K.rows, K.cols);
        for (float& v : d.data) v = 0.5f;
        tsdf_integrate(g, d, Mask(K.rows, K.cols), K, RigidPose{Quat::Identity(), Vec3(0, 0, 0.4)});
        CHECK(g.values == before.values);
        CHECK(g.weights == before.weights);
    }

    SUBCASE("same frame twice: identical values, doubled weights") {
        const TriangleMesh cube = make_box_mesh(Vec3::Zero(), Vec3::Constant(0.03));
        const RigidPose pose{Quat::Identity(), Vec3(0, 0, 0.4)};
        const DepthMap d = render_depth(cube, pose, K);
        const Mask m = derive_mask(d);

        SdfGrid once = make_centered_grid(Vec3::Zero(), 0.06, 32);
        tsdf_integrate(once, d, m, K, pose);
        SdfGrid twice = once;
        tsdf_integrate(twice, d, m, K, pose);

        for (std::size_t i = 0; i < once.values.size(); ++i) {
            CHECK(twice.values[i] == doctest::Approx(once.values[i]).epsilon(1e-6));
            CHECK(twice.weights[i] == doctest::Approx(2.0f * once.weights[i]));
        }
    }

    SUBCASE("fusion order does not matter for the averaged values") {
        const TriangleMesh cube = make_box_mesh(Vec3::Zero(), Vec3::Constant(0.03));
        const RigidPose pa{Quat(Eigen::AngleAxisd(0.3, Vec3::UnitY())), Vec3(0, 0, 0.4)};
        const RigidPose pb{Quat(Eigen::AngleAxisd(-0.6, Vec3::UnitX())), Vec3(0.01, 0, 0.45)};
        const DepthMap da = render_depth(cube, pa, K);
        const DepthMap db = render_depth(cube, pb, K);

        SdfGrid ab = make_centered_grid(Vec3::Zero(), 0.06, 32);
        SdfGrid ba = ab;
        tsdf_integrate(ab, da, derive_mask(da), K, pa);
        tsdf_integrate(ab, db, derive_mask(db), K, pb);
        tsdf_integrate(ba, db, derive_mask(db), K, pb);
        tsdf_integrate(ba, da, derive_mask(da), K, pa);
        for (std::size_t i = 0; i < ab.values.size(); ++i)
            CHECK(std::abs(ab.values[i] - ba.values[i]) < 1e-6);
    }

    SUBCASE("dimension mismatch rejected") {
        SdfGrid g = make_centered_grid(Vec3::Zero(), 0.05, 16);
        CHECK_THROWS_AS(
            tsdf_integrate(g, DepthMap(10, 10), Mask(10, 10), K, RigidPose::identity()),
            InvalidInput);
    }

    SUBCASE("single-render fusion: zero crossings sit near the true surface") {
        const TriangleMesh cube = make_box_mesh(Vec3::Zero(), Vec3::Constant(0.03));
        SdfGrid grid = make_centered_grid(Vec3::Zero(), 0.03 * 2.1333, 64);  // 2.5 mm voxels
        const RigidPose pose{Quat(Eigen::AngleAxisd(0.5, Vec3(1, 2, 0).normalized())),
                             Vec3(0, 0, 0.4)};
        const DepthMap d = render_depth(cube, pose, K);
        tsdf_integrate(grid, d, derive_mask(d), K, pose);
        const TriangleMesh surf = extract_surface(grid);
        REQUIRE(surf.vertices.size() > 100);
        for (const Vec3& v : surf.vertices)
            CHECK(point_to_mesh_distance(v, cube) < 2.0 * grid.voxel_size);
    }
}

TEST_CASE("extract_surface") {
    SUBCASE("analytic sphere level set") {
        const SdfGrid g = sphere_grid(0.05);
        const TriangleMesh mesh = extract_surface(g);
        REQUIRE(!mesh.empty());
        for (const Vec3& v : mesh.vertices) {
            CHECK(v.norm() == doctest::Approx(0.05).epsilon(g.voxel_size / 0.05));
            CHECK(std::abs(sdf_query(g, v).value) < g.voxel_size);
        }
    }

    SUBCASE("fused cube Chamfer within two voxels") {
        const SdfGrid grid = fused_cube_grid();
        const TriangleMesh mesh = extract_surface(grid);
        const TriangleMesh cube = make_box_mesh(Vec3::Zero(), Vec3::Constant(0.03));
        CHECK(chamfer_mesh(mesh, cube, 4000) < 2.0 * grid.voxel_size);
    }

    SUBCASE("uniform grid has no surface") {
        SdfGrid g = SdfGrid::create(Vec3::Zero(), 0.01, {8, 8, 8}, 0.05);
        CHECK_THROWS_AS(extract_surface(g), EmptySurface);
        g.fill_analytic([](const Vec3&) { return -0.01; });
        CHECK_THROWS_AS(extract_surface(g), EmptySurface);
    }
}

TEST_CASE("eikonal_residual") {
    SUBCASE("exact sphere field is nearly unit-gradient") {
        const SdfGrid g = sphere_grid(0.05);
        Rng rng(17);
        PointCloud samples;
        for (int i = 0; i < 500; ++i)
            samples.push_back(rng.unit_vector() * rng.uniform(0.044, 0.056));
        const EikonalStats stats = eikonal_residual(g, samples);
        REQUIRE(stats.residuals.size() > 400);
        CHECK(stats.mean < 1e-3);
    }

    SUBCASE("constant grid has residual one") {
        SdfGrid g = SdfGrid::create(Vec3::Zero(), 0.01, {8, 8, 8}, 0.05);
        g.fill_analytic([](const Vec3&) { return 0.0; });
        const PointCloud samples = {g.voxel_center(3, 3, 3), g.voxel_center(4, 4, 4)};
        const EikonalStats stats = eikonal_residual(g, samples);
        REQUIRE(stats.residuals.size() == 2);
        for (double r : stats.residuals) CHECK(r == doctest::Approx(1.0));
    }

    SUBCASE("out-of-band samples are excluded and counted") {
        const SdfGrid g = sphere_grid(0.05);
        const PointCloud samples = {Vec3(10, 0, 0), Vec3(0.05, 0, 0)};
        const EikonalStats stats = eikonal_residual(g, samples);
        CHECK(stats.excluded == 1);
        CHECK(stats.residuals.size() == 1);
    }

    SUBCASE("fused cube grid stays under the diagnostic bound") {
        const SdfGrid grid = fused_cube_grid();
        Rng rng(23);
        PointCloud samples;
        const TriangleMesh cube = make_box_mesh(Vec3::Zero(), Vec3::Constant(0.03));
        const PointCloud on_surface = sample_mesh_surface(cube, 400, 3);
        for (const Vec3& p : on_surface)
            samples.push_back(p + rng.unit_vector() * rng.uniform(0.0, grid.voxel_size));
        const EikonalStats stats = eikonal_residual(grid, samples);
        REQUIRE(stats.residuals.size() > 200);
        CHECK(stats.mean < 0.2);
    }
}

TEST_CASE("decimate_to_polytope") {
    const TriangleMesh cube = make_box_mesh(Vec3(0.01, -0.02, 0.3), Vec3::Constant(0.03));

    SUBCASE("K equal to the corner count returns the corners") {
        const PointCloud picked = decimate_to_polytope(cube, 8);
        REQUIRE(picked.size() == 8);
        auto key = [](const Vec3& v) {
            return std::make_tuple(v.x(), v.y(), v.z());
        };
        std::set<std::tuple<double, double, double>> got, want;
        for (const Vec3& v : picked) got.insert(key(v));
        for (const Vec3& v : cube.vertices) want.insert(key(v));
        CHECK(got == want);
    }

    SUBCASE("matches a brute-force farthest-point oracle") {
        const SdfGrid g = sphere_grid(0.05, 24);
        const TriangleMesh mesh = extract_surface(g);
        const std::size_t k = 6;
        const PointCloud got = decimate_to_polytope(mesh, k);

        // Independent re-implementation: start from the lexicographically
        // smallest vertex, greedily take the farthest point each round.
        const auto& verts = mesh.vertices;
        std::vector<std::size_t> picked;
        std::size_t seed = 0;
        for (std::size_t i = 1; i < verts.size(); ++i) {
            const Vec3 &a = verts[i], &b = verts[seed];
            if (std::make_tuple(a.x(), a.y(), a.z()) < std::make_tuple(b.x(), b.y(), b.z()))
                seed = i;
        }
        picked.push_back(seed);
        while (picked.size() < k) {
            std::size_t best = 0;
            double best_d = -1.0;
            for (std::size_t i = 0; i < verts.size(); ++i) {
                double d = std::numeric_limits<double>::infinity();
                for (std::size_t p : picked) d = std::min(d, (verts[i] - verts[p]).squaredNorm());
                if (d > best_d) {
                    best_d = d;
                    best = i;
                }
            }
            picked.push_back(best);
        }
        REQUIRE(got.size() == k);
        for (std::size_t i = 0; i < k; ++i) CHECK((got[i] - verts[picked[i]]).norm() == 0.0);
    }

    SUBCASE("rejects K below 4 and oversized K") {
        CHECK_THROWS_AS(decimate_to_polytope(cube, 3), InvalidInput);
        CHECK_THROWS_AS(decimate_to_polytope(cube, 9), InvalidInput);
    }
}
