#include <doctest.h>

#include <cmath>
#include <numbers>

#include "eitshape/errors.hpp"
#include "eitshape/metrics.hpp"

using eitshape::LatentShapeModel;
using eitshape::Vec3;
using eitshape::Vector;

TEST_SUITE("metrics") {
    TEST_CASE("indicator error between concentric spheres matches the shell volume") {
        const LatentShapeModel model;
        const auto small = model.sphere(Vec3::Zero(), 0.5);
        const auto large = model.sphere(Vec3::Zero(), 0.6);
        const eitshape::EvaluationGrid grid;
        CHECK(grid.cell_volume() == doctest::Approx(0.06 * 0.06 * 0.06));
        const auto err = eitshape::indicator_error(eitshape::latent_inside(model, small),
                                                   eitshape::latent_inside(model, large), grid);
        const double shell = 4.0 / 3.0 * std::numbers::pi * (0.216 - 0.125);
        CHECK(err.volume == doctest::Approx(shell).epsilon(0.05));
        // Lattice points in the shell, counted directly. Nodes lying on either sphere
        // (up to rounding) may go either way.
        std::size_t strictly_inside = 0;
        std::size_t on_boundary = 0;
        for (const Vec3& x : grid.nodes()) {
            const double r = x.norm();
            if (std::abs(r - 0.5) < 1e-9 || std::abs(r - 0.6) < 1e-9)
                ++on_boundary;
            else if (r > 0.5 && r < 0.6)
                ++strictly_inside;
        }
        CHECK(err.mismatches >= strictly_inside);
        CHECK(err.mismatches <= strictly_inside + on_boundary);

        const auto swapped = eitshape::indicator_error(eitshape::latent_inside(model, large),
                                                       eitshape::latent_inside(model, small), grid);
        CHECK(swapped.mismatches == err.mismatches);
        CHECK(eitshape::indicator_error(eitshape::latent_inside(model, small), eitshape::latent_inside(model, small), grid)
                  .mismatches == 0);
    }

    TEST_CASE("mesh and latent indicators agree away from the surface") {
        const LatentShapeModel model;
        const auto z = model.sphere(Vec3(0.1, 0.0, 0.0), 0.5);
        const auto mesh = eitshape::make_sphere_mesh(0.5, 3, Vec3(0.1, 0.0, 0.0));
        const eitshape::EvaluationGrid grid(eitshape::default_extraction_box(), 0.12);
        const auto err = eitshape::indicator_error(eitshape::latent_inside(model, z), eitshape::mesh_inside(mesh), grid);
        // Only nodes within the chordal gap of the surface may disagree.
        CHECK(err.mismatches <= 5);
    }

    TEST_CASE("winding number inside, outside and with reversed orientation") {
        const auto mesh = eitshape::make_sphere_mesh(0.5, 2);
        CHECK(eitshape::winding_number(mesh, Vec3(0.1, 0.0, 0.05)) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(std::abs(eitshape::winding_number(mesh, Vec3(0.9, 0.0, 0.0))) < 1e-9);
        CHECK(eitshape::winding_number(mesh.flipped(), Vec3::Zero()) == doctest::Approx(-1.0).epsilon(1e-9));
        CHECK(eitshape::mesh_inside(mesh.flipped())(Vec3::Zero()));
    }

    TEST_CASE("point-triangle distance in each region") {
        const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0);
        CHECK(eitshape::point_triangle_distance(Vec3(0.2, 0.2, 0.5), a, b, c) == doctest::Approx(0.5));
        CHECK(eitshape::point_triangle_distance(Vec3(-1, -1, 0), a, b, c) == doctest::Approx(std::sqrt(2.0)));
        CHECK(eitshape::point_triangle_distance(Vec3(2, 0, 0), a, b, c) == doctest::Approx(1.0));
        CHECK(eitshape::point_triangle_distance(Vec3(0.5, -1, 0), a, b, c) == doctest::Approx(1.0));
        CHECK(eitshape::point_triangle_distance(Vec3(1, 1, 0), a, b, c) == doctest::Approx(std::sqrt(0.5)));
    }

    TEST_CASE("Hausdorff distance") {
        const auto mesh = eitshape::make_sphere_mesh(0.5, 3);
        CHECK(eitshape::hausdorff_distance(mesh, mesh) < 1e-12);
        CHECK(eitshape::hausdorff_distance(mesh, mesh.translated(Vec3(0.05, 0, 0))) ==
              doctest::Approx(0.05).epsilon(0.2));
        const auto outer = eitshape::make_sphere_mesh(0.6, 3);
        const double d = eitshape::hausdorff_distance(mesh, outer);
        CHECK(d == doctest::Approx(0.1).epsilon(0.1));
        CHECK(eitshape::hausdorff_distance(outer, mesh) == d);
        CHECK_THROWS_AS(eitshape::hausdorff_distance(mesh, eitshape::TriangleMesh{}), eitshape::MeshError);
    }

    TEST_CASE("volume difference") {
        const auto mesh = eitshape::make_sphere_mesh(0.5, 3);
        CHECK(eitshape::volume_difference(mesh, mesh) == 0.0);
        CHECK(eitshape::volume_difference(mesh, mesh.translated(Vec3(0.1, -0.2, 0.05))) < 1e-10);
        const double expected = 4.0 / 3.0 * std::numbers::pi * (0.216 - 0.125);
        CHECK(eitshape::volume_difference(mesh, eitshape::make_sphere_mesh(0.6, 3)) ==
              doctest::Approx(expected).epsilon(0.02));
    }

    TEST_CASE("multiplicative noise statistics") {
        const Vector ones = Vector::Ones(100000);
        const Vector noisy = eitshape::add_noise(ones, 0.2, 9);
        const double mean = noisy.mean();
        const double sd = std::sqrt((noisy.array() - mean).square().sum() / static_cast<double>(noisy.size() - 1));
        CHECK(std::abs(mean - 1.0) < 0.002);
        CHECK(std::abs(sd - 0.2) < 0.005);

        CHECK(eitshape::add_noise(ones, 0.2, 9) == noisy);
        CHECK(eitshape::add_noise(ones, 0.2, 10) != noisy);
        const Vector f = Vector::LinSpaced(50, -1.0, 1.0);
        CHECK(eitshape::add_noise(f, 0.0, 3) == f);
        CHECK_THROWS_AS(eitshape::add_noise(f, -0.1, 3), eitshape::InvalidArgument);
    }
}
