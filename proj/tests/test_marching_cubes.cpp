#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "eitshape/errors.hpp"
#include "eitshape/marching_cubes.hpp"
#include "oracles.hpp"

using eitshape::BoundingBox;
using eitshape::LatentShapeModel;
using eitshape::Vec3;

TEST_SUITE("marching_cubes") {
    TEST_CASE("sphere of radius 0.5 at spacing 0.06") {
        const LatentShapeModel model;
        const auto z = model.sphere(Vec3::Zero(), 0.5);
        const auto mesh = eitshape::extract_mesh(model, z, 0.06);
        const double exact = 4.0 / 3.0 * std::numbers::pi * 0.125;
        CHECK(std::abs(mesh.volume() - exact) / exact < 0.015);
        for (const Vec3& v : mesh.vertices()) {
            CHECK(v.norm() >= 0.44);
            CHECK(v.norm() <= 0.56);
            // |f| <= h/2 * max |grad f| with |grad f| = 1 for a sphere.
            CHECK(std::abs(model.value(z, v)) <= 0.03);
        }
        CHECK(mesh.is_watertight());
        CHECK(mesh.euler_characteristic() == 2);
        CHECK(mesh.signed_volume() > 0.0);
    }

    TEST_CASE("grid spacing is adjusted to fit the box exactly") {
        const eitshape::ScalarGrid grid(BoundingBox::cube(1.2), 0.07);
        for (int axis = 0; axis < 3; ++axis) {
            CHECK(grid.spacing()[axis] <= 0.07);
            CHECK(grid.origin()[axis] + (grid.nodes(axis) - 1) * grid.spacing()[axis] == doctest::Approx(1.2));
        }
    }

    TEST_CASE("random admissible shapes give closed genus-0 meshes") {
        const LatentShapeModel model;
        std::mt19937_64 rng(31);
        for (int trial = 0; trial < 100; ++trial) {
            const auto z = oracle::random_admissible(model, rng);
            const auto mesh = eitshape::extract_mesh(model, z, 0.06);
            CHECK(mesh.is_watertight());
            CHECK(mesh.euler_characteristic() == 2);
            CHECK(mesh.signed_volume() > 0.0);
        }
    }

    TEST_CASE("random fields with ambiguous faces stay watertight") {
        std::mt19937_64 rng(3);
        std::normal_distribution<double> normal;
        for (int trial = 0; trial < 50; ++trial) {
            eitshape::ScalarGrid grid(BoundingBox::cube(1.0), 0.25);
            for (int k = 0; k < grid.nodes(2); ++k)
                for (int j = 0; j < grid.nodes(1); ++j)
                    for (int i = 0; i < grid.nodes(0); ++i) {
                        const bool boundary = i == 0 || j == 0 || k == 0 || i == grid.nodes(0) - 1 ||
                                              j == grid.nodes(1) - 1 || k == grid.nodes(2) - 1;
                        grid.at(i, j, k) = boundary ? 1.0 : normal(rng);
                    }
            const auto mesh = eitshape::marching_cubes(grid);
            if (mesh.empty()) continue;
            CHECK(mesh.is_watertight());
            CHECK(mesh.signed_volume() > 0.0);
        }
    }

    TEST_CASE("extraction is deterministic") {
        const LatentShapeModel model;
        std::mt19937_64 rng(8);
        const auto z = oracle::random_admissible(model, rng);
        const auto a = eitshape::extract_mesh(model, z, 0.06);
        const auto b = eitshape::extract_mesh(model, z, 0.06);
        CHECK(a.vertices() == b.vertices());
        CHECK(a.triangles() == b.triangles());
    }

    TEST_CASE("empty or clipped level sets are errors") {
        const LatentShapeModel model(4, eitshape::AdmissibleSet{0.01, 5.0, 1.0, 0.5, 10.0});
        CHECK_THROWS_AS(eitshape::extract_mesh(model, model.sphere(Vec3::Zero(), 1.3), 0.06), eitshape::MeshError);
        CHECK_THROWS_AS(eitshape::extract_mesh(model, model.sphere(Vec3(0.03, 0.03, 0.03), 0.01), 0.06), eitshape::MeshError);
        CHECK_THROWS_AS(eitshape::extract_mesh(model, model.sphere(Vec3(0.9, 0, 0), 0.5), 0.06), eitshape::MeshError);
    }
}
