#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "eitshape/spherical_harmonics.hpp"
#include "oracles.hpp"

using eitshape::Vec3;

TEST_SUITE("spherical_harmonics") {
    TEST_CASE("index layout follows degree then order") {
        CHECK(eitshape::harmonic_count(4) == 24);
        CHECK(eitshape::harmonic_index(1, -1) == 0);
        CHECK(eitshape::harmonic_index(1, 1) == 2);
        CHECK(eitshape::harmonic_index(2, -2) == 3);
        CHECK(eitshape::harmonic_index(4, 4) == 23);
    }

    TEST_CASE("real harmonics are orthonormal on the sphere") {
        const auto rule = oracle::sphere_rule(12, 24);
        for (int l1 = 0; l1 <= 4; ++l1)
            for (int m1 = -l1; m1 <= l1; ++m1)
                for (int l2 = 0; l2 <= 4; ++l2)
                    for (int m2 = -l2; m2 <= l2; ++m2) {
                        double sum = 0.0;
                        for (const auto& node : rule)
                            sum += node.weight * eitshape::real_harmonic(l1, m1, node.direction) *
                                   eitshape::real_harmonic(l2, m2, node.direction);
                        const double expected = (l1 == l2 && m1 == m2) ? 1.0 : 0.0;
                        CHECK(sum == doctest::Approx(expected).epsilon(1e-12).scale(1.0));
                    }
    }

    TEST_CASE("degree one harmonics are the normalized coordinates") {
        const Vec3 d = Vec3(0.3, -0.5, 0.8).normalized();
        const double c = std::sqrt(3.0 / (4.0 * std::numbers::pi));
        CHECK(eitshape::real_harmonic(1, -1, d) == doctest::Approx(c * d.y()));
        CHECK(eitshape::real_harmonic(1, 0, d) == doctest::Approx(c * d.z()));
        CHECK(eitshape::real_harmonic(1, 1, d) == doctest::Approx(c * d.x()));
    }

    TEST_CASE("tangential part of the ambient gradient is the surface gradient") {
        std::mt19937_64 rng(11);
        std::normal_distribution<double> normal;
        for (int trial = 0; trial < 20; ++trial) {
            const Vec3 d = Vec3(normal(rng), normal(rng), normal(rng)).normalized();
            for (int l = 1; l <= 4; ++l)
                for (int m = -l; m <= l; ++m) {
                    // Y(x/|x|) is constant along rays, so its gradient at |x| = 1 is the surface gradient.
                    auto radial_extension = [&](const Vec3& x) { return eitshape::real_harmonic(l, m, x.normalized()); };
                    const Vec3 g = eitshape::real_harmonic_gradient(l, m, d);
                    const Vec3 tangential = g - g.dot(d) * d;
                    constexpr double h = 1e-6;
                    for (int axis = 0; axis < 3; ++axis) {
                        const Vec3 e = Vec3::Unit(axis) * h;
                        const double fd = (radial_extension(d + e) - radial_extension(d - e)) / (2.0 * h);
                        CHECK(tangential[axis] == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
                    }
                }
        }
    }

    TEST_CASE("harmonic bound holds on a dense sample") {
        const auto rule = oracle::sphere_rule(40, 80);
        for (int l = 0; l <= 4; ++l)
            for (int m = -l; m <= l; ++m)
                for (const auto& node : rule)
                    CHECK(std::abs(eitshape::real_harmonic(l, m, node.direction)) <= eitshape::harmonic_bound(l) + 1e-12);
    }

    TEST_CASE("unsupported degrees are rejected") {
        CHECK_THROWS(eitshape::real_harmonic(5, 0, Vec3::UnitZ()));
        CHECK_THROWS(eitshape::real_harmonic(2, 3, Vec3::UnitZ()));
    }
}
