#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "eitshape/mesh.hpp"
#include "eitshape/quadrature.hpp"

using eitshape::Vec3;

namespace {

using Tri = std::array<Vec3, 3>;

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Integral of 1/|y - x| over the triangle for x inside it, in polar coordinates
// about x: the integrand reduces to the distance to the boundary along each ray.
double polar_inverse_distance(const Tri& t, const Vec3& x, int rays) {
    const Vec3 n = (t[1] - t[0]).cross(t[2] - t[0]).normalized();
    const Vec3 e1 = (t[1] - t[0]).normalized();
    const Vec3 e2 = n.cross(e1);
    double total = 0.0;
    for (int k = 0; k < rays; ++k) {
        const double theta = 2.0 * std::numbers::pi * (k + 0.5) / rays;
        const Vec3 dir = std::cos(theta) * e1 + std::sin(theta) * e2;
        double reach = INFINITY;
        for (int e = 0; e < 3; ++e) {
            const Vec3 p = t[e];
            const Vec3 q = t[(e + 1) % 3];
            // Solve x + s dir = p + u (q - p) in the plane.
            const Vec3 edge = q - p;
            const double det = dir.cross(edge).dot(n);
            if (std::abs(det) < 1e-15) continue;
            const double s = (p - x).cross(edge).dot(n) / det;
            if (s > 0) reach = std::min(reach, s);
        }
        total += reach;
    }
    return total * 2.0 * std::numbers::pi / rays;
}

// Brute-force midpoint sum over a uniform split into n^2 sub-triangles.
eitshape::PanelIntegral brute_force(const Tri& t, const Vec3& normal, const Vec3& x, int n) {
    eitshape::PanelIntegral sum;
    const double area = 0.5 * (t[1] - t[0]).cross(t[2] - t[0]).norm() / (n * n);
    const Vec3 du = (t[1] - t[0]) / n;
    const Vec3 dv = (t[2] - t[0]) / n;
    auto add = [&](const Vec3& y) {
        const Vec3 d = x - y;
        const double r = d.norm();
        sum.single_layer += area / (4.0 * std::numbers::pi * r);
        sum.double_layer += area * d.dot(normal) / (4.0 * std::numbers::pi * r * r * r);
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; i + j < n; ++j) {
            const Vec3 base = t[0] + i * du + j * dv;
            add(base + (du + dv) / 3.0);
            if (i + j < n - 1) add(base + (2.0 * du + 2.0 * dv) / 3.0);
        }
    return sum;
}

}  // namespace

TEST_SUITE("quadrature") {
    TEST_CASE("triangle rules integrate monomials exactly up to their degree") {
        auto check_rule = [](std::span<const eitshape::QuadraturePoint> rule, int degree) {
            for (int i = 0; i <= degree; ++i)
                for (int j = 0; i + j <= degree; ++j) {
                    // Reference triangle (0,0), (1,0), (0,1): the corners carry weights a, b, 1-a-b.
                    double sum = 0.0;
                    for (const auto& q : rule) sum += q.weight * 0.5 * std::pow(q.b, i) * std::pow(1.0 - q.a - q.b, j);
                    const double exact = factorial(i) * factorial(j) / factorial(i + j + 2);
                    CHECK(sum == doctest::Approx(exact).epsilon(1e-13));
                }
        };
        check_rule(eitshape::triangle_rule_3(), 2);
        check_rule(eitshape::triangle_rule_7(), 5);
    }

    TEST_CASE("analytic in-plane integral matches the polar oracle") {
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int trial = 0; trial < 20; ++trial) {
            const Tri t = {Vec3(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng))};
            const Vec3 centroid = (t[0] + t[1] + t[2]) / 3.0;
            const Vec3 off_centre = 0.5 * t[0] + 0.3 * t[1] + 0.2 * t[2];
            for (const Vec3& x : {centroid, off_centre}) {
                const double exact = eitshape::inverse_distance_integral_in_plane(t, x);
                CHECK(exact == doctest::Approx(polar_inverse_distance(t, x, 200000)).epsilon(1e-7));
            }
        }
    }

    TEST_CASE("self panel integral: single layer positive, double layer zero") {
        const Tri t = {Vec3(0, 0, 0), Vec3(0.1, 0, 0), Vec3(0, 0.1, 0.02)};
        const auto self = eitshape::integrate_self_panel(t);
        CHECK(self.single_layer > 0.0);
        CHECK(self.double_layer == 0.0);
        const Vec3 centroid = (t[0] + t[1] + t[2]) / 3.0;
        CHECK(self.single_layer ==
              doctest::Approx(polar_inverse_distance(t, centroid, 200000) / (4.0 * std::numbers::pi)).epsilon(1e-7));
    }

    TEST_CASE("far and near panels agree with brute-force refinement") {
        const Tri t = {Vec3(0, 0, 0), Vec3(0.1, 0, 0), Vec3(0.02, 0.09, 0)};
        const Vec3 normal = Vec3::UnitZ();
        for (const Vec3& x : {Vec3(0.05, 0.03, 1.0), Vec3(0.05, 0.03, 0.12), Vec3(0.04, 0.03, 0.02),
                              Vec3(0.2, 0.05, 0.005)}) {
            const auto q = eitshape::integrate_panel(t, normal, x);
            const auto ref = brute_force(t, normal, x, 400);
            CHECK(q.single_layer == doctest::Approx(ref.single_layer).epsilon(2e-3));
            CHECK(q.double_layer == doctest::Approx(ref.double_layer).epsilon(2e-3).scale(1e-6));
        }
    }

    TEST_CASE("double layer over a closed surface measures the solid angle") {
        const auto sphere = eitshape::make_sphere_mesh(1.0, 3);
        for (const Vec3& x : {Vec3(0, 0, 0), Vec3(0.3, -0.2, 0.1), Vec3(2.0, 0.5, 0), Vec3(0, 0, 1.6)}) {
            double total = 0.0;
            for (std::size_t j = 0; j < sphere.panel_count(); ++j)
                total += eitshape::integrate_panel(sphere.corners(j), sphere.panels()[j].normal, x).double_layer;
            // Outward normals: -1 inside, 0 outside.
            CHECK(total == doctest::Approx(x.norm() < 1.0 ? -1.0 : 0.0).epsilon(1e-3).scale(1.0));
        }
    }
}
