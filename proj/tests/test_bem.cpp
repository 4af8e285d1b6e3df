#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "eitshape/bem.hpp"
#include "eitshape/errors.hpp"
#include "eitshape/spherical_harmonics.hpp"
#include "oracles.hpp"

using eitshape::BieSystem;
using eitshape::TriangleMesh;
using eitshape::Vec3;
using eitshape::Vector;

namespace {

constexpr double kInner = 0.5;
constexpr double kOuter = 1.5;

// Concentric spheres at level 3 (1280 panels each), assembled once.
const BieSystem& concentric() {
    static const BieSystem system(eitshape::make_sphere_mesh(kInner, 3).flipped(), eitshape::make_sphere_mesh(kOuter, 3));
    return system;
}

double weighted_rel_l2(const Vector& computed, const Vector& exact, const TriangleMesh& mesh) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < mesh.panel_count(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        num += mesh.panels()[i].weight * std::pow(computed[k] - exact[k], 2);
        den += mesh.panels()[i].weight * exact[k] * exact[k];
    }
    return std::sqrt(num / den);
}

Vector cos_theta(const TriangleMesh& mesh) {
    Vector out(static_cast<Eigen::Index>(mesh.panel_count()));
    for (std::size_t i = 0; i < mesh.panel_count(); ++i) {
        const Vec3& c = mesh.panels()[i].centroid;
        out[static_cast<Eigen::Index>(i)] = c.z() / c.norm();
    }
    return out;
}

}  // namespace

TEST_SUITE("bem") {
    TEST_CASE("Green's function values and symmetry") {
        CHECK(eitshape::greens_kernel(Vec3::Zero(), Vec3::UnitX()) == doctest::Approx(0.0795775).epsilon(1e-6));
        CHECK(eitshape::greens_kernel(Vec3::Zero(), Vec3(0, 0.5, 0)) == doctest::Approx(0.1591549).epsilon(1e-6));
        std::mt19937_64 rng(4);
        std::normal_distribution<double> n;
        for (int i = 0; i < 50; ++i) {
            const Vec3 x(n(rng), n(rng), n(rng));
            const Vec3 y(n(rng), n(rng), n(rng));
            CHECK(eitshape::greens_kernel(x, y) == eitshape::greens_kernel(y, x));
        }
        CHECK_THROWS(eitshape::greens_kernel(Vec3::UnitZ(), Vec3::UnitZ()));
    }

    TEST_CASE("normal derivative of Green's function") {
        CHECK(eitshape::greens_normal_derivative(Vec3::UnitZ(), Vec3::Zero(), Vec3::UnitZ()) ==
              doctest::Approx(0.0795775).epsilon(1e-6));
        CHECK(eitshape::greens_normal_derivative(Vec3::UnitZ(), Vec3::Zero(), Vec3::UnitX()) == 0.0);
        const Vec3 x(0.3, -0.2, 0.9);
        const Vec3 y(-0.1, 0.4, 0.2);
        const Vec3 n = Vec3(1, 2, -1).normalized();
        CHECK(eitshape::greens_normal_derivative(x, y, -n) == -eitshape::greens_normal_derivative(x, y, n));
        CHECK_THROWS(eitshape::greens_normal_derivative(x, x, n));
    }

    TEST_CASE("block structure: positive self terms and row-sum identities") {
        const BieSystem& sys = concentric();
        const auto ng = sys.gamma_size();
        const auto ns = sys.sigma_size();
        for (Eigen::Index i = 0; i < ng; ++i) CHECK(sys.lhs()(i, i) > 0.0);
        // -K_GS rows: the double layer of S seen from inside is -1.
        const Vector inner_rows = sys.lhs().block(0, ng, ng, ns).rowwise().sum();
        CHECK(inner_rows.minCoeff() > 0.99);
        CHECK(inner_rows.maxCoeff() < 1.01);
        // 1/2 I + K_SS rows: the principal value on S is -1/2.
        const Vector own_rows = sys.lhs().block(ng, ng, ns, ns).rowwise().sum();
        CHECK(own_rows.cwiseAbs().maxCoeff() < 0.01);
    }

    TEST_CASE("factorization reproduces the operator") {
        const BieSystem& sys = concentric();
        std::mt19937_64 rng(6);
        std::normal_distribution<double> n;
        Vector x(sys.size());
        for (auto& v : x) v = n(rng);
        const Vector y = sys.solve(sys.lhs() * x);
        CHECK((y - x).norm() / x.norm() <= 1e-10);
        CHECK(sys.factorization_count() == 1);
        CHECK(sys.warnings().empty());
    }

    TEST_CASE("assembly is deterministic") {
        const auto gamma = eitshape::make_sphere_mesh(kInner, 2).flipped();
        const auto sigma = eitshape::make_sphere_mesh(kOuter, 2);
        const BieSystem a(gamma, sigma);
        const BieSystem b(gamma, sigma);
        CHECK(a.lhs() == b.lhs());
        CHECK(a.rhs_sigma_columns() == b.rhs_sigma_columns());
    }

    TEST_CASE("concentric spheres, g = cos(theta): trace and flux") {
        const BieSystem& sys = concentric();
        const auto u = eitshape::solve_forward(sys, eitshape::cosine_pattern(sys.sigma()));
        const oracle::ConcentricSolution exact{kInner, kOuter, 1};
        CHECK(exact.trace(kOuter) == doctest::Approx(1.344828).epsilon(1e-6));
        CHECK(exact.radial_derivative(kInner) == doctest::Approx(2.793103).epsilon(1e-6));
        CHECK(weighted_rel_l2(u.trace_on_sigma, exact.trace(kOuter) * cos_theta(sys.sigma()), sys.sigma()) <= 0.02);
        // Normals on G point into the inclusion: du/dn = -du/dr.
        CHECK(weighted_rel_l2(u.flux_on_gamma, -exact.radial_derivative(kInner) * cos_theta(sys.gamma()), sys.gamma()) <=
              0.05);
    }

    TEST_CASE("concentric spheres, harmonic patterns of degree one and two") {
        const BieSystem& sys = concentric();
        for (int l = 1; l <= 2; ++l)
            for (int m = -l; m <= l; ++m) {
                const auto g = eitshape::harmonic_pattern(sys.sigma(), l, m);
                const auto u = eitshape::solve_forward(sys, g);
                const oracle::ConcentricSolution exact{kInner, kOuter, l};
                Vector expected(sys.sigma_size());
                for (std::size_t i = 0; i < sys.sigma().panel_count(); ++i)
                    expected[static_cast<Eigen::Index>(i)] =
                        exact.trace(kOuter) * eitshape::real_harmonic(l, m, sys.sigma().panels()[i].centroid.normalized());
                CHECK(weighted_rel_l2(u.trace_on_sigma, expected, sys.sigma()) <= 0.02);
            }
    }

    TEST_CASE("error decreases under refinement") {
        double previous = INFINITY;
        const oracle::ConcentricSolution exact{kInner, kOuter, 1};
        for (int level = 2; level <= 3; ++level) {
            const BieSystem sys(eitshape::make_sphere_mesh(kInner, level).flipped(), eitshape::make_sphere_mesh(kOuter, level));
            const auto u = eitshape::solve_forward(sys, eitshape::cosine_pattern(sys.sigma()));
            const double err = weighted_rel_l2(u.trace_on_sigma, exact.trace(kOuter) * cos_theta(sys.sigma()), sys.sigma());
            CHECK(err < previous);
            previous = err;
        }
    }

    TEST_CASE("homogeneous data, adjoint identity and linearity") {
        const BieSystem& sys = concentric();
        const Vector zero = Vector::Zero(sys.sigma_size());
        CHECK(eitshape::solve_forward(sys, {"zero", zero}).trace_on_sigma.norm() == 0.0);
        CHECK(eitshape::solve_adjoint(sys, zero).flux_on_gamma.norm() == 0.0);

        const auto g = eitshape::cosine_pattern(sys.sigma());
        const auto forward = eitshape::solve_forward(sys, g);
        const auto adjoint = eitshape::solve_adjoint(sys, g.values);
        CHECK(forward.trace_on_sigma == adjoint.trace_on_sigma);
        CHECK(forward.flux_on_gamma == adjoint.flux_on_gamma);

        std::mt19937_64 rng(12);
        std::normal_distribution<double> n;
        Vector r1(sys.sigma_size());
        Vector r2(sys.sigma_size());
        for (auto& v : r1) v = n(rng);
        for (auto& v : r2) v = n(rng);
        const auto combined = eitshape::solve_adjoint(sys, 2.0 * r1 - 0.5 * r2);
        const auto a1 = eitshape::solve_adjoint(sys, r1);
        const auto a2 = eitshape::solve_adjoint(sys, r2);
        const Vector expected = 2.0 * a1.trace_on_sigma - 0.5 * a2.trace_on_sigma;
        CHECK((combined.trace_on_sigma - expected).norm() <= 1e-10 * expected.norm());
    }

    TEST_CASE("current patterns conserve charge") {
        const auto sigma = eitshape::make_sphere_mesh(kOuter, 3);
        for (const char* preset : {"yl1", "yl12", "single-cos"}) {
            for (const auto& p : eitshape::pattern_set(sigma, preset)) CHECK_NOTHROW(eitshape::check_conservation(p, sigma));
        }
        CHECK(eitshape::pattern_set(sigma, "yl1").size() == 3);
        CHECK(eitshape::pattern_set(sigma, "yl12").size() == 8);
        CHECK(eitshape::pattern_set(sigma, "single-cos").size() == 1);
        CHECK_THROWS(eitshape::pattern_set(sigma, "unknown"));

        const eitshape::CurrentPattern unbalanced{"ones", Vector::Ones(sigma.panel_count())};
        CHECK_THROWS_AS(eitshape::check_conservation(unbalanced, sigma), eitshape::InvalidArgument);
        CHECK_THROWS_AS(eitshape::solve_forward(concentric(), unbalanced), eitshape::InvalidArgument);
        const auto balanced = eitshape::balanced_pattern("ones", Vector::Ones(sigma.panel_count()), sigma);
        CHECK(balanced.values.cwiseAbs().maxCoeff() < 1e-12);
    }

    TEST_CASE("geometry errors") {
        const auto sigma = eitshape::make_sphere_mesh(kOuter, 2);
        // Wrong orientations.
        CHECK_THROWS_AS(BieSystem(eitshape::make_sphere_mesh(kInner, 2), sigma), eitshape::BemError);
        CHECK_THROWS_AS(BieSystem(eitshape::make_sphere_mesh(kInner, 2).flipped(), sigma.flipped()), eitshape::BemError);
        // Inclusion touching the measurement surface.
        CHECK_THROWS_AS(BieSystem(eitshape::make_sphere_mesh(1.45, 2).flipped(), sigma), eitshape::BemError);
    }

    TEST_CASE("ill-conditioning is reported as a warning") {
        eitshape::AssemblyOptions options;
        options.condition_warning = 1.0;
        const BieSystem sys(eitshape::make_sphere_mesh(kInner, 2).flipped(), eitshape::make_sphere_mesh(kOuter, 2), options);
        CHECK_FALSE(sys.warnings().empty());
        CHECK(sys.condition_estimate() > 1.0);
    }
}
