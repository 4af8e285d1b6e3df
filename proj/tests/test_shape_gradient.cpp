#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "eitshape/errors.hpp"
#include "eitshape/shape_gradient.hpp"

using eitshape::LatentCode;
using eitshape::LatentShapeModel;
using eitshape::MeasurementSet;
using eitshape::TriangleMesh;
using eitshape::Vec3;
using eitshape::Vector;

namespace {

// Noise-free data of a target shape computed with the solver's own discretization.
MeasurementSet matched_data(const LatentShapeModel& model, const LatentCode& target, const TriangleMesh& sigma,
                            const eitshape::PipelineSettings& settings) {
    MeasurementSet probe;
    probe.patterns = eitshape::pattern_set(sigma, "yl12");
    for (const auto& p : probe.patterns) probe.data.push_back(Vector::Zero(p.values.size()));
    const auto eval = eitshape::evaluate_shape(model, target, sigma, probe, settings, false);
    MeasurementSet out;
    out.patterns = probe.patterns;
    for (const auto& u : eval.forward) out.data.push_back(u.trace_on_sigma);
    return out;
}

}  // namespace

TEST_SUITE("shape_gradient") {
    TEST_CASE("loss values") {
        const auto sigma = eitshape::make_sphere_mesh(1.5, 3);
        const auto n = static_cast<Eigen::Index>(sigma.panel_count());
        std::mt19937_64 rng(1);
        std::normal_distribution<double> normal;
        Vector f(n);
        for (auto& v : f) v = normal(rng);
        CHECK(eitshape::loss(f, f, sigma) == 0.0);
        const double unit = eitshape::loss(f + Vector::Ones(n), f, sigma);
        CHECK(unit == doctest::Approx(0.5 * 4.0 * std::numbers::pi * 2.25).epsilon(1e-10));
        CHECK(unit == doctest::Approx(14.137).epsilon(5e-3));
        Vector r(n);
        for (auto& v : r) v = normal(rng);
        CHECK(eitshape::loss(f + 2.0 * r, f, sigma) == doctest::Approx(4.0 * eitshape::loss(f + r, f, sigma)));
        CHECK_THROWS_AS(eitshape::loss(Vector::Zero(3), f, sigma), eitshape::InvalidArgument);
    }

    TEST_CASE("measurement set validation") {
        const auto sigma = eitshape::make_sphere_mesh(1.5, 2);
        MeasurementSet m;
        CHECK_THROWS(m.validate(sigma));
        m.patterns = eitshape::pattern_set(sigma, "yl1");
        CHECK_THROWS(m.validate(sigma));
        for (std::size_t k = 0; k < 3; ++k) m.data.push_back(Vector::Zero(sigma.panel_count()));
        CHECK_NOTHROW(m.validate(sigma));
        m.noise_level = -0.1;
        CHECK_THROWS(m.validate(sigma));
        m.noise_level = 0.0;
        m.data[1] = Vector::Zero(5);
        CHECK_THROWS(m.validate(sigma));
    }

    TEST_CASE("exact data gives a zero gradient") {
        const LatentShapeModel model;
        const auto sigma = eitshape::make_sphere_mesh(1.5, 2);
        const eitshape::PipelineSettings settings;
        const LatentCode z = model.sphere(Vec3(0.02, 0, 0), 0.45);
        const auto data = matched_data(model, z, sigma, settings);
        const auto eval = eitshape::evaluate_shape(model, z, sigma, data, settings);
        CHECK(eval.loss == 0.0);
        const auto g = eitshape::full_gradient(model, z, eval.gamma, eval.forward, eval.adjoint);
        CHECK(g.vector.norm() == 0.0);
        CHECK(g.full);
        CHECK(g.panels_sampled == eval.gamma.panel_count());
    }

    TEST_CASE("centered spheres: center components vanish by symmetry") {
        const LatentShapeModel model;
        const auto sigma = eitshape::make_sphere_mesh(1.5, 3);
        const eitshape::PipelineSettings settings;
        const auto data = matched_data(model, model.sphere(Vec3::Zero(), 0.5), sigma, settings);
        const LatentCode z = model.sphere(Vec3::Zero(), 0.42);
        const auto eval = eitshape::evaluate_shape(model, z, sigma, data, settings);
        const Vector g = eitshape::full_gradient(model, z, eval.gamma, eval.forward, eval.adjoint).vector;
        CHECK(g[3] < 0.0);  // growing the iterate towards the target lowers the loss
        CHECK(g.head<3>().cwiseAbs().maxCoeff() <= 1e-3 * std::abs(g[3]));
    }

    TEST_CASE("gradient components match finite differences of the pipeline loss") {
        const LatentShapeModel model;
        const auto sigma = eitshape::make_sphere_mesh(1.5, 3);
        const eitshape::PipelineSettings settings;
        const auto data = matched_data(model, model.sphere(Vec3::Zero(), 0.5), sigma, settings);

        std::mt19937_64 rng(21);
        std::normal_distribution<double> normal;
        Vector v = model.sphere(Vec3(0.03 * normal(rng), 0.03 * normal(rng), 0.03 * normal(rng)), 0.44).values();
        Vector h(model.harmonic_count());
        for (auto& x : h) x = normal(rng);
        v.tail(h.size()) = 0.15 * h / h.lpNorm<1>();
        const LatentCode z(v);
        REQUIRE(model.is_admissible(z));

        const auto eval = eitshape::evaluate_shape(model, z, sigma, data, settings);
        const Vector g = eitshape::full_gradient(model, z, eval.gamma, eval.forward, eval.adjoint).vector;
        constexpr double step = 1e-3;
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            Vector up = v;
            Vector down = v;
            up[i] += step;
            down[i] -= step;
            const double fd = (eitshape::pipeline_loss(model, LatentCode(up), sigma, data, settings) -
                               eitshape::pipeline_loss(model, LatentCode(down), sigma, data, settings)) /
                              (2.0 * step);
            CAPTURE(i);
            CAPTURE(fd);
            CAPTURE(g[i]);
            // Components far below the gradient norm are compared on the norm's scale.
            CHECK(std::abs(fd - g[i]) <= 5e-2 * std::max(std::abs(fd), 0.1 * g.norm()));
        }
    }

    TEST_CASE("sampling: exhaustive sample, determinism and range checks") {
        std::mt19937_64 rng(3);
        std::normal_distribution<double> normal;
        eitshape::Matrix terms(6, 200);
        for (Eigen::Index j = 0; j < terms.cols(); ++j)
            for (Eigen::Index i = 0; i < terms.rows(); ++i) terms(i, j) = normal(rng);
        const Vector full = terms.rowwise().sum();
        CHECK(eitshape::sample_gradient(terms, 200, 5).vector == full);
        const auto a = eitshape::sample_gradient(terms, 20, 99);
        const auto b = eitshape::sample_gradient(terms, 20, 99);
        CHECK(a.vector == b.vector);
        CHECK(a.panels_sampled == 20);
        CHECK_FALSE(a.full);
        CHECK(eitshape::sample_gradient(terms, 20, 100).vector != a.vector);
        CHECK_THROWS_AS(eitshape::sample_gradient(terms, 0, 1), eitshape::InvalidArgument);
        CHECK_THROWS_AS(eitshape::sample_gradient(terms, 201, 1), eitshape::InvalidArgument);
    }

    TEST_CASE("sampling is unbiased on synthetic panel terms") {
        std::mt19937_64 rng(17);
        std::normal_distribution<double> normal;
        eitshape::Matrix terms(4, 500);
        for (Eigen::Index j = 0; j < terms.cols(); ++j)
            for (Eigen::Index i = 0; i < terms.rows(); ++i) terms(i, j) = 1.0 + normal(rng);
        const Vector full = terms.rowwise().sum();
        constexpr int draws = 10000;
        Vector mean = Vector::Zero(4);
        Vector second = Vector::Zero(4);
        for (int k = 0; k < draws; ++k) {
            const Vector g = eitshape::sample_gradient(terms, 50, static_cast<std::uint64_t>(k)).vector;
            mean += g;
            second += g.cwiseProduct(g);
        }
        mean /= draws;
        for (Eigen::Index i = 0; i < 4; ++i) {
            const double se = std::sqrt((second[i] / draws - mean[i] * mean[i]) / (draws - 1));
            CHECK(std::abs(mean[i] - full[i]) <= 3.0 * se);
        }
    }

    TEST_CASE("mismatched solutions are rejected") {
        const LatentShapeModel model;
        const auto gamma = eitshape::make_sphere_mesh(0.5, 1).flipped();
        std::vector<eitshape::FieldSolution> forward(1);
        forward[0].flux_on_gamma = Vector::Zero(5);
        CHECK_THROWS_AS(eitshape::full_gradient(model, model.sphere(Vec3::Zero(), 0.5), gamma, forward, forward),
                        eitshape::InvalidArgument);
        CHECK_THROWS_AS(eitshape::full_gradient(model, model.sphere(Vec3::Zero(), 0.5), gamma, forward, {}),
                        eitshape::InvalidArgument);
    }
}
