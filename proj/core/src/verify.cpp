#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>

#include "eitshape/errors.hpp"
#include "eitshape/experiment.hpp"
#include "eitshape/format.hpp"
#include "eitshape/metrics.hpp"

namespace eitshape {

namespace {

VerificationCheck at_most(std::string name, double measured, double threshold) {
    return {std::move(name), measured, threshold, measured <= threshold};
}

double relative_l2(const Vector& computed, const Vector& exact, const TriangleMesh& mesh) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < mesh.panel_count(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        const double a = mesh.panels()[i].weight;
        num += a * (computed[k] - exact[k]) * (computed[k] - exact[k]);
        den += a * exact[k] * exact[k];
    }
    return std::sqrt(num / den);
}

// Concentric spheres a = 0.5, R = 1.5 with g = cos(theta): u|S = 1.344828 cos(theta).
VerificationReport verify_bem() {
    VerificationReport report{"bem", {}};
    constexpr double a = 0.5;
    constexpr double big_r = 1.5;
    const double a3 = a * a * a;
    const double coefficient = (big_r - a3 / (big_r * big_r)) / (1.0 + 2.0 * a3 / (big_r * big_r * big_r));
    double previous = 0.0;
    for (int level = 3; level <= 4; ++level) {
        const TriangleMesh sigma = make_sphere_mesh(big_r, level);
        const TriangleMesh gamma = make_sphere_mesh(a, level).flipped();
        const BieSystem system(gamma, sigma);
        const CurrentPattern g = cosine_pattern(sigma);
        const FieldSolution u = solve_forward(system, g);
        Vector exact(static_cast<Eigen::Index>(sigma.panel_count()));
        for (std::size_t i = 0; i < sigma.panel_count(); ++i) {
            const Vec3& x = sigma.panels()[i].centroid;
            exact[static_cast<Eigen::Index>(i)] = coefficient * x.z() / x.norm();
        }
        const double err = relative_l2(u.trace_on_sigma, exact, sigma);
        report.checks.push_back(at_most("trace_rel_l2_level" + std::to_string(level), err, 0.02));
        if (level == 4) report.checks.push_back(at_most("error_decrease_ratio", err / previous, 1.0 - 1e-12));
        previous = err;
    }
    return report;
}

struct GradientFixture {
    LatentShapeModel model;
    TriangleMesh sigma;
    MeasurementSet measurements;
    PipelineSettings settings;
    LatentCode z;
};

GradientFixture gradient_fixture() {
    GradientFixture fx{LatentShapeModel{}, make_sphere_mesh(1.5, 3), {}, {}, {}};
    Vector target = fx.model.sphere(Vec3(0.05, 0.0, -0.04), 0.6).values();
    target[fx.model.harmonic_slot(2, 0)] = 0.1;
    const ShapeEvaluation truth = [&] {
        MeasurementSet probe;
        probe.patterns = pattern_set(fx.sigma, "yl12");
        for (const auto& p : probe.patterns) probe.data.push_back(Vector::Zero(p.values.size()));
        return evaluate_shape(fx.model, LatentCode(target), fx.sigma, probe, fx.settings, false);
    }();
    fx.measurements.patterns = pattern_set(fx.sigma, "yl12");
    for (const auto& u : truth.forward) fx.measurements.data.push_back(u.trace_on_sigma);
    Vector z = fx.model.sphere(Vec3(0.0, 0.02, 0.0), 0.47).values();
    z[fx.model.harmonic_slot(1, 0)] = 0.03;
    z[fx.model.harmonic_slot(2, 1)] = -0.04;
    fx.z = LatentCode(z);
    return fx;
}

VerificationReport verify_gradient() {
    VerificationReport report{"gradient", {}};
    const GradientFixture fx = gradient_fixture();
    const ShapeEvaluation eval = evaluate_shape(fx.model, fx.z, fx.sigma, fx.measurements, fx.settings);
    const Vector grad = full_gradient(fx.model, fx.z, eval.gamma, eval.forward, eval.adjoint).vector;
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    constexpr double h = 1e-3;
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        Vector v(grad.size());
        for (auto& x : v) x = normal(rng);
        v.normalize();
        const double plus = pipeline_loss(fx.model, LatentCode(fx.z.values() + h * v), fx.sigma, fx.measurements,
                                          fx.settings);
        const double minus = pipeline_loss(fx.model, LatentCode(fx.z.values() - h * v), fx.sigma, fx.measurements,
                                           fx.settings);
        const double fd = (plus - minus) / (2.0 * h);
        const double analytic = grad.dot(v);
        // Directions almost orthogonal to the gradient have a tiny derivative whose
        // relative error is pure truncation noise; their error is scaled by 0.1 |grad|.
        worst = std::max(worst, std::abs(fd - analytic) / std::max(std::abs(fd), 0.1 * grad.norm()));
    }
    report.checks.push_back(at_most("max_directional_rel_error", worst, 5e-2));
    return report;
}

VerificationReport verify_unbiased() {
    VerificationReport report{"unbiased", {}};
    const GradientFixture fx = gradient_fixture();
    const ShapeEvaluation eval = evaluate_shape(fx.model, fx.z, fx.sigma, fx.measurements, fx.settings);
    const Matrix terms = gradient_panel_terms(fx.model, fx.z, eval.gamma, eval.forward, eval.adjoint);
    const Vector full = terms.rowwise().sum();
    const auto n = static_cast<std::size_t>(terms.cols());

    constexpr int draws = 10000;
    const std::size_t sample = std::max<std::size_t>(1, n / 10);
    Vector mean = Vector::Zero(full.size());
    Vector second = Vector::Zero(full.size());
    for (int k = 0; k < draws; ++k) {
        const Vector g = sample_gradient(terms, sample, 1000 + static_cast<std::uint64_t>(k)).vector;
        mean += g;
        second += g.cwiseProduct(g);
    }
    mean /= draws;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < full.size(); ++i) {
        const double var = std::max(0.0, second[i] / draws - mean[i] * mean[i]) * draws / (draws - 1.0);
        const double se = std::sqrt(var / draws);
        const double diff = std::abs(mean[i] - full[i]);
        worst = std::max(worst, se > 0 ? diff / se : (diff == 0 ? 0.0 : INFINITY));
    }
    report.checks.push_back(at_most("max_standard_errors", worst, 3.0));

    std::vector<double> log_s;
    std::vector<double> log_v;
    for (const double fraction : {0.01, 0.02, 0.05, 0.1}) {
        const std::size_t s = std::max<std::size_t>(1, static_cast<std::size_t>(fraction * static_cast<double>(n)));
        constexpr int reps = 2000;
        double total = 0.0;
        for (int k = 0; k < reps; ++k)
            total += (sample_gradient(terms, s, 50000 + static_cast<std::uint64_t>(k)).vector - full).squaredNorm();
        log_s.push_back(std::log(static_cast<double>(s)));
        log_v.push_back(std::log(total / reps));
    }
    const double ms = std::accumulate(log_s.begin(), log_s.end(), 0.0) / static_cast<double>(log_s.size());
    const double mv = std::accumulate(log_v.begin(), log_v.end(), 0.0) / static_cast<double>(log_v.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < log_s.size(); ++i) {
        sxy += (log_s[i] - ms) * (log_v[i] - mv);
        sxx += (log_s[i] - ms) * (log_s[i] - ms);
    }
    const double slope = sxy / sxx;
    report.checks.push_back(at_most("variance_slope_deviation", std::abs(slope + 1.0), 0.2));
    return report;
}

VerificationReport verify_metrics() {
    VerificationReport report{"metrics", {}};
    const TriangleMesh inner = make_sphere_mesh(0.5, 4);
    const TriangleMesh outer = make_sphere_mesh(0.6, 4);
    report.checks.push_back(at_most("hausdorff_deviation", std::abs(hausdorff_distance(inner, outer) - 0.1), 0.01));
    const double exact_volume = 4.0 / 3.0 * std::numbers::pi * (0.216 - 0.125);
    report.checks.push_back(at_most("volume_difference_rel_deviation",
                                    std::abs(volume_difference(inner, outer) - exact_volume) / exact_volume, 0.02));
    const LatentShapeModel model;
    const LatentCode z = model.sphere(Vec3::Zero(), 0.5);
    const IndicatorError same = indicator_error(latent_inside(model, z), latent_inside(model, z), EvaluationGrid());
    report.checks.push_back(at_most("indicator_identical", static_cast<double>(same.mismatches), 0.0));
    Vector f = Vector::LinSpaced(100, -1.0, 1.0);
    const Vector g = add_noise(f, 0.0, 3);
    double mismatched = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i)
        if (std::bit_cast<std::uint64_t>(f[i]) != std::bit_cast<std::uint64_t>(g[i])) mismatched += 1.0;
    report.checks.push_back(at_most("zero_noise_changed_entries", mismatched, 0.0));
    return report;
}

}  // namespace

bool VerificationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const VerificationCheck& c) { return c.passed; });
}

void VerificationReport::print(std::ostream& out) const {
    for (const auto& c : checks)
        out << suite << '.' << c.name << ": " << format_double(c.measured) << " (threshold "
            << format_double(c.threshold) << ") " << (c.passed ? "PASS" : "FAIL") << '\n';
}

std::vector<VerificationReport> verify(std::string_view suite) {
    std::vector<VerificationReport> out;
    const bool all = suite == "all";
    if (!all && suite != "bem" && suite != "gradient" && suite != "unbiased" && suite != "metrics")
        throw ConfigError("unknown verification suite '" + std::string(suite) + "'");
    if (all || suite == "metrics") out.push_back(verify_metrics());
    if (all || suite == "bem") out.push_back(verify_bem());
    if (all || suite == "unbiased") out.push_back(verify_unbiased());
    if (all || suite == "gradient") out.push_back(verify_gradient());
    return out;
}

}  // namespace eitshape
