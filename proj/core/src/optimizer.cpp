#include "eitshape/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include "eitshape/errors.hpp"
#include "eitshape/format.hpp"

namespace eitshape {

void OptimizerConfig::validate() const {
    if (!(learning_rate > 0)) throw InvalidArgument("learning rate must be positive");
    if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1)) throw InvalidArgument("Adam betas must lie in [0, 1)");
    if (!(epsilon > 0)) throw InvalidArgument("Adam epsilon must be positive");
    if (max_iterations < 1) throw InvalidArgument("max iterations must be at least 1");
    if (!(sample_fraction > 0 && sample_fraction <= 1)) throw InvalidArgument("sample fraction must lie in (0, 1]");
    if (window < 1) throw InvalidArgument("convergence window must be at least 1");
    if (!(relative_tolerance >= 0)) throw InvalidArgument("relative tolerance must be non-negative");
}

Vector optimizer_increment(const Vector& gradient, AdamState& state, const OptimizerConfig& config) {
    if (!gradient.allFinite()) throw InvalidArgument("gradient has non-finite entries");
    if (config.rule == UpdateRule::sgd) {
        ++state.t;
        return -config.learning_rate * gradient;
    }
    if (state.t == 0) {
        state.m = Vector::Zero(gradient.size());
        state.v = Vector::Zero(gradient.size());
    }
    if (state.m.size() != gradient.size() || state.v.size() != gradient.size())
        throw InvalidArgument("Adam moments and gradient have different sizes");
    ++state.t;
    state.m = config.beta1 * state.m + (1.0 - config.beta1) * gradient;
    state.v = config.beta2 * state.v + (1.0 - config.beta2) * gradient.cwiseAbs2();
    const double m_correction = 1.0 - std::pow(config.beta1, state.t);
    const double v_correction = 1.0 - std::pow(config.beta2, state.t);
    const Vector m_hat = state.m / m_correction;
    const Vector v_hat = state.v / v_correction;
    return -config.learning_rate * (m_hat.array() / (v_hat.array().sqrt() + config.epsilon)).matrix();
}

LatentCode adam_step(const LatentShapeModel& model, const LatentCode& z, const Vector& gradient, AdamState& state,
                     const OptimizerConfig& config) {
    model.check_dimension(z);
    if (gradient.size() != z.size()) throw InvalidArgument("gradient and latent code have different sizes");
    return model.project(LatentCode(z.values() + optimizer_increment(gradient, state, config)));
}

namespace {

bool window_converged(const std::vector<IterationRecord>& records, const OptimizerConfig& config) {
    const auto n = static_cast<int>(records.size());
    if (n <= config.window) return false;
    double sum = 0.0;
    for (int k = n - config.window; k < n; ++k) {
        const double previous = records[k - 1].loss;
        const double change = std::abs(records[k].loss - previous);
        sum += previous > 0 ? change / previous : (change > 0 ? 1.0 : 0.0);
    }
    return sum / config.window < config.relative_tolerance;
}

std::uint64_t iteration_seed(std::uint64_t seed, int iteration) {
    // splitmix64 of (seed, iteration) so consecutive iterations use unrelated streams.
    std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(iteration) + 1);
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

ReconstructionTrace run_reconstruction(const ReconstructionProblem& problem, const LatentShapeModel& model,
                                       const LatentCode& z0, const OptimizerConfig& config,
                                       const IterationObserver& observer) {
    config.validate();
    problem.measurements.validate(problem.sigma);
    model.check_dimension(z0);
    if (!model.is_admissible(z0)) throw InvalidArgument("initial latent code is not admissible");

    ReconstructionTrace trace;
    trace.final_z = z0;
    AdamState state;
    LatentCode z = z0;
    using clock = std::chrono::steady_clock;

    for (int k = 0; k < config.max_iterations; ++k) {
        const auto start = clock::now();
        IterationRecord record;
        record.iteration = k;
        record.z = z;
        Vector step;
        try {
            ShapeEvaluation eval = evaluate_shape(model, z, problem.sigma, problem.measurements, problem.settings);
            for (auto& w : eval.warnings) trace.warnings.push_back("iteration " + std::to_string(k) + ": " + w);
            const std::size_t panels = eval.gamma.panel_count();
            std::size_t sample = panels;
            if (config.sample_fraction < 1.0)
                sample = std::clamp<std::size_t>(
                    static_cast<std::size_t>(std::llround(config.sample_fraction * static_cast<double>(panels))),
                    1, panels);
            const Matrix terms = gradient_panel_terms(model, z, eval.gamma, eval.forward, eval.adjoint);
            const GradientEstimate g = sample_gradient(terms, sample, iteration_seed(config.seed, k));
            record.loss = eval.loss;
            record.grad_norm = g.vector.norm();
            record.gamma_panels = panels;
            trace.final_z = z;
            trace.final_mesh = eval.gamma.flipped();
            trace.records.push_back(record);
            if (window_converged(trace.records, config)) {
                trace.converged = true;
                trace.stop_reason = "relative loss change below tolerance";
            } else if (k + 1 < config.max_iterations) {
                z = adam_step(model, z, g.vector, state, config);
            }
            trace.records.back().wall_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
            if (observer) observer(trace.records.back(), trace.final_mesh);
        } catch (const Error& e) {
            trace.error = "iteration " + std::to_string(k) + ": " + e.what();
            trace.stop_reason = "error";
            return trace;
        }
        if (trace.converged) return trace;
    }
    trace.stop_reason = "maximum iterations reached";
    return trace;
}

void write_trace_csv(std::ostream& out, const ReconstructionTrace& trace, bool record_timing) {
    const Eigen::Index d = trace.records.empty() ? trace.final_z.size() : trace.records.front().z.size();
    out << "iteration,loss,grad_norm,wall_ms";
    for (Eigen::Index i = 0; i < d; ++i) out << ",z_" << i;
    out << '\n';
    for (const IterationRecord& r : trace.records) {
        out << r.iteration << ',' << format_double(r.loss) << ',' << format_double(r.grad_norm) << ','
            << format_double(record_timing ? r.wall_ms : 0.0);
        for (Eigen::Index i = 0; i < r.z.size(); ++i) out << ',' << format_double(r.z[i]);
        out << '\n';
    }
}

std::string StepsizeReport::summary() const {
    std::ostringstream s;
    const char* label = verdict == StepsizeVerdict::zero_plateau ? "zero-plateau"
                        : verdict == StepsizeVerdict::converging ? "converging"
                                                                 : "non-convergent";
    s << "verdict=" << label << " burn_in=" << burn_in << " monotone_from=" << monotone_from
      << " trend_ratio=" << format_double(trend_ratio)
      << " final_running_mean=" << format_double(running_mean.empty() ? 0.0 : running_mean.back());
    return s.str();
}

StepsizeReport stepsize_diagnostic(const ReconstructionTrace& trace, int max_burn_in) {
    const auto n = static_cast<int>(trace.records.size());
    if (n < 10) throw InvalidArgument("stepsize diagnostic needs at least 10 iterations");
    StepsizeReport report;
    report.running_mean.resize(static_cast<std::size_t>(n));
    double sum = 0.0;
    double largest = 0.0;
    for (int k = 0; k < n; ++k) {
        const double g2 = trace.records[k].grad_norm * trace.records[k].grad_norm;
        largest = std::max(largest, g2);
        sum += g2;
        report.running_mean[k] = sum / (k + 1);
    }
    report.burn_in = std::min(max_burn_in, n / 4);
    report.monotone_from = n;
    for (int k = n - 1; k >= 1; --k) {
        if (report.running_mean[k] > report.running_mean[k - 1]) break;
        report.monotone_from = k - 1;
    }
    if (largest == 0.0) {
        report.verdict = StepsizeVerdict::zero_plateau;
        report.trend_ratio = 0.0;
        report.monotone_from = 0;
        return report;
    }
    const double reference = report.running_mean[report.burn_in];
    report.trend_ratio = report.running_mean.back() / reference;
    report.verdict = report.trend_ratio < 1.0 ? StepsizeVerdict::converging : StepsizeVerdict::non_convergent;
    return report;
}

}  // namespace eitshape
