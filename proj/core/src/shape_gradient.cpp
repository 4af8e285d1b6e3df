#include "eitshape/shape_gradient.hpp"

#include <numeric>
#include <random>

#include "eitshape/errors.hpp"

namespace eitshape {

void MeasurementSet::validate(const TriangleMesh& sigma) const {
    if (patterns.empty()) throw InvalidArgument("measurement set has no current patterns");
    if (patterns.size() != data.size()) throw InvalidArgument("one data vector per current pattern is required");
    if (noise_level < 0) throw InvalidArgument("noise level must be non-negative");
    const auto n = static_cast<Eigen::Index>(sigma.panel_count());
    for (std::size_t k = 0; k < patterns.size(); ++k) {
        if (patterns[k].values.size() != n || data[k].size() != n)
            throw InvalidArgument("measurement vectors do not match the measurement mesh panel count");
    }
}

double loss(const Vector& u_sigma, const Vector& f, const TriangleMesh& sigma) {
    const auto n = static_cast<Eigen::Index>(sigma.panel_count());
    if (u_sigma.size() != n || f.size() != n) throw InvalidArgument("loss: vector length does not match panel count");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double r = u_sigma[i] - f[i];
        sum += sigma.panels()[static_cast<std::size_t>(i)].weight * r * r;
    }
    return 0.5 * sum;
}

double loss(std::span<const FieldSolution> forward, const MeasurementSet& measurements, const TriangleMesh& sigma) {
    if (forward.size() != measurements.data.size()) throw InvalidArgument("loss: pattern count mismatch");
    double total = 0.0;
    for (std::size_t k = 0; k < forward.size(); ++k) total += loss(forward[k].trace_on_sigma, measurements.data[k], sigma);
    return total;
}

ShapeEvaluation evaluate_shape(const LatentShapeModel& model, const LatentCode& z, const TriangleMesh& sigma,
                               const MeasurementSet& measurements, const PipelineSettings& settings,
                               bool with_adjoint) {
    measurements.validate(sigma);
    ShapeEvaluation out;
    out.gamma = extract_mesh(model, z, settings.grid_spacing, settings.box, settings.marching_cubes).flipped();
    const BieSystem system(out.gamma, sigma, settings.assembly);
    out.warnings = system.warnings();
    out.forward.reserve(measurements.patterns.size());
    for (const CurrentPattern& g : measurements.patterns) out.forward.push_back(solve_forward(system, g));
    out.loss = loss(out.forward, measurements, sigma);
    if (with_adjoint) {
        out.adjoint.reserve(out.forward.size());
        for (std::size_t k = 0; k < out.forward.size(); ++k)
            out.adjoint.push_back(solve_adjoint(system, out.forward[k].trace_on_sigma - measurements.data[k]));
    }
    return out;
}

double pipeline_loss(const LatentShapeModel& model, const LatentCode& z, const TriangleMesh& sigma,
                     const MeasurementSet& measurements, const PipelineSettings& settings) {
    return evaluate_shape(model, z, sigma, measurements, settings, false).loss;
}

Matrix gradient_panel_terms(const LatentShapeModel& model, const LatentCode& z, const TriangleMesh& gamma,
                            std::span<const FieldSolution> forward, std::span<const FieldSolution> adjoint) {
    if (forward.size() != adjoint.size() || forward.empty())
        throw InvalidArgument("forward and adjoint solutions must be paired per pattern");
    const auto n = static_cast<Eigen::Index>(gamma.panel_count());
    for (std::size_t k = 0; k < forward.size(); ++k) {
        if (forward[k].flux_on_gamma.size() != n || adjoint[k].flux_on_gamma.size() != n)
            throw InvalidArgument("field solutions were computed on a different inclusion mesh");
    }
    Matrix terms(model.latent_dim(), n);
    for (Eigen::Index p = 0; p < n; ++p) {
        const Panel& panel = gamma.panels()[static_cast<std::size_t>(p)];
        double product = 0.0;
        for (std::size_t k = 0; k < forward.size(); ++k)
            product += forward[k].flux_on_gamma[p] * adjoint[k].flux_on_gamma[p];
        const Vec3 gx = model.grad_x(z, panel.centroid);
        const double gx_norm = gx.norm();
        if (gx_norm < 1e-10) throw RegularityError("spatial gradient vanishes on the inclusion surface");
        terms.col(p) = (panel.weight * product / gx_norm) * model.grad_z(z, panel.centroid);
    }
    return terms;
}

GradientEstimate full_gradient(const LatentShapeModel& model, const LatentCode& z, const TriangleMesh& gamma,
                               std::span<const FieldSolution> forward, std::span<const FieldSolution> adjoint) {
    const Matrix terms = gradient_panel_terms(model, z, gamma, forward, adjoint);
    GradientEstimate out;
    out.vector = terms.rowwise().sum();
    out.panels_sampled = static_cast<std::size_t>(terms.cols());
    out.full = true;
    return out;
}

GradientEstimate sample_gradient(const Matrix& panel_terms, std::size_t sample_size, std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(panel_terms.cols());
    if (sample_size < 1 || sample_size > n)
        throw InvalidArgument("sample size must lie in [1, " + std::to_string(n) + "]");
    GradientEstimate out;
    out.panels_sampled = sample_size;
    out.full = sample_size == n;
    if (out.full) {
        out.vector = panel_terms.rowwise().sum();
        return out;
    }
    // Partial Fisher-Yates shuffle: the first sample_size entries are a uniform sample.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < sample_size; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(order[i], order[pick(rng)]);
    }
    out.vector = Vector::Zero(panel_terms.rows());
    for (std::size_t i = 0; i < sample_size; ++i) out.vector += panel_terms.col(static_cast<Eigen::Index>(order[i]));
    out.vector *= static_cast<double>(n) / static_cast<double>(sample_size);
    return out;
}

GradientEstimate stochastic_gradient(const LatentShapeModel& model, const LatentCode& z, const TriangleMesh& gamma,
                                     std::span<const FieldSolution> forward, std::span<const FieldSolution> adjoint,
                                     std::size_t sample_size, std::uint64_t seed) {
    return sample_gradient(gradient_panel_terms(model, z, gamma, forward, adjoint), sample_size, seed);
}

}  // namespace eitshape
