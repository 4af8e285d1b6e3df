#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "eitshape/implicit_shape.hpp"
#include "eitshape/shape_gradient.hpp"

namespace eitshape {

enum class UpdateRule { adam, sgd };

struct OptimizerConfig {
    UpdateRule rule = UpdateRule::adam;
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int max_iterations = 400;
    // Fraction of inclusion panels sampled per gradient estimate; 1 means full gradient.
    double sample_fraction = 1.0;
    // Stop when the mean relative loss change over the last `window` iterations
    // drops below `relative_tolerance`.
    int window = 20;
    double relative_tolerance = 1e-5;
    std::uint64_t seed = 0;

    void validate() const;
};

struct AdamState {
    Vector m;
    Vector v;
    int t = 0;
};

// Bias-corrected Adam increment (or -lr * g for plain SGD); advances state.t.
Vector optimizer_increment(const Vector& gradient, AdamState& state, const OptimizerConfig& config);

// One update followed by projection onto the admissible latent set.
LatentCode adam_step(const LatentShapeModel& model, const LatentCode& z, const Vector& gradient, AdamState& state,
                     const OptimizerConfig& config);

struct IterationRecord {
    int iteration = 0;
    double loss = 0.0;
    double grad_norm = 0.0;
    double wall_ms = 0.0;
    std::size_t gamma_panels = 0;
    LatentCode z;
};

struct ReconstructionTrace {
    std::vector<IterationRecord> records;
    LatentCode final_z;
    TriangleMesh final_mesh;  // outward normals
    bool converged = false;
    std::string stop_reason;
    std::optional<std::string> error;
    std::vector<std::string> warnings;
};

struct ReconstructionProblem {
    TriangleMesh sigma;
    MeasurementSet measurements;
    PipelineSettings settings;
};

// Called after each evaluated iterate with its record and extracted (outward) mesh.
using IterationObserver = std::function<void(const IterationRecord&, const TriangleMesh&)>;

// Latent-space descent: extract, assemble, forward and adjoint solves, gradient
// estimate, update, until convergence or max_iterations evaluations. Stage
// failures end the run with the error recorded and the last valid state kept.
ReconstructionTrace run_reconstruction(const ReconstructionProblem& problem, const LatentShapeModel& model,
                                       const LatentCode& z0, const OptimizerConfig& config,
                                       const IterationObserver& observer = {});

// CSV with columns iteration, loss, grad_norm, wall_ms, z_0..z_{d-1}. wall_ms is
// written as 0 unless record_timing is set, so traces stay reproducible.
void write_trace_csv(std::ostream& out, const ReconstructionTrace& trace, bool record_timing = false);

enum class StepsizeVerdict { zero_plateau, converging, non_convergent };

struct StepsizeReport {
    std::vector<double> running_mean;  // (1/K) sum_{k<K} |g_k|^2 for K = 1..n
    int burn_in = 0;
    // Smallest K after which the running mean never increases (n if it never settles).
    int monotone_from = 0;
    double trend_ratio = 0.0;  // running mean at the end over its value at burn-in
    StepsizeVerdict verdict = StepsizeVerdict::converging;

    std::string summary() const;
};

// Empirical counterpart of the fixed-step bound on the averaged squared gradient
// norm. Needs at least 10 iterations.
StepsizeReport stepsize_diagnostic(const ReconstructionTrace& trace, int max_burn_in = 20);

}  // namespace eitshape
