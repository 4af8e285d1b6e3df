#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "eitshape/bem.hpp"
#include "eitshape/implicit_shape.hpp"
#include "eitshape/marching_cubes.hpp"
#include "eitshape/mesh.hpp"

namespace eitshape {

// Boundary voltages f = u|_S, one vector per current pattern, on the solver's
// measurement mesh.
struct MeasurementSet {
    std::vector<CurrentPattern> patterns;
    std::vector<Vector> data;
    double noise_level = 0.0;

    void validate(const TriangleMesh& sigma) const;
};

struct GradientEstimate {
    Vector vector;
    std::size_t panels_sampled = 0;
    bool full = false;
};

// 1/2 * sum_i w_i (u_i - f_i)^2 with the panel weights w_i.
double loss(const Vector& u_sigma, const Vector& f, const TriangleMesh& sigma);
double loss(std::span<const FieldSolution> forward, const MeasurementSet& measurements, const TriangleMesh& sigma);

// Discretization used inside the reconstruction loop.
struct PipelineSettings {
    double grid_spacing = 0.06;
    BoundingBox box = default_extraction_box();
    MarchingCubesOptions marching_cubes;
    AssemblyOptions assembly;
};

// Forward (and optionally adjoint) fields of one latent code against a measurement set.
struct ShapeEvaluation {
    TriangleMesh gamma;  // normals into the inclusion, as used by the solver
    std::vector<FieldSolution> forward;
    std::vector<FieldSolution> adjoint;
    double loss = 0.0;
    std::vector<std::string> warnings;
};

ShapeEvaluation evaluate_shape(const LatentShapeModel& model, const LatentCode& z, const TriangleMesh& sigma,
                               const MeasurementSet& measurements, const PipelineSettings& settings,
                               bool with_adjoint = true);

// Loss of the full pipeline: extraction, assembly, forward solves.
double pipeline_loss(const LatentShapeModel& model, const LatentCode& z, const TriangleMesh& sigma,
                     const MeasurementSet& measurements, const PipelineSettings& settings);

// Per-panel contributions w_p * sum_k (du_k/dn)(dw_k/dn) * grad_z f / |grad_x f|
// at the panel centroids; one column per panel.
Matrix gradient_panel_terms(const LatentShapeModel& model, const LatentCode& z, const TriangleMesh& gamma,
                            std::span<const FieldSolution> forward, std::span<const FieldSolution> adjoint);

GradientEstimate full_gradient(const LatentShapeModel& model, const LatentCode& z, const TriangleMesh& gamma,
                               std::span<const FieldSolution> forward, std::span<const FieldSolution> adjoint);

// Uniform sample of panels without replacement, rescaled by panels / sample_size;
// its expectation is exactly the full gradient.
GradientEstimate stochastic_gradient(const LatentShapeModel& model, const LatentCode& z, const TriangleMesh& gamma,
                                     std::span<const FieldSolution> forward, std::span<const FieldSolution> adjoint,
                                     std::size_t sample_size, std::uint64_t seed);

// Sampling step of stochastic_gradient on precomputed panel terms.
GradientEstimate sample_gradient(const Matrix& panel_terms, std::size_t sample_size, std::uint64_t seed);

}  // namespace eitshape
