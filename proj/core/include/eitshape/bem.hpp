#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/LU>

#include "eitshape/mesh.hpp"
#include "eitshape/quadrature.hpp"
#include "eitshape/types.hpp"

namespace eitshape {

// Laplace fundamental solution 1 / (4 pi |x - y|).
double greens_kernel(const Vec3& x, const Vec3& y);
// Normal derivative in y: (x - y) . n_y / (4 pi |x - y|^3).
double greens_normal_derivative(const Vec3& x, const Vec3& y, const Vec3& n_y);

// Piecewise-constant Neumann data on the measurement surface, one value per panel.
struct CurrentPattern {
    std::string label;
    Vector values;
};

// Throws InvalidArgument unless the panel-weighted sum vanishes to 1e-10 of the
// panel-weighted absolute sum.
void check_conservation(const CurrentPattern& pattern, const TriangleMesh& sigma);

// Removes the panel-weighted mean so the pattern carries zero net current.
CurrentPattern balanced_pattern(std::string label, Vector values, const TriangleMesh& sigma);

// Real harmonic Y_lm of the panel-centroid direction, balanced.
CurrentPattern harmonic_pattern(const TriangleMesh& sigma, int l, int m);
// cos(theta) = z / |x| at the panel centroids.
CurrentPattern cosine_pattern(const TriangleMesh& sigma);
// Presets: "yl1" (3 patterns), "yl12" (8 patterns), "single-cos".
std::vector<CurrentPattern> pattern_set(const TriangleMesh& sigma, std::string_view preset);

// Unknowns of the block system: flux on the inclusion boundary and trace on the
// measurement boundary. The flux uses the normal pointing into the inclusion.
struct FieldSolution {
    Vector flux_on_gamma;
    Vector trace_on_sigma;
    double relative_residual = 0.0;
};

struct AssemblyOptions {
    PanelQuadratureOptions quadrature;
    // Panels of different surfaces must be this many diameters apart.
    double separation_factor = 2.0;
    // Condition numbers above this trigger a warning.
    double condition_warning = 1e12;
};

// Collocation discretization of the two-surface boundary integral system
//
//   [ S_GG        -K_GS ] [ du/dn on G ]   [ 1/2 I + K_GG   -S_GS ] [ 0 ]
//   [ -S_SG  1/2 I + K_SS ] [ u on S     ] = [ -K_SG           S_SS ] [ g ]
//
// with piecewise-constant densities and collocation at panel centroids. Normals
// are outward from the conducting region: into the inclusion on G, away from the
// origin on S. Integrals over a source panel are rescaled from its flat area to
// its weight, so meshes with exact patch areas integrate the curved surface.
// Only the S-columns of the right-hand block are stored because the G-part of
// the data vector is always zero. The left block is factorized once.
class BieSystem {
public:
    BieSystem(TriangleMesh gamma, TriangleMesh sigma, const AssemblyOptions& options = {});

    const TriangleMesh& gamma() const { return gamma_; }
    const TriangleMesh& sigma() const { return sigma_; }
    Eigen::Index gamma_size() const { return static_cast<Eigen::Index>(gamma_.panel_count()); }
    Eigen::Index sigma_size() const { return static_cast<Eigen::Index>(sigma_.panel_count()); }
    Eigen::Index size() const { return gamma_size() + sigma_size(); }

    const Matrix& lhs() const { return lhs_; }
    // Columns of the right-hand block that multiply the measurement-surface data.
    const Matrix& rhs_sigma_columns() const { return rhs_sigma_; }

    Vector solve(const Vector& rhs) const;
    // Solves with Neumann data on the measurement surface and zero Dirichlet data on G.
    FieldSolution solve_neumann(const Vector& neumann) const;

    double condition_estimate() const { return condition_; }
    const std::vector<std::string>& warnings() const { return warnings_; }
    std::size_t factorization_count() const { return factorizations_; }

private:
    void assemble(const AssemblyOptions& options);
    void factorize(const AssemblyOptions& options);

    TriangleMesh gamma_;
    TriangleMesh sigma_;
    Matrix lhs_;
    Matrix rhs_sigma_;
    Eigen::PartialPivLU<Matrix> lu_;
    double condition_ = 0.0;
    std::size_t factorizations_ = 0;
    std::vector<std::string> warnings_;
};

BieSystem assemble(const TriangleMesh& gamma, const TriangleMesh& sigma, const AssemblyOptions& options = {});

// Forward field for a balanced current pattern.
FieldSolution solve_forward(const BieSystem& system, const CurrentPattern& pattern);
// Adjoint field: same operator, Neumann data u - f on the measurement surface.
FieldSolution solve_adjoint(const BieSystem& system, const Vector& residual);

// Process-wide number of LU factorizations performed.
std::size_t total_factorizations();

}  // namespace eitshape
