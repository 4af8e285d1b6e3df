#include "eitshape/bem.hpp"

#include <atomic>
#include <cmath>
#include <numbers>

#include "eitshape/errors.hpp"
#include "eitshape/spherical_harmonics.hpp"

namespace eitshape {

namespace {

constexpr double kInvFourPi = 1.0 / (4.0 * std::numbers::pi);

std::atomic<std::size_t> g_factorizations{0};

double weighted_sum(const Vector& values, const TriangleMesh& mesh) {
    double sum = 0.0;
    for (std::size_t i = 0; i < mesh.panel_count(); ++i) sum += values[static_cast<Eigen::Index>(i)] * mesh.panels()[i].weight;
    return sum;
}

}  // namespace

double greens_kernel(const Vec3& x, const Vec3& y) {
    const double r = (x - y).norm();
    if (!(r > 0.0)) throw InvalidArgument("Green's function is singular at x = y");
    return kInvFourPi / r;
}

double greens_normal_derivative(const Vec3& x, const Vec3& y, const Vec3& n_y) {
    const Vec3 d = x - y;
    const double r = d.norm();
    if (!(r > 0.0)) throw InvalidArgument("Green's function derivative is singular at x = y");
    return kInvFourPi * d.dot(n_y) / (r * r * r);
}

void check_conservation(const CurrentPattern& pattern, const TriangleMesh& sigma) {
    if (pattern.values.size() != static_cast<Eigen::Index>(sigma.panel_count()))
        throw InvalidArgument("current pattern length does not match the measurement mesh");
    double net = 0.0;
    double magnitude = 0.0;
    for (std::size_t i = 0; i < sigma.panel_count(); ++i) {
        const double v = pattern.values[static_cast<Eigen::Index>(i)] * sigma.panels()[i].weight;
        net += v;
        magnitude += std::abs(v);
    }
    if (std::abs(net) > 1e-10 * magnitude)
        throw InvalidArgument("current pattern '" + pattern.label + "' violates current conservation");
}

CurrentPattern balanced_pattern(std::string label, Vector values, const TriangleMesh& sigma) {
    if (values.size() != static_cast<Eigen::Index>(sigma.panel_count()))
        throw InvalidArgument("current pattern length does not match the measurement mesh");
    const double mean = weighted_sum(values, sigma) / sigma.total_weight();
    values.array() -= mean;
    return {std::move(label), std::move(values)};
}

CurrentPattern harmonic_pattern(const TriangleMesh& sigma, int l, int m) {
    Vector values(static_cast<Eigen::Index>(sigma.panel_count()));
    for (std::size_t i = 0; i < sigma.panel_count(); ++i)
        values[static_cast<Eigen::Index>(i)] = real_harmonic(l, m, sigma.panels()[i].centroid.normalized());
    return balanced_pattern("Y" + std::to_string(l) + "," + std::to_string(m), std::move(values), sigma);
}

CurrentPattern cosine_pattern(const TriangleMesh& sigma) {
    Vector values(static_cast<Eigen::Index>(sigma.panel_count()));
    for (std::size_t i = 0; i < sigma.panel_count(); ++i)
        values[static_cast<Eigen::Index>(i)] = sigma.panels()[i].centroid.normalized().z();
    return balanced_pattern("cos", std::move(values), sigma);
}

std::vector<CurrentPattern> pattern_set(const TriangleMesh& sigma, std::string_view preset) {
    std::vector<CurrentPattern> patterns;
    if (preset == "single-cos") {
        patterns.push_back(cosine_pattern(sigma));
        return patterns;
    }
    int max_degree = 0;
    if (preset == "yl1")
        max_degree = 1;
    else if (preset == "yl12")
        max_degree = 2;
    else
        throw InvalidArgument("unknown current-pattern preset '" + std::string(preset) + "'");
    for (int l = 1; l <= max_degree; ++l)
        for (int m = -l; m <= l; ++m) patterns.push_back(harmonic_pattern(sigma, l, m));
    return patterns;
}

BieSystem::BieSystem(TriangleMesh gamma, TriangleMesh sigma, const AssemblyOptions& options)
    : gamma_(std::move(gamma)), sigma_(std::move(sigma)) {
    if (gamma_.empty() || sigma_.empty()) throw BemError("both boundary meshes must be non-empty");
    if (!(gamma_.signed_volume() < 0.0))
        throw BemError("inclusion mesh normals must point into the inclusion (negative signed volume)");
    if (!(sigma_.signed_volume() > 0.0))
        throw BemError("measurement mesh normals must point outward (positive signed volume)");
    assemble(options);
    factorize(options);
}

void BieSystem::assemble(const AssemblyOptions& options) {
    const Eigen::Index ng = gamma_size();
    const Eigen::Index ns = sigma_size();
    lhs_.setZero(ng + ns, ng + ns);
    rhs_sigma_.setZero(ng + ns, ns);

    const auto& gp = gamma_.panels();
    const auto& sp = sigma_.panels();

    auto check_separation = [&](const Panel& row, const Panel& col, const Vec3& x) {
        const double limit = options.separation_factor * std::max(row.diameter, col.diameter);
        if ((x - col.centroid).norm() < limit)
            throw BemError("inclusion and measurement surfaces are closer than " +
                           std::to_string(options.separation_factor) + " panel diameters");
    };

    // Columns outer so each source panel's corners are loaded once.
    for (Eigen::Index j = 0; j < ng; ++j) {
        const auto tri = gamma_.corners(static_cast<std::size_t>(j));
        const Vec3& normal = gp[j].normal;
        const double scale = gp[j].weight / gp[j].area;
        for (Eigen::Index i = 0; i < ng; ++i) {
            lhs_(i, j) = scale * (i == j ? integrate_self_panel(tri).single_layer
                                         : integrate_panel(tri, normal, gp[i].centroid, options.quadrature).single_layer);
        }
        for (Eigen::Index i = 0; i < ns; ++i) {
            const Vec3& x = sp[i].centroid;
            check_separation(sp[i], gp[j], x);
            lhs_(ng + i, j) = -scale * integrate_panel(tri, normal, x, options.quadrature).single_layer;
        }
    }
    for (Eigen::Index j = 0; j < ns; ++j) {
        const auto tri = sigma_.corners(static_cast<std::size_t>(j));
        const Vec3& normal = sp[j].normal;
        const double scale = sp[j].weight / sp[j].area;
        for (Eigen::Index i = 0; i < ng; ++i) {
            const Vec3& x = gp[i].centroid;
            check_separation(gp[i], sp[j], x);
            const PanelIntegral pi = integrate_panel(tri, normal, x, options.quadrature);
            lhs_(i, ng + j) = -scale * pi.double_layer;
            rhs_sigma_(i, j) = -scale * pi.single_layer;
        }
        for (Eigen::Index i = 0; i < ns; ++i) {
            const PanelIntegral pi = i == j ? integrate_self_panel(tri)
                                            : integrate_panel(tri, normal, sp[i].centroid, options.quadrature);
            lhs_(ng + i, ng + j) = scale * pi.double_layer + (i == j ? 0.5 : 0.0);
            rhs_sigma_(ng + i, j) = scale * pi.single_layer;
        }
    }
    if (!lhs_.allFinite() || !rhs_sigma_.allFinite()) throw BemError("non-finite matrix entries");
}

void BieSystem::factorize(const AssemblyOptions& options) {
    lu_.compute(lhs_);
    ++factorizations_;
    ++g_factorizations;
    const double rcond = lu_.rcond();
    if (!(rcond > 0.0) || !std::isfinite(rcond)) throw BemError("block system is singular");
    condition_ = 1.0 / rcond;
    if (condition_ > options.condition_warning)
        warnings_.push_back("ill-conditioned block system, condition estimate " + std::to_string(condition_));
}

Vector BieSystem::solve(const Vector& rhs) const {
    if (rhs.size() != size()) throw InvalidArgument("right-hand side has the wrong length");
    return lu_.solve(rhs);
}

FieldSolution BieSystem::solve_neumann(const Vector& neumann) const {
    if (neumann.size() != sigma_size()) throw InvalidArgument("Neumann data length does not match the measurement mesh");
    if (!neumann.allFinite()) throw InvalidArgument("Neumann data has non-finite entries");
    const Vector rhs = rhs_sigma_ * neumann;
    const Vector x = solve(rhs);
    const double rhs_norm = rhs.norm();
    FieldSolution out;
    out.relative_residual = rhs_norm > 0.0 ? (lhs_ * x - rhs).norm() / rhs_norm : (lhs_ * x).norm();
    if (!(out.relative_residual <= 1e-8))
        throw BemError("block solve residual " + std::to_string(out.relative_residual) + " exceeds 1e-8");
    out.flux_on_gamma = x.head(gamma_size());
    out.trace_on_sigma = x.tail(sigma_size());
    return out;
}

BieSystem assemble(const TriangleMesh& gamma, const TriangleMesh& sigma, const AssemblyOptions& options) {
    return BieSystem(gamma, sigma, options);
}

FieldSolution solve_forward(const BieSystem& system, const CurrentPattern& pattern) {
    check_conservation(pattern, system.sigma());
    return system.solve_neumann(pattern.values);
}

FieldSolution solve_adjoint(const BieSystem& system, const Vector& residual) {
    return system.solve_neumann(residual);
}

std::size_t total_factorizations() { return g_factorizations.load(); }

}  // namespace eitshape
