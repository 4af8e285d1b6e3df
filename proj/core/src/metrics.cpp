#include "eitshape/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "eitshape/errors.hpp"

namespace eitshape {

EvaluationGrid::EvaluationGrid(const BoundingBox& box, double spacing) : box_(box), spacing_(spacing) {
    const ScalarGrid layout(box, spacing);
    nodes_.reserve(layout.node_count());
    for (int k = 0; k < layout.nodes(2); ++k)
        for (int j = 0; j < layout.nodes(1); ++j)
            for (int i = 0; i < layout.nodes(0); ++i) nodes_.push_back(layout.position(i, j, k));
    cell_volume_ = layout.spacing().prod();
}

InsideOracle latent_inside(const LatentShapeModel& model, const LatentCode& z) {
    model.check_dimension(z);
    return [&model, z](const Vec3& x) { return model.value(z, x) < 0.0; };
}

double winding_number(const TriangleMesh& mesh, const Vec3& x) {
    // Van Oosterom-Strackee solid angle per triangle.
    double total = 0.0;
    for (const Triangle& t : mesh.triangles()) {
        const Vec3 a = mesh.vertices()[t[0]] - x;
        const Vec3 b = mesh.vertices()[t[1]] - x;
        const Vec3 c = mesh.vertices()[t[2]] - x;
        const double la = a.norm();
        const double lb = b.norm();
        const double lc = c.norm();
        const double numerator = a.dot(b.cross(c));
        const double denominator = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
        total += 2.0 * std::atan2(numerator, denominator);
    }
    return total / (4.0 * std::numbers::pi);
}

InsideOracle mesh_inside(const TriangleMesh& mesh) {
    if (!mesh.is_watertight()) throw MeshError("inside test requires a watertight mesh");
    return [&mesh](const Vec3& x) { return std::abs(winding_number(mesh, x)) > 0.5; };
}

IndicatorError indicator_error(const InsideOracle& a, const InsideOracle& b, const EvaluationGrid& grid) {
    IndicatorError out;
    for (const Vec3& x : grid.nodes())
        if (a(x) != b(x)) ++out.mismatches;
    out.volume = static_cast<double>(out.mismatches) * grid.cell_volume();
    return out;
}

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    // Closest point by Voronoi-region classification.
    const Vec3 ab = b - a;
    const Vec3 ac = c - a;
    const Vec3 ap = p - a;
    const double d1 = ab.dot(ap);
    const double d2 = ac.dot(ap);
    if (d1 <= 0 && d2 <= 0) return ap.norm();
    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp);
    const double d4 = ac.dot(bp);
    if (d3 >= 0 && d4 <= d3) return bp.norm();
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) return (p - (a + (d1 / (d1 - d3)) * ab)).norm();
    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp);
    const double d6 = ac.dot(cp);
    if (d6 >= 0 && d5 <= d6) return cp.norm();
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) return (p - (a + (d2 / (d2 - d6)) * ac)).norm();
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
        return (p - (b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b))).norm();
    const double denom = 1.0 / (va + vb + vc);
    return (p - (a + ab * (vb * denom) + ac * (vc * denom))).norm();
}

namespace {

void require_usable(const TriangleMesh& mesh) {
    if (mesh.empty()) throw MeshError("Hausdorff distance needs non-empty meshes");
    if (!(mesh.total_area() > 0)) throw MeshError("Hausdorff distance needs a mesh with positive area");
}

double distance_to_mesh(const Vec3& p, const TriangleMesh& mesh, const std::vector<double>& radii) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < mesh.panel_count(); ++t) {
        // Bounding-sphere lower bound skips far triangles.
        if ((p - mesh.panels()[t].centroid).norm() - radii[t] >= best) continue;
        const auto [a, b, c] = mesh.corners(t);
        best = std::min(best, point_triangle_distance(p, a, b, c));
    }
    return best;
}

}  // namespace

double directed_hausdorff(const TriangleMesh& from, const TriangleMesh& to) {
    require_usable(from);
    require_usable(to);
    std::vector<double> radii(to.panel_count());
    for (std::size_t t = 0; t < to.panel_count(); ++t) {
        const auto corners = to.corners(t);
        double r = 0.0;
        for (const Vec3& v : corners) r = std::max(r, (v - to.panels()[t].centroid).norm());
        radii[t] = r;
    }
    double worst = 0.0;
    for (const Vec3& v : from.vertices()) worst = std::max(worst, distance_to_mesh(v, to, radii));
    for (const Panel& p : from.panels()) worst = std::max(worst, distance_to_mesh(p.centroid, to, radii));
    return worst;
}

double hausdorff_distance(const TriangleMesh& a, const TriangleMesh& b) {
    return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

double volume_difference(const TriangleMesh& a, const TriangleMesh& b) { return std::abs(a.volume() - b.volume()); }

Vector add_noise(const Vector& f, double delta, std::uint64_t seed) {
    if (!(delta >= 0)) throw InvalidArgument("noise level must be non-negative");
    if (delta == 0.0) return f;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector out(f.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) out[i] = (1.0 + delta * normal(rng)) * f[i];
    return out;
}

}  // namespace eitshape
