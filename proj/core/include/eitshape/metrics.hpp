#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "eitshape/implicit_shape.hpp"
#include "eitshape/marching_cubes.hpp"
#include "eitshape/mesh.hpp"

namespace eitshape {

// Regular grid of evaluation nodes covering a box.
class EvaluationGrid {
public:
    explicit EvaluationGrid(const BoundingBox& box = default_extraction_box(), double spacing = 0.06);

    double spacing() const { return spacing_; }
    const BoundingBox& box() const { return box_; }
    const std::vector<Vec3>& nodes() const { return nodes_; }
    // Volume represented by one node (product of the realized cell sizes).
    double cell_volume() const { return cell_volume_; }

private:
    BoundingBox box_;
    double spacing_;
    double cell_volume_;
    std::vector<Vec3> nodes_;
};

using InsideOracle = std::function<bool(const Vec3&)>;

InsideOracle latent_inside(const LatentShapeModel& model, const LatentCode& z);
// Generalized winding number of a closed mesh, inside when it exceeds 1/2.
InsideOracle mesh_inside(const TriangleMesh& mesh);
double winding_number(const TriangleMesh& mesh, const Vec3& x);

struct IndicatorError {
    std::size_t mismatches = 0;  // nodes where the two indicators differ
    double volume = 0.0;         // mismatches * cell volume
};

IndicatorError indicator_error(const InsideOracle& a, const InsideOracle& b, const EvaluationGrid& grid);

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// Largest distance from samples of one mesh (vertices and panel centroids) to the
// other surface, maximized over both directions.
double hausdorff_distance(const TriangleMesh& a, const TriangleMesh& b);
double directed_hausdorff(const TriangleMesh& from, const TriangleMesh& to);

// |V_a - V_b| from divergence-theorem volumes; both meshes must be watertight.
double volume_difference(const TriangleMesh& a, const TriangleMesh& b);

// f * (1 + delta * xi) with independent standard normal xi per entry.
Vector add_noise(const Vector& f, double delta, std::uint64_t seed);

}  // namespace eitshape
