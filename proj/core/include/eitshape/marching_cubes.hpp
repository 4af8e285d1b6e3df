#pragma once

#include <array>
#include <functional>
#include <vector>

#include "eitshape/implicit_shape.hpp"
#include "eitshape/mesh.hpp"
#include "eitshape/types.hpp"

namespace eitshape {

struct BoundingBox {
    Vec3 lower;
    Vec3 upper;

    static BoundingBox cube(double half_width) {
        return {Vec3::Constant(-half_width), Vec3::Constant(half_width)};
    }
};

// Default extraction box: inside the measurement sphere of radius 1.5.
inline BoundingBox default_extraction_box() { return BoundingBox::cube(1.2); }

// Scalar samples on a regular grid with nodes lower + (i, j, k) * spacing.
class ScalarGrid {
public:
    ScalarGrid(const BoundingBox& box, double requested_spacing);

    int nodes(int axis) const { return nodes_[axis]; }
    const Vec3& spacing() const { return spacing_; }
    const Vec3& origin() const { return origin_; }
    std::size_t node_count() const { return values_.size(); }

    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(nodes_[0]) *
                                                 (static_cast<std::size_t>(j) + static_cast<std::size_t>(nodes_[1]) * k);
    }
    Vec3 position(int i, int j, int k) const {
        return origin_ + Vec3(i * spacing_.x(), j * spacing_.y(), k * spacing_.z());
    }
    double& at(int i, int j, int k) { return values_[index(i, j, k)]; }
    double at(int i, int j, int k) const { return values_[index(i, j, k)]; }

    void sample(const std::function<double(const Vec3&)>& field);

private:
    std::array<int, 3> nodes_{};
    Vec3 origin_;
    Vec3 spacing_;
    std::vector<double> values_;
};

struct MarchingCubesOptions {
    // Edge crossings are kept at least this fraction of an edge away from grid
    // nodes so that no panel collapses to zero area.
    double edge_clamp = 0.01;
};

// Zero isosurface of the sampled field (negative inside). Face ambiguities are
// resolved with the asymptotic decider, so neighbouring cells always agree and
// the result is watertight; every iso-loop inside a cell becomes its own patch.
// Triangle normals point towards positive values.
TriangleMesh marching_cubes(const ScalarGrid& grid, const MarchingCubesOptions& options = {});

// Zero level set of f(z, .) on a grid of the given spacing. Throws MeshError when
// the level set is empty or reaches the boundary of the box.
TriangleMesh extract_mesh(const LatentShapeModel& model, const LatentCode& z, double spacing,
                          const BoundingBox& box = default_extraction_box(),
                          const MarchingCubesOptions& options = {});

}  // namespace eitshape
