#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "eitshape/types.hpp"

namespace eitshape {

using Triangle = std::array<std::int32_t, 3>;

// Per-panel geometry derived from a triangle.
struct Panel {
    Vec3 centroid;
    Vec3 normal;  // unit, right-hand rule on the vertex order
    double area = 0.0;
    // Integration weight: area of the smooth surface patch the flat panel stands
    // for. Equal to `area` unless the mesh was given exact patch areas.
    double weight = 0.0;
    double diameter = 0.0;  // longest edge
};

// Triangle surface with cached panel geometry. Construction rejects
// out-of-range indices and zero-area triangles.
class TriangleMesh {
public:
    TriangleMesh() = default;
    TriangleMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles);

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<Triangle>& triangles() const { return triangles_; }
    const std::vector<Panel>& panels() const { return panels_; }
    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t panel_count() const { return triangles_.size(); }
    bool empty() const { return triangles_.empty(); }

    std::array<Vec3, 3> corners(std::size_t panel) const;

    double total_area() const;
    double total_weight() const;

    // Copy with per-panel integration weights (all positive).
    TriangleMesh with_panel_weights(const std::vector<double>& weights) const;
    // Signed volume by the divergence theorem; positive for outward normals.
    double signed_volume() const;
    double volume() const;

    // Every undirected edge is used by exactly two triangles, once in each direction.
    bool is_watertight() const;
    std::size_t edge_count() const;
    long euler_characteristic() const;

    TriangleMesh flipped() const;
    TriangleMesh translated(const Vec3& offset) const;

private:
    std::vector<Vec3> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<Panel> panels_;
};

// Icosphere: icosahedron refined `level` times by edge midpoints, projected onto
// the sphere. 20 * 4^level panels with outward normals; panel weights are the
// exact areas of the corresponding spherical triangles.
TriangleMesh make_sphere_mesh(double radius, int level, const Vec3& center = Vec3::Zero());

// ASCII OBJ with v and f records, 1-based indices, shortest round-trip decimals.
void write_obj(std::ostream& out, const TriangleMesh& mesh);
void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh);
TriangleMesh read_obj(std::istream& in);
TriangleMesh read_obj(const std::filesystem::path& path);

}  // namespace eitshape
