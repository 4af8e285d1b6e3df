#include "eitshape/marching_cubes.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "eitshape/errors.hpp"

namespace eitshape {

namespace {

// Cube faces as corner ids (bit 0 = x, bit 1 = y, bit 2 = z), counter-clockwise
// when seen from outside the cell.
constexpr int kFaces[6][4] = {
    {0, 4, 6, 2}, {1, 3, 7, 5}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 2, 3, 1}, {4, 5, 7, 6},
};

bool inside(double v) { return v < 0.0; }

struct Segment {
    std::int32_t from;
    std::int32_t to;
};

class Extractor {
public:
    Extractor(const ScalarGrid& grid, const MarchingCubesOptions& options)
        : grid_(grid), options_(options), edge_vertex_(3 * grid.node_count(), -1) {}

    TriangleMesh run() {
        const int nx = grid_.nodes(0) - 1;
        const int ny = grid_.nodes(1) - 1;
        const int nz = grid_.nodes(2) - 1;
        std::vector<Segment> segments;
        std::vector<std::int32_t> loop;
        for (int k = 0; k < nz; ++k)
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) process_cell(i, j, k, segments, loop);
        return TriangleMesh(std::move(vertices_), std::move(triangles_));
    }

private:
    void process_cell(int i, int j, int k, std::vector<Segment>& segments, std::vector<std::int32_t>& loop) {
        double value[8];
        int negatives = 0;
        for (int c = 0; c < 8; ++c) {
            value[c] = grid_.at(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
            negatives += inside(value[c]) ? 1 : 0;
        }
        if (negatives == 0 || negatives == 8) return;

        segments.clear();
        face_masks_.clear();
        for (int f = 0; f < 6; ++f) face_segments(i, j, k, f, value, segments);

        // Chain directed segments into closed loops.
        std::vector<bool> used(segments.size(), false);
        for (std::size_t s = 0; s < segments.size(); ++s) {
            if (used[s]) continue;
            loop.clear();
            std::size_t current = s;
            while (true) {
                used[current] = true;
                loop.push_back(segments[current].from);
                const std::int32_t next_vertex = segments[current].to;
                if (next_vertex == segments[s].from) break;
                const auto it = std::find_if(segments.begin(), segments.end(), [&](const Segment& seg) {
                    return seg.from == next_vertex;
                });
                const auto next = static_cast<std::size_t>(it - segments.begin());
                if (it == segments.end() || used[next])
                    throw MeshError("inconsistent iso-contour in cell (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ", " + std::to_string(k) + ")");
                current = next;
            }
            triangulate(loop);
        }
    }

    void face_segments(int i, int j, int k, int face_id, const double (&value)[8], std::vector<Segment>& segments) {
        const int(&face)[4] = kFaces[face_id];
        // Crossings in counter-clockwise order; an entering crossing goes from a
        // positive corner to a negative one.
        std::int32_t vertex[4];
        bool entering[4];
        int count = 0;
        for (int e = 0; e < 4; ++e) {
            const int a = face[e];
            const int b = face[(e + 1) % 4];
            if (inside(value[a]) == inside(value[b])) continue;
            vertex[count] = edge_vertex(i, j, k, a, b, value[a], value[b]);
            mark_face(vertex[count], face_id);
            entering[count] = inside(value[b]);
            ++count;
        }
        if (count == 0) return;
        if (count == 2) {
            const int e = entering[0] ? 0 : 1;
            segments.push_back({vertex[e], vertex[1 - e]});
            return;
        }
        // Ambiguous face: diagonal corners share a sign. The bilinear interpolant
        // has a saddle whose value decides whether the negative corners connect.
        const double v0 = value[face[0]];
        const double v1 = value[face[1]];
        const double v2 = value[face[2]];
        const double v3 = value[face[3]];
        const double saddle = (v0 * v2 - v1 * v3) / (v0 + v2 - v1 - v3);
        const bool negatives_connected = inside(saddle);
        for (int c = 0; c < 4; ++c) {
            if (!entering[c]) continue;
            const int partner = negatives_connected ? (c + 3) % 4 : (c + 1) % 4;
            segments.push_back({vertex[c], vertex[partner]});
        }
    }

    std::int32_t edge_vertex(int i, int j, int k, int a, int b, double va, double vb) {
        if (a > b) {
            std::swap(a, b);
            std::swap(va, vb);
        }
        const int axis = (b ^ a) == 1 ? 0 : ((b ^ a) == 2 ? 1 : 2);
        const int ai = i + (a & 1);
        const int aj = j + ((a >> 1) & 1);
        const int ak = k + ((a >> 2) & 1);
        std::int32_t& slot = edge_vertex_[3 * grid_.index(ai, aj, ak) + axis];
        if (slot >= 0) return slot;
        double t = va / (va - vb);
        t = std::clamp(t, options_.edge_clamp, 1.0 - options_.edge_clamp);
        const Vec3 pa = grid_.position(ai, aj, ak);
        Vec3 pb = pa;
        pb[axis] += grid_.spacing()[axis];
        vertices_.push_back(pa + t * (pb - pa));
        slot = static_cast<std::int32_t>(vertices_.size() - 1);
        return slot;
    }

    void mark_face(std::int32_t vertex, int face_id) {
        for (auto& [v, mask] : face_masks_)
            if (v == vertex) {
                mask |= 1 << face_id;
                return;
            }
        face_masks_.emplace_back(vertex, 1 << face_id);
    }

    // Vertices on a common cell face may be joined by the neighbouring cell too, so
    // a diagonal between them could duplicate an edge.
    bool share_face(std::int32_t a, std::int32_t b) const {
        int ma = 0;
        int mb = 0;
        for (const auto& [v, mask] : face_masks_) {
            if (v == a) ma = mask;
            if (v == b) mb = mask;
        }
        return (ma & mb) != 0;
    }

    bool fan_is_safe(const std::vector<std::int32_t>& loop, std::size_t root) const {
        const std::size_t n = loop.size();
        for (std::size_t d = 2; d + 1 < n; ++d)
            if (share_face(loop[root], loop[(root + d) % n])) return false;
        return true;
    }

    void fan(const std::vector<std::int32_t>& loop, std::size_t root) {
        const std::size_t n = loop.size();
        for (std::size_t d = 1; d + 1 < n; ++d)
            triangles_.push_back({loop[root], loop[(root + d) % n], loop[(root + d + 1) % n]});
    }

    void triangulate(const std::vector<std::int32_t>& loop) {
        const std::size_t n = loop.size();
        if (n < 3) throw MeshError("iso-contour loop with fewer than three vertices");
        if (n == 3) {
            triangles_.push_back({loop[0], loop[1], loop[2]});
            return;
        }
        if (n == 4) {
            // Split a quad along its shorter safe diagonal.
            const bool safe02 = fan_is_safe(loop, 0);
            const bool safe13 = fan_is_safe(loop, 1);
            const double d02 = (vertices_[loop[0]] - vertices_[loop[2]]).squaredNorm();
            const double d13 = (vertices_[loop[1]] - vertices_[loop[3]]).squaredNorm();
            if (safe02 && (!safe13 || d02 <= d13)) return fan(loop, 0);
            if (safe13) return fan(loop, 1);
        } else {
            for (std::size_t root = 0; root < n; ++root)
                if (fan_is_safe(loop, root)) return fan(loop, root);
        }
        // No safe diagonal: fan around a new vertex at the loop centroid.
        Vec3 center = Vec3::Zero();
        for (const std::int32_t v : loop) center += vertices_[v];
        vertices_.push_back(center / static_cast<double>(n));
        const auto c = static_cast<std::int32_t>(vertices_.size() - 1);
        for (std::size_t v = 0; v < n; ++v) triangles_.push_back({c, loop[v], loop[(v + 1) % n]});
    }

    const ScalarGrid& grid_;
    MarchingCubesOptions options_;
    std::vector<std::int32_t> edge_vertex_;
    std::vector<Vec3> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<std::pair<std::int32_t, int>> face_masks_;
};

}  // namespace

ScalarGrid::ScalarGrid(const BoundingBox& box, double requested_spacing) {
    if (!(requested_spacing > 0)) throw InvalidArgument("grid spacing must be positive");
    origin_ = box.lower;
    for (int axis = 0; axis < 3; ++axis) {
        const double extent = box.upper[axis] - box.lower[axis];
        if (!(extent > 0)) throw InvalidArgument("bounding box must have positive extent");
        const int cells = std::max(1, static_cast<int>(std::ceil(extent / requested_spacing - 1e-9)));
        nodes_[axis] = cells + 1;
        spacing_[axis] = extent / cells;
    }
    values_.assign(static_cast<std::size_t>(nodes_[0]) * nodes_[1] * nodes_[2], 0.0);
}

void ScalarGrid::sample(const std::function<double(const Vec3&)>& field) {
    for (int k = 0; k < nodes_[2]; ++k)
        for (int j = 0; j < nodes_[1]; ++j)
            for (int i = 0; i < nodes_[0]; ++i) at(i, j, k) = field(position(i, j, k));
}

TriangleMesh marching_cubes(const ScalarGrid& grid, const MarchingCubesOptions& options) {
    if (!(options.edge_clamp >= 0 && options.edge_clamp < 0.5))
        throw InvalidArgument("edge clamp must lie in [0, 0.5)");
    return Extractor(grid, options).run();
}

TriangleMesh extract_mesh(const LatentShapeModel& model, const LatentCode& z, double spacing,
                          const BoundingBox& box, const MarchingCubesOptions& options) {
    model.check_dimension(z);
    ScalarGrid grid(box, spacing);
    grid.sample([&](const Vec3& x) { return model.value(z, x); });

    bool any_inside = false;
    for (int k = 0; k < grid.nodes(2); ++k) {
        for (int j = 0; j < grid.nodes(1); ++j) {
            for (int i = 0; i < grid.nodes(0); ++i) {
                if (!inside(grid.at(i, j, k))) continue;
                any_inside = true;
                const bool boundary = i == 0 || j == 0 || k == 0 || i == grid.nodes(0) - 1 ||
                                      j == grid.nodes(1) - 1 || k == grid.nodes(2) - 1;
                if (boundary) throw MeshError("level set reaches the extraction box boundary");
            }
        }
    }
    if (!any_inside) throw MeshError("level set is empty on the extraction grid");

    TriangleMesh mesh = marching_cubes(grid, options);
    if (!mesh.is_watertight()) throw MeshError("extracted mesh is not watertight");
    return mesh;
}

}  // namespace eitshape
