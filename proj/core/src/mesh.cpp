#include "eitshape/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <unordered_map>

#include "eitshape/errors.hpp"
#include "eitshape/format.hpp"

namespace eitshape {

namespace {

std::uint64_t edge_key(std::int32_t a, std::int32_t b) {
    const auto lo = static_cast<std::uint64_t>(std::min(a, b));
    const auto hi = static_cast<std::uint64_t>(std::max(a, b));
    return (hi << 32) | lo;
}

}  // namespace

TriangleMesh::TriangleMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
    const auto n = static_cast<std::int32_t>(vertices_.size());
    panels_.reserve(triangles_.size());
    for (const Triangle& t : triangles_) {
        for (std::int32_t i : t)
            if (i < 0 || i >= n) throw MeshError("triangle references vertex " + std::to_string(i));
        const Vec3& a = vertices_[t[0]];
        const Vec3& b = vertices_[t[1]];
        const Vec3& c = vertices_[t[2]];
        const Vec3 cross = (b - a).cross(c - a);
        const double twice_area = cross.norm();
        if (!(twice_area > 0.0)) throw MeshError("degenerate triangle with zero area");
        Panel p;
        p.centroid = (a + b + c) / 3.0;
        p.normal = cross / twice_area;
        p.area = 0.5 * twice_area;
        p.weight = p.area;
        p.diameter = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
        panels_.push_back(p);
    }
}

std::array<Vec3, 3> TriangleMesh::corners(std::size_t panel) const {
    const Triangle& t = triangles_.at(panel);
    return {vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]};
}

double TriangleMesh::total_area() const {
    double sum = 0.0;
    for (const Panel& p : panels_) sum += p.area;
    return sum;
}

double TriangleMesh::total_weight() const {
    double sum = 0.0;
    for (const Panel& p : panels_) sum += p.weight;
    return sum;
}

TriangleMesh TriangleMesh::with_panel_weights(const std::vector<double>& weights) const {
    if (weights.size() != panels_.size()) throw InvalidArgument("one weight per panel is required");
    TriangleMesh out = *this;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) throw InvalidArgument("panel weights must be positive");
        out.panels_[i].weight = weights[i];
    }
    return out;
}

double TriangleMesh::signed_volume() const {
    double sum = 0.0;
    for (const Triangle& t : triangles_)
        sum += vertices_[t[0]].dot(vertices_[t[1]].cross(vertices_[t[2]]));
    return sum / 6.0;
}

double TriangleMesh::volume() const {
    if (!is_watertight()) throw MeshError("volume requires a watertight mesh");
    return std::abs(signed_volume());
}

bool TriangleMesh::is_watertight() const {
    if (triangles_.empty()) return false;
    // +1 for a < b traversal, -1 for b < a; a closed oriented surface balances every edge.
    std::unordered_map<std::uint64_t, std::pair<int, int>> edges;
    edges.reserve(triangles_.size() * 2);
    for (const Triangle& t : triangles_) {
        for (int k = 0; k < 3; ++k) {
            const std::int32_t a = t[k];
            const std::int32_t b = t[(k + 1) % 3];
            auto& [count, balance] = edges[edge_key(a, b)];
            ++count;
            balance += a < b ? 1 : -1;
        }
    }
    return std::all_of(edges.begin(), edges.end(),
                       [](const auto& e) { return e.second.first == 2 && e.second.second == 0; });
}

std::size_t TriangleMesh::edge_count() const {
    std::unordered_map<std::uint64_t, int> edges;
    edges.reserve(triangles_.size() * 2);
    for (const Triangle& t : triangles_)
        for (int k = 0; k < 3; ++k) ++edges[edge_key(t[k], t[(k + 1) % 3])];
    return edges.size();
}

long TriangleMesh::euler_characteristic() const {
    return static_cast<long>(vertices_.size()) - static_cast<long>(edge_count()) +
           static_cast<long>(triangles_.size());
}

TriangleMesh TriangleMesh::flipped() const {
    std::vector<Triangle> reversed = triangles_;
    for (Triangle& t : reversed) std::swap(t[1], t[2]);
    TriangleMesh out(vertices_, std::move(reversed));
    for (std::size_t i = 0; i < panels_.size(); ++i) out.panels_[i].weight = panels_[i].weight;
    return out;
}

TriangleMesh TriangleMesh::translated(const Vec3& offset) const {
    std::vector<Vec3> moved = vertices_;
    for (Vec3& v : moved) v += offset;
    TriangleMesh out(std::move(moved), triangles_);
    for (std::size_t i = 0; i < panels_.size(); ++i) out.panels_[i].weight = panels_[i].weight;
    return out;
}

TriangleMesh make_sphere_mesh(double radius, int level, const Vec3& center) {
    if (!(radius > 0)) throw InvalidArgument("sphere radius must be positive");
    if (level < 0) throw InvalidArgument("subdivision level must be non-negative");

    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> unit = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi}, {0, 1, phi},
        {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
    };
    for (Vec3& v : unit) v.normalize();
    std::vector<Triangle> faces = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
        {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
        {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1},
    };

    for (int pass = 0; pass < level; ++pass) {
        std::map<std::pair<std::int32_t, std::int32_t>, std::int32_t> midpoints;
        auto midpoint = [&](std::int32_t a, std::int32_t b) {
            const auto key = std::minmax(a, b);
            const auto it = midpoints.find(key);
            if (it != midpoints.end()) return it->second;
            unit.push_back((unit[a] + unit[b]).normalized());
            const auto index = static_cast<std::int32_t>(unit.size() - 1);
            midpoints.emplace(key, index);
            return index;
        };
        std::vector<Triangle> refined;
        refined.reserve(faces.size() * 4);
        for (const Triangle& f : faces) {
            const std::int32_t ab = midpoint(f[0], f[1]);
            const std::int32_t bc = midpoint(f[1], f[2]);
            const std::int32_t ca = midpoint(f[2], f[0]);
            refined.push_back({f[0], ab, ca});
            refined.push_back({f[1], bc, ab});
            refined.push_back({f[2], ca, bc});
            refined.push_back({ab, bc, ca});
        }
        faces = std::move(refined);
    }

    // Spherical excess of each unit triangle (Van Oosterom-Strackee solid angle).
    std::vector<double> weights;
    weights.reserve(faces.size());
    for (const Triangle& f : faces) {
        const Vec3& a = unit[f[0]];
        const Vec3& b = unit[f[1]];
        const Vec3& c = unit[f[2]];
        const double solid = 2.0 * std::atan2(a.dot(b.cross(c)), 1.0 + a.dot(b) + b.dot(c) + c.dot(a));
        weights.push_back(radius * radius * solid);
    }
    for (Vec3& v : unit) v = center + radius * v;
    return TriangleMesh(std::move(unit), std::move(faces)).with_panel_weights(weights);
}

void write_obj(std::ostream& out, const TriangleMesh& mesh) {
    for (const Vec3& v : mesh.vertices())
        out << "v " << format_double(v.x()) << ' ' << format_double(v.y()) << ' ' << format_double(v.z()) << '\n';
    for (const Triangle& t : mesh.triangles())
        out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    write_obj(out, mesh);
    if (!out) throw Error("failed writing " + path.string());
}

TriangleMesh read_obj(std::istream& in) {
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        std::istringstream fields(line);
        std::string tag;
        if (!(fields >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            Vec3 v;
            if (!(fields >> v.x() >> v.y() >> v.z()))
                throw MeshError("malformed vertex on OBJ line " + std::to_string(line_number));
            vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<std::int32_t> ids;
            std::string token;
            while (fields >> token) {
                // Accept "i", "i/t", "i/t/n"; only the position index matters.
                const long index = std::stol(token.substr(0, token.find('/')));
                ids.push_back(static_cast<std::int32_t>(index > 0 ? index - 1
                                                                  : static_cast<long>(vertices.size()) + index));
            }
            if (ids.size() < 3) throw MeshError("face with fewer than 3 vertices on OBJ line " +
                                                std::to_string(line_number));
            for (std::size_t k = 1; k + 1 < ids.size(); ++k) triangles.push_back({ids[0], ids[k], ids[k + 1]});
        }
    }
    return TriangleMesh(std::move(vertices), std::move(triangles));
}

TriangleMesh read_obj(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return read_obj(in);
}

}  // namespace eitshape
