#include "eitshape/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace eitshape {

namespace {

constexpr double kInvFourPi = 1.0 / (4.0 * std::numbers::pi);

constexpr std::array<QuadraturePoint, 3> kRule3 = {{
    {2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0},
    {1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0},
    {1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0},
}};

// Dunavant degree 5.
constexpr double kA1 = 0.059715871789770;
constexpr double kB1 = 0.470142064105115;
constexpr double kW1 = 0.132394152788506;
constexpr double kA2 = 0.797426985353087;
constexpr double kB2 = 0.101286507323456;
constexpr double kW2 = 0.125939180544827;

constexpr std::array<QuadraturePoint, 7> kRule7 = {{
    {1.0 / 3.0, 1.0 / 3.0, 0.225},
    {kA1, kB1, kW1},
    {kB1, kA1, kW1},
    {kB1, kB1, kW1},
    {kA2, kB2, kW2},
    {kB2, kA2, kW2},
    {kB2, kB2, kW2},
}};

double longest_edge(const Vec3& a, const Vec3& b, const Vec3& c) {
    return std::sqrt(std::max({(b - a).squaredNorm(), (c - b).squaredNorm(), (a - c).squaredNorm()}));
}

void apply_rule(std::span<const QuadraturePoint> rule, const Vec3& a, const Vec3& b, const Vec3& c,
                double area, const Vec3& normal, const Vec3& x, PanelIntegral& sum) {
    for (const QuadraturePoint& q : rule) {
        const Vec3 y = q.a * a + q.b * b + (1.0 - q.a - q.b) * c;
        const Vec3 d = x - y;
        const double r2 = d.squaredNorm();
        const double r = std::sqrt(r2);
        const double w = q.weight * area * kInvFourPi;
        sum.single_layer += w / r;
        sum.double_layer += w * d.dot(normal) / (r2 * r);
    }
}

void integrate_adaptive(const Vec3& a, const Vec3& b, const Vec3& c, double area, const Vec3& normal,
                        const Vec3& x, int depth, const PanelQuadratureOptions& options, PanelIntegral& sum) {
    const double diameter = longest_edge(a, b, c);
    const double distance = (x - (a + b + c) / 3.0).norm();
    if (distance >= options.near_field_factor * diameter || depth >= options.max_subdivision_depth) {
        apply_rule(triangle_rule_7(), a, b, c, area, normal, x, sum);
        return;
    }
    const Vec3 ab = 0.5 * (a + b);
    const Vec3 bc = 0.5 * (b + c);
    const Vec3 ca = 0.5 * (c + a);
    const double quarter = 0.25 * area;
    integrate_adaptive(a, ab, ca, quarter, normal, x, depth + 1, options, sum);
    integrate_adaptive(ab, b, bc, quarter, normal, x, depth + 1, options, sum);
    integrate_adaptive(ca, bc, c, quarter, normal, x, depth + 1, options, sum);
    integrate_adaptive(ab, bc, ca, quarter, normal, x, depth + 1, options, sum);
}

}  // namespace

std::span<const QuadraturePoint> triangle_rule_3() { return kRule3; }
std::span<const QuadraturePoint> triangle_rule_7() { return kRule7; }

double inverse_distance_integral_in_plane(const std::array<Vec3, 3>& triangle, const Vec3& x) {
    const Vec3 normal = (triangle[1] - triangle[0]).cross(triangle[2] - triangle[0]).normalized();
    double total = 0.0;
    for (int e = 0; e < 3; ++e) {
        const Vec3& p = triangle[e];
        const Vec3& q = triangle[(e + 1) % 3];
        const double length = (q - p).norm();
        const Vec3 tangent = (q - p) / length;
        // In-plane normal of the edge pointing out of the triangle.
        const Vec3 outward = tangent.cross(normal);
        const double signed_distance = (p - x).dot(outward);
        const double d = std::abs(signed_distance);
        if (d < 1e-14 * length) continue;
        const double t_start = (p - x).dot(tangent);
        const double t_end = (q - x).dot(tangent);
        const double wedge = d * (std::asinh(t_end / d) - std::asinh(t_start / d));
        total += signed_distance > 0 ? wedge : -wedge;
    }
    return total;
}

PanelIntegral integrate_panel(const std::array<Vec3, 3>& triangle, const Vec3& normal, const Vec3& x,
                              const PanelQuadratureOptions& options) {
    const Vec3& a = triangle[0];
    const Vec3& b = triangle[1];
    const Vec3& c = triangle[2];
    const double area = 0.5 * (b - a).cross(c - a).norm();
    PanelIntegral sum;
    const double diameter = longest_edge(a, b, c);
    const double distance = (x - (a + b + c) / 3.0).norm();
    if (distance >= options.near_field_factor * diameter)
        apply_rule(triangle_rule_3(), a, b, c, area, normal, x, sum);
    else
        integrate_adaptive(a, b, c, area, normal, x, 0, options, sum);
    return sum;
}

PanelIntegral integrate_self_panel(const std::array<Vec3, 3>& triangle) {
    const Vec3 centroid = (triangle[0] + triangle[1] + triangle[2]) / 3.0;
    return {kInvFourPi * inverse_distance_integral_in_plane(triangle, centroid), 0.0};
}

}  // namespace eitshape
