#pragma once

#include <array>
#include <span>

#include "eitshape/types.hpp"

namespace eitshape {

struct QuadraturePoint {
    double a;  // barycentric weight of the first corner
    double b;  // barycentric weight of the second corner
    double weight;  // fraction of the triangle area
};

// Degree-2 three-point rule (interior points).
std::span<const QuadraturePoint> triangle_rule_3();
// Degree-5 seven-point rule.
std::span<const QuadraturePoint> triangle_rule_7();

// Exact integral of 1/|y - x| over a flat triangle for x in the triangle's plane.
double inverse_distance_integral_in_plane(const std::array<Vec3, 3>& triangle, const Vec3& x);

// Integrals of the Laplace kernels over one source panel seen from a collocation point.
struct PanelIntegral {
    double single_layer = 0.0;  // int G(x, y) ds(y)
    double double_layer = 0.0;  // int dG/dn(y) (x, y) ds(y)
};

struct PanelQuadratureOptions {
    // Pairs closer than this many source diameters use adaptive subdivision.
    double near_field_factor = 2.0;
    int max_subdivision_depth = 4;
};

// Regular or near-singular panel integral (x must not lie on the panel).
PanelIntegral integrate_panel(const std::array<Vec3, 3>& triangle, const Vec3& normal, const Vec3& x,
                              const PanelQuadratureOptions& options = {});

// Self integral at the panel centroid: analytic single layer, zero double layer.
PanelIntegral integrate_self_panel(const std::array<Vec3, 3>& triangle);

}  // namespace eitshape
