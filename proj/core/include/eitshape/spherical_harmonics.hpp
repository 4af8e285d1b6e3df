#pragma once

#include "eitshape/types.hpp"

namespace eitshape {

inline constexpr int kMaxHarmonicDegree = 4;

// Number of real harmonics with 1 <= l <= max_degree.
constexpr int harmonic_count(int max_degree) { return (max_degree + 1) * (max_degree + 1) - 1; }

// Flat index of (l, m) among the harmonics with l >= 1, ordered by l then m = -l..l.
constexpr int harmonic_index(int l, int m) { return l * l - 1 + (m + l); }

// Orthonormal real spherical harmonic Y_lm evaluated at a unit direction.
// Supported degrees are 0..4.
double real_harmonic(int l, int m, const Vec3& direction);

// Ambient gradient of the Cartesian polynomial that equals Y_lm on the unit sphere.
// Project onto the tangent plane to get the surface gradient.
Vec3 real_harmonic_gradient(int l, int m, const Vec3& direction);

// Uniform bound |Y_lm| <= sqrt((2l+1)/(4 pi)) from the addition theorem.
double harmonic_bound(int l);

}  // namespace eitshape
