#pragma once

#include <cstddef>

#include "eitshape/types.hpp"

namespace eitshape {

// Optimization variable of the reconstruction: a flat real vector.
// Layout for the star-shaped family: (c_x, c_y, c_z, r0, z_{1,-1}, ..., z_{L,L}).
class LatentCode {
public:
    LatentCode() = default;
    explicit LatentCode(Vector values);

    const Vector& values() const { return values_; }
    Eigen::Index size() const { return values_.size(); }
    double operator[](Eigen::Index i) const { return values_[i]; }

    Vec3 center() const { return values_.head<3>(); }
    double radius() const { return values_[3]; }
    auto harmonics() const { return values_.tail(values_.size() - 4); }

    friend bool operator==(const LatentCode& a, const LatentCode& b) {
        return a.values_.size() == b.values_.size() && a.values_ == b.values_;
    }

private:
    Vector values_;
};

// Bounds that keep every member of the family star-shaped and well inside the
// measurement sphere. max_extent caps |c| + r0 * (1 + Ymax * sum|z_lm|), the
// largest possible distance of the surface from the origin.
struct AdmissibleSet {
    double min_radius = 0.1;
    double max_radius = 1.0;
    double max_center_offset = 0.3;
    double max_harmonic_l1 = 0.5;
    double max_extent = 1.1;
};

// Counts evaluations that hit the shape center, where the radial direction is undefined.
struct ShapeDiagnostics {
    std::size_t center_hits = 0;
};

// Star-shaped harmonic implicit surface family
//   f(z, x) = |x - c| - r0 * (1 + sum_lm z_lm Y_lm((x - c) / |x - c|)),
// negative inside and positive outside. It is an exact signed distance only
// when all harmonic coefficients vanish; the radial derivative is always 1, so
// |grad_x f| >= 1 away from the center.
class LatentShapeModel {
public:
    explicit LatentShapeModel(int max_degree = 4, AdmissibleSet bounds = {});

    int latent_dim() const { return 4 + harmonic_count_; }
    int max_degree() const { return max_degree_; }
    int harmonic_count() const { return harmonic_count_; }
    const AdmissibleSet& bounds() const { return bounds_; }

    LatentCode sphere(const Vec3& center, double radius) const;
    Eigen::Index harmonic_slot(int l, int m) const;

    // rho(omega; z), the surface radius along a unit direction.
    double radial_profile(const LatentCode& z, const Vec3& direction) const;

    double value(const LatentCode& z, const Vec3& x, ShapeDiagnostics* diagnostics = nullptr) const;
    Vec3 grad_x(const LatentCode& z, const Vec3& x) const;
    Vector grad_z(const LatentCode& z, const Vec3& x) const;

    // Largest distance of the zero level set from the origin (upper bound).
    double extent_bound(const LatentCode& z) const;
    bool is_admissible(const LatentCode& z, double tolerance = 1e-12) const;
    // Retraction onto the admissible set: clamp r0, shrink c, project the
    // harmonics onto the l1 ball, then shrink r0 until the extent bound holds.
    LatentCode project(const LatentCode& z) const;

    void check_dimension(const LatentCode& z) const;

private:
    int max_degree_;
    int harmonic_count_;
    double harmonic_bound_;
    AdmissibleSet bounds_;
};

// Euclidean projection of v onto {w : sum|w_i| <= radius}.
Vector project_l1_ball(const Vector& v, double radius);

}  // namespace eitshape
