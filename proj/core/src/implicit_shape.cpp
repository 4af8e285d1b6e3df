#include "eitshape/implicit_shape.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "eitshape/errors.hpp"
#include "eitshape/spherical_harmonics.hpp"

namespace eitshape {

namespace {

constexpr double kCenterTolerance = 1e-14;

}  // namespace

LatentCode::LatentCode(Vector values) : values_(std::move(values)) {
    if (values_.size() < 4) throw InvalidArgument("latent code needs at least center and radius");
    if (!values_.allFinite()) throw InvalidArgument("latent code has non-finite entries");
}

LatentShapeModel::LatentShapeModel(int max_degree, AdmissibleSet bounds)
    : max_degree_(max_degree),
      harmonic_count_(eitshape::harmonic_count(max_degree)),
      harmonic_bound_(max_degree > 0 ? eitshape::harmonic_bound(max_degree) : 0.0),
      bounds_(bounds) {
    if (max_degree < 0 || max_degree > kMaxHarmonicDegree)
        throw InvalidArgument("harmonic degree must be in [0, " + std::to_string(kMaxHarmonicDegree) + "]");
    if (!(bounds_.min_radius > 0 && bounds_.min_radius <= bounds_.max_radius))
        throw InvalidArgument("radius bounds must satisfy 0 < r_min <= r_max");
    if (bounds_.max_center_offset < 0 || bounds_.max_harmonic_l1 < 0)
        throw InvalidArgument("center and harmonic bounds must be non-negative");
    // Star-shapedness: 1 + sum z Y stays positive on the whole l1 ball.
    if (harmonic_bound_ * bounds_.max_harmonic_l1 >= 1.0)
        throw InvalidArgument("harmonic l1 bound allows a non-positive radial profile");
    const double worst = (bounds_.max_extent - bounds_.max_center_offset) /
                         (1.0 + harmonic_bound_ * bounds_.max_harmonic_l1);
    if (worst < bounds_.min_radius)
        throw InvalidArgument("extent bound is incompatible with the minimum radius");
}

LatentCode LatentShapeModel::sphere(const Vec3& center, double radius) const {
    Vector v = Vector::Zero(latent_dim());
    v.head<3>() = center;
    v[3] = radius;
    return LatentCode(std::move(v));
}

Eigen::Index LatentShapeModel::harmonic_slot(int l, int m) const {
    if (l < 1 || l > max_degree_ || m < -l || m > l)
        throw InvalidArgument("harmonic (" + std::to_string(l) + ", " + std::to_string(m) + ") out of range");
    return 4 + harmonic_index(l, m);
}

void LatentShapeModel::check_dimension(const LatentCode& z) const {
    if (z.size() != latent_dim())
        throw InvalidArgument("latent code has length " + std::to_string(z.size()) + ", model expects " +
                              std::to_string(latent_dim()));
}

double LatentShapeModel::radial_profile(const LatentCode& z, const Vec3& direction) const {
    check_dimension(z);
    double series = 1.0;
    for (int l = 1; l <= max_degree_; ++l)
        for (int m = -l; m <= l; ++m) series += z[4 + harmonic_index(l, m)] * real_harmonic(l, m, direction);
    return z.radius() * series;
}

double LatentShapeModel::value(const LatentCode& z, const Vec3& x, ShapeDiagnostics* diagnostics) const {
    check_dimension(z);
    const Vec3 p = x - z.center();
    const double r = p.norm();
    if (r < kCenterTolerance) {
        if (diagnostics) ++diagnostics->center_hits;
        return -z.radius();
    }
    return r - radial_profile(z, p / r);
}

Vec3 LatentShapeModel::grad_x(const LatentCode& z, const Vec3& x) const {
    check_dimension(z);
    const Vec3 p = x - z.center();
    const double r = p.norm();
    if (r < kCenterTolerance) throw RegularityError("spatial gradient requested at the shape center");
    const Vec3 w = p / r;
    Vec3 ambient = Vec3::Zero();
    for (int l = 1; l <= max_degree_; ++l)
        for (int m = -l; m <= l; ++m) ambient += z[4 + harmonic_index(l, m)] * real_harmonic_gradient(l, m, w);
    // d/dp of Y(p/|p|) is (I - w w^T) grad Y / |p|.
    const Vec3 tangential = (ambient - w * w.dot(ambient)) / r;
    const Vec3 g = w - z.radius() * tangential;
    if (g.norm() < 1e-10) throw RegularityError("spatial gradient vanishes");
    return g;
}

Vector LatentShapeModel::grad_z(const LatentCode& z, const Vec3& x) const {
    check_dimension(z);
    const Vec3 p = x - z.center();
    const double r = p.norm();
    if (r < kCenterTolerance) throw RegularityError("latent gradient requested at the shape center");
    const Vec3 w = p / r;
    Vector g(latent_dim());
    g.head<3>() = -grad_x(z, x);
    double series = 1.0;
    for (int l = 1; l <= max_degree_; ++l) {
        for (int m = -l; m <= l; ++m) {
            const int k = harmonic_index(l, m);
            const double y = real_harmonic(l, m, w);
            series += z[4 + k] * y;
            g[4 + k] = -z.radius() * y;
        }
    }
    g[3] = -series;
    return g;
}

double LatentShapeModel::extent_bound(const LatentCode& z) const {
    check_dimension(z);
    return z.center().norm() + z.radius() * (1.0 + harmonic_bound_ * z.harmonics().lpNorm<1>());
}

bool LatentShapeModel::is_admissible(const LatentCode& z, double tolerance) const {
    if (z.size() != latent_dim()) return false;
    if (z.radius() < bounds_.min_radius - tolerance || z.radius() > bounds_.max_radius + tolerance) return false;
    if (z.center().norm() > bounds_.max_center_offset + tolerance) return false;
    if (z.harmonics().lpNorm<1>() > bounds_.max_harmonic_l1 + tolerance) return false;
    return extent_bound(z) <= bounds_.max_extent + tolerance;
}

LatentCode LatentShapeModel::project(const LatentCode& z) const {
    check_dimension(z);
    Vector v = z.values();
    v[3] = std::clamp(v[3], bounds_.min_radius, bounds_.max_radius);
    const double offset = v.head<3>().norm();
    if (offset > bounds_.max_center_offset) v.head<3>() *= bounds_.max_center_offset / offset;
    if (harmonic_count_ > 0)
        v.tail(harmonic_count_) = project_l1_ball(v.tail(harmonic_count_), bounds_.max_harmonic_l1);
    const double growth = 1.0 + harmonic_bound_ * v.tail(harmonic_count_).lpNorm<1>();
    const double room = (bounds_.max_extent - v.head<3>().norm()) / growth;
    if (v[3] > room) v[3] = std::max(room, bounds_.min_radius);
    return LatentCode(std::move(v));
}

Vector project_l1_ball(const Vector& v, double radius) {
    if (radius < 0) throw InvalidArgument("l1 radius must be non-negative");
    if (v.lpNorm<1>() <= radius) return v;
    std::vector<double> magnitudes(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) magnitudes[i] = std::abs(v[i]);
    std::sort(magnitudes.begin(), magnitudes.end(), std::greater<>());
    double cumulative = 0.0;
    double threshold = 0.0;
    for (std::size_t k = 0; k < magnitudes.size(); ++k) {
        cumulative += magnitudes[k];
        const double candidate = (cumulative - radius) / static_cast<double>(k + 1);
        if (magnitudes[k] > candidate) threshold = candidate;
    }
    Vector out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double shrunk = std::max(std::abs(v[i]) - threshold, 0.0);
        out[i] = std::copysign(shrunk, v[i]);
    }
    return out;
}

}  // namespace eitshape
