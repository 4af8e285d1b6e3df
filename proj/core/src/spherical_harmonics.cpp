#include "eitshape/spherical_harmonics.hpp"

#include <cmath>
#include <numbers>

#include "eitshape/errors.hpp"

namespace eitshape {

namespace {

constexpr double pi = std::numbers::pi;

struct Harmonic {
    double value;
    Vec3 gradient;
};

Harmonic evaluate(int l, int m, const Vec3& w) {
    const double x = w.x();
    const double y = w.y();
    const double z = w.z();
    switch (l) {
    case 0:
        return {0.5 * std::sqrt(1.0 / pi), Vec3::Zero()};
    case 1: {
        const double c = std::sqrt(3.0 / (4.0 * pi));
        if (m == -1) return {c * y, Vec3(0, c, 0)};
        if (m == 0) return {c * z, Vec3(0, 0, c)};
        if (m == 1) return {c * x, Vec3(c, 0, 0)};
        break;
    }
    case 2: {
        const double a = 0.5 * std::sqrt(15.0 / pi);
        const double b = 0.25 * std::sqrt(5.0 / pi);
        const double c = 0.25 * std::sqrt(15.0 / pi);
        if (m == -2) return {a * x * y, a * Vec3(y, x, 0)};
        if (m == -1) return {a * y * z, a * Vec3(0, z, y)};
        if (m == 0) return {b * (3 * z * z - 1), b * Vec3(0, 0, 6 * z)};
        if (m == 1) return {a * x * z, a * Vec3(z, 0, x)};
        if (m == 2) return {c * (x * x - y * y), c * Vec3(2 * x, -2 * y, 0)};
        break;
    }
    case 3: {
        const double c3 = 0.25 * std::sqrt(35.0 / (2.0 * pi));
        const double c2a = 0.5 * std::sqrt(105.0 / pi);
        const double c2b = 0.25 * std::sqrt(105.0 / pi);
        const double c1 = 0.25 * std::sqrt(21.0 / (2.0 * pi));
        const double c0 = 0.25 * std::sqrt(7.0 / pi);
        const double q = 5 * z * z - 1;
        if (m == -3) return {c3 * (3 * x * x * y - y * y * y), c3 * Vec3(6 * x * y, 3 * x * x - 3 * y * y, 0)};
        if (m == -2) return {c2a * x * y * z, c2a * Vec3(y * z, x * z, x * y)};
        if (m == -1) return {c1 * y * q, c1 * Vec3(0, q, 10 * y * z)};
        if (m == 0) return {c0 * (5 * z * z * z - 3 * z), c0 * Vec3(0, 0, 15 * z * z - 3)};
        if (m == 1) return {c1 * x * q, c1 * Vec3(q, 0, 10 * x * z)};
        if (m == 2) return {c2b * z * (x * x - y * y), c2b * Vec3(2 * x * z, -2 * y * z, x * x - y * y)};
        if (m == 3) return {c3 * (x * x * x - 3 * x * y * y), c3 * Vec3(3 * x * x - 3 * y * y, -6 * x * y, 0)};
        break;
    }
    case 4: {
        const double c4a = 0.75 * std::sqrt(35.0 / pi);
        const double c4b = (3.0 / 16.0) * std::sqrt(35.0 / pi);
        const double c3 = 0.75 * std::sqrt(35.0 / (2.0 * pi));
        const double c2a = 0.75 * std::sqrt(5.0 / pi);
        const double c2b = (3.0 / 8.0) * std::sqrt(5.0 / pi);
        const double c1 = 0.75 * std::sqrt(5.0 / (2.0 * pi));
        const double c0 = (3.0 / 16.0) * std::sqrt(1.0 / pi);
        const double q = 7 * z * z - 1;
        const double s = 7 * z * z - 3;
        if (m == -4)
            return {c4a * (x * x * x * y - x * y * y * y),
                    c4a * Vec3(3 * x * x * y - y * y * y, x * x * x - 3 * x * y * y, 0)};
        if (m == -3)
            return {c3 * (3 * x * x * y * z - y * y * y * z),
                    c3 * Vec3(6 * x * y * z, 3 * x * x * z - 3 * y * y * z, 3 * x * x * y - y * y * y)};
        if (m == -2) return {c2a * x * y * q, c2a * Vec3(y * q, x * q, 14 * x * y * z)};
        if (m == -1) return {c1 * y * z * s, c1 * Vec3(0, z * s, 21 * y * z * z - 3 * y)};
        if (m == 0)
            return {c0 * (35 * z * z * z * z - 30 * z * z + 3), c0 * Vec3(0, 0, 140 * z * z * z - 60 * z)};
        if (m == 1) return {c1 * x * z * s, c1 * Vec3(z * s, 0, 21 * x * z * z - 3 * x)};
        if (m == 2)
            return {c2b * (x * x - y * y) * q,
                    c2b * Vec3(2 * x * q, -2 * y * q, 14 * z * (x * x - y * y))};
        if (m == 3)
            return {c3 * (x * x * x * z - 3 * x * y * y * z),
                    c3 * Vec3(3 * x * x * z - 3 * y * y * z, -6 * x * y * z, x * x * x - 3 * x * y * y)};
        if (m == 4)
            return {c4b * (x * x * x * x - 6 * x * x * y * y + y * y * y * y),
                    c4b * Vec3(4 * x * x * x - 12 * x * y * y, 4 * y * y * y - 12 * x * x * y, 0)};
        break;
    }
    default:
        break;
    }
    throw InvalidArgument("real harmonic (" + std::to_string(l) + ", " + std::to_string(m) +
                          ") is not supported");
}

}  // namespace

double real_harmonic(int l, int m, const Vec3& direction) { return evaluate(l, m, direction).value; }

Vec3 real_harmonic_gradient(int l, int m, const Vec3& direction) {
    return evaluate(l, m, direction).gradient;
}

double harmonic_bound(int l) { return std::sqrt((2.0 * l + 1.0) / (4.0 * pi)); }

}  // namespace eitshape
