#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "qmoebius/error.hpp"
#include "qmoebius/geometry.hpp"
#include "qmoebius/moebius.hpp"
#include "qmoebius/quaternion.hpp"

namespace qmoebius {

/// Quaternion over exact rationals. Test-side machinery: certifies values the
/// double-precision path is checked against. Doubles convert in exactly.
struct RationalQuaternion {
    using Rational = boost::multiprecision::cpp_rational;

    Rational t = 0, x = 0, y = 0, z = 0;

    RationalQuaternion() = default;
    RationalQuaternion(Rational t_) : t(std::move(t_)) {}
    RationalQuaternion(Rational t_, Rational x_, Rational y_, Rational z_)
        : t(std::move(t_)), x(std::move(x_)), y(std::move(y_)), z(std::move(z_)) {}

    static RationalQuaternion from(const Quaternion& q) {
        return {Rational(q.t), Rational(q.x), Rational(q.y), Rational(q.z)};
    }

    Quaternion to_quaternion() const {
        return {t.convert_to<double>(), x.convert_to<double>(), y.convert_to<double>(),
                z.convert_to<double>()};
    }

    friend RationalQuaternion operator+(const RationalQuaternion& p, const RationalQuaternion& q) {
        return {p.t + q.t, p.x + q.x, p.y + q.y, p.z + q.z};
    }
    friend RationalQuaternion operator-(const RationalQuaternion& p, const RationalQuaternion& q) {
        return {p.t - q.t, p.x - q.x, p.y - q.y, p.z - q.z};
    }
    friend RationalQuaternion operator*(const RationalQuaternion& p, const RationalQuaternion& q) {
        return {p.t * q.t - p.x * q.x - p.y * q.y - p.z * q.z,
                p.t * q.x + p.x * q.t + p.y * q.z - p.z * q.y,
                p.t * q.y - p.x * q.z + p.y * q.t + p.z * q.x,
                p.t * q.z + p.x * q.y - p.y * q.x + p.z * q.t};
    }
    friend bool operator==(const RationalQuaternion& p, const RationalQuaternion& q) {
        return p.t == q.t && p.x == q.x && p.y == q.y && p.z == q.z;
    }

    RationalQuaternion conjugate() const { return {t, -x, -y, -z}; }
    Rational norm_sq() const { return t * t + x * x + y * y + z * z; }

    RationalQuaternion inverse() const {
        const Rational n = norm_sq();
        if (n == 0) throw Error(errc::division_by_zero, "exact inverse of zero");
        RationalQuaternion c = conjugate();
        return {c.t / n, c.x / n, c.y / n, c.z / n};
    }
};

/// Exact evaluation of (q2-q1)^{-1} (q4-q1)(q4-q3)^{-1}(q2-q3).
inline RationalQuaternion exact_cross_ratio(const RationalQuaternion& q1,
                                            const RationalQuaternion& q2,
                                            const RationalQuaternion& q3,
                                            const RationalQuaternion& q4) {
    const RationalQuaternion* pts[4] = {&q1, &q2, &q3, &q4};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (*pts[i] == *pts[j])
                throw Error(errc::duplicate_points, "exact cross-ratio of coincident points");
    return (q2 - q1).inverse() * (q4 - q1) * (q4 - q3).inverse() * (q2 - q3);
}

/// Seeding, magnitude and degeneracy margin of every random generator;
/// equal configs produce identical streams.
struct RandomConfig {
    std::uint64_t seed = 0;
    double scale = 1.0;
    double pole_margin = 1e-3;
};

/// Deterministic random stream: a standard mt19937_64 with a fixed
/// bits-to-double mapping, so streams are reproducible across platforms.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : eng_(seed) {}
    explicit RandomStream(const RandomConfig& cfg) : eng_(cfg.seed) {}

    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (cached_) {
            cached_ = false;
            return cache_;
        }
        double u1 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        cache_ = r * std::sin(2.0 * M_PI * u2);
        cached_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

private:
    std::mt19937_64 eng_;
    bool cached_ = false;
    double cache_ = 0.0;
};

inline Quaternion random_quaternion(RandomStream& rng, double scale) {
    return {rng.uniform(-scale, scale), rng.uniform(-scale, scale), rng.uniform(-scale, scale),
            rng.uniform(-scale, scale)};
}

inline Quaternion random_unit_quaternion(RandomStream& rng) {
    for (;;) {
        const Quaternion q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
        const double n = norm(q);
        if (n > 1e-3) return q / n;
    }
}

inline Quaternion random_unit_imaginary(RandomStream& rng) {
    for (;;) {
        const Quaternion q{0, rng.normal(), rng.normal(), rng.normal()};
        const double n = norm(q);
        if (n > 1e-3) return q / n;
    }
}

/// Finite points, pairwise at least pole_margin apart.
inline std::vector<Quaternion> random_distinct_points(RandomStream& rng, const RandomConfig& cfg,
                                                      int count) {
    std::vector<Quaternion> pts;
    int attempts = 0;
    while (static_cast<int>(pts.size()) < count) {
        if (++attempts > 1000 * count)
            throw Error(errc::generator_exhausted, "could not sample distinct points");
        const Quaternion cand = random_quaternion(rng, cfg.scale);
        bool ok = true;
        for (const auto& p : pts) ok = ok && norm(cand - p) >= cfg.pole_margin;
        if (ok) pts.push_back(cand);
    }
    return pts;
}

/// Invertible matrix with entries at cfg.scale; resampled until the
/// normalized realization determinant exceeds pole_margin.
inline Moebius random_moebius(RandomStream& rng, const RandomConfig& cfg) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const MatGL2H m{random_quaternion(rng, cfg.scale), random_quaternion(rng, cfg.scale),
                        random_quaternion(rng, cfg.scale), random_quaternion(rng, cfg.scale)};
        const double s = m.entry_scale();
        if (s <= 0) continue;
        if (realization_det_magnitude(m) > cfg.pole_margin * s * s * s * s) return Moebius(m);
    }
    throw Error(errc::generator_exhausted, "could not sample an invertible matrix");
}

inline Moebius random_moebius(const RandomConfig& cfg) {
    RandomStream rng(cfg);
    return random_moebius(rng, cfg);
}

/// Orthonormal set of `count` vectors in R^4, drawn from the stream.
inline std::vector<Quaternion> random_orthonormal(RandomStream& rng, int count) {
    std::vector<Quaternion> basis;
    while (static_cast<int>(basis.size()) < count) {
        Quaternion v{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
        for (const auto& b : basis) v = v - dot(v, b) * b;
        const double n = norm(v);
        if (n > 0.1) basis.push_back(v / n);
    }
    return basis;
}

inline SphereK random_sphere(RandomStream& rng, const RandomConfig& cfg, int k) {
    SphereK s;
    s.center = random_quaternion(rng, cfg.scale);
    s.radius = rng.uniform(0.3 * cfg.scale, 1.2 * cfg.scale);
    s.dim = k;
    if (k < 3) {
        AffineSubspace carrier;
        carrier.base = s.center;
        carrier.basis = random_orthonormal(rng, k + 1);
        carrier.extended = false;
        s.carrier = carrier;
    }
    return s;
}

inline AffineSubspace random_affine(RandomStream& rng, const RandomConfig& cfg, int k) {
    AffineSubspace a;
    a.base = random_quaternion(rng, cfg.scale);
    a.basis = random_orthonormal(rng, k);
    a.extended = true;
    return a;
}

/// Random points on a sphere or affine locus; every output satisfies
/// membership at 1e-12.
inline std::vector<Quaternion> sample_locus(const Locus& L, int count, const RandomConfig& cfg) {
    RandomStream rng(cfg);
    std::vector<Quaternion> out;
    out.reserve(count);
    if (L.is_sphere()) {
        const SphereK& s = L.as_sphere();
        std::vector<Quaternion> basis;
        if (s.carrier) {
            basis = s.carrier->basis;
        } else {
            const auto& sb = detail::standard_basis();
            basis.assign(sb.begin(), sb.end());
        }
        for (int n = 0; n < count; ++n) {
            Quaternion dir{0, 0, 0, 0};
            double len = 0;
            while (len <= 1e-3) {
                dir = {0, 0, 0, 0};
                for (auto& b : basis) dir = dir + rng.normal() * b;
                len = norm(dir);
            }
            out.push_back(s.center + (s.radius / len) * dir);
        }
        return out;
    }
    if (L.is_affine()) {
        const AffineSubspace& a = L.as_affine();
        for (int n = 0; n < count; ++n) {
            Quaternion p = a.base;
            for (const auto& b : a.basis) p = p + rng.uniform(-1.5 * cfg.scale, 1.5 * cfg.scale) * b;
            out.push_back(p);
        }
        return out;
    }
    throw Error(errc::degenerate_input, "cannot sample a point locus");
}

} // namespace qmoebius
