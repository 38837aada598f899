#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <ostream>

#include "qmoebius/error.hpp"
#include "qmoebius/tolerance.hpp"

namespace qmoebius {

/// Below this norm a quaternion counts as non-invertible. Far below any
/// meaningful magnitude; inversion is otherwise total on nonzero quaternions.
inline constexpr double kInversionZeroThreshold = 1e-300;

/// Element of the quaternion algebra, q = t + ix + jy + kz with
/// ij = k, jk = i, ki = j.
struct Quaternion {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Quaternion() = default;
    constexpr Quaternion(double t_) : t(t_) {}
    constexpr Quaternion(double t_, double x_, double y_, double z_) : t(t_), x(x_), y(y_), z(z_) {}

    friend constexpr Quaternion operator+(const Quaternion& p, const Quaternion& q) {
        return {p.t + q.t, p.x + q.x, p.y + q.y, p.z + q.z};
    }
    friend constexpr Quaternion operator-(const Quaternion& p, const Quaternion& q) {
        return {p.t - q.t, p.x - q.x, p.y - q.y, p.z - q.z};
    }
    friend constexpr Quaternion operator-(const Quaternion& q) { return {-q.t, -q.x, -q.y, -q.z}; }
    friend constexpr Quaternion operator*(double s, const Quaternion& q) {
        return {s * q.t, s * q.x, s * q.y, s * q.z};
    }
    friend constexpr Quaternion operator*(const Quaternion& q, double s) { return s * q; }
    friend constexpr Quaternion operator/(const Quaternion& q, double s) {
        return {q.t / s, q.x / s, q.y / s, q.z / s};
    }

    /// Hamilton product. The pairwise grouping makes the anti-homomorphism
    /// conj(pq) = conj(q) conj(p) hold bit-for-bit, not just approximately.
    friend constexpr Quaternion operator*(const Quaternion& p, const Quaternion& q) {
        return {p.t * q.t - p.x * q.x - p.y * q.y - p.z * q.z,
                (p.t * q.x + p.x * q.t) + (p.y * q.z - p.z * q.y),
                (p.t * q.y - p.x * q.z) + (p.y * q.t + p.z * q.x),
                (p.t * q.z + p.x * q.y) + (p.z * q.t - p.y * q.x)};
    }

    /// Exact field-level equality (IEEE ==, so -0 equals +0).
    friend constexpr bool operator==(const Quaternion& p, const Quaternion& q) {
        return p.t == q.t && p.x == q.x && p.y == q.y && p.z == q.z;
    }

    friend std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
        return os << "(" << q.t << ", " << q.x << ", " << q.y << ", " << q.z << ")";
    }
};

inline constexpr Quaternion quat_i{0, 1, 0, 0};
inline constexpr Quaternion quat_j{0, 0, 1, 0};
inline constexpr Quaternion quat_k{0, 0, 0, 1};

constexpr Quaternion mul(const Quaternion& p, const Quaternion& q) { return p * q; }
constexpr Quaternion conj(const Quaternion& q) { return {q.t, -q.x, -q.y, -q.z}; }
constexpr double re(const Quaternion& q) { return q.t; }
constexpr Quaternion im(const Quaternion& q) { return {0.0, q.x, q.y, q.z}; }
constexpr double norm_sq(const Quaternion& q) {
    return q.t * q.t + q.x * q.x + q.y * q.y + q.z * q.z;
}

/// Overflow/underflow-safe Euclidean norm.
inline double norm(const Quaternion& q) {
    return std::hypot(std::hypot(q.t, q.x), std::hypot(q.y, q.z));
}

constexpr double dot(const Quaternion& p, const Quaternion& q) {
    return p.t * q.t + p.x * q.x + p.y * q.y + p.z * q.z;
}

/// Cross product of the imaginary parts, returned as a pure imaginary quaternion.
constexpr Quaternion cross_im(const Quaternion& p, const Quaternion& q) {
    return {0.0, p.y * q.z - p.z * q.y, p.z * q.x - p.x * q.z, p.x * q.y - p.y * q.x};
}

/// pq - qp; zero exactly when the two commute, i.e. when one imaginary part
/// is a real multiple of the other. Equals 2 Im p x Im q.
constexpr Quaternion commutator(const Quaternion& p, const Quaternion& q) {
    return p * q - q * p;
}

/// q^{-1} = conj(q) / |q|^2. Dividing by |q| twice keeps intermediate
/// magnitudes in range for any |q| above the underflow guard.
inline Quaternion inv(const Quaternion& q) {
    const double n = norm(q);
    if (n <= kInversionZeroThreshold)
        throw Error(errc::division_by_zero, "cannot invert a (near-)zero quaternion");
    return conj(q) / n / n;
}

inline bool approx_equal(const Quaternion& p, const Quaternion& q,
                         const Tolerance& tol = global_tolerance()) {
    return norm(p - q) <= tol.abs + tol.rel * std::max(norm(p), norm(q));
}

inline bool approx_zero(const Quaternion& q, double scale = 1.0,
                        const Tolerance& tol = global_tolerance()) {
    return norm(q) <= tol.at_scale(scale);
}

/// Point of the extended quaternion line: a finite quaternion or the
/// point at infinity.
class ExtQuaternion {
public:
    ExtQuaternion() : finite_(true), q_{} {}
    ExtQuaternion(const Quaternion& q) : finite_(true), q_(q) {}
    ExtQuaternion(double t) : finite_(true), q_(t) {}

    static ExtQuaternion infinity() {
        ExtQuaternion e;
        e.finite_ = false;
        return e;
    }

    bool is_finite() const { return finite_; }
    bool is_infinity() const { return !finite_; }

    const Quaternion& value() const {
        if (!finite_) throw std::logic_error("value() called on the point at infinity");
        return q_;
    }

    friend std::ostream& operator<<(std::ostream& os, const ExtQuaternion& e) {
        if (e.is_infinity()) return os << "inf";
        return os << e.value();
    }

private:
    bool finite_;
    Quaternion q_;
};

inline ExtQuaternion ext_infinity() { return ExtQuaternion::infinity(); }

/// Infinity equals only infinity; finite values compare by the hybrid policy.
inline bool approx_equal(const ExtQuaternion& p, const ExtQuaternion& q,
                         const Tolerance& tol = global_tolerance()) {
    if (p.is_infinity() || q.is_infinity()) return p.is_infinity() == q.is_infinity();
    return approx_equal(p.value(), q.value(), tol);
}

/// 2x2 complex matrix, row-major. Images of quaternions have the
/// block pattern ((a, b), (-conj b, conj a)).
struct ComplexMat2 {
    std::array<std::complex<double>, 4> m{};

    std::complex<double>& operator()(int r, int c) { return m[2 * r + c]; }
    const std::complex<double>& operator()(int r, int c) const { return m[2 * r + c]; }

    friend ComplexMat2 operator*(const ComplexMat2& A, const ComplexMat2& B) {
        ComplexMat2 C;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                C(r, c) = A(r, 0) * B(0, c) + A(r, 1) * B(1, c);
        return C;
    }

    std::complex<double> det() const { return m[0] * m[3] - m[1] * m[2]; }
    std::complex<double> trace() const { return m[0] + m[3]; }
};

/// Algebra embedding of the quaternions into 2x2 complex matrices:
/// t + ix + jy + kz -> ((t - iz, -y - ix), (y - ix, t + iz)).
inline ComplexMat2 to_complex_matrix(const Quaternion& q) {
    using C = std::complex<double>;
    ComplexMat2 r;
    r(0, 0) = C(q.t, -q.z);
    r(0, 1) = C(-q.y, -q.x);
    r(1, 0) = C(q.y, -q.x);
    r(1, 1) = C(q.t, q.z);
    return r;
}

inline bool approx_equal(const ComplexMat2& A, const ComplexMat2& B,
                         const Tolerance& tol = global_tolerance()) {
    double scale = 0.0, diff = 0.0;
    for (int n = 0; n < 4; ++n) {
        scale = std::max({scale, std::abs(A.m[n]), std::abs(B.m[n])});
        diff = std::max(diff, std::abs(A.m[n] - B.m[n]));
    }
    return diff <= tol.at_scale(scale);
}

/// Conjugation q -> a q a^{-1}; preserves |q| and Re q.
inline Quaternion conj_by(const Quaternion& a, const Quaternion& q) { return a * q * inv(a); }

/// Rotation of the imaginary 3-space, stored as the canonical unit
/// quaternion representative of the quotient by real scalars.
/// Sign convention: t >= 0, and if t == 0 the first nonzero of x, y, z
/// is >= 0, so that a and -a yield the same representative.
class Rotation3 {
public:
    Rotation3() : unit_{1, 0, 0, 0} {}

    static Rotation3 identity() { return Rotation3(); }

    /// Canonical representative of a nonzero quaternion. Throws
    /// DivisionByZero for a ~ 0.
    static Rotation3 from(const Quaternion& a) {
        const double n = norm(a);
        if (n <= kInversionZeroThreshold)
            throw Error(errc::division_by_zero, "rotation from a (near-)zero quaternion");
        Quaternion u = a / n;
        if (u.t < 0 || (u.t == 0 && (u.x < 0 || (u.x == 0 && (u.y < 0 || (u.y == 0 && u.z < 0))))))
            u = -u;
        Rotation3 r;
        r.unit_ = u;
        return r;
    }

    const Quaternion& unit() const { return unit_; }

    friend Rotation3 compose(const Rotation3& r, const Rotation3& s) {
        return Rotation3::from(r.unit_ * s.unit_);
    }

private:
    Quaternion unit_;
};

inline Rotation3 rotation_from(const Quaternion& a) { return Rotation3::from(a); }

inline Quaternion rotate(const Rotation3& r, const Quaternion& v) {
    // unit quaternion: inverse is the conjugate
    return r.unit() * v * conj(r.unit());
}

inline bool approx_equal(const Rotation3& r, const Rotation3& s,
                         const Tolerance& tol = global_tolerance()) {
    return approx_equal(r.unit(), s.unit(), tol);
}

} // namespace qmoebius
