#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <ostream>

#include "qmoebius/error.hpp"
#include "qmoebius/quaternion.hpp"
#include "qmoebius/tolerance.hpp"

namespace qmoebius {

/// Relative determinant threshold of the 4x4 complex realization below
/// which a 2x2 quaternionic matrix counts as singular.
inline constexpr double kSingularThreshold = 1e-12;

/// Invertible 2x2 quaternionic matrix ((a, b), (c, d)). Construct via
/// make_matrix, which checks the invertibility witness.
struct MatGL2H {
    Quaternion a, b, c, d;

    double entry_scale() const {
        return std::max(std::max(norm(a), norm(b)), std::max(norm(c), norm(d)));
    }

    friend std::ostream& operator<<(std::ostream& os, const MatGL2H& m) {
        return os << "[" << m.a << " " << m.b << "; " << m.c << " " << m.d << "]";
    }
};

namespace detail {

/// Determinant of a 4x4 complex matrix by partially pivoted elimination.
inline std::complex<double> det4(std::array<std::complex<double>, 16>& m) {
    std::complex<double> det = 1.0;
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(m[4 * r + col]) > std::abs(m[4 * pivot + col])) pivot = r;
        if (std::abs(m[4 * pivot + col]) == 0.0) return 0.0;
        if (pivot != col) {
            for (int c = 0; c < 4; ++c) std::swap(m[4 * pivot + c], m[4 * col + c]);
            det = -det;
        }
        det *= m[4 * col + col];
        for (int r = col + 1; r < 4; ++r) {
            const auto f = m[4 * r + col] / m[4 * col + col];
            for (int c = col; c < 4; ++c) m[4 * r + c] -= f * m[4 * col + c];
        }
    }
    return det;
}

/// Blockwise complex realization of a quaternionic 2x2 matrix.
inline std::array<std::complex<double>, 16> realize4(const MatGL2H& g) {
    std::array<std::complex<double>, 16> m;
    const ComplexMat2 blocks[4] = {to_complex_matrix(g.a), to_complex_matrix(g.b),
                                   to_complex_matrix(g.c), to_complex_matrix(g.d)};
    for (int br = 0; br < 2; ++br)
        for (int bc = 0; bc < 2; ++bc)
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c)
                    m[4 * (2 * br + r) + (2 * bc + c)] = blocks[2 * br + bc](r, c);
    return m;
}

} // namespace detail

/// Magnitude of the complex-realization determinant, the invertibility witness.
inline double realization_det_magnitude(const MatGL2H& g) {
    auto m = detail::realize4(g);
    return std::abs(detail::det4(m));
}

/// Checked constructor: accepts the matrix iff the 4x4 complex realization
/// has |det| > threshold * scale^4.
inline MatGL2H make_matrix(const Quaternion& a, const Quaternion& b, const Quaternion& c,
                           const Quaternion& d) {
    MatGL2H g{a, b, c, d};
    const double scale = g.entry_scale();
    const double witness = realization_det_magnitude(g);
    if (witness <= kSingularThreshold * scale * scale * scale * scale)
        throw Error(errc::singular_matrix, "2x2 quaternionic matrix is numerically singular");
    return g;
}

/// Fractional linear transformation q -> (aq + b)(cq + d)^{-1} acting on
/// the extended quaternion line. Total: poles map to infinity.
class Moebius {
public:
    explicit Moebius(const MatGL2H& m) : m_(m) {}

    static Moebius identity() { return Moebius({1, 0, 0, 1}); }

    /// q -> a q a^{-1}
    static Moebius conjugation_by(const Quaternion& a) { return Moebius({a, 0, 0, a}); }

    const MatGL2H& matrix() const { return m_; }

    ExtQuaternion operator()(const ExtQuaternion& q, const Tolerance& tol = global_tolerance()) const {
        const auto& [a, b, c, d] = m_;
        if (q.is_infinity()) {
            // limit of (aq+b)(cq+d)^{-1}: a c^{-1}, or infinity again when c ~ 0
            if (norm(c) <= tol.at_scale(m_.entry_scale())) return ExtQuaternion::infinity();
            return a * inv(c);
        }
        const Quaternion& v = q.value();
        const Quaternion denom = c * v + d;
        const double scale = std::max(norm(c) * norm(v), norm(d));
        if (norm(denom) <= tol.at_scale(scale)) return ExtQuaternion::infinity();
        return (a * v + b) * inv(denom);
    }

private:
    MatGL2H m_;
};

inline ExtQuaternion apply(const Moebius& T, const ExtQuaternion& q,
                           const Tolerance& tol = global_tolerance()) {
    return T(q, tol);
}

/// Matrix product; realizes composition of the induced transformations.
inline Moebius compose(const Moebius& S, const Moebius& T) {
    const auto& s = S.matrix();
    const auto& t = T.matrix();
    return Moebius({s.a * t.a + s.b * t.c, s.a * t.b + s.b * t.d,
                    s.c * t.a + s.d * t.c, s.c * t.b + s.d * t.d});
}

/// Inverse by quaternionic elimination, pivoting on the larger first-column
/// entry. An invertible matrix has a nonzero first column, and the Schur
/// complement of a nonzero pivot is invertible.
inline Moebius inverse(const Moebius& T) {
    const auto& [a, b, c, d] = T.matrix();
    if (norm(a) >= norm(c)) {
        const Quaternion ai = inv(a);
        const Quaternion s = inv(d - c * ai * b);
        return Moebius({ai + ai * b * s * c * ai, -(ai * b * s), -(s * c * ai), s});
    }
    const Quaternion ci = inv(c);
    const Quaternion s = inv(b - a * ci * d);
    return Moebius({-(ci * d * s), ci + ci * d * s * a * ci, s, -(s * a * ci)});
}

/// Pointwise projective equality on a fixed probe set of five points.
inline bool projectively_equal(const Moebius& S, const Moebius& T,
                               const Tolerance& tol = global_tolerance()) {
    const ExtQuaternion probes[5] = {Quaternion{0}, Quaternion{1}, ExtQuaternion::infinity(),
                                     quat_i, quat_j};
    for (const auto& p : probes)
        if (!approx_equal(S(p, tol), T(p, tol), tol)) return false;
    return true;
}

/// Test probe for the two-sided difference identity
///   T(q1) - T(q2) = (a'-q2 c')^{-1} (q1-q2) (c q1+d)^{-1}
///                 = (a'-q1 c')^{-1} (q1-q2) (c q2+d)^{-1}
/// with ((a', b'), (c', d')) the inverse matrix. Returns the larger of the
/// two residual norms; contract: ~ 0.
inline double difference_identity_residual(const Moebius& T, const Quaternion& q1,
                                           const Quaternion& q2,
                                           const Tolerance& tol = global_tolerance()) {
    const auto& [a, b, c, d] = T.matrix();
    const MatGL2H gi = inverse(T).matrix();
    const auto& [ai, bi, ci, di] = gi;

    const Quaternion f1 = ai - q2 * ci;
    const Quaternion f2 = c * q1 + d;
    const Quaternion f3 = ai - q1 * ci;
    const Quaternion f4 = c * q2 + d;
    const double scale_i = std::max(norm(ai), norm(ci)) * std::max(1.0, std::max(norm(q1), norm(q2)));
    const double scale_m = std::max(norm(c), norm(d)) * std::max(1.0, std::max(norm(q1), norm(q2)));
    for (const auto* f : {&f1, &f3})
        if (norm(*f) <= tol.at_scale(scale_i))
            throw Error(errc::degenerate_input, "inverse-side factor vanishes");
    for (const auto* f : {&f2, &f4})
        if (norm(*f) <= tol.at_scale(scale_m))
            throw Error(errc::degenerate_input, "image of q1 or q2 is at infinity");

    const Quaternion t1 = (a * q1 + b) * inv(f2);
    const Quaternion t2 = (a * q2 + b) * inv(f4);
    const Quaternion lhs = t1 - t2;
    const Quaternion diff = q1 - q2;
    const double r1 = norm(lhs - inv(f1) * diff * inv(f2));
    const double r2 = norm(lhs - inv(f3) * diff * inv(f4));
    return std::max(r1, r2);
}

/// Rotation-matrix family ((cos t, -sin t), (sin t, cos t)); fixes the unit
/// imaginary sphere pointwise.
inline Moebius theta_stabilizer(double theta) {
    const double co = std::cos(theta);
    const double si = std::sin(theta);
    return Moebius({Quaternion{co}, Quaternion{-si}, Quaternion{si}, Quaternion{co}});
}

} // namespace qmoebius
