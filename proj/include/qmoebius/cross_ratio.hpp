#pragma once

#include <cmath>
#include <initializer_list>
#include <span>
#include <vector>

#include "qmoebius/error.hpp"
#include "qmoebius/moebius.hpp"
#include "qmoebius/quaternion.hpp"
#include "qmoebius/tolerance.hpp"

namespace qmoebius {

/// The pair (|Q|, Re Q): the complete invariant of a quadruple under
/// fractional linear transformations.
struct CrossRatioInvariant {
    double norm = 0.0;
    double re = 0.0;
};

namespace detail {

inline void require_pairwise_distinct(std::span<const ExtQuaternion> pts, const Tolerance& tol) {
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j)
            if (approx_equal(pts[i], pts[j], tol))
                throw Error(errc::duplicate_points, "points must be pairwise distinct");
}

} // namespace detail

/// Cross-ratio Q(q1,q2,q3,q4) = (q2-q1)^{-1} (q4-q1)(q4-q3)^{-1}(q2-q3),
/// with the limit formula when one argument is the point at infinity:
///   q1 = inf: (q4-q3)^{-1}(q2-q3)      q2 = inf: (q4-q1)(q4-q3)^{-1}
///   q3 = inf: (q2-q1)^{-1}(q4-q1)      q4 = inf: (q2-q1)^{-1}(q2-q3)
/// Finite and nonzero for distinct points; in particular Q(0,1,inf,q) = q.
inline ExtQuaternion cross_ratio(const ExtQuaternion& q1, const ExtQuaternion& q2,
                                 const ExtQuaternion& q3, const ExtQuaternion& q4,
                                 const Tolerance& tol = global_tolerance()) {
    const ExtQuaternion pts[4] = {q1, q2, q3, q4};
    detail::require_pairwise_distinct(pts, tol);

    if (q1.is_infinity()) {
        const auto &b = q2.value(), &c = q3.value(), &d = q4.value();
        return inv(d - c) * (b - c);
    }
    if (q2.is_infinity()) {
        const auto &a = q1.value(), &c = q3.value(), &d = q4.value();
        return (d - a) * inv(d - c);
    }
    if (q3.is_infinity()) {
        const auto &a = q1.value(), &b = q2.value(), &d = q4.value();
        return inv(b - a) * (d - a);
    }
    if (q4.is_infinity()) {
        const auto &a = q1.value(), &b = q2.value(), &c = q3.value();
        return inv(b - a) * (b - c);
    }
    const auto &a = q1.value(), &b = q2.value(), &c = q3.value(), &d = q4.value();
    return inv(b - a) * (d - a) * inv(d - c) * (b - c);
}

/// R_H(q1..q4) = (|Q|, Re Q).
inline CrossRatioInvariant r_invariant(const ExtQuaternion& q1, const ExtQuaternion& q2,
                                       const ExtQuaternion& q3, const ExtQuaternion& q4,
                                       const Tolerance& tol = global_tolerance()) {
    const ExtQuaternion q = cross_ratio(q1, q2, q3, q4, tol);
    if (q.is_infinity())
        throw Error(errc::infinite_cross_ratio, "cross-ratio of a degenerate configuration");
    return {norm(q.value()), re(q.value())};
}

inline bool approx_equal(const CrossRatioInvariant& a, const CrossRatioInvariant& b,
                         const Tolerance& tol = global_tolerance()) {
    return tol.near(a.norm, b.norm) && tol.near(a.re, b.re);
}

/// |Q(Tq1..Tq4) - (c q2 + d) Q(q1..q4) (c q2 + d)^{-1}|; contract: ~ 0.
/// Requires finite points with finite images and c q2 + d away from zero.
inline double conjugator_identity_residual(const Moebius& T, const ExtQuaternion& q1,
                                           const ExtQuaternion& q2, const ExtQuaternion& q3,
                                           const ExtQuaternion& q4,
                                           const Tolerance& tol = global_tolerance()) {
    const ExtQuaternion pts[4] = {q1, q2, q3, q4};
    detail::require_pairwise_distinct(pts, tol);
    for (const auto& p : pts)
        if (p.is_infinity())
            throw Error(errc::degenerate_input, "conjugator probe needs finite points");

    const auto& m = T.matrix();
    const Quaternion conjugator = m.c * q2.value() + m.d;
    const double scale = std::max(norm(m.c) * norm(q2.value()), norm(m.d));
    if (norm(conjugator) <= tol.at_scale(scale))
        throw Error(errc::degenerate_input, "c q2 + d vanishes");

    ExtQuaternion images[4];
    for (int n = 0; n < 4; ++n) {
        images[n] = T(pts[n], tol);
        if (images[n].is_infinity())
            throw Error(errc::degenerate_input, "image of a probe point is at infinity");
    }

    const ExtQuaternion lhs = cross_ratio(images[0], images[1], images[2], images[3], tol);
    const Quaternion q = cross_ratio(q1, q2, q3, q4, tol).value();
    const Quaternion rhs = conjugator * q * inv(conjugator);
    return norm(lhs.value() - rhs);
}

/// Alternating chain product over an even number of finite points,
///   (q1-q2)(q2-q3)^{-1}(q3-q4)(q4-q5)^{-1} ... (q_{2n-1}-q_{2n})(q_{2n}-q1)^{-1};
/// its norm and real part are invariants. Repeated points are allowed as
/// long as every cyclically consecutive difference is nonzero.
inline Quaternion chain_invariant(std::span<const Quaternion> points,
                                  const Tolerance& tol = global_tolerance()) {
    const size_t m = points.size();
    if (m < 4 || m % 2 != 0)
        throw Error(errc::degenerate_input, "chain needs an even number of points, at least 4");

    Quaternion acc{1};
    for (size_t n = 0; n < m; ++n) {
        const Quaternion diff = points[n] - points[(n + 1) % m];
        const double scale = std::max(norm(points[n]), norm(points[(n + 1) % m]));
        if (norm(diff) <= tol.at_scale(scale))
            throw Error(errc::duplicate_points, "consecutive chain points coincide");
        acc = (n % 2 == 0) ? acc * diff : acc * inv(diff);
    }
    return acc;
}

inline Quaternion chain_invariant(std::initializer_list<Quaternion> points,
                                  const Tolerance& tol = global_tolerance()) {
    return chain_invariant(std::span<const Quaternion>(points.begin(), points.size()), tol);
}

/// The n = 3, q6 = q3 specialization of the chain:
/// (q1-q2)(q2-q3)^{-1}(q3-q4)(q4-q5)^{-1}(q5-q3)(q3-q1)^{-1}.
inline Quaternion five_point_chain(const Quaternion& q1, const Quaternion& q2,
                                   const Quaternion& q3, const Quaternion& q4,
                                   const Quaternion& q5,
                                   const Tolerance& tol = global_tolerance()) {
    const Quaternion diffs[6] = {q1 - q2, q2 - q3, q3 - q4, q4 - q5, q5 - q3, q3 - q1};
    const double scales[6] = {std::max(norm(q1), norm(q2)), std::max(norm(q2), norm(q3)),
                              std::max(norm(q3), norm(q4)), std::max(norm(q4), norm(q5)),
                              std::max(norm(q5), norm(q3)), std::max(norm(q3), norm(q1))};
    for (int n = 0; n < 6; ++n)
        if (norm(diffs[n]) <= tol.at_scale(scales[n]))
            throw Error(errc::duplicate_points, "vanishing difference in five-point chain");
    return diffs[0] * inv(diffs[1]) * diffs[2] * inv(diffs[3]) * diffs[4] * inv(diffs[5]);
}

} // namespace qmoebius
