#pragma once

#include <array>
#include <cmath>

#include "qmoebius/cross_ratio.hpp"
#include "qmoebius/error.hpp"
#include "qmoebius/moebius.hpp"
#include "qmoebius/quaternion.hpp"
#include "qmoebius/tolerance.hpp"

namespace qmoebius {

namespace detail {

inline Quaternion finite_cross_ratio(const ExtQuaternion& q1, const ExtQuaternion& q2,
                                     const ExtQuaternion& q3, const ExtQuaternion& q4,
                                     const Tolerance& tol) {
    const ExtQuaternion q = cross_ratio(q1, q2, q3, q4, tol);
    if (q.is_infinity())
        throw Error(errc::infinite_cross_ratio, "cross-ratio of a degenerate configuration");
    return q.value();
}

/// Deterministic unit imaginary vector perpendicular to the unit imaginary u:
/// Gram-Schmidt against i, falling back to j. For a unit u at most one of the
/// two candidates can reject to less than 1/2.
inline Quaternion perpendicular_unit(const Quaternion& u) {
    const Quaternion ri = quat_i - dot(quat_i, u) * u;
    if (norm(ri) > 0.5) return ri / norm(ri);
    const Quaternion rj = quat_j - dot(quat_j, u) * u;
    return rj / norm(rj);
}

/// Unit quaternion of a 3x3 rotation matrix (largest-pivot extraction).
inline Quaternion quat_from_rotation_matrix(const double m[3][3]) {
    const double tr = m[0][0] + m[1][1] + m[2][2];
    double w, x, y, z;
    if (tr > 0) {
        const double s = std::sqrt(tr + 1.0) * 2.0;
        w = 0.25 * s;
        x = (m[2][1] - m[1][2]) / s;
        y = (m[0][2] - m[2][0]) / s;
        z = (m[1][0] - m[0][1]) / s;
    } else if (m[0][0] > m[1][1] && m[0][0] > m[2][2]) {
        const double s = std::sqrt(1.0 + m[0][0] - m[1][1] - m[2][2]) * 2.0;
        w = (m[2][1] - m[1][2]) / s;
        x = 0.25 * s;
        y = (m[0][1] + m[1][0]) / s;
        z = (m[0][2] + m[2][0]) / s;
    } else if (m[1][1] > m[2][2]) {
        const double s = std::sqrt(1.0 + m[1][1] - m[0][0] - m[2][2]) * 2.0;
        w = (m[0][2] - m[2][0]) / s;
        x = (m[0][1] + m[1][0]) / s;
        y = 0.25 * s;
        z = (m[1][2] + m[2][1]) / s;
    } else {
        const double s = std::sqrt(1.0 + m[2][2] - m[0][0] - m[1][1]) * 2.0;
        w = (m[1][0] - m[0][1]) / s;
        x = (m[0][2] + m[2][0]) / s;
        y = (m[1][2] + m[2][1]) / s;
        z = 0.25 * s;
    }
    return {w, x, y, z};
}

} // namespace detail

/// The transformation sending q1 -> 0, q2 -> 1, q3 -> inf, realized for
/// finite triples as q -> (q2-q1)^{-1} (q-q1)(q-q3)^{-1}(q2-q3). An infinite
/// input is first moved to a finite position by q -> (q-p)^{-1} with p the
/// smallest of 0, 1, 2, 3 distinct from every finite input.
inline Moebius normalize_to_standard(const ExtQuaternion& q1, const ExtQuaternion& q2,
                                     const ExtQuaternion& q3,
                                     const Tolerance& tol = global_tolerance()) {
    const ExtQuaternion pts[3] = {q1, q2, q3};
    detail::require_pairwise_distinct(pts, tol);

    if (q1.is_finite() && q2.is_finite() && q3.is_finite()) {
        const Quaternion &a = q1.value(), &b = q2.value(), &c = q3.value();
        const Quaternion u = inv(b - a);
        const Quaternion v = inv(b - c);
        return Moebius({u, -(u * a), v, -(v * c)});
    }

    double p = 0.0;
    for (double cand : {0.0, 1.0, 2.0, 3.0}) {
        bool clash = false;
        for (const auto& e : pts)
            clash = clash || (e.is_finite() && approx_equal(e.value(), Quaternion{cand}, tol));
        if (!clash) {
            p = cand;
            break;
        }
    }
    const Moebius mover({0, 1, 1, Quaternion{-p}});
    return compose(normalize_to_standard(mover(q1, tol), mover(q2, tol), mover(q3, tol), tol),
                   mover);
}

/// Transformation with src_n -> dst_n for n = 1, 2, 3.
inline Moebius solve_three(const std::array<ExtQuaternion, 3>& src,
                           const std::array<ExtQuaternion, 3>& dst,
                           const Tolerance& tol = global_tolerance()) {
    const Moebius ns = normalize_to_standard(src[0], src[1], src[2], tol);
    const Moebius nd = normalize_to_standard(dst[0], dst[1], dst[2], tol);
    return compose(inverse(nd), ns);
}

/// Rotation taking the imaginary vector v to w (requires |v| = |w| != 0).
/// Generic conjugator: the sum of the unit vectors; antipodal pairs rotate
/// by pi about a deterministic perpendicular axis.
inline Rotation3 align_vector(const Quaternion& v, const Quaternion& w,
                              const Tolerance& tol = global_tolerance()) {
    const Quaternion vi = im(v), wi = im(w);
    const double nv = norm(vi), nw = norm(wi);
    if (nv <= tol.abs || nw <= tol.abs)
        throw Error(errc::zero_vector, "cannot align a zero vector");
    if (!tol.near(nv, nw)) throw Error(errc::norm_mismatch, "|v| and |w| differ");

    const Quaternion u = vi / nv;
    const Quaternion wp = wi / nw;
    if (norm(u - wp) <= tol.at_scale(1.0)) return Rotation3::identity();
    const Quaternion s = u + wp;
    if (norm(s) > tol.at_scale(1.0)) return Rotation3::from(s);
    return Rotation3::from(detail::perpendicular_unit(u));
}

/// The single rotation taking v1 -> w1 and v2 -> w2, when one exists;
/// feasible iff |v1| = |w1|, |v2| = |w2| and |v1-v2| = |w1-w2|. Built by
/// transporting the orthonormal frame of (v1, v2) onto that of (w1, w2);
/// zero or collinear pairs reduce to single-vector alignment.
inline Rotation3 align_two_vectors(const Quaternion& v1q, const Quaternion& v2q,
                                   const Quaternion& w1q, const Quaternion& w2q,
                                   const Tolerance& tol = global_tolerance()) {
    const Quaternion v1 = im(v1q), v2 = im(v2q), w1 = im(w1q), w2 = im(w2q);
    const double n1 = norm(v1), n2 = norm(v2), m1 = norm(w1), m2 = norm(w2);
    if (!tol.near(n1, m1)) throw Error(errc::infeasible, "|v1| != |w1|", "norm1");
    if (!tol.near(n2, m2)) throw Error(errc::infeasible, "|v2| != |w2|", "norm2");
    if (!tol.near(norm(v1 - v2), norm(w1 - w2)))
        throw Error(errc::infeasible, "|v1 - v2| != |w1 - w2|", "distance");

    if (n1 <= tol.abs && n2 <= tol.abs) return Rotation3::identity();
    if (n1 <= tol.abs) return align_vector(v2, w2, tol);
    if (n2 <= tol.abs) return align_vector(v1, w1, tol);

    const Quaternion e1 = v1 / n1;
    const Quaternion f1 = w1 / m1;
    const Quaternion rej_v = v2 - dot(v2, e1) * e1;
    const Quaternion rej_w = w2 - dot(w2, f1) * f1;
    if (norm(rej_v) <= tol.at_scale(n2) || norm(rej_w) <= tol.at_scale(m2)) {
        const Rotation3 r = align_vector(v1, w1, tol);
        // the preconditions only pin the images down to their own tolerance
        // band, which widens like a square root near collinearity
        const double band =
            std::sqrt(2.0 * std::max(n2, 1.0) * tol.at_scale(std::max(n2, m2))) + tol.at_scale(n2);
        if (norm(rotate(r, v2) - w2) > band)
            throw Error(errc::infeasible, "collinear pair with inconsistent images", "frame");
        return r;
    }

    const Quaternion e2 = rej_v / norm(rej_v);
    const Quaternion e3 = cross_im(e1, e2);
    const Quaternion f2 = rej_w / norm(rej_w);
    const Quaternion f3 = cross_im(f1, f2);

    const Quaternion es[3] = {e1, e2, e3};
    const Quaternion fs[3] = {f1, f2, f3};
    auto coord = [](const Quaternion& q, int n) { return n == 0 ? q.x : (n == 1 ? q.y : q.z); };
    double m[3][3];
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            double acc = 0;
            for (int a = 0; a < 3; ++a) acc += coord(fs[a], r) * coord(es[a], c);
            m[r][c] = acc;
        }
    return Rotation3::from(detail::quat_from_rotation_matrix(m));
}

/// One solution of a four-point correspondence problem together with the
/// residual freedom: every member rotates the normalized chart about the
/// axis through Im Q' before pulling back, so all members agree on the
/// four prescribed points. When the cross-ratio is real the full rotation
/// group remains (axis is zero, real_cross_ratio() is set) and members
/// about arbitrary axes are admissible.
class FourPointSolution {
public:
    const Moebius& base() const { return base_; }
    const Quaternion& axis() const { return axis_; }
    bool real_cross_ratio() const { return real_; }

    Moebius member(double theta) const {
        const Quaternion u = real_ ? quat_i : axis_ / norm(axis_);
        return member_about(theta, u);
    }

    Moebius member_about(double theta, const Quaternion& unit_axis) const {
        const Quaternion r = Quaternion{std::cos(theta / 2)} + std::sin(theta / 2) * unit_axis;
        return compose(nd_inv_, compose(Moebius::conjugation_by(r * conjugator_), ns_));
    }

private:
    friend FourPointSolution solve_four(const std::array<ExtQuaternion, 4>&,
                                        const std::array<ExtQuaternion, 4>&, const Tolerance&);

    FourPointSolution(const Moebius& nd_inv, const Moebius& ns, const Quaternion& conjugator,
                      const Quaternion& axis, bool real)
        : nd_inv_(nd_inv),
          ns_(ns),
          conjugator_(conjugator),
          axis_(axis),
          real_(real),
          base_(compose(nd_inv, compose(Moebius::conjugation_by(conjugator), ns))) {}

    Moebius nd_inv_;
    Moebius ns_;
    Quaternion conjugator_;
    Quaternion axis_;
    bool real_;
    Moebius base_;
};

/// Constructive four-point correspondence: feasible iff the quadruples have
/// equal cross-ratio norms and real parts. Both sides are normalized to
/// (0, 1, inf); the imaginary parts of the normalized fourth points are then
/// aligned by a rotation and the chart is pulled back.
inline FourPointSolution solve_four(const std::array<ExtQuaternion, 4>& src,
                                    const std::array<ExtQuaternion, 4>& dst,
                                    const Tolerance& tol = global_tolerance()) {
    detail::require_pairwise_distinct(std::span<const ExtQuaternion>(src.data(), 4), tol);
    detail::require_pairwise_distinct(std::span<const ExtQuaternion>(dst.data(), 4), tol);

    const Quaternion qs = detail::finite_cross_ratio(src[0], src[1], src[2], src[3], tol);
    const Quaternion qd = detail::finite_cross_ratio(dst[0], dst[1], dst[2], dst[3], tol);
    if (!tol.near(norm(qs), norm(qd)))
        throw Error(errc::invariant_mismatch, "cross-ratio norms differ", "norm");
    if (!tol.near(re(qs), re(qd)))
        throw Error(errc::invariant_mismatch, "cross-ratio real parts differ", "re");

    const Moebius ns = normalize_to_standard(src[0], src[1], src[2], tol);
    const Moebius nd = normalize_to_standard(dst[0], dst[1], dst[2], tol);

    const Quaternion vs = im(qs), vd = im(qd);
    const bool real_cr =
        norm(vs) <= tol.at_scale(norm(qs)) && norm(vd) <= tol.at_scale(norm(qd));
    Quaternion conjugator{1};
    Quaternion axis{0};
    if (!real_cr) {
        conjugator = align_vector(vs / norm(vs), vd / norm(vd), tol).unit();
        axis = vd;
    }
    return FourPointSolution(inverse(nd), ns, conjugator, axis, real_cr);
}

struct FivePointSolution {
    Moebius map;
    bool unique;
};

/// Which of the normalized imaginary pairs anchors the transported frame.
/// The two orders give numerically independent constructions of the same
/// rotation whenever the solution is unique.
enum class FrameOrder { q4_major, q5_major };

/// Constructive five-point correspondence. Feasibility is gated by the three
/// invariant conditions (norms, real parts, imaginary-part distance), each
/// reported on failure as reason "condition1" / "condition2" / "condition3".
/// unique is set when the five source points do not lie on a single 2-sphere
/// or 2-plane, i.e. when their two cross-ratios fail to commute.
inline FivePointSolution solve_five(const std::array<ExtQuaternion, 5>& src,
                                    const std::array<ExtQuaternion, 5>& dst,
                                    FrameOrder order = FrameOrder::q4_major,
                                    const Tolerance& tol = global_tolerance()) {
    detail::require_pairwise_distinct(std::span<const ExtQuaternion>(src.data(), 5), tol);
    detail::require_pairwise_distinct(std::span<const ExtQuaternion>(dst.data(), 5), tol);

    const Quaternion q4 = detail::finite_cross_ratio(src[0], src[1], src[2], src[3], tol);
    const Quaternion q5 = detail::finite_cross_ratio(src[0], src[1], src[2], src[4], tol);
    const Quaternion p4 = detail::finite_cross_ratio(dst[0], dst[1], dst[2], dst[3], tol);
    const Quaternion p5 = detail::finite_cross_ratio(dst[0], dst[1], dst[2], dst[4], tol);

    if (!tol.near(norm(q4), norm(p4)) || !tol.near(norm(q5), norm(p5)))
        throw Error(errc::invariant_mismatch, "cross-ratio norms differ", "condition1");
    if (!tol.near(re(q4), re(p4)) || !tol.near(re(q5), re(p5)))
        throw Error(errc::invariant_mismatch, "cross-ratio real parts differ", "condition2");
    if (!tol.near(norm(q4 - q5), norm(p4 - p5)))
        throw Error(errc::invariant_mismatch, "cross-ratio distances differ", "condition3");

    // the conditions bound |Im .| mismatches only up to a square-root widening
    const double s = std::max({norm(q4), norm(q5), norm(p4), norm(p5), 1.0});
    const Tolerance relaxed{std::max(tol.abs, 2.0 * std::sqrt(s * tol.at_scale(s))), tol.rel};
    const Rotation3 rot =
        order == FrameOrder::q4_major
            ? align_two_vectors(im(q4), im(q5), im(p4), im(p5), relaxed)
            : align_two_vectors(im(q5), im(q4), im(p5), im(p4), relaxed);

    const Moebius ns = normalize_to_standard(src[0], src[1], src[2], tol);
    const Moebius nd = normalize_to_standard(dst[0], dst[1], dst[2], tol);
    const Moebius map = compose(inverse(nd), compose(Moebius::conjugation_by(rot.unit()), ns));
    const bool unique = norm(commutator(q4, q5)) > tol.at_scale(norm(q4) * norm(q5));
    return {map, unique};
}

} // namespace qmoebius
