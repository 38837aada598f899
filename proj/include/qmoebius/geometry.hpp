#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "qmoebius/correspondence.hpp"
#include "qmoebius/cross_ratio.hpp"
#include "qmoebius/error.hpp"
#include "qmoebius/moebius.hpp"
#include "qmoebius/quaternion.hpp"
#include "qmoebius/tolerance.hpp"

namespace qmoebius {

/// Singular values of the centered point matrix below this fraction of the
/// largest count as zero when detecting the affine hull.
inline constexpr double kHullRankThreshold = 1e-8;

/// Affine subspace of R^4 (line, 2-plane or 3-plane) with an orthonormal
/// direction basis. `extended` records whether the point at infinity is
/// adjoined, i.e. whether the subspace is a Moebius image of a sphere.
struct AffineSubspace {
    Quaternion base;
    std::vector<Quaternion> basis;
    bool extended = true;

    int dim() const { return static_cast<int>(basis.size()); }
};

/// k-sphere in R^4, k in {1, 2, 3}. For k < 3 the carrier is the affine
/// (k+1)-flat containing it, with base at the center.
struct SphereK {
    Quaternion center;
    double radius = 0.0;
    int dim = 0;
    std::optional<AffineSubspace> carrier;
};

/// Tagged geometric object: a single point of the extended line, a k-sphere,
/// or an affine subspace.
class Locus {
public:
    enum class Kind { point, sphere, affine };

    static Locus point(const ExtQuaternion& p) { return Locus(p); }
    static Locus sphere(SphereK s) { return Locus(std::move(s)); }
    static Locus affine(AffineSubspace a) { return Locus(std::move(a)); }

    Kind kind() const { return static_cast<Kind>(v_.index()); }
    bool is_point() const { return kind() == Kind::point; }
    bool is_sphere() const { return kind() == Kind::sphere; }
    bool is_affine() const { return kind() == Kind::affine; }

    const ExtQuaternion& as_point() const { return std::get<ExtQuaternion>(v_); }
    const SphereK& as_sphere() const { return std::get<SphereK>(v_); }
    const AffineSubspace& as_affine() const { return std::get<AffineSubspace>(v_); }

    /// Manifold dimension: 0 for a point, k otherwise.
    int dim() const {
        switch (kind()) {
            case Kind::point: return 0;
            case Kind::sphere: return as_sphere().dim;
            case Kind::affine: return as_affine().dim();
        }
        return 0;
    }

private:
    explicit Locus(ExtQuaternion p) : v_(std::move(p)) {}
    explicit Locus(SphereK s) : v_(std::move(s)) {}
    explicit Locus(AffineSubspace a) : v_(std::move(a)) {}

    std::variant<ExtQuaternion, SphereK, AffineSubspace> v_;
};

namespace detail {

inline Eigen::Vector4d to_vec(const Quaternion& q) { return {q.t, q.x, q.y, q.z}; }
inline Quaternion from_vec(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }

inline const std::array<Quaternion, 4>& standard_basis() {
    static const std::array<Quaternion, 4> b = {Quaternion{1}, quat_i, quat_j, quat_k};
    return b;
}

/// Orthonormal completion of a set of orthonormal vectors to `total` vectors,
/// drawn deterministically from the standard basis of R^4.
inline std::vector<Quaternion> complete_basis(std::vector<Quaternion> have, size_t total) {
    for (const Quaternion& cand : standard_basis()) {
        if (have.size() >= total) break;
        Quaternion r = cand;
        for (const Quaternion& b : have) r = r - dot(r, b) * b;
        const double n = norm(r);
        if (n > 0.3) have.push_back(r / n);
    }
    return have;
}

/// Two orthonormal imaginary vectors spanning the plane perpendicular to the
/// unit imaginary n, deterministic in n.
inline std::pair<Quaternion, Quaternion> imaginary_complement(const Quaternion& n) {
    std::vector<Quaternion> have = {n};
    for (const Quaternion& cand : {quat_i, quat_j, quat_k}) {
        if (have.size() == 3) break;
        Quaternion r = cand;
        for (const Quaternion& b : have) r = r - dot(r, b) * b;
        const double nn = norm(r);
        if (nn > 0.3) have.push_back(r / nn);
    }
    return {have[1], have[2]};
}

inline double frac(double v) { return v - std::floor(v); }

/// Low-discrepancy direction on the unit k-sphere in R^{k+1} (Kronecker
/// sequences; index-stable so streams with different offsets never collide).
inline std::array<double, 4> unit_direction(int k, long index) {
    const double m = static_cast<double>(index) + 1.0;
    if (k == 1) {
        const double a = 2.0 * M_PI * frac(m * 0.6180339887498949 + 0.1357);
        return {std::cos(a), std::sin(a), 0, 0};
    }
    if (k == 2) {
        const double z = 2.0 * frac(m * 0.7548776662466927 + 0.2468) - 1.0;
        const double a = 2.0 * M_PI * frac(m * 0.5698402909980532 + 0.1357);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {r * std::cos(a), r * std::sin(a), z, 0};
    }
    const double u1 = frac(m * 0.8191725133961645 + 0.1357);
    const double a1 = 2.0 * M_PI * frac(m * 0.6710436067037893 + 0.2468);
    const double a2 = 2.0 * M_PI * frac(m * 0.5497004779019703 + 0.3579);
    const double r1 = std::sqrt(std::max(0.0, 1.0 - u1));
    const double r2 = std::sqrt(u1);
    return {r1 * std::cos(a1), r1 * std::sin(a1), r2 * std::cos(a2), r2 * std::sin(a2)};
}

} // namespace detail

/// Euclidean distance from a finite point to the subspace.
inline double distance(const AffineSubspace& a, const Quaternion& p) {
    Quaternion r = p - a.base;
    for (const Quaternion& b : a.basis) r = r - dot(r, b) * b;
    return norm(r);
}

/// Euclidean distance from a finite point to the k-sphere manifold.
inline double distance(const SphereK& s, const Quaternion& p) {
    const Quaternion d = p - s.center;
    Quaternion in{0, 0, 0, 0};
    if (s.carrier) {
        for (const Quaternion& b : s.carrier->basis) in = in + dot(d, b) * b;
    } else {
        in = d;
    }
    const Quaternion out = d - in;
    const double rin = norm(in);
    if (rin <= 1e-30) return std::hypot(norm(out), s.radius);
    return norm(p - (s.center + (s.radius / rin) * in));
}

inline double distance(const Locus& L, const ExtQuaternion& p) {
    if (p.is_infinity()) {
        const bool member = (L.is_affine() && L.as_affine().extended) ||
                            (L.is_point() && L.as_point().is_infinity());
        return member ? 0.0 : std::numeric_limits<double>::infinity();
    }
    switch (L.kind()) {
        case Locus::Kind::point:
            if (L.as_point().is_infinity()) return std::numeric_limits<double>::infinity();
            return norm(p.value() - L.as_point().value());
        case Locus::Kind::sphere: return distance(L.as_sphere(), p.value());
        case Locus::Kind::affine: return distance(L.as_affine(), p.value());
    }
    return std::numeric_limits<double>::infinity();
}

inline double locus_scale(const Locus& L) {
    switch (L.kind()) {
        case Locus::Kind::point:
            return L.as_point().is_finite() ? std::max(1.0, norm(L.as_point().value())) : 1.0;
        case Locus::Kind::sphere: return norm(L.as_sphere().center) + L.as_sphere().radius;
        case Locus::Kind::affine: return std::max(1.0, norm(L.as_affine().base));
    }
    return 1.0;
}

inline bool contains(const Locus& L, const ExtQuaternion& p,
                     const Tolerance& tol = global_tolerance()) {
    const double d = distance(L, p);
    double scale = locus_scale(L);
    if (p.is_finite()) scale = std::max(scale, norm(p.value()));
    return d <= tol.at_scale(scale);
}

/// Deterministic points on a sphere or affine locus. Streams with distinct
/// `offset` continue the same low-discrepancy sequence, so fitting and
/// validation samples never coincide.
inline std::vector<Quaternion> surface_samples(const Locus& L, int count, long offset = 0) {
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
        if (static_cast<int>(basis.size()) != s.dim + 1)
            throw Error(errc::degenerate_input, "sphere carrier dimension mismatch");
        for (int n = 0; n < count; ++n) {
            const auto dir = detail::unit_direction(s.dim, offset + n);
            Quaternion p = s.center;
            for (size_t b = 0; b < basis.size(); ++b) p = p + (s.radius * dir[b]) * basis[b];
            out.push_back(p);
        }
        return out;
    }
    if (L.is_affine()) {
        const AffineSubspace& a = L.as_affine();
        const double spread = std::max(1.0, norm(a.base));
        for (int n = 0; n < count; ++n) {
            const long m = offset + n;
            Quaternion p = a.base;
            if (m >= 1 && m <= a.dim()) {
                p = p + spread * a.basis[m - 1];
            } else if (m != 0) {
                for (size_t b = 0; b < a.basis.size(); ++b) {
                    const double u =
                        detail::frac(static_cast<double>(m) * (0.5545497 + 0.1234 * double(b + 1)) +
                                     0.1928 * double(b + 1));
                    p = p + spread * (3.0 * (u - 0.5)) * a.basis[b];
                }
            }
            out.push_back(p);
        }
        return out;
    }
    throw Error(errc::degenerate_input, "cannot sample a point locus");
}

/// The unique k-sphere or k-flat through the given points (least squares for
/// over-determined input). The affine hull is detected first: points that
/// only span a k-flat yield that flat; spanning below k is an error.
inline Locus fit_sphere(std::span<const Quaternion> points, int k) {
    if (k < 1 || k > 3) throw Error(errc::degenerate_input, "sphere dimension must be 1, 2 or 3");
    const int n = static_cast<int>(points.size());
    if (n < k + 2) throw Error(errc::degenerate_input, "need at least k + 2 points");

    Eigen::Vector4d mu = Eigen::Vector4d::Zero();
    for (const auto& p : points) mu += detail::to_vec(p);
    mu /= double(n);

    Eigen::MatrixXd centered(n, 4);
    for (int r = 0; r < n; ++r) centered.row(r) = (detail::to_vec(points[r]) - mu).transpose();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    if (sigma(0) <= 0.0) throw Error(errc::degenerate_input, "points coincide");
    int rank = 0;
    for (int s = 0; s < sigma.size(); ++s)
        if (sigma(s) > kHullRankThreshold * sigma(0)) ++rank;

    if (rank < k) throw Error(errc::degenerate_input, "points span too low a dimension");

    if (rank == k) {
        AffineSubspace flat;
        flat.base = detail::from_vec(mu);
        for (int c = 0; c < k; ++c) flat.basis.push_back(detail::from_vec(svd.matrixV().col(c)));
        flat.extended = true;
        return Locus::affine(flat);
    }

    // hull dimension k+1: circumcenter in hull coordinates from the linear
    // system 2 (y_i - y_0) . c = |y_i|^2 - |y_0|^2
    const int r = k + 1;
    const Eigen::MatrixXd B = svd.matrixV().leftCols(r);
    const Eigen::MatrixXd Y = centered * B;
    Eigen::MatrixXd A(n - 1, r);
    Eigen::VectorXd rhs(n - 1);
    for (int i = 1; i < n; ++i) {
        A.row(i - 1) = 2.0 * (Y.row(i) - Y.row(0));
        rhs(i - 1) = Y.row(i).squaredNorm() - Y.row(0).squaredNorm();
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(rhs);

    double radius = 0.0;
    for (int i = 0; i < n; ++i) radius += (Y.row(i).transpose() - c).norm();
    radius /= double(n);

    SphereK s;
    s.center = detail::from_vec(mu + B * c);
    s.radius = radius;
    s.dim = k;
    if (k < 3) {
        AffineSubspace carrier;
        carrier.base = s.center;
        for (int col = 0; col < r; ++col)
            carrier.basis.push_back(detail::from_vec(B.col(col)));
        carrier.extended = false;
        s.carrier = carrier;
    }
    return Locus::sphere(s);
}

namespace detail {

/// Best-fit k-flat through points (centroid plus leading singular directions).
inline AffineSubspace affine_from_points(std::span<const Quaternion> points, int k) {
    const int n = static_cast<int>(points.size());
    Eigen::Vector4d mu = Eigen::Vector4d::Zero();
    for (const auto& p : points) mu += to_vec(p);
    mu /= double(n);
    Eigen::MatrixXd centered(n, 4);
    for (int r = 0; r < n; ++r) centered.row(r) = (to_vec(points[r]) - mu).transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeFullV);
    AffineSubspace flat;
    flat.base = from_vec(mu);
    for (int c = 0; c < k; ++c) flat.basis.push_back(from_vec(svd.matrixV().col(c)));
    flat.extended = true;
    return flat;
}

} // namespace detail

/// Image of a locus under a fractional linear transformation, preserving the
/// dimension k. Realized constructively: deterministic samples of the locus
/// are mapped and a k-sphere or k-flat is fitted, then checked against held
/// back samples. The image passes through infinity exactly when the pole of
/// the transformation lies on the locus (or the locus is an extended flat and
/// the transformation fixes infinity); those images are classified affine.
inline Locus map_locus(const Moebius& T, const Locus& L,
                       const Tolerance& tol = global_tolerance()) {
    if (L.is_point()) return Locus::point(T(L.as_point(), tol));

    const int k = L.dim();
    const auto& g = T.matrix();
    const bool c_zero = norm(g.c) <= tol.at_scale(g.entry_scale());
    std::optional<Quaternion> pole;
    bool image_has_inf = false;
    if (c_zero) {
        image_has_inf = L.is_affine();
    } else {
        pole = -(inv(g.c) * g.d);
        image_has_inf = contains(L, *pole, tol);
    }

    const int fit_n = k + 2;
    const int validate_n = 20;
    const int raw_n = 4 * (fit_n + validate_n);
    const std::vector<Quaternion> cands = surface_samples(L, raw_n, 0);

    std::vector<Quaternion> images;
    images.reserve(cands.size());
    for (const auto& cand : cands) {
        const ExtQuaternion img = T(ExtQuaternion(cand), tol);
        if (img.is_finite()) images.push_back(img.value());
    }
    if (static_cast<int>(images.size()) < fit_n + validate_n)
        throw Error(errc::fit_failure, "too many samples map to infinity");

    // drop the near-pole blow-ups: keep images within a cap of the median
    // magnitude, relaxing the cap if that leaves too few
    std::vector<double> mags;
    mags.reserve(images.size());
    for (const auto& p : images) mags.push_back(norm(p));
    std::vector<double> sorted_mags = mags;
    std::nth_element(sorted_mags.begin(), sorted_mags.begin() + sorted_mags.size() / 2,
                     sorted_mags.end());
    const double median = sorted_mags[sorted_mags.size() / 2];
    double cap = 10.0 * std::max(1.0, median);
    std::vector<int> kept;
    for (int relax = 0; relax < 64; ++relax, cap *= 10.0) {
        kept.clear();
        for (size_t i = 0; i < images.size(); ++i)
            if (mags[i] <= cap) kept.push_back(static_cast<int>(i));
        if (static_cast<int>(kept.size()) >= fit_n + validate_n) break;
    }
    if (static_cast<int>(kept.size()) < fit_n + validate_n)
        throw Error(errc::fit_failure, "image samples are unusable");

    // Exactly k+2 points would determine the image in principle, but points
    // drawn from a curved patch can be nearly co-hyperplanar and make the
    // interpolation ill-conditioned. A larger least-squares subset, spread by
    // farthest-point selection, stays stable for every transformation.
    const int n_fit = std::min(24, std::max(fit_n, static_cast<int>(kept.size()) - validate_n));
    std::vector<Quaternion> fit_pts;
    std::vector<bool> used(images.size(), false);
    {
        Quaternion centroid{0, 0, 0, 0};
        for (int i : kept) centroid = centroid + images[i];
        centroid = centroid / double(kept.size());
        int seed_idx = kept[0];
        double best = -1.0;
        for (int i : kept) {
            const double d = norm(images[i] - centroid);
            if (d > best) {
                best = d;
                seed_idx = i;
            }
        }
        fit_pts.push_back(images[seed_idx]);
        used[seed_idx] = true;
        while (static_cast<int>(fit_pts.size()) < n_fit) {
            int next = -1;
            double next_score = -1.0;
            for (int i : kept) {
                if (used[i]) continue;
                double score = std::numeric_limits<double>::infinity();
                for (const auto& f : fit_pts) score = std::min(score, norm(images[i] - f));
                if (score > next_score) {
                    next_score = score;
                    next = i;
                }
            }
            fit_pts.push_back(images[next]);
            used[next] = true;
        }
    }

    Locus result = Locus::point(ExtQuaternion{});
    if (image_has_inf) {
        result = Locus::affine(detail::affine_from_points(fit_pts, k));
    } else {
        result = fit_sphere(fit_pts, k);
        if (result.is_affine()) {
            AffineSubspace flat = result.as_affine();
            flat.extended = true;
            result = Locus::affine(std::move(flat));
        }
    }

    double worst = 0.0;
    int validated = 0;
    for (int i : kept) {
        if (used[i] || validated >= validate_n) continue;
        const double rel = distance(result, ExtQuaternion(images[i])) /
                           std::max({1.0, norm(images[i]), locus_scale(result)});
        worst = std::max(worst, rel);
        ++validated;
    }
    if (worst > 1e-6)
        throw Error(errc::fit_failure, "mapped samples deviate from the fitted locus");
    return result;
}

/// True iff the four points lie on a single circle or line, i.e. iff their
/// cross-ratio is real.
inline bool is_cocircular(const ExtQuaternion& q1, const ExtQuaternion& q2,
                          const ExtQuaternion& q3, const ExtQuaternion& q4,
                          const Tolerance& tol = global_tolerance()) {
    const Quaternion q = detail::finite_cross_ratio(q1, q2, q3, q4, tol);
    return norm(im(q)) <= tol.at_scale(norm(q));
}

/// True iff the five points lie on a single 2-sphere or 2-plane, i.e. iff
/// the cross-ratios Q(q1,q2,q3,q4) and Q(q1,q2,q3,q5) commute.
inline bool is_cospherical5(const ExtQuaternion& q1, const ExtQuaternion& q2,
                            const ExtQuaternion& q3, const ExtQuaternion& q4,
                            const ExtQuaternion& q5, const Tolerance& tol = global_tolerance()) {
    const ExtQuaternion pts[5] = {q1, q2, q3, q4, q5};
    detail::require_pairwise_distinct(pts, tol);
    const Quaternion a = detail::finite_cross_ratio(q1, q2, q3, q4, tol);
    const Quaternion b = detail::finite_cross_ratio(q1, q2, q3, q5, tol);
    return norm(commutator(a, b)) <= tol.at_scale(norm(a) * norm(b));
}

/// All possible images of src[3] under transformations sending src[0..2] to
/// dst3: the conjugacy-class 2-sphere of the cross-ratio pulled back through
/// the chart of dst3, or a single point when the cross-ratio is real.
inline Locus locus_fourth(const std::array<ExtQuaternion, 4>& src,
                          const std::array<ExtQuaternion, 3>& dst3,
                          const Tolerance& tol = global_tolerance()) {
    detail::require_pairwise_distinct(std::span<const ExtQuaternion>(src.data(), 4), tol);
    const Quaternion q = detail::finite_cross_ratio(src[0], src[1], src[2], src[3], tol);
    const Moebius chart = inverse(normalize_to_standard(dst3[0], dst3[1], dst3[2], tol));

    if (norm(im(q)) <= tol.at_scale(norm(q)))
        return Locus::point(chart(ExtQuaternion(q), tol));

    SphereK conj_class;
    conj_class.center = Quaternion{re(q)};
    conj_class.radius = norm(im(q));
    conj_class.dim = 2;
    conj_class.carrier = AffineSubspace{Quaternion{re(q)}, {quat_i, quat_j, quat_k}, false};
    return map_locus(chart, Locus::sphere(conj_class), tol);
}

/// All possible images of src[4] under transformations sending src[0..3] to
/// dst4: the orbit of the normalized fifth point under the residual rotations
/// about Im Q'_4, pulled back through the chart of dst4's first three points.
/// Requires matching four-point invariants and Im Q_4 != 0.
inline Locus locus_fifth(const std::array<ExtQuaternion, 5>& src,
                         const std::array<ExtQuaternion, 4>& dst4,
                         const Tolerance& tol = global_tolerance()) {
    detail::require_pairwise_distinct(std::span<const ExtQuaternion>(src.data(), 5), tol);
    detail::require_pairwise_distinct(std::span<const ExtQuaternion>(dst4.data(), 4), tol);

    const Quaternion q4 = detail::finite_cross_ratio(src[0], src[1], src[2], src[3], tol);
    const Quaternion q5 = detail::finite_cross_ratio(src[0], src[1], src[2], src[4], tol);
    const Quaternion p4 = detail::finite_cross_ratio(dst4[0], dst4[1], dst4[2], dst4[3], tol);

    if (!tol.near(norm(q4), norm(p4)) || !tol.near(re(q4), re(p4)))
        throw Error(errc::invariant_mismatch, "four-point invariants differ", "assumption");
    if (norm(im(q4)) <= tol.at_scale(norm(q4)))
        throw Error(errc::hypothesis_violation,
                    "the first four source points lie on a circle or line");

    const Quaternion axis = im(p4) / norm(im(p4));
    const Rotation3 r0 = align_vector(im(q4) / norm(im(q4)), axis, tol);
    const Quaternion p = rotate(r0, im(q5));
    const Quaternion on_axis = dot(p, axis) * axis;
    const double radius = norm(p - on_axis);
    const Quaternion center = Quaternion{re(q5)} + on_axis;

    const Moebius chart = inverse(normalize_to_standard(dst4[0], dst4[1], dst4[2], tol));
    if (radius <= tol.at_scale(std::max(1.0, norm(q5))))
        return Locus::point(chart(ExtQuaternion(center), tol));

    const auto [b1, b2] = detail::imaginary_complement(axis);
    SphereK circle;
    circle.center = center;
    circle.radius = radius;
    circle.dim = 1;
    circle.carrier = AffineSubspace{center, {b1, b2}, false};
    return map_locus(chart, Locus::sphere(circle), tol);
}

/// Apollonius set {s : |s - p1|^2 = A |s - p2|^2}: the perpendicular-bisector
/// 3-plane when A = 1, otherwise the 3-sphere obtained by completing the
/// square, center (p1 - A p2)/(1 - A), radius sqrt(A) |p1 - p2| / |1 - A|.
inline Locus apollonius(const Quaternion& p1, const Quaternion& p2, double A,
                        const Tolerance& tol = global_tolerance()) {
    if (!(A > 0)) throw Error(errc::degenerate_input, "ratio must be positive");
    const Quaternion d = p2 - p1;
    if (norm(d) <= tol.at_scale(std::max(norm(p1), norm(p2))))
        throw Error(errc::degenerate_input, "foci coincide");

    if (tol.near(A, 1.0)) {
        const Quaternion n = d / norm(d);
        AffineSubspace plane;
        plane.base = 0.5 * (p1 + p2);
        plane.basis = detail::complete_basis({n}, 4);
        plane.basis.erase(plane.basis.begin()); // keep the three perpendicular directions
        plane.extended = true;
        return Locus::affine(plane);
    }
    SphereK s;
    s.center = (p1 - A * p2) / (1.0 - A);
    s.radius = std::sqrt(A) * norm(p1 - p2) / std::abs(1.0 - A);
    s.dim = 3;
    return Locus::sphere(s);
}

/// The set {q : |Q(q1, q2, q3, q)| = N}, always a 3-sphere or 3-plane.
/// Analytic route: the norm condition reduces to an Apollonius equation in
/// the two finite reference points (with simplified forms when one of the
/// three is infinite).
inline Locus norm_level_set(const ExtQuaternion& q1, const ExtQuaternion& q2,
                            const ExtQuaternion& q3, double N,
                            const Tolerance& tol = global_tolerance()) {
    if (!(N > 0)) throw Error(errc::degenerate_input, "level must be positive");
    const ExtQuaternion pts[3] = {q1, q2, q3};
    detail::require_pairwise_distinct(pts, tol);

    if (q3.is_infinity()) {
        // |Q| = |q - q1| / |q2 - q1|
        SphereK s{q1.value(), N * norm(q2.value() - q1.value()), 3, std::nullopt};
        return Locus::sphere(s);
    }
    if (q1.is_infinity()) {
        // |Q| = |q2 - q3| / |q - q3|
        SphereK s{q3.value(), norm(q2.value() - q3.value()) / N, 3, std::nullopt};
        return Locus::sphere(s);
    }
    if (q2.is_infinity()) {
        // |Q| = |q - q1| / |q - q3|
        return apollonius(q1.value(), q3.value(), N * N, tol);
    }
    const Quaternion &a = q1.value(), &b = q2.value(), &c = q3.value();
    const double A = N * N * norm_sq(b - a) / norm_sq(b - c);
    return apollonius(a, c, A, tol);
}

} // namespace qmoebius
