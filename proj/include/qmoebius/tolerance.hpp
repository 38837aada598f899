#pragma once

#include <algorithm>
#include <cmath>

namespace qmoebius {

/// Hybrid absolute/relative comparison policy shared by every predicate:
/// two reals agree when |a - b| <= abs + rel * max(|a|, |b|).
struct Tolerance {
    double abs = 1e-9;
    double rel = 1e-9;

    bool near(double a, double b) const {
        return std::abs(a - b) <= abs + rel * std::max(std::abs(a), std::abs(b));
    }

    /// |a| counts as zero at the given magnitude scale.
    bool zero(double a, double scale = 1.0) const {
        return std::abs(a) <= abs + rel * std::abs(scale);
    }

    double at_scale(double scale) const { return abs + rel * std::abs(scale); }
};

/// Process-wide default used when no explicit policy is passed.
/// Set once (e.g. from a --tol flag) before concurrent use.
inline Tolerance& global_tolerance() {
    static Tolerance tol;
    return tol;
}

inline void set_global_tolerance(const Tolerance& t) { global_tolerance() = t; }

} // namespace qmoebius
