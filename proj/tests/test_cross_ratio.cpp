#include <catch2/catch_amalgamated.hpp>

#include "qmoebius/cross_ratio.hpp"
#include "qmoebius/oracle.hpp"

using namespace qmoebius;

namespace {
const ExtQuaternion kInf = ExtQuaternion::infinity();

Quaternion cr(const ExtQuaternion& a, const ExtQuaternion& b, const ExtQuaternion& c,
              const ExtQuaternion& d) {
    return cross_ratio(a, b, c, d).value();
}
} // namespace

TEST_CASE("normalized quadruples reproduce the fourth point exactly", "[crossratio]") {
    const Quaternion q{2, 1, 0, -3};
    REQUIRE(cr(Quaternion{0}, Quaternion{1}, kInf, q) == q);

    RandomStream rng(47);
    for (int n = 0; n < 200; ++n) {
        const Quaternion p = random_quaternion(rng, 10.0);
        if (norm(p) < 1e-6 || norm(p - Quaternion{1}) < 1e-6) continue;
        REQUIRE(cr(Quaternion{0}, Quaternion{1}, kInf, p) == p);
    }
}

TEST_CASE("finite quadruples against the exact rational oracle", "[crossratio]") {
    SECTION("(0, 1, 2, 3) -> -3") {
        REQUIRE(cr(Quaternion{0}, Quaternion{1}, Quaternion{2}, Quaternion{3}) == Quaternion{-3});
        const RationalQuaternion exact =
            exact_cross_ratio(RationalQuaternion(0), RationalQuaternion(1), RationalQuaternion(2),
                              RationalQuaternion(3));
        REQUIRE(exact.to_quaternion() == Quaternion{-3});
    }
    SECTION("(0, 1, 2, i) -> (-1 + 2i)/5") {
        const Quaternion got = cr(Quaternion{0}, Quaternion{1}, Quaternion{2}, quat_i);
        const RationalQuaternion exact =
            exact_cross_ratio(RationalQuaternion(0), RationalQuaternion(1), RationalQuaternion(2),
                              RationalQuaternion::from(quat_i));
        REQUIRE(exact.to_quaternion() == Quaternion{-0.2, 0.4, 0, 0});
        REQUIRE(approx_equal(got, exact.to_quaternion(), Tolerance{1e-15, 1e-15}));
    }
}

TEST_CASE("limit formulas for an infinite argument", "[crossratio]") {
    // each case agrees with the finite formula evaluated at a large real stand-in
    RandomStream rng(53);
    const Quaternion big = Quaternion{1e8};
    for (int n = 0; n < 20; ++n) {
        const auto pts = random_distinct_points(rng, RandomConfig{0, 2.0, 1e-2}, 4);
        for (int slot = 0; slot < 4; ++slot) {
            std::array<ExtQuaternion, 4> with_inf{ExtQuaternion(pts[0]), ExtQuaternion(pts[1]),
                                                  ExtQuaternion(pts[2]), ExtQuaternion(pts[3])};
            std::array<ExtQuaternion, 4> with_big = with_inf;
            with_inf[slot] = kInf;
            with_big[slot] = ExtQuaternion(big);
            const Quaternion lim = cr(with_inf[0], with_inf[1], with_inf[2], with_inf[3]);
            const Quaternion app = cr(with_big[0], with_big[1], with_big[2], with_big[3]);
            REQUIRE(approx_equal(lim, app, Tolerance{1e-6, 1e-6}));
        }
    }
}

TEST_CASE("duplicate points are rejected", "[crossratio]") {
    REQUIRE_THROWS_AS(cross_ratio(Quaternion{0}, Quaternion{0}, Quaternion{1}, Quaternion{2}),
                      Error);
    REQUIRE_THROWS_AS(cross_ratio(kInf, Quaternion{0}, kInf, Quaternion{2}), Error);
    try {
        cross_ratio(Quaternion{0}, Quaternion{1}, Quaternion{1}, Quaternion{2});
        FAIL("expected DuplicatePoints");
    } catch (const Error& e) {
        REQUIRE(e.code() == errc::duplicate_points);
    }
}

TEST_CASE("the (norm, re) pair is the transformation invariant", "[crossratio]") {
    SECTION("reference values") {
        const CrossRatioInvariant rj = r_invariant(Quaternion{0}, Quaternion{1}, kInf, quat_j);
        REQUIRE_THAT(rj.norm, Catch::Matchers::WithinAbs(1.0, 1e-15));
        REQUIRE_THAT(rj.re, Catch::Matchers::WithinAbs(0.0, 1e-15));

        const CrossRatioInvariant r5 =
            r_invariant(Quaternion{0}, Quaternion{1}, kInf, Quaternion{5});
        REQUIRE_THAT(r5.norm, Catch::Matchers::WithinAbs(5.0, 1e-15));
        REQUIRE_THAT(r5.re, Catch::Matchers::WithinAbs(5.0, 1e-15));
    }
    SECTION("|re| <= norm always") {
        RandomStream rng(59);
        const RandomConfig cfg{59, 2.0, 1e-2};
        for (int n = 0; n < 300; ++n) {
            const auto pts = random_distinct_points(rng, cfg, 4);
            const CrossRatioInvariant r = r_invariant(pts[0], pts[1], pts[2], pts[3]);
            REQUIRE(std::abs(r.re) <= r.norm * (1 + 1e-14));
        }
    }
    SECTION("images of (0, 1, inf, j) keep the invariant (1, 0)") {
        RandomStream rng(331);
        const RandomConfig cfg{331, 1.5, 1e-2};
        int checked = 0;
        while (checked < 50) {
            const Moebius T = random_moebius(rng, cfg);
            const ExtQuaternion pts[4] = {T(Quaternion{0}), T(Quaternion{1}), T(kInf), T(quat_j)};
            bool ok = true;
            for (const auto& p : pts) ok = ok && p.is_finite() && norm(p.value()) < 1e4;
            if (!ok) continue;
            const CrossRatioInvariant r = r_invariant(pts[0], pts[1], pts[2], pts[3]);
            REQUIRE_THAT(r.norm, Catch::Matchers::WithinAbs(1.0, 1e-9));
            REQUIRE_THAT(r.re, Catch::Matchers::WithinAbs(0.0, 1e-9));
            ++checked;
        }
    }
    SECTION("invariance under random transformations") {
        RandomStream rng(61);
        const RandomConfig cfg{61, 1.5, 1e-2};
        int checked = 0;
        while (checked < 300) {
            const auto pts = random_distinct_points(rng, cfg, 4);
            const Moebius T = random_moebius(rng, cfg);
            std::array<ExtQuaternion, 4> img;
            bool ok = true;
            for (int n = 0; n < 4; ++n) {
                img[n] = T(ExtQuaternion(pts[n]));
                ok = ok && img[n].is_finite() && norm(img[n].value()) < 1e4;
            }
            if (!ok) continue;
            const CrossRatioInvariant a = r_invariant(pts[0], pts[1], pts[2], pts[3]);
            const CrossRatioInvariant b = r_invariant(img[0], img[1], img[2], img[3]);
            REQUIRE(approx_equal(a, b, Tolerance{1e-9, 1e-9}));
            ++checked;
        }
    }
}

TEST_CASE("conjugator identity", "[crossratio]") {
    SECTION("identity transformation: residual is exactly zero") {
        REQUIRE(conjugator_identity_residual(Moebius::identity(), Quaternion{0}, Quaternion{1},
                                             Quaternion{2}, quat_i) == 0.0);
    }
    SECTION("translations conjugate by 1") {
        const Moebius shift{MatGL2H{1, 1, 0, 1}};
        REQUIRE(conjugator_identity_residual(shift, Quaternion{0}, Quaternion{1}, Quaternion{2},
                                             quat_i) <= 1e-12);
    }
    SECTION("random transformations") {
        RandomStream rng(67);
        const RandomConfig cfg{67, 1.5, 1e-2};
        int checked = 0;
        while (checked < 200) {
            const auto pts = random_distinct_points(rng, cfg, 4);
            const Moebius T = random_moebius(rng, cfg);
            try {
                REQUIRE(conjugator_identity_residual(T, pts[0], pts[1], pts[2], pts[3]) <= 1e-9);
                ++checked;
            } catch (const Error&) {
                // degenerate draw, resample
            }
        }
    }
}

TEST_CASE("alternating chain invariants", "[crossratio]") {
    SECTION("(0, 1, 2, 3) -> -1/3") {
        const Quaternion got =
            chain_invariant({Quaternion{0}, Quaternion{1}, Quaternion{2}, Quaternion{3}});
        REQUIRE(approx_equal(got, Quaternion{-1.0 / 3.0}, Tolerance{1e-15, 1e-15}));
    }
    SECTION("repeated points are fine as long as consecutive differences are nonzero") {
        const Quaternion got =
            chain_invariant({Quaternion{0}, Quaternion{1}, Quaternion{0}, Quaternion{1}});
        REQUIRE(got == Quaternion{1});
    }
    SECTION("vanishing consecutive difference or bad arity is rejected") {
        REQUIRE_THROWS_AS(
            chain_invariant({Quaternion{0}, Quaternion{0}, Quaternion{1}, Quaternion{2}}), Error);
        REQUIRE_THROWS_AS(chain_invariant({Quaternion{0}, Quaternion{1}, Quaternion{2}}), Error);
    }
    SECTION("(norm, re) of the chain is preserved by transformations") {
        RandomStream rng(71);
        const RandomConfig cfg{71, 1.5, 1e-2};
        int checked = 0;
        while (checked < 200) {
            const auto pts = random_distinct_points(rng, cfg, 6);
            const Moebius T = random_moebius(rng, cfg);
            std::vector<Quaternion> img;
            bool ok = true;
            for (const auto& p : pts) {
                const ExtQuaternion e = T(ExtQuaternion(p));
                ok = ok && e.is_finite() && norm(e.value()) < 1e4;
                if (!ok) break;
                img.push_back(e.value());
            }
            if (!ok) continue;
            try {
                const Quaternion before = chain_invariant(std::span<const Quaternion>(pts));
                const Quaternion after = chain_invariant(std::span<const Quaternion>(img));
                REQUIRE_THAT(norm(after), Catch::Matchers::WithinRel(norm(before), 1e-8) ||
                                              Catch::Matchers::WithinAbs(norm(before), 1e-9));
                REQUIRE_THAT(re(after),
                             Catch::Matchers::WithinAbs(re(before), 1e-8 * (1 + norm(before))));
                ++checked;
            } catch (const Error&) {
                // images collided within tolerance, resample
            }
        }
    }
}

TEST_CASE("five-point chain", "[crossratio]") {
    SECTION("(0, 1, 2, 3, 4) evaluates via the exact oracle") {
        // (-1)(-1)^{-1}(-1)(-1)^{-1}(2)(2)^{-1} = 1
        const Quaternion got = five_point_chain(Quaternion{0}, Quaternion{1}, Quaternion{2},
                                                Quaternion{3}, Quaternion{4});
        const RationalQuaternion q[5] = {RationalQuaternion(0), RationalQuaternion(1),
                                         RationalQuaternion(2), RationalQuaternion(3),
                                         RationalQuaternion(4)};
        const RationalQuaternion exact = (q[0] - q[1]) * (q[1] - q[2]).inverse() * (q[2] - q[3]) *
                                         (q[3] - q[4]).inverse() * (q[4] - q[2]) *
                                         (q[2] - q[0]).inverse();
        REQUIRE(exact.to_quaternion() == Quaternion{1});
        REQUIRE(approx_equal(got, exact.to_quaternion(), Tolerance{1e-15, 1e-15}));
    }
    SECTION("vanishing written differences are rejected") {
        REQUIRE_THROWS_AS(five_point_chain(Quaternion{0}, Quaternion{1}, Quaternion{0},
                                           Quaternion{2}, Quaternion{3}),
                          Error);
    }
    SECTION("real scaling of all points leaves the value unchanged") {
        RandomStream rng(73);
        const RandomConfig cfg{73, 1.5, 1e-2};
        const auto pts = random_distinct_points(rng, cfg, 5);
        const Quaternion base = five_point_chain(pts[0], pts[1], pts[2], pts[3], pts[4]);
        for (double lambda : {2.0, -0.5, 10.0}) {
            const Quaternion scaled =
                five_point_chain(lambda * pts[0], lambda * pts[1], lambda * pts[2],
                                 lambda * pts[3], lambda * pts[4]);
            REQUIRE(approx_equal(scaled, base, Tolerance{1e-12, 1e-12}));
        }
    }
    SECTION("(norm, re) invariance under random transformations") {
        RandomStream rng(79);
        const RandomConfig cfg{79, 1.5, 1e-2};
        int checked = 0;
        while (checked < 200) {
            const auto pts = random_distinct_points(rng, cfg, 5);
            const Moebius T = random_moebius(rng, cfg);
            std::vector<Quaternion> img;
            bool ok = true;
            for (const auto& p : pts) {
                const ExtQuaternion e = T(ExtQuaternion(p));
                ok = ok && e.is_finite() && norm(e.value()) < 1e4;
                if (!ok) break;
                img.push_back(e.value());
            }
            if (!ok) continue;
            try {
                const Quaternion before = five_point_chain(pts[0], pts[1], pts[2], pts[3], pts[4]);
                const Quaternion after = five_point_chain(img[0], img[1], img[2], img[3], img[4]);
                REQUIRE_THAT(norm(after), Catch::Matchers::WithinRel(norm(before), 1e-8) ||
                                              Catch::Matchers::WithinAbs(norm(before), 1e-9));
                REQUIRE_THAT(re(after),
                             Catch::Matchers::WithinAbs(re(before), 1e-8 * (1 + norm(before))));
                ++checked;
            } catch (const Error&) {
                // images collided within tolerance, resample
            }
        }
    }
}
