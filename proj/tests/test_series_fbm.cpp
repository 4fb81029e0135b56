#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fbmexp/exact_laws.hpp"
#include "fbmexp/fbm_finite.hpp"
#include "fbmexp/fbm_infinite.hpp"
#include "fbmexp/series_fbm.hpp"

using namespace fbmexp;
namespace sf = fbmexp::series_fbm;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kPi = std::acos(-1.0);

// Standard normal cdf through libc machinery only, kept separate from the
// library's own phi_cdf on purpose.
double ref_phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Minimum of the Gamma function over [1, 2] by brute scan; flat near the
// bottom, so a dense grid carries far more digits than the tests need.
double ref_gamma_min(double* argmin = nullptr) {
    double best = kInf, best_z = 1.0;
    for (int i = 0; i <= 200000; ++i) {
        const double z = 1.0 + i / 200000.0;
        const double g = std::tgamma(z);
        if (g < best) {
            best = g;
            best_z = z;
        }
    }
    if (argmin) *argmin = best_z;
    return best;
}

SeriesParams two_component(double mu = 0.0) {
    return SeriesParams{{1.0, 1.0}, {0.25, 0.75}, mu};
}

}  // namespace

TEST_CASE("series parameters: validation and sorted aggregates") {
    CHECK_THROWS_AS(SeriesParams({1.0}, {0.5, 0.5}, 0.0), std::domain_error);
    CHECK_THROWS_AS(SeriesParams({}, {}, 0.0), std::domain_error);
    CHECK_THROWS_AS(SeriesParams({0.0, 0.0}, {0.5, 0.5}, 0.0), std::domain_error);
    CHECK_THROWS_AS(SeriesParams({1.0}, {0.0}, 0.0), std::domain_error);
    CHECK_THROWS_AS(SeriesParams({1.0}, {1.5}, 0.0), std::domain_error);
    CHECK_THROWS_AS(SeriesParams({1.0}, {-0.3}, 0.0), std::domain_error);
    CHECK_THROWS_AS(SeriesParams({1.0}, {0.5}, kInf), std::domain_error);
    CHECK_THROWS_AS(SeriesParams({kInf}, {0.5}, 0.0), std::domain_error);

    // Zero-weight components do not take part in the index range.
    const SeriesParams s({0.0, 2.0, 1.0}, {0.9, 0.3, 0.6}, -1.0);
    CHECK(s.sigma_sq() == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(s.h_min() == 0.3);
    CHECK(s.h_max() == 0.6);
    CHECK(s.active_count() == 2);
    CHECK(s.rho() == doctest::Approx(3.0).epsilon(1e-15));
    CHECK_FALSE(s.has_negative_weight());

    const SeriesParams neg({1.0, -0.5}, {0.4, 0.6}, 0.0);
    CHECK(neg.has_negative_weight());
    CHECK(neg.sigma_sq() == doctest::Approx(1.25).epsilon(1e-15));
    CHECK_THROWS_AS(neg.rho(), std::domain_error);

    // Permuting the component lists cannot change a single bit of any
    // aggregate: awkward values stress the accumulation order.
    const std::vector<double> w{0.1, 0.7, 0.3, 1e-3, 5.0, 0.2};
    const std::vector<double> h{0.21, 0.34, 0.55, 0.89, 0.13, 0.99};
    const SeriesParams base(w, h, 0.4);
    std::vector<int> idx{0, 1, 2, 3, 4, 5};
    for (int rep = 0; rep < 6; ++rep) {
        std::next_permutation(idx.begin(), idx.end());
        std::vector<double> wp, hp;
        for (int i : idx) {
            wp.push_back(w[i]);
            hp.push_back(h[i]);
        }
        const SeriesParams perm(wp, hp, 0.4);
        CHECK(perm.sigma_sq() == base.sigma_sq());
        CHECK(perm.rho() == base.rho());
        CHECK(perm.h_min() == base.h_min());
        CHECK(perm.h_max() == base.h_max());
    }
}

TEST_CASE("series log-normal parameters: closed forms and one-term collapse") {
    const Tolerance tight{1e-12, 1e-12, 400};

    // One nonzero weight reproduces the single-process location and scale.
    {
        const SeriesParams s({0.0, 0.7}, {0.5, 0.3}, -0.4);
        const FbmParams p{-0.4, 0.7, 0.3, 2.0};
        const auto f = ProbingDensity::truncated_exponential(0.4, 2.0);
        const auto lp = sf::lognormal_params_series(s, f, 2.0, tight);
        CHECK(lp.m == fbm_finite::m_lambda(p, 0.4));
        CHECK(lp.s == doctest::Approx(fbm_finite::s_lambda(p, 0.4, tight)).epsilon(1e-15));
    }

    // Flat density on [0, 1]: scale squares add, location is weight-free.
    {
        const SeriesParams s = two_component(0.3);
        const auto f = ProbingDensity::truncated_exponential(0.0, 1.0);
        const auto lp = sf::lognormal_params_series(s, f, 1.0, tight);
        CHECK(lp.m == doctest::Approx(0.15).epsilon(1e-14));
        CHECK(lp.s * lp.s == doctest::Approx(1.0 / 2.5 + 1.0 / 3.5).epsilon(1e-12));
    }

    // Equal indices factor the common power of the horizon.
    {
        const SeriesParams s({1.0, 2.0, 3.0}, {0.4, 0.4, 0.4}, 0.0);
        const double horizon = 1.7;
        const auto f = ProbingDensity::truncated_exponential(0.0, horizon);
        const auto lp = sf::lognormal_params_series(s, f, horizon, tight);
        const double expect = 14.0 * std::pow(horizon, 0.8) / 2.8;
        CHECK(lp.s * lp.s == doctest::Approx(expect).epsilon(1e-12));
    }

    // A tabulated copy of the same tilt goes through the generic quadrature
    // route and must land on the closed-path numbers.
    {
        const SeriesParams s = two_component(-0.2);
        const double lam = 0.4, horizon = 1.0;
        const auto fast = ProbingDensity::truncated_exponential(lam, horizon);
        const double log_c = std::log(lam) - std::log(std::expm1(lam * horizon));
        const auto slow = ProbingDensity::tabulated(
            [log_c, lam](double t) { return std::exp(log_c + lam * t); },
            [log_c, lam](double t) { return log_c + lam * t; }, horizon);
        const auto a = sf::lognormal_params_series(s, fast, horizon, tight);
        const auto b = sf::lognormal_params_series(s, slow, horizon, tight);
        CHECK(a.m == doctest::Approx(b.m).epsilon(1e-8));
        CHECK(a.s == doctest::Approx(b.s).epsilon(1e-8));
    }

    // Permutation leaves the aggregated scale bit-identical.
    {
        const SeriesParams a({0.3, 1.1, 0.6}, {0.2, 0.5, 0.8}, 0.1);
        const SeriesParams b({0.6, 0.3, 1.1}, {0.8, 0.2, 0.5}, 0.1);
        const auto f = ProbingDensity::truncated_exponential(-0.7, 1.3);
        const auto la = sf::lognormal_params_series(a, f, 1.3, tight);
        const auto lb = sf::lognormal_params_series(b, f, 1.3, tight);
        CHECK(la.m == lb.m);
        CHECK(la.s == lb.s);
    }
}

TEST_CASE("finite-horizon series upper bound: center, branches, collapse") {
    // Both branches meet at the central value with probability one half.
    for (double mu : {-1.0, 0.0, 0.8}) {
        for (double horizon : {0.5, 1.0, 3.0}) {
            const SeriesParams s({0.4, 1.2}, {0.3, 0.9}, mu);
            const double center = horizon * std::exp(mu * horizon / 2.0);
            CHECK(sf::upper_cdf_finite(s, horizon, center).value ==
                  doctest::Approx(0.5).epsilon(1e-12));
            CHECK(sf::upper_cdf_finite(s, horizon, center * (1.0 - 1e-12)).value ==
                  doctest::Approx(0.5).epsilon(1e-9));
            CHECK(sf::upper_cdf_finite(s, horizon, center * (1.0 + 1e-12)).value ==
                  doctest::Approx(0.5).epsilon(1e-9));
        }
    }

    // One-term collapse onto the flat-tilt single-process bound, both sides
    // of the center, horizons on both sides of one.
    for (double hurst : {0.3, 0.8}) {
        for (double horizon : {0.7, 2.0}) {
            const SeriesParams s({0.9}, {hurst}, -0.3);
            const FbmParams p{-0.3, 0.9, hurst, horizon};
            const double center = horizon * std::exp(-0.3 * horizon / 2.0);
            for (double scale : {0.05, 0.4, 1.0, 2.5, 30.0}) {
                const double x = center * scale;
                CHECK(sf::upper_cdf_finite(s, horizon, x).value ==
                      doctest::Approx(fbm_finite::upper_cdf(p, x, 0.0).value)
                          .epsilon(1e-12));
            }
        }
    }

    // Hand-built normal argument on the low branch.
    {
        const SeriesParams s = two_component(0.0);
        const double x = std::exp(-1.0);
        const double expect = ref_phi(-std::sqrt(2.5) / std::sqrt(2.0));
        CHECK(sf::upper_cdf_finite(s, 1.0, x).value == doctest::Approx(expect).epsilon(1e-12));
    }
    // And on the high branch, with a horizon below one so the smaller power
    // of the horizon switches sides.
    {
        const SeriesParams s({1.0, 1.0}, {0.25, 0.75}, 0.0);
        const double horizon = 0.5;
        const double dev = 1.0;  // log x = log T + mu T/2 + 1
        const double x = horizon * std::exp(dev);
        const double denom = std::sqrt(2.0) * std::min(std::pow(0.5, 0.25), std::pow(0.5, 0.75));
        const double expect = ref_phi(std::sqrt(3.5) / denom * dev);
        CHECK(sf::upper_cdf_finite(s, horizon, x).value == doctest::Approx(expect).epsilon(1e-12));
    }

    // Splitting one weight across equal indices changes nothing.
    {
        const SeriesParams split({1.0, 1.0}, {0.6, 0.6}, -0.5);
        const SeriesParams merged({std::sqrt(2.0)}, {0.6}, -0.5);
        for (double x : {0.1, 0.5, 1.0, 2.0, 10.0}) {
            CHECK(sf::upper_cdf_finite(split, 1.4, x).value ==
                  doctest::Approx(sf::upper_cdf_finite(merged, 1.4, x).value).epsilon(1e-14));
        }
    }

    // Monotone in x, clamped, zero below the support.
    {
        const SeriesParams s({0.5, 0.7, 0.2}, {0.2, 0.5, 1.0}, 0.4);
        double prev = -1.0;
        for (int i = 0; i <= 120; ++i) {
            const double x = 1e-4 * std::pow(1e8, i / 120.0);
            const double v = sf::upper_cdf_finite(s, 2.0, x).value;
            CHECK(v >= prev - 1e-13);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            prev = v;
        }
        CHECK(sf::upper_cdf_finite(s, 2.0, -1.0).value == 0.0);
        CHECK_THROWS_AS(sf::upper_cdf_finite(s, kInf, 1.0), std::domain_error);
    }
}

TEST_CASE("infinite-horizon series upper bound: all four drift/index cases") {
    // Positive drift with indices below one: nothing accumulates at any x.
    {
        const SeriesParams s({1.0, 0.5}, {0.3, 0.9}, 0.7);
        for (double x : {0.1, 1.0, 100.0}) {
            CHECK(sf::upper_cdf_infinite(s, x).value == 0.0);
        }
    }

    // Driftless pinned value: one Brownian component at x = 1.
    {
        const SeriesParams s({1.0}, {0.5}, 0.0);
        CHECK(sf::upper_cdf_infinite(s, 1.0).value ==
              doctest::Approx(ref_phi(-std::sqrt(2.0))).epsilon(1e-12));
    }
    // Driftless multi-index form rebuilt from libc pieces.
    {
        const SeriesParams s({0.8, 0.6}, {0.35, 0.7}, 0.0);
        const double sig = std::sqrt(0.8 * 0.8 + 0.6 * 0.6);
        const double gmax = std::max(std::tgamma(1.7), std::tgamma(2.4));
        for (double x : {0.2, 1.0, 7.0}) {
            const double expect =
                ref_phi(-std::sqrt(2.0 / gmax) /
                        (sig * std::max(std::pow(x, 0.35), std::pow(x, 0.7))));
            CHECK(sf::upper_cdf_infinite(s, x).value == doctest::Approx(expect).epsilon(1e-10));
        }
    }

    // Negative drift: both branches, with every flavor of the sharpened
    // Gamma constant (range right of, left of, and straddling the minimizer).
    {
        double z0;
        const double g0 = ref_gamma_min(&z0);
        struct Case {
            double h_lo, h_hi;
        };
        for (const Case& c : {Case{0.35, 0.45}, Case{0.1, 0.15}, Case{0.1, 0.5}}) {
            const SeriesParams s({0.7, 0.9}, {c.h_lo, c.h_hi}, -1.3);
            const double sig = std::sqrt(0.7 * 0.7 + 0.9 * 0.9);
            double geff = g0;
            if (2.0 * c.h_lo + 1.0 > z0) geff = std::tgamma(2.0 * c.h_lo + 1.0);
            else if (2.0 * c.h_hi + 1.0 < z0) geff = std::tgamma(2.0 * c.h_hi + 1.0);
            const double gmax =
                std::max(std::tgamma(2.0 * c.h_lo + 1.0), std::tgamma(2.0 * c.h_hi + 1.0));
            for (double x : {0.05, 0.5, 0.76923, 2.0, 40.0}) {
                const double arg = std::log(1.3) + std::log(x);
                const double plo = std::pow(1.3, c.h_lo), phi = std::pow(1.3, c.h_hi);
                const double expect =
                    (arg >= 0.0)
                        ? ref_phi(std::max(plo, phi) / sig * std::sqrt(2.0 / geff) * arg)
                        : ref_phi(std::min(plo, phi) / sig * std::sqrt(2.0 / gmax) * arg);
                CHECK(sf::upper_cdf_infinite(s, x).value ==
                      doctest::Approx(expect).epsilon(1e-6));
            }
        }
    }

    // Index-one case: a single linear component makes the bound the exact
    // ray law on both sides of the kink.
    {
        for (double mu : {-1.0, 0.0, 1.0}) {
            const SeriesParams s({0.8}, {1.0}, mu);
            for (double x : {0.05, 0.3, 1.0, 2.0, 25.0}) {
                CHECK(sf::upper_cdf_infinite(s, x).value ==
                      doctest::Approx(exact_laws::cdf_h1_infinite(mu, 0.8, x)).epsilon(1e-12));
            }
        }
        // Mixed list containing an index-one term: kink at x = -1/mu.
        const SeriesParams mix({0.5, 0.5}, {0.4, 1.0}, -2.0);
        CHECK(sf::upper_cdf_infinite(mix, 0.5).value == doctest::Approx(0.5).epsilon(1e-12));
        const double sig = std::sqrt(0.5);
        {
            const double x = 0.2;  // 1 + mu x > 0
            const double expect = ref_phi(-(1.0 - 2.0 * x) / (sig * std::max(x, std::pow(x, 0.4))));
            CHECK(sf::upper_cdf_infinite(mix, x).value == doctest::Approx(expect).epsilon(1e-10));
        }
        {
            const double x = 3.0;  // 1 + mu x < 0
            double z0;
            const double g0 = ref_gamma_min(&z0);
            double geff = g0;
            if (2.0 * 0.4 + 1.0 > z0) geff = std::tgamma(1.8);
            const double expect =
                ref_phi(-std::sqrt(2.0 / geff) * (1.0 - 2.0 * x) / (sig * std::min(x, std::pow(x, 0.4))));
            CHECK(sf::upper_cdf_infinite(mix, x).value == doctest::Approx(expect).epsilon(1e-8));
        }
    }

    // Upper bound really does dominate the exact Brownian law.
    {
        const SeriesParams s({1.0}, {0.5}, -1.0);
        for (int i = 0; i <= 60; ++i) {
            const double x = 1e-2 * std::pow(1e4, i / 60.0);
            CHECK(sf::upper_cdf_infinite(s, x).value >=
                  exact_laws::cdf_h_half_infinite(-1.0, 1.0, x) - 1e-12);
        }
    }

    // Monotone in x across the branch seam.
    {
        const SeriesParams s({0.6, 0.8}, {0.2, 0.45}, -0.7);
        double prev = -1.0;
        for (int i = 0; i <= 150; ++i) {
            const double x = 1e-3 * std::pow(1e7, i / 150.0);
            const double v = sf::upper_cdf_infinite(s, x).value;
            CHECK(v >= prev - 1e-13);
            prev = v;
        }
    }
}

TEST_CASE("finite-horizon series moments: collapse, cases, permutation") {
    // One-term collapse onto the single-process bracket.
    for (double mu : {-1.0, 0.0, 1.0}) {
        for (double hurst : {0.3, 0.8}) {
            for (double horizon : {0.5, 2.0}) {
                for (double pth : {1.0, 2.0, 3.5}) {
                    const SeriesParams s({1.1}, {hurst}, mu);
                    const FbmParams p{mu, 1.1, hurst, horizon};
                    const auto a = sf::moment_bounds_finite(s, horizon, pth);
                    const auto b = fbm_finite::moment_bounds(p, pth);
                    CHECK(a.lower == doctest::Approx(b.lower).epsilon(1e-13));
                    CHECK(a.upper == doctest::Approx(b.upper).epsilon(1e-13));
                }
            }
        }
    }

    // Hand-built three-case upper and the shared lower.
    {
        const SeriesParams s({1.0, 1.0}, {0.25, 0.75}, 1.0);
        const auto mb = sf::moment_bounds_finite(s, 1.0, 2.0);
        const double var_top = 4.0 * 2.0 * 1.0;  // p^2 sigma^2 max(T^{2h})
        CHECK(mb.upper ==
              doctest::Approx(std::expm1(2.0) / 2.0 * std::exp(var_top / 2.0)).epsilon(1e-12));
        CHECK(mb.lower ==
              doctest::Approx(std::exp(1.0 + var_top / 7.0)).epsilon(1e-12));
    }
    {
        const SeriesParams s({1.0, 1.0}, {0.25, 0.75}, -1.0);
        const auto mb = sf::moment_bounds_finite(s, 1.0, 2.0);
        CHECK(mb.upper == doctest::Approx(std::pow(-std::expm1(-1.0), 2.0) *
                                          std::exp(4.0)).epsilon(1e-12));
    }
    {
        const SeriesParams s({1.0, 1.0}, {0.25, 0.75}, 0.0);
        const auto mb = sf::moment_bounds_finite(s, 1.0, 2.0);
        CHECK(mb.upper == doctest::Approx(std::exp(4.0)).epsilon(1e-12));
    }

    // Identical aggregates give bit-identical outputs: four unit weights
    // against one weight of two (both sums are exact in binary).
    {
        const SeriesParams many({1.0, 1.0, 1.0, 1.0}, {0.6, 0.6, 0.6, 0.6}, -0.4);
        const SeriesParams one({2.0}, {0.6}, -0.4);
        const auto a = sf::moment_bounds_finite(many, 1.3, 2.5);
        const auto b = sf::moment_bounds_finite(one, 1.3, 2.5);
        CHECK(a.lower == b.lower);
        CHECK(a.upper == b.upper);
    }

    // Permutation leaves the bracket bit-identical.
    {
        const SeriesParams a({0.3, 1.1, 0.6, 0.1}, {0.2, 0.5, 0.8, 0.4}, 0.7);
        const SeriesParams b({0.1, 0.6, 1.1, 0.3}, {0.4, 0.8, 0.5, 0.2}, 0.7);
        const auto ma = sf::moment_bounds_finite(a, 2.0, 3.0);
        const auto mb = sf::moment_bounds_finite(b, 2.0, 3.0);
        CHECK(ma.lower == mb.lower);
        CHECK(ma.upper == mb.upper);
    }

    // Ordering over a grid; domain errors.
    {
        for (double mu : {-2.0, 0.0, 1.5}) {
            for (double horizon : {0.4, 1.0, 5.0}) {
                for (double pth : {1.0, 2.0, 4.0}) {
                    const SeriesParams s({0.5, 0.8}, {0.3, 0.7}, mu);
                    const auto mb = sf::moment_bounds_finite(s, horizon, pth);
                    CHECK(mb.lower <= mb.upper);
                    CHECK(mb.lower > 0.0);
                }
            }
        }
        const SeriesParams s({1.0}, {0.5}, 0.0);
        CHECK_THROWS_AS(sf::moment_bounds_finite(s, 1.0, 0.5), std::domain_error);
        CHECK_THROWS_AS(sf::moment_bounds_finite(s, kInf, 2.0), std::domain_error);
    }
}

TEST_CASE("infinite-horizon series moments: divergence, Brownian collapse, bracket") {
    // Divergent regimes on both sides.
    {
        const SeriesParams pos({1.0}, {0.3}, 0.5);
        CHECK(sf::moment_bounds_infinite(pos, 1.0).lower == kInf);
        CHECK(sf::moment_bounds_infinite(pos, 1.0).upper == kInf);
        const SeriesParams zero({1.0}, {0.3}, 0.0);
        CHECK(sf::moment_bounds_infinite(zero, 2.0).upper == kInf);
        const SeriesParams high({0.5, 0.5}, {0.3, 0.6}, -1.0);
        CHECK(sf::moment_bounds_infinite(high, 1.0).lower == kInf);
        CHECK(sf::moment_bounds_infinite(high, 1.0).upper == kInf);
    }

    // All-Brownian list collapses to the exact inverse-Gamma moments.
    {
        const SeriesParams s({1.0, 1.0}, {0.5, 0.5}, -2.0);
        const auto mb = sf::moment_bounds_infinite(s, 1.0);
        CHECK(mb.lower == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(mb.upper == doctest::Approx(1.0).epsilon(1e-12));
        // Order at the shape parameter diverges exactly.
        CHECK(sf::moment_bounds_infinite(s, 2.0).upper == kInf);
    }

    // Closed-form upper rebuilt from libc pieces, orders on both sides of 1.
    {
        const double mu = -1.5, h_hi = 0.4;
        const SeriesParams s({0.6, 0.8}, {0.2, h_hi}, mu);
        const double sig_sq = 0.36 + 0.64;
        auto ref_upper = [&](double q) {
            const double bulk = (1.0 - std::exp(mu)) * std::exp(q * q * sig_sq / 2.0);
            const double spike =
                2.0 * std::exp(mu / 2.0) *
                std::exp((0.5 - h_hi) * std::pow(std::pow(-2.0 * h_hi / mu, h_hi) * q *
                                                     std::sqrt(sig_sq),
                                                 2.0 / (1.0 - 2.0 * h_hi)));
            return std::pow(-mu, -q) * (bulk + spike);
        };
        CHECK(sf::moment_bounds_infinite(s, 1.0).upper ==
              doctest::Approx(ref_upper(1.0)).epsilon(1e-12));
        CHECK(sf::moment_bounds_infinite(s, 2.0).upper ==
              doctest::Approx(ref_upper(2.0)).epsilon(1e-12));
        // Below order one the upper is the power of the order-one value.
        CHECK(sf::moment_bounds_infinite(s, 0.5).upper ==
              doctest::Approx(std::sqrt(ref_upper(1.0))).epsilon(1e-12));
    }

    // Lower bound agrees with an independent coarse scan over the rate.
    {
        const double mu = -0.8, pth = 1.5;
        const SeriesParams s({0.6, 0.8}, {0.2, 0.4}, mu);
        const double sig_sq = 1.0;
        const double g0 = ref_gamma_min();
        double scan_best = 0.0;
        for (int i = 0; i <= 20000; ++i) {
            const double lam = 0.8 * std::pow(1e-6, 1.0 - i / 10000.0);  // 8e-7 .. 8e5
            const double pow_max = std::max(std::pow(lam, 0.4), std::pow(lam, 0.8));
            const double v = std::exp(pth * (-std::log(lam) + 1.0 + mu / lam) +
                                      pth * pth * sig_sq * g0 / (4.0 * pow_max));
            scan_best = std::max(scan_best, v);
        }
        const auto mb = sf::moment_bounds_infinite(s, pth);
        CHECK(mb.lower >= scan_best * (1.0 - 1e-9));
        CHECK(mb.lower <= scan_best * (1.0 + 1e-5));
        CHECK(mb.lower <= mb.upper);
    }

    // Indices touching 1/2 from below: the lower survives, the upper is
    // not available and reports +inf.
    {
        const SeriesParams s({0.7, 0.7}, {0.3, 0.5}, -1.0);
        const auto mb = sf::moment_bounds_infinite(s, 1.0);
        CHECK(std::isfinite(mb.lower));
        CHECK(mb.lower > 0.0);
        CHECK(mb.upper == kInf);
    }

    // Truncation ordering: the infinite-horizon upper dominates every
    // finite-horizon lower bound.
    {
        const SeriesParams s({0.5, 0.5}, {0.2, 0.35}, -1.0);
        for (double horizon : {1.0, 5.0, 20.0}) {
            for (double pth : {1.0, 2.0}) {
                CHECK(sf::moment_bounds_infinite(s, pth).upper >=
                      sf::moment_bounds_finite(s, horizon, pth).lower);
            }
        }
    }

    {
        const SeriesParams s({1.0}, {0.3}, -1.0);
        CHECK_THROWS_AS(sf::moment_bounds_infinite(s, 0.0), std::domain_error);
        CHECK_THROWS_AS(sf::moment_bounds_infinite(s, -1.0), std::domain_error);
    }
}

TEST_CASE("series lower bound, finite horizon: oracle routes and coverage holes") {
    const Tolerance tight{1e-12, 1e-12, 400};

    // One-term list at index >= 1/2 against the generic concentration
    // machinery fed the same supremum constant.
    {
        const double mu = -0.5, sigma = 0.8, hurst = 0.6, horizon = 2.0;
        const SeriesParams s({sigma}, {hurst}, mu);
        const GaussianModel model{
            [mu](double t) { return mu * t; },
            [sigma, hurst](double u, double v) {
                const double th = 2.0 * hurst;
                return 0.5 * sigma * sigma *
                       (std::pow(u, th) + std::pow(v, th) - std::pow(std::abs(u - v), th));
            },
            horizon};
        const double sup_mean = std::sqrt(2.0 / kPi) * sigma * std::pow(horizon, hurst);
        for (const bool shifted : {false, true}) {
            // The generic machinery wants an explicit shift; the series call
            // exercises its closed zero-shift route when drift is empty.
            std::function<double(double)> drift;
            std::function<double(double)> oracle_drift = [](double) { return 0.0; };
            if (shifted) {
                drift = [](double t) { return 0.3 * std::cos(t); };
                oracle_drift = drift;
            }
            const auto ref = lower_cdf_bound_borell(model, oracle_drift, sup_mean, 0.0, tight);
            for (double x : {0.5, 2.0, ref.valid_from * 1.5, ref.valid_from * 20.0, 1e4}) {
                const auto a = sf::lower_cdf(s, horizon, x, drift, tight);
                const auto b = lower_cdf_bound_borell(model, oracle_drift, sup_mean, x, tight);
                CHECK(a.value == doctest::Approx(b.value).epsilon(1e-9));
                CHECK(a.valid_from == doctest::Approx(b.valid_from).epsilon(1e-9));
            }
        }
    }

    // One-term list below 1/2 against the single-process route.
    {
        const double mu = 0.2, sigma = 0.5, hurst = 0.3, horizon = 1.5;
        const SeriesParams s({sigma}, {hurst}, mu);
        const FbmParams p{mu, sigma, hurst, horizon};
        const auto ref0 = fbm_finite::lower_cdf_small_h(p, 1.0, {}, tight);
        CHECK(sf::lower_cdf(s, horizon, 1.0, {}, tight).valid_from ==
              doctest::Approx(ref0.valid_from).epsilon(1e-9));
        for (double x : {ref0.valid_from * 1.2, ref0.valid_from * 3.0, ref0.valid_from * 50.0}) {
            const auto a = sf::lower_cdf(s, horizon, x, {}, tight);
            const auto b = fbm_finite::lower_cdf_small_h(p, x, {}, tight);
            CHECK(a.value == doctest::Approx(b.value).epsilon(1e-9));
        }
        // Below the threshold the bound degenerates to zero.
        const auto below = sf::lower_cdf(s, horizon, ref0.valid_from * 0.5, {}, tight);
        CHECK(below.value == 0.0);
    }

    // Multi-component value rebuilt from scratch.
    {
        const double mu = -0.3, horizon = 1.2;
        const SeriesParams s({0.4, 0.3}, {0.65, 0.9}, mu);
        const double rho = 0.7;
        const double pow_top = std::max(std::pow(horizon, 0.65), std::pow(horizon, 0.9));
        const double sup_mean = std::sqrt(2.0 / kPi) * rho * pow_top;
        const double mass = std::expm1(mu * horizon) / mu;
        const double sup_var =
            0.25 * std::max(std::pow(horizon, 1.3), std::pow(horizon, 1.8));
        const double x = std::exp(sup_mean) * mass * 8.0;
        const double dev = std::log(x / mass) - sup_mean;
        const double expect = 1.0 - std::exp(-dev * dev / (2.0 * sup_var));
        CHECK(sf::lower_cdf(s, horizon, x).value == doctest::Approx(expect).epsilon(1e-12));
        CHECK(sf::lower_cdf(s, horizon, x).valid_from ==
              doctest::Approx(std::exp(sup_mean) * mass).epsilon(1e-12));
    }

    // Large x pushes the bound to one; below threshold it is zero.
    {
        const SeriesParams s({0.5, 0.5}, {0.2, 0.4}, -1.0);
        CHECK(sf::lower_cdf(s, 1.0, 1e250).value == doctest::Approx(1.0).epsilon(1e-10));
        const double vf = sf::lower_cdf(s, 1.0, 1.0).valid_from;
        CHECK(vf > 0.0);
        CHECK(sf::lower_cdf(s, 1.0, vf * 0.99).value == 0.0);
    }

    // Not-covered configurations throw.
    {
        const SeriesParams straddle({1.0, 1.0}, {0.3, 0.7}, 0.0);
        CHECK_THROWS_AS(sf::lower_cdf(straddle, 1.0, 5.0), std::domain_error);
        const SeriesParams neg({1.0, -0.5}, {0.6, 0.7}, 0.0);
        CHECK_THROWS_AS(sf::lower_cdf(neg, 1.0, 5.0), std::domain_error);
    }
}

TEST_CASE("series lower bound, infinite horizon: mean bound and Markov step") {
    const double mu = -2.0;
    const SeriesParams s({0.5, 0.5}, {0.2, 0.4}, mu);

    // The bound is one minus (mean upper bound)/x; rebuild the constant.
    const double sig_sq = 0.5;
    const double h_hi = 0.4;
    const double bracket =
        (1.0 - std::exp(mu)) * std::exp(sig_sq / 2.0) +
        2.0 * std::exp(mu / 2.0) *
            std::exp((0.5 - h_hi) *
                     std::pow(std::pow(-2.0 * h_hi / mu, h_hi) * std::sqrt(sig_sq),
                              2.0 / (1.0 - 2.0 * h_hi)));
    const double mean_bound = bracket / (-mu);
    CHECK(sf::lower_cdf(s, kInf, 2.0 * mean_bound).value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sf::lower_cdf(s, kInf, 1.0).valid_from == doctest::Approx(mean_bound).epsilon(1e-12));
    CHECK(sf::lower_cdf(s, kInf, mean_bound * 0.9).value == 0.0);

    // Internal consistency: the same constant is the order-one moment upper.
    const double m1 = sf::moment_bounds_infinite(s, 1.0).upper;
    for (double x : {mean_bound * 1.5, mean_bound * 4.0, mean_bound * 100.0}) {
        CHECK(sf::lower_cdf(s, kInf, x).value == doctest::Approx(1.0 - m1 / x).epsilon(1e-12));
    }

    // Monotone in x and capped by the matching upper bound.
    double prev = -1.0;
    for (int i = 0; i <= 100; ++i) {
        const double x = mean_bound * std::pow(1e4, i / 100.0);
        const double lo = sf::lower_cdf(s, kInf, x).value;
        CHECK(lo >= prev - 1e-13);
        CHECK(lo <= sf::upper_cdf_infinite(s, x).value + 1e-12);
        prev = lo;
    }

    // Domain limits: drift shifts and uncovered regimes throw.
    CHECK_THROWS_AS(sf::lower_cdf(s, kInf, 1.0, [](double) { return 0.1; }),
                    std::domain_error);
    const SeriesParams pos({0.5}, {0.2}, 0.3);
    CHECK_THROWS_AS(sf::lower_cdf(pos, kInf, 1.0), std::domain_error);
    const SeriesParams half({0.5, 0.5}, {0.2, 0.5}, -1.0);
    CHECK_THROWS_AS(sf::lower_cdf(half, kInf, 1.0), std::domain_error);
}

TEST_CASE("series finiteness classifier") {
    using Tag = FinitenessTag;

    CHECK(sf::classify_finiteness_series(SeriesParams({1.0, 1.0}, {0.3, 0.4}, -1.0)).tag ==
          Tag::AlmostSurelyFinite);
    CHECK(sf::classify_finiteness_series(SeriesParams({1.0, 1.0}, {0.6, 0.7}, -1.0)).tag ==
          Tag::AlmostSurelyFinite);
    CHECK(sf::classify_finiteness_series(SeriesParams({1.0}, {0.9}, 1.0)).tag ==
          Tag::AlmostSurelyInfinite);

    {
        const auto v = sf::classify_finiteness_series(SeriesParams({1.0, 0.5}, {0.3, 0.8}, 0.0));
        CHECK(v.tag == Tag::FiniteWithProbAtMostHalf);
        CHECK(v.probability_cap == doctest::Approx(0.5).epsilon(1e-15));
    }

    // Index one present, nonnegative drift: cap through the full scale.
    {
        const auto v = sf::classify_finiteness_series(SeriesParams({2.0, 1.0}, {1.0, 0.4}, 0.5));
        CHECK(v.tag == Tag::FiniteWithProbAtMost);
        CHECK(v.probability_cap ==
              doctest::Approx(ref_phi(-0.5 / std::sqrt(5.0))).epsilon(1e-12));
        const auto w = sf::classify_finiteness_series(SeriesParams({1.0}, {1.0}, 0.0));
        CHECK(w.tag == Tag::FiniteWithProbAtMost);
        CHECK(w.probability_cap == doctest::Approx(0.5).epsilon(1e-15));
    }

    // Index one with negative drift: undecided, but the ray components
    // alone still cap the finiteness probability.
    {
        const auto v =
            sf::classify_finiteness_series(SeriesParams({3.0, 4.0}, {1.0, 0.3}, -1.0));
        CHECK(v.tag == Tag::Unknown);
        CHECK(v.probability_cap == doctest::Approx(ref_phi(1.0 / 3.0)).epsilon(1e-12));
    }

    // Zero weights do not drag their index into the decision.
    CHECK(sf::classify_finiteness_series(SeriesParams({0.0, 1.0}, {1.0, 0.4}, 1.0)).tag ==
          Tag::AlmostSurelyInfinite);

    // One-term agreement with the single-process classifier where the tags
    // are defined the same way.
    for (double mu : {-0.5, 0.0, 0.5}) {
        const SeriesParams s({1.0}, {0.4}, mu);
        const FbmParams p{mu, 1.0, 0.4, kInf};
        CHECK(sf::classify_finiteness_series(s).tag ==
              fbm_infinite::classify_finiteness(p).tag);
    }
}

TEST_CASE("series bounds sandwich consistently where both sides apply") {
    // Finite horizon, indices at or above 1/2.
    {
        const SeriesParams s({0.4, 0.3}, {0.6, 0.8}, -0.2);
        const double vf = sf::lower_cdf(s, 1.0, 1.0).valid_from;
        for (double x : {vf * 1.01, vf * 2.0, vf * 10.0, vf * 1e3}) {
            CHECK(sf::lower_cdf(s, 1.0, x).value <=
                  sf::upper_cdf_finite(s, 1.0, x).value + 1e-12);
        }
    }
    // Finite horizon, indices below 1/2.
    {
        const SeriesParams s({0.4, 0.3}, {0.2, 0.4}, 0.1);
        const double vf = sf::lower_cdf(s, 1.0, 1.0).valid_from;
        for (double x : {vf * 1.01, vf * 2.0, vf * 10.0, vf * 1e3}) {
            CHECK(sf::lower_cdf(s, 1.0, x).value <=
                  sf::upper_cdf_finite(s, 1.0, x).value + 1e-12);
        }
    }

    // Adding a zero-weight component changes nothing anywhere.
    {
        const SeriesParams a({0.5, 0.8}, {0.3, 0.45}, -1.0);
        const SeriesParams b({0.5, 0.0, 0.8}, {0.3, 0.99, 0.45}, -1.0);
        CHECK(sf::upper_cdf_finite(a, 2.0, 1.7).value == sf::upper_cdf_finite(b, 2.0, 1.7).value);
        CHECK(sf::upper_cdf_infinite(a, 0.9).value == sf::upper_cdf_infinite(b, 0.9).value);
        const auto ma = sf::moment_bounds_finite(a, 2.0, 2.0);
        const auto mb = sf::moment_bounds_finite(b, 2.0, 2.0);
        CHECK(ma.lower == mb.lower);
        CHECK(ma.upper == mb.upper);
        CHECK(sf::lower_cdf(a, kInf, 3.0).value == sf::lower_cdf(b, kInf, 3.0).value);
    }
}
