#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fbmexp/gp_core.hpp"
#include "fbmexp/numerics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

using namespace fbmexp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Drifted constant-noise process X_t = mu t + sigma N. Its exponential time
// integral over [0, inf) equals exp(sigma N)/(-mu), a log-normal variable,
// which pins every bound in this module to a closed form.
GaussianModel stationary_shift_model(double mu, double sigma) {
    return GaussianModel{
        [mu](double t) { return mu * t; },
        [sigma](double, double) { return sigma * sigma; },
        kInf,
    };
}

GaussianModel brownian_model(double mu, double sigma, double horizon) {
    return GaussianModel{
        [mu](double t) { return mu * t; },
        [sigma](double s, double t) { return sigma * sigma * std::min(s, t); },
        horizon,
    };
}

GaussianModel fractional_model(double mu, double sigma, double hurst, double horizon) {
    return GaussianModel{
        [mu](double t) { return mu * t; },
        [sigma, hurst](double s, double t) {
            const double h2 = 2.0 * hurst;
            return 0.5 * sigma * sigma *
                   (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::abs(s - t), h2));
        },
        horizon,
    };
}

double quad(const std::function<double(double)>& f, double lo, double hi) {
    return integrate(f, lo, hi, Tolerance{1e-12, 1e-12, 400});
}

}  // namespace

TEST_CASE("truncated exponential density normalizes and matches its log form") {
    const double horizon = 2.0;
    for (double lambda : {-400.0, -25.0, -3.0, -1e-12, 0.0, 1e-12, 3.0, 25.0, 400.0}) {
        const ProbingDensity f = ProbingDensity::truncated_exponential(lambda, horizon);
        CHECK(f.kind() == DensityKind::TruncatedExponential);
        CHECK(f.param() == lambda);
        CHECK(f.support() == horizon);
        const double mass = quad([&](double t) { return f.pdf(t); }, 0.0, horizon);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
        for (double t : {0.0, 0.37, 1.0, 1.99}) {
            const double p = f.pdf(t);
            if (p > 1e-300) CHECK(std::log(p) == doctest::Approx(f.log_pdf(t)).epsilon(1e-12));
        }
    }
    const ProbingDensity flat = ProbingDensity::truncated_exponential(0.0, horizon);
    CHECK(flat.pdf(1.0) == doctest::Approx(0.5));
    CHECK(flat.pdf(-0.5) == 0.0);
    CHECK(flat.pdf(2.5) == 0.0);
    CHECK(flat.log_pdf(2.5) == -kInf);
    CHECK_THROWS_AS(ProbingDensity::truncated_exponential(1.0, kInf), std::domain_error);
    CHECK_THROWS_AS(ProbingDensity::truncated_exponential(1.0, -1.0), std::domain_error);
}

TEST_CASE("decaying exponential density normalizes") {
    for (double lambda : {0.05, 1.0, 17.0}) {
        const ProbingDensity f = ProbingDensity::exponential(lambda);
        CHECK(f.kind() == DensityKind::Exponential);
        CHECK(std::isinf(f.support()));
        const double mass = quad([&](double t) { return f.pdf(t); }, 0.0, kInf);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(f.log_pdf(0.7) == doctest::Approx(std::log(lambda) - lambda * 0.7));
    }
    CHECK_THROWS_AS(ProbingDensity::exponential(0.0), std::domain_error);
    CHECK_THROWS_AS(ProbingDensity::exponential(-2.0), std::domain_error);
}

TEST_CASE("flat probing of brownian motion reproduces closed moments") {
    const double mu = -0.7, sigma = 1.3, horizon = 2.0;
    const GaussianModel model = brownian_model(mu, sigma, horizon);
    const ProbingDensity f = ProbingDensity::truncated_exponential(0.0, horizon);
    const LogNormalParams par = lognormal_params(model, f, Tolerance{1e-12, 1e-12, 400});
    CHECK(par.m == doctest::Approx(std::log(horizon) + mu * horizon / 2.0).epsilon(1e-10));
    // int int min(s,t) ds dt over the square equals horizon^3 / 3.
    CHECK(par.s * par.s ==
          doctest::Approx(sigma * sigma * horizon / 3.0).epsilon(1e-8));
}

TEST_CASE("flat probing of fractional kernels matches the power law") {
    const double mu = 0.4, sigma = 0.9, horizon = 1.5;
    for (double hurst : {0.25, 0.6, 0.75}) {
        const GaussianModel model = fractional_model(mu, sigma, hurst, horizon);
        const ProbingDensity f = ProbingDensity::truncated_exponential(0.0, horizon);
        const LogNormalParams par = lognormal_params(model, f, Tolerance{1e-12, 1e-12, 400});
        CHECK(par.m == doctest::Approx(std::log(horizon) + mu * horizon / 2.0).epsilon(1e-10));
        const double expect = sigma * sigma * std::pow(horizon, 2.0 * hurst) / (2.0 * hurst + 2.0);
        CHECK(par.s * par.s == doctest::Approx(expect).epsilon(1e-7));
    }
}

TEST_CASE("stationary shift model is recovered exactly") {
    const double mu = -1.4, sigma = 0.8;
    const GaussianModel model = stationary_shift_model(mu, sigma);
    const ProbingDensity f = ProbingDensity::exponential(-mu);
    const LogNormalParams par = lognormal_params(model, f, Tolerance{1e-12, 1e-12, 400});
    CHECK(par.m == doctest::Approx(-std::log(-mu)).epsilon(1e-9));
    CHECK(par.s == doctest::Approx(sigma).epsilon(1e-9));

    // The functional is exp(sigma N)/(-mu), so the bound is an equality here.
    for (double x : {0.1, 0.5, 1.0 / (-mu), 2.0, 10.0}) {
        const double exact = phi_cdf(std::log(-mu * x) / sigma);
        CHECK(upper_cdf_bound(par, x) == doctest::Approx(exact).epsilon(1e-9));
    }

    for (double p : {1.0, 2.0, 3.0}) {
        const MomentBounds mb = moment_bounds(model, f, p, Tolerance{1e-12, 1e-12, 400});
        const double exact = std::exp(0.5 * p * p * sigma * sigma) / std::pow(-mu, p);
        CHECK(mb.lower == doctest::Approx(exact).epsilon(1e-8));
        CHECK(mb.upper == doctest::Approx(exact).epsilon(1e-8));
    }
    {
        const double p = 0.5;
        const MomentBounds mb = moment_bounds(model, f, p, Tolerance{1e-12, 1e-12, 400});
        const double exact = std::exp(0.5 * p * p * sigma * sigma) / std::pow(-mu, p);
        const double loose = std::exp(0.5 * p * sigma * sigma) / std::pow(-mu, p);
        CHECK(mb.lower == doctest::Approx(exact).epsilon(1e-8));
        CHECK(mb.upper == doctest::Approx(loose).epsilon(1e-8));
        CHECK(mb.lower <= mb.upper);
    }
}

TEST_CASE("upper bound degenerates to a step when the scale vanishes") {
    const LogNormalParams par{1.0, 0.0};
    const double edge = std::exp(1.0);
    CHECK(upper_cdf_bound(par, edge * (1.0 - 1e-9)) == 0.0);
    CHECK(upper_cdf_bound(par, edge * (1.0 + 1e-9)) == 1.0);
    CHECK(upper_cdf_bound(par, 0.0) == 0.0);
    CHECK(upper_cdf_bound(par, -3.0) == 0.0);
}

TEST_CASE("family minimization attains the stationary optimum") {
    const double mu = -1.0, sigma = 1.0;
    const GaussianModel model = stationary_shift_model(mu, sigma);
    const double x = 3.0;
    const double exact = phi_cdf(std::log(-mu * x) / sigma);
    const FamilyBound fb =
        best_upper_over_family(model, Bracket{0.01, 100.0}, x, Tolerance{1e-10, 1e-10, 200});
    // The optimum over decaying rates sits at lambda = -mu and equals the law.
    CHECK(fb.value >= exact - 1e-9);
    CHECK(fb.value == doctest::Approx(exact).epsilon(1e-5));
    CHECK(fb.lambda == doctest::Approx(-mu).epsilon(1e-2));
}

TEST_CASE("family minimum never exceeds the flat member") {
    const double horizon = 1.0;
    const GaussianModel model = brownian_model(0.5, 1.0, horizon);
    const Tolerance tol{1e-9, 1e-9, 120};
    const ProbingDensity flat = ProbingDensity::truncated_exponential(0.0, horizon);
    for (double x : {0.3, 1.0, 2.5}) {
        const double v0 = upper_cdf_bound(lognormal_params(model, flat, tol), x);
        const FamilyBound fb = best_upper_over_family(model, Bracket{-50.0, 50.0}, x, tol);
        CHECK(fb.value <= v0 + 1e-15);
    }
}

TEST_CASE("concentration lower bound stays below the exact law") {
    const double mu = -1.0, sigma = 1.0;
    const GaussianModel model = stationary_shift_model(mu, sigma);
    auto zero_drift = [](double) { return 0.0; };
    // sup_t (X_t - E X_t) = sigma N has mean zero.
    const double sup_mean = 0.0;

    // At the validity edge the bound is zero up to quadrature wiggle in A.
    const BoundValue at_edge = lower_cdf_bound_borell(model, zero_drift, sup_mean, 1.0 / (-mu));
    CHECK(at_edge.kind == BoundKind::Lower);
    CHECK(at_edge.value <= 1e-25);
    CHECK(at_edge.valid_from == doctest::Approx(1.0 / (-mu)).epsilon(1e-9));
    const BoundValue below = lower_cdf_bound_borell(model, zero_drift, sup_mean, 0.99 / (-mu));
    CHECK(below.value == 0.0);

    double prev = 0.0;
    for (double x : {1.2, 2.0, 4.0, 10.0, 50.0}) {
        const BoundValue bv = lower_cdf_bound_borell(model, zero_drift, sup_mean, x);
        const double exact = phi_cdf(std::log(-mu * x) / sigma);
        CHECK(bv.value > 0.0);
        CHECK(bv.value <= exact + 1e-12);
        CHECK(bv.value >= prev);
        prev = bv.value;
    }
}

TEST_CASE("laplace transform bounds sandwich the exact transform") {
    const double mu = -1.0, sigma = 1.0;
    const GaussianModel model = stationary_shift_model(mu, sigma);
    const ProbingDensity f = ProbingDensity::exponential(-mu);
    auto zero_drift = [](double) { return 0.0; };
    for (double lam : {0.5, 2.0, 10.0}) {
        const double exact = quad(
            [&](double z) {
                const double i_val = std::exp(sigma * z) / (-mu);
                return std::exp(-lam * i_val) * std::exp(-0.5 * z * z) /
                       std::sqrt(2.0 * M_PI);
            },
            -40.0, 40.0);
        const double hi = mgf_upper(model, f, lam);
        const double lo = mgf_lower(model, zero_drift, 0.0, lam);
        CHECK(lo > 0.0);
        CHECK(lo <= exact + 1e-10);
        CHECK(hi >= exact - 1e-10);
        CHECK(hi <= 1.0);
    }
}

TEST_CASE("moment estimates flag divergence with an infinite upper bound") {
    const GaussianModel model{
        [](double t) { return t; },
        [](double s, double t) { return std::min(s, t); },
        kInf,
    };
    const ProbingDensity f = ProbingDensity::exponential(1.0);
    const MomentBounds mb = moment_bounds(model, f, 2.0, Tolerance{1e-11, 1e-11, 300});
    CHECK(std::isinf(mb.upper));
    // m = int 2t e^{-t} = 2 and s^2 = int int min(s,t) e^{-s-t} = 1/2.
    CHECK(mb.lower == doctest::Approx(std::exp(5.0)).epsilon(1e-7));
}

TEST_CASE("invalid inputs are rejected") {
    const GaussianModel model = stationary_shift_model(-1.0, 1.0);
    const ProbingDensity f = ProbingDensity::exponential(1.0);
    CHECK_THROWS_AS(moment_bounds(model, f, 0.0), std::domain_error);
    CHECK_THROWS_AS(moment_bounds(model, f, -1.0), std::domain_error);
    CHECK_THROWS_AS(mgf_upper(model, f, 0.0), std::domain_error);
    CHECK_THROWS_AS(mgf_lower(model, [](double) { return 0.0; }, 0.0, -1.0), std::domain_error);

    // Density reaching past a finite horizon is not a density on the horizon.
    const GaussianModel finite = brownian_model(0.0, 1.0, 1.0);
    CHECK_THROWS_AS(lognormal_params(finite, f), std::domain_error);

    const GaussianModel runaway{
        [](double t) { return std::exp(2.0 * t); },
        [](double, double) { return 1.0; },
        kInf,
    };
    CHECK_THROWS_AS(lognormal_params(runaway, f), std::domain_error);

    const GaussianModel bad_cov{
        [](double) { return 0.0; },
        [](double, double) { return -1.0; },
        kInf,
    };
    CHECK_THROWS_AS(lognormal_params(bad_cov, f), std::domain_error);

    const GaussianModel noisy_zero{
        [](double) { return 0.0; },
        [](double, double) { return -5e-11; },
        kInf,
    };
    const LogNormalParams par = lognormal_params(noisy_zero, f);
    CHECK(par.s == 0.0);
}
