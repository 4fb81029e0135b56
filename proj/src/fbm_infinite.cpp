#include "fbmexp/fbm_infinite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fbmexp/exact_laws.hpp"

namespace fbmexp {
namespace fbm_infinite {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void check_params(const FbmParams& p) {
    if (!std::isfinite(p.mu)) throw std::domain_error("fbm: mu must be finite");
    if (!(p.sigma > 0.0) || !std::isfinite(p.sigma))
        throw std::domain_error("fbm: sigma must be positive and finite");
    if (!(p.hurst > 0.0) || p.hurst > 1.0)
        throw std::domain_error("fbm: hurst must lie in (0, 1]");
    if (std::isfinite(p.horizon))
        throw std::domain_error("fbm: operation requires an unbounded horizon");
    if (!(p.horizon > 0.0)) throw std::domain_error("fbm: horizon must be positive");
}

double gamma_2h1(double hurst) { return gamma_fn(2.0 * hurst + 1.0); }

// Optimal probe rate for mu < 0, H < 1, from the closed stationarity
// condition; shared by the upper and lower bounds.
double probe_w(const FbmParams& p, double x) {
    const double a = 1.0 - 1.0 / p.hurst;
    return lambert_w0(a * p.mu * x * std::exp(-a));
}

// Exponent of the Markov-type constant; s is the scale actually used
// (sigma, or p*sigma for moments).
double markov_exponent(double mu, double hurst, double s) {
    return (0.5 - hurst) *
           std::pow(std::pow(-2.0 * hurst / mu, hurst) * s, 2.0 / (1.0 - 2.0 * hurst));
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

FinitenessVerdict classify_finiteness(const FbmParams& p) {
    check_params(p);
    if (p.hurst == 1.0)
        return FinitenessVerdict{FinitenessTag::FiniteWithProbAtMost, phi_cdf(-p.mu / p.sigma)};
    if (p.mu > 0.0) return FinitenessVerdict{FinitenessTag::AlmostSurelyInfinite, kNan};
    if (p.mu < 0.0) return FinitenessVerdict{FinitenessTag::AlmostSurelyFinite, kNan};
    return FinitenessVerdict{FinitenessTag::FiniteWithProbAtMostHalf, 0.5};
}

BoundValue upper_cdf(const FbmParams& p, double x) {
    check_params(p);
    if (x <= 0.0) return BoundValue{0.0, BoundKind::Upper, 0.0};
    if (p.hurst == 1.0)
        return BoundValue{exact_laws::cdf_h1_infinite(p.mu, p.sigma, x), BoundKind::Upper, 0.0};
    if (p.mu > 0.0) return BoundValue{0.0, BoundKind::Upper, 0.0};
    const double h = p.hurst;
    const double coef = std::sqrt(2.0 / gamma_2h1(h)) / p.sigma;
    double f_star;
    if (p.mu == 0.0) {
        f_star = -1.0 / (h * std::exp(1.0 - h) * std::pow(x, h));
    } else {
        const double w = probe_w(p, x);
        const double lam = (1.0 - 1.0 / h) * p.mu / w;
        f_star = -(p.mu + lam) / (h * std::pow(lam, 1.0 - h));
    }
    return BoundValue{clamp01(phi_cdf(coef * f_star)), BoundKind::Upper, 0.0};
}

BoundValue upper_cdf_simple(const FbmParams& p, double x) {
    check_params(p);
    if (!(p.mu < 0.0) || p.hurst == 1.0)
        throw std::domain_error("upper_cdf_simple: requires mu < 0 and hurst < 1");
    if (x <= 0.0) return BoundValue{0.0, BoundKind::Upper, 0.0};
    const double value = phi_cdf(std::pow(-p.mu, p.hurst) / p.sigma *
                                 std::sqrt(2.0 / gamma_2h1(p.hurst)) * std::log(-p.mu * x));
    return BoundValue{clamp01(value), BoundKind::Upper, 0.0};
}

BoundValue upper_cdf_numeric(const FbmParams& p, double x, const Tolerance& tol) {
    check_params(p);
    if (x <= 0.0) return BoundValue{0.0, BoundKind::Upper, 0.0};
    const double h = p.hurst;
    const double mu = p.mu;
    const double log_x = std::log(x);
    auto objective = [h, mu, log_x](double t) {
        const double lam = std::exp(t);
        return std::pow(lam, h) * (log_x + t - 1.0) - mu * std::pow(lam, h - 1.0);
    };
    MinimizeResult res =
        minimize_1d(objective, Bracket{std::log(1e-8), std::log(1e8)}, tol, 129);
    const double value = phi_cdf(std::sqrt(2.0 / gamma_2h1(h)) / p.sigma * res.value);
    return BoundValue{clamp01(value), BoundKind::Upper, 0.0};
}

BoundValue lower_cdf(const FbmParams& p, double x, const Tolerance& tol) {
    check_params(p);
    if (!(p.mu < 0.0)) throw std::domain_error("lower_cdf: requires mu < 0");
    if (p.hurst == 0.5)
        return BoundValue{exact_laws::cdf_h_half_infinite(p.mu, p.sigma, x), BoundKind::Lower,
                          0.0};
    if (p.hurst == 1.0)
        return BoundValue{exact_laws::cdf_h1_infinite(p.mu, p.sigma, x), BoundKind::Lower, 0.0};
    const double edge = -1.0 / p.mu;
    if (!(x > edge)) return BoundValue{0.0, BoundKind::Lower, edge};
    const double h = p.hurst;
    const double w = probe_w(p, x);
    const double rate = std::pow(-p.mu / w, h / (1.0 - h)) *
                        std::pow((w + 1.0 - 1.0 / h) / p.sigma, 1.0 / (1.0 - h));
    double value;
    if (h < 0.5) {
        const double small_ball = 1.0 - m_script_bound(h) / rate;
        const double markov =
            1.0 - 2.0 * std::exp(markov_exponent(p.mu, h, p.sigma)) / (-p.mu * x);
        value = std::max(small_ball, markov);
    } else {
        value = 1.0 - l_h(rate, h, tol);
    }
    return BoundValue{clamp01(value), BoundKind::Lower, edge};
}

double l_h(double x, double hurst, const Tolerance& tol) {
    if (!(x > 0.0)) throw std::domain_error("l_h: requires x > 0");
    if (!(hurst > 0.5) || !(hurst < 1.0))
        throw std::domain_error("l_h: requires hurst in (1/2, 1)");
    const double two_h = 2.0 * hurst;
    auto integrand = [x, hurst, two_h](double t) {
        if (t <= 0.0) return 0.0;
        const double dev = t + x;
        return std::exp(-hurst * std::log(t) - dev * dev / (2.0 * std::pow(t, two_h)));
    };
    const double mode = hurst * x / (1.0 - hurst);
    const double m1 = std::min(x, mode);
    const double m2 = std::max(x, mode);
    double total = integrate(integrand, 0.0, m1, tol);
    if (m2 > m1) total += integrate(integrand, m1, m2, tol);
    total += integrate(integrand, m2, kInf, tol);
    return total / std::sqrt(2.0 * 3.141592653589793238462643);
}

double m_script_bound(double hurst) {
    if (!(hurst > 0.0) || !(hurst < 0.5))
        throw std::domain_error("m_script_bound: requires hurst in (0, 1/2)");
    const double h = hurst;
    const double one_m_h = 1.0 - h;
    const double exponent = 2.0 / h;
    const double pow2 = std::exp2(exponent);
    const double levels = (pow2 < 9e15) ? std::log2(std::ceil(pow2)) : exponent;
    const double lam = 1.695 * std::sqrt(levels / 2.0);
    const double front =
        std::min(2.0 * std::pow(2.0 * h, h / one_m_h) *
                     std::pow(1.0 - 2.0 * h, (1.0 - 2.0 * h) / (2.0 * one_m_h)),
                 std::pow(h, h) * std::pow(one_m_h, one_m_h));
    const double tail =
        std::pow(lam, 1.0 / one_m_h) +
        std::sqrt(3.141592653589793238462643 / 2.0) / one_m_h *
            (std::pow(lam, h / one_m_h) +
             std::pow(2.0, h / (2.0 * one_m_h)) / std::sqrt(3.141592653589793238462643) *
                 gamma_fn(1.0 / (2.0 * one_m_h)));
    return front * tail;
}

MomentBounds moment_bounds(const FbmParams& p, double pth, const Tolerance& tol) {
    check_params(p);
    if (!(pth > 0.0)) throw std::domain_error("moment_bounds: requires pth > 0");
    if (p.mu >= 0.0 || p.hurst > 0.5) return MomentBounds{kInf, kInf};
    if (p.hurst == 0.5) {
        const double exact = exact_laws::moments_h_half_infinite(p.mu, p.sigma, pth);
        return MomentBounds{exact, exact};
    }
    const double h = p.hurst;
    double upper;
    if (pth >= 1.0) {
        upper = std::exp(pth * std::log(2.0 / -p.mu) +
                         markov_exponent(p.mu, h, pth * p.sigma));
    } else {
        upper = std::exp(pth * (std::log(2.0 / -p.mu) + markov_exponent(p.mu, h, p.sigma)));
    }
    // Probe-rate optimum for the lower bound: the unique positive root of
    // lam + c lam^{1-2H} + mu, which lies in (0, -mu).
    const double g21 = gamma_2h1(h);
    const double c = pth * p.sigma * p.sigma * h * g21 / 2.0;
    auto g = [&](double lam) { return lam + c * std::pow(lam, 1.0 - 2.0 * h) + p.mu; };
    double hi = -p.mu;
    double lo = 0.5 * hi;
    int guard = 0;
    while (g(lo) >= 0.0 && guard++ < 400) lo *= 0.25;
    if (g(lo) >= 0.0)
        throw AccuracyError("moment_bounds: failed to bracket the probe-rate optimum", 0.0, kInf);
    const double lam_star = find_root(g, Bracket{lo, hi}, tol);
    const double lower =
        std::exp(-pth * std::log(lam_star) + pth * (1.0 + p.mu / lam_star) +
                 pth * pth * p.sigma * p.sigma * g21 / (4.0 * std::pow(lam_star, 2.0 * h)));
    return MomentBounds{lower, upper};
}

double mgf_upper(const FbmParams& p, double lam, const Tolerance& tol) {
    check_params(p);
    if (!(lam > 0.0)) throw std::domain_error("mgf_upper: requires lam > 0");
    const double h = p.hurst;
    const double base_coef = std::sqrt(2.0 / gamma_2h1(h)) / p.sigma;
    const double log_lam = std::log(lam);
    auto best_eps = [&](double t) {
        const double delta = std::exp(t);
        const double coef = base_coef * std::pow(delta, h);
        const double m_delta = -t + 1.0 + p.mu / delta;
        auto inner = [&](double eps) {
            const double loglog = std::log(-std::log(eps));
            return eps + (1.0 - eps) * phi_cdf(coef * (loglog - log_lam - m_delta));
        };
        return minimize_1d(inner, Bracket{1e-12, 1.0 - 1e-12}, tol, 128).value;
    };
    MinimizeResult res =
        minimize_1d(best_eps, Bracket{std::log(1e-8), std::log(1e8)}, tol, 129);
    return std::min(1.0, res.value);
}

double upper_error_estimate(const FbmParams& p, double x) {
    check_params(p);
    if (!(p.mu < 0.0) || !(p.hurst < 0.5))
        throw std::domain_error("upper_error_estimate: requires mu < 0 and hurst < 1/2");
    if (!(x > 0.0)) throw std::domain_error("upper_error_estimate: requires x > 0");
    const double markov = 2.0 * std::exp(markov_exponent(p.mu, p.hurst, p.sigma)) / (-p.mu * x);
    return std::min(upper_cdf_simple(p, x).value, markov);
}

}  // namespace fbm_infinite
}  // namespace fbmexp
