#include "fbmexp/series_fbm.hpp"

#include "fbmexp/exact_laws.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fbmexp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// Ascending-order accumulation; the result is a pure function of the
// multiset of values, so permuted inputs sum to identical bits.
double sorted_sum(std::vector<double> vals) {
    std::sort(vals.begin(), vals.end());
    double acc = 0.0;
    for (double v : vals) acc += v;
    return acc;
}

// log((e^a - 1)/b) for a, b of the same sign, stable for large |a|.
double log_expm1_over(double a, double b) {
    if (a > 36.0) return a - std::log(b) + std::log1p(-std::exp(-a));
    return std::log(std::expm1(a) / b);
}

double log_sum_exp(double a, double b) {
    const double hi = std::max(a, b);
    if (hi == -kInf) return -kInf;
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

GaussianModel component_model(double mu, double w, double h, double horizon) {
    const double w_sq = w * w;
    const double two_h = 2.0 * h;
    return GaussianModel{
        [mu](double t) { return mu * t; },
        [w_sq, two_h](double u, double v) {
            return 0.5 * w_sq *
                   (std::pow(u, two_h) + std::pow(v, two_h) -
                    std::pow(std::abs(u - v), two_h));
        },
        horizon};
}

// Location and value of the Gamma-function minimum on (0, inf); the minimizer
// sits inside [1, 2], so the scan never needs a wider bracket.
std::pair<double, double> gamma_minimum() {
    auto g = [](double z) { return gamma_fn(z); };
    const MinimizeResult r = minimize_1d(g, Bracket{1.0, 2.0}, Tolerance{}, 64);
    return {r.x, r.value};
}

void check_finite_horizon(double horizon, const char* who) {
    if (!std::isfinite(horizon) || !(horizon > 0.0))
        throw std::domain_error(std::string(who) + ": requires a finite positive horizon");
}

}  // namespace

SeriesParams::SeriesParams(std::vector<double> weights, std::vector<double> hursts, double mu)
    : weights_(std::move(weights)), hursts_(std::move(hursts)), mu_(mu) {
    if (weights_.size() != hursts_.size())
        throw std::domain_error("SeriesParams: weight and index lists differ in length");
    if (weights_.empty())
        throw std::domain_error("SeriesParams: component lists are empty");
    if (!std::isfinite(mu_)) throw std::domain_error("SeriesParams: drift must be finite");

    std::vector<double> squares;
    squares.reserve(weights_.size());
    h_min_ = kInf;
    h_max_ = -kInf;
    for (std::size_t n = 0; n < weights_.size(); ++n) {
        const double w = weights_[n];
        const double h = hursts_[n];
        if (!std::isfinite(w)) throw std::domain_error("SeriesParams: weights must be finite");
        if (!std::isfinite(h) || !(h > 0.0) || h > 1.0)
            throw std::domain_error("SeriesParams: indices must lie in (0, 1]");
        squares.push_back(w * w);
        if (w < 0.0) has_negative_ = true;
        if (w != 0.0) {
            ++active_;
            h_min_ = std::min(h_min_, h);
            h_max_ = std::max(h_max_, h);
        }
    }
    sigma_sq_ = sorted_sum(std::move(squares));
    if (!(sigma_sq_ > 0.0) || !std::isfinite(sigma_sq_))
        throw std::domain_error("SeriesParams: sum of squared weights must be positive and finite");
    sigma_ = std::sqrt(sigma_sq_);
    rho_ = has_negative_ ? kNan : sorted_sum(weights_);
}

double SeriesParams::rho() const {
    if (has_negative_)
        throw std::domain_error("SeriesParams: weight sum needs all weights nonnegative");
    return rho_;
}

namespace series_fbm {

LogNormalParams lognormal_params_series(const SeriesParams& s, const ProbingDensity& f,
                                        double horizon, const Tolerance& tol) {
    if (!(horizon > 0.0)) throw std::domain_error("lognormal_params_series: horizon must be positive");

    const bool closed = f.kind() == DensityKind::TruncatedExponential &&
                        std::isfinite(horizon) && f.support() == horizon;
    std::vector<double> s_sq;
    s_sq.reserve(s.active_count());
    double m = 0.0;
    bool have_m = false;
    for (std::size_t n = 0; n < s.weights().size(); ++n) {
        const double w = s.weights()[n];
        if (w == 0.0) continue;
        if (closed) {
            const FbmParams comp{s.mu(), std::abs(w), s.hursts()[n], horizon};
            if (!have_m) {
                m = fbm_finite::m_lambda(comp, f.param());
                have_m = true;
            }
            const double sc = fbm_finite::s_lambda(comp, f.param(), tol);
            s_sq.push_back(sc * sc);
        } else {
            const GaussianModel model = component_model(s.mu(), w, s.hursts()[n], horizon);
            const LogNormalParams lp = lognormal_params(model, f, tol);
            if (!have_m) {
                m = lp.m;
                have_m = true;
            }
            s_sq.push_back(lp.s * lp.s);
        }
    }
    return LogNormalParams{m, std::sqrt(sorted_sum(std::move(s_sq)))};
}

BoundValue upper_cdf_finite(const SeriesParams& s, double horizon, double x) {
    check_finite_horizon(horizon, "upper_cdf_finite");
    if (x <= 0.0) return BoundValue{0.0, BoundKind::Upper, 0.0};

    const double pow_lo = std::pow(horizon, s.h_min());
    const double pow_hi = std::pow(horizon, s.h_max());
    const double dev = std::log(x) - std::log(horizon) - s.mu() * horizon / 2.0;
    double z;
    if (dev < 0.0) {
        z = std::sqrt(2.0 * s.h_min() + 2.0) / (s.sigma() * std::max(pow_lo, pow_hi)) * dev;
    } else {
        z = std::sqrt(2.0 * s.h_max() + 2.0) / (s.sigma() * std::min(pow_lo, pow_hi)) * dev;
    }
    return BoundValue{clamp01(phi_cdf(z)), BoundKind::Upper, 0.0};
}

BoundValue upper_cdf_infinite(const SeriesParams& s, double x) {
    if (x <= 0.0) return BoundValue{0.0, BoundKind::Upper, 0.0};

    const double mu = s.mu();
    const double sig = s.sigma();
    const double h_lo = s.h_min();
    const double h_hi = s.h_max();
    const auto [z0, gamma0] = gamma_minimum();
    // Sharpest constant valid for the whole exponent range; an interval that
    // misses the minimizer is monotone, so an endpoint value applies.
    double gamma0_eff = gamma0;
    if (2.0 * h_lo + 1.0 > z0) {
        gamma0_eff = gamma_fn(2.0 * h_lo + 1.0);
    } else if (2.0 * h_hi + 1.0 < z0) {
        gamma0_eff = gamma_fn(2.0 * h_hi + 1.0);
    }
    const double gamma_max = std::max(gamma_fn(2.0 * h_lo + 1.0), gamma_fn(2.0 * h_hi + 1.0));

    double z;
    if (h_hi == 1.0) {
        const double one_plus = 1.0 + mu * x;
        if (one_plus <= 0.0) {
            z = -std::sqrt(2.0 / gamma0_eff) * one_plus /
                (sig * std::min(x, std::pow(x, h_lo)));
        } else {
            z = -one_plus / (sig * std::max(x, std::pow(x, h_lo)));
        }
    } else if (mu > 0.0) {
        return BoundValue{0.0, BoundKind::Upper, 0.0};
    } else if (mu == 0.0) {
        z = -std::sqrt(2.0 / gamma_max) /
            (sig * std::max(std::pow(x, h_lo), std::pow(x, h_hi)));
    } else {
        const double log_scaled = std::log(-mu) + std::log(x);
        const double pow_lo = std::pow(-mu, h_lo);
        const double pow_hi = std::pow(-mu, h_hi);
        if (log_scaled >= 0.0) {
            z = std::max(pow_lo, pow_hi) / sig * std::sqrt(2.0 / gamma0_eff) * log_scaled;
        } else {
            z = std::min(pow_lo, pow_hi) / sig * std::sqrt(2.0 / gamma_max) * log_scaled;
        }
    }
    return BoundValue{clamp01(phi_cdf(z)), BoundKind::Upper, 0.0};
}

MomentBounds moment_bounds_finite(const SeriesParams& s, double horizon, double pth) {
    check_finite_horizon(horizon, "moment_bounds_finite");
    if (!(pth >= 1.0)) throw std::domain_error("moment_bounds_finite: requires pth >= 1");

    const double mu = s.mu();
    const double pow_lo = std::pow(horizon, 2.0 * s.h_min());
    const double pow_hi = std::pow(horizon, 2.0 * s.h_max());
    const double var_min = pth * pth * s.sigma_sq() * std::min(pow_lo, pow_hi);
    const double var_max = pth * pth * s.sigma_sq() * std::max(pow_lo, pow_hi);
    const double log_lower =
        pth * std::log(horizon) + mu * pth * horizon / 2.0 + var_min / (4.0 * s.h_max() + 4.0);
    double log_upper;
    if (mu == 0.0) {
        log_upper = pth * std::log(horizon) + var_max / 2.0;
    } else if (mu > 0.0) {
        log_upper = log_expm1_over(mu * pth * horizon, mu * pth) +
                    (pth - 1.0) * std::log(horizon) + var_max / 2.0;
    } else {
        log_upper = pth * std::log(std::expm1(mu * horizon) / mu) + var_max / 2.0;
    }
    return MomentBounds{std::exp(log_lower), std::exp(log_upper)};
}

MomentBounds moment_bounds_infinite(const SeriesParams& s, double pth, const Tolerance& tol) {
    if (!std::isfinite(pth) || !(pth > 0.0))
        throw std::domain_error("moment_bounds_infinite: order must be positive");

    const double mu = s.mu();
    if (mu >= 0.0) return MomentBounds{kInf, kInf};
    const double h_lo = s.h_min();
    const double h_hi = s.h_max();
    if (h_hi > 0.5) return MomentBounds{kInf, kInf};
    if (h_lo == 0.5) {
        // Every component is Brownian, so the aggregate is Brownian.
        const double v = exact_laws::moments_h_half_infinite(mu, s.sigma(), pth);
        return MomentBounds{v, v};
    }

    const double sig_sq = s.sigma_sq();
    const auto [z0, gamma0] = gamma_minimum();
    (void)z0;
    auto neg_probe = [&](double t) {
        const double lam = std::exp(t);
        const double pow_max = std::max(std::pow(lam, 2.0 * h_lo), std::pow(lam, 2.0 * h_hi));
        return -(pth * (-t + 1.0 + mu / lam) +
                 pth * pth * sig_sq * gamma0 / (4.0 * pow_max));
    };
    const double center = std::log(-mu);
    const Bracket rate_range{center + std::log(1e-8), center + std::log(1e8)};
    const MinimizeResult best = minimize_1d(neg_probe, rate_range, tol, 256);
    const double lower = std::exp(-best.value);

    if (h_hi == 0.5) return MomentBounds{lower, kInf};

    auto log_upper_at = [&](double q) {
        const double bulk = std::log1p(-std::exp(mu)) + q * q * sig_sq / 2.0;
        const double spike =
            std::log(2.0) + mu / 2.0 +
            (0.5 - h_hi) *
                std::pow(std::pow(-2.0 * h_hi / mu, h_hi) * q * s.sigma(), 2.0 / (1.0 - 2.0 * h_hi));
        return -q * std::log(-mu) + log_sum_exp(bulk, spike);
    };
    const double log_upper = (pth >= 1.0) ? log_upper_at(pth) : pth * log_upper_at(1.0);
    return MomentBounds{lower, std::exp(log_upper)};
}

BoundValue lower_cdf(const SeriesParams& s, double horizon, double x,
                     const std::function<double(double)>& drift, const Tolerance& tol) {
    const double mu = s.mu();
    const double h_lo = s.h_min();
    const double h_hi = s.h_max();

    if (!std::isfinite(horizon)) {
        if (drift)
            throw std::domain_error("lower_cdf: drift shift applies to finite horizons only");
        if (!(mu < 0.0) || !(h_hi < 0.5))
            throw std::domain_error(
                "lower_cdf: infinite horizon needs negative drift and indices below 1/2");
        const double bulk = std::log1p(-std::exp(mu)) + s.sigma_sq() / 2.0;
        const double spike =
            std::log(2.0) + mu / 2.0 +
            (0.5 - h_hi) *
                std::pow(std::pow(-2.0 * h_hi / mu, h_hi) * s.sigma(), 2.0 / (1.0 - 2.0 * h_hi));
        const double log_mean_bound = log_sum_exp(bulk, spike) - std::log(-mu);
        const double valid_from = std::exp(log_mean_bound);
        BoundValue out{0.0, BoundKind::Lower, valid_from};
        if (!(x > valid_from)) return out;
        out.value = -std::expm1(log_mean_bound - std::log(x));
        return out;
    }

    check_finite_horizon(horizon, "lower_cdf");
    if (s.has_negative_weight())
        throw std::domain_error("lower_cdf: weight sum bound requires nonnegative weights");
    double sup_mean;
    const double pow_top = std::max(std::pow(horizon, h_lo), std::pow(horizon, h_hi));
    if (h_hi < 0.5) {
        const double ln2 = std::log(2.0);
        sup_mean = 3.75 * std::sqrt(2.0 * 3.141592653589793238462643 / (h_lo * ln2 * ln2 * ln2)) *
                   erfc_fn(std::sqrt(h_lo * ln2 / 2.0)) * s.rho() * pow_top;
    } else if (h_lo >= 0.5) {
        sup_mean = std::sqrt(2.0 / 3.141592653589793238462643) * s.rho() * pow_top;
    } else {
        throw std::domain_error("lower_cdf: component indices straddle 1/2, no bound available");
    }

    double mass, drift_inf;
    if (drift) {
        auto g = [&](double t) { return std::exp(mu * t + drift(t)); };
        mass = integrate(g, 0.0, horizon, tol);
        drift_inf = minimize_1d(drift, Bracket{0.0, horizon}, tol, 128).value;
        if (!std::isfinite(drift_inf))
            throw std::domain_error("lower_cdf: drift unbounded below");
    } else {
        mass = (mu == 0.0) ? horizon : std::expm1(mu * horizon) / mu;
        drift_inf = 0.0;
    }
    const double sup_var =
        s.sigma_sq() * std::max(std::pow(horizon, 2.0 * h_lo), std::pow(horizon, 2.0 * h_hi));

    const double valid_from = std::exp(sup_mean - drift_inf) * mass;
    BoundValue out{0.0, BoundKind::Lower, valid_from};
    if (!(x > valid_from)) return out;
    const double dev = std::log(x / mass) + drift_inf - sup_mean;
    out.value = -std::expm1(-dev * dev / (2.0 * sup_var));
    return out;
}

FinitenessVerdict classify_finiteness_series(const SeriesParams& s) {
    const double mu = s.mu();
    if (s.h_max() == 1.0) {
        if (mu >= 0.0)
            return FinitenessVerdict{FinitenessTag::FiniteWithProbAtMost,
                                     phi_cdf(-mu / s.sigma())};
        // Components of index one contribute a straight random ray; the
        // functional cannot converge on the event that the steepest ray
        // points upward, which caps the finiteness probability.
        std::vector<double> ray_squares;
        for (std::size_t n = 0; n < s.weights().size(); ++n) {
            if (s.weights()[n] != 0.0 && s.hursts()[n] == 1.0)
                ray_squares.push_back(s.weights()[n] * s.weights()[n]);
        }
        const double sigma_ray = std::sqrt(sorted_sum(std::move(ray_squares)));
        return FinitenessVerdict{FinitenessTag::Unknown, phi_cdf(-mu / sigma_ray)};
    }
    if (mu > 0.0) return FinitenessVerdict{FinitenessTag::AlmostSurelyInfinite, kNan};
    // Finitely many components below index one admit a product split into
    // single-process functionals, each almost surely finite under mu < 0.
    if (mu < 0.0) return FinitenessVerdict{FinitenessTag::AlmostSurelyFinite, kNan};
    return FinitenessVerdict{FinitenessTag::FiniteWithProbAtMostHalf, 0.5};
}

}  // namespace series_fbm
}  // namespace fbmexp
