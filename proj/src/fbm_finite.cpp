#include "fbmexp/fbm_finite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fbmexp {
namespace fbm_finite {
namespace {

constexpr double kTaylorSwitch = 1e-8;

void check_params(const FbmParams& p) {
    if (!std::isfinite(p.mu)) throw std::domain_error("fbm: mu must be finite");
    if (!(p.sigma > 0.0) || !std::isfinite(p.sigma))
        throw std::domain_error("fbm: sigma must be positive and finite");
    if (!(p.hurst > 0.0) || p.hurst > 1.0)
        throw std::domain_error("fbm: hurst must lie in (0, 1]");
    if (!(p.horizon > 0.0)) throw std::domain_error("fbm: horizon must be positive");
}

void check_finite_horizon(const FbmParams& p) {
    check_params(p);
    if (!std::isfinite(p.horizon))
        throw std::domain_error("fbm: operation requires a finite horizon");
}

GaussianModel fractional_model(const FbmParams& p) {
    const double mu = p.mu;
    const double var = p.sigma * p.sigma;
    const double two_h = 2.0 * p.hurst;
    return GaussianModel{
        [mu](double t) { return mu * t; },
        [var, two_h](double s, double t) {
            return 0.5 * var *
                   (std::pow(s, two_h) + std::pow(t, two_h) - std::pow(std::fabs(s - t), two_h));
        },
        p.horizon};
}

// log((e^a - 1)/b) for a, b of the same sign, stable for large |a|.
double log_expm1_over(double a, double b) {
    if (a > 36.0) return a - std::log(b) + std::log1p(-std::exp(-a));
    return std::log(std::expm1(a) / b);
}

// log Phi(z), usable far in the left tail where Phi underflows.
double log_phi(double z) {
    if (z > -8.0) return std::log(phi_cdf(z));
    const double z2 = z * z;
    return -0.5 * z2 - 0.5 * std::log(2.0 * 3.141592653589793238462643) - std::log(-z) +
           std::log1p(-1.0 / z2 + 3.0 / (z2 * z2));
}

// int_0^T exp(mu t + lam t^{2H}) dt.
double tilted_mass(const FbmParams& p, double lambda, const Tolerance& tol) {
    const double mu = p.mu;
    const double two_h = 2.0 * p.hurst;
    return integrate([mu, lambda, two_h](double t) { return std::exp(mu * t + lambda * std::pow(t, two_h)); },
                     0.0, p.horizon, tol);
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

double m_lambda(const FbmParams& p, double lambda) {
    check_finite_horizon(p);
    const double t_hor = p.horizon;
    if (std::fabs(lambda) < kTaylorSwitch)
        return std::log(t_hor) + p.mu * t_hor / 2.0 + lambda * p.mu * t_hor * t_hor / 12.0;
    const double u = lambda * t_hor;
    const double log_term = log_expm1_over(u, lambda);
    double g;
    if (u > 1.0) {
        g = (u - 1.0 + std::exp(-u)) / (lambda * (1.0 - std::exp(-u)));
    } else {
        g = (u * std::exp(u) - std::expm1(u)) / (lambda * std::expm1(u));
    }
    return log_term + (p.mu - lambda) * g;
}

double s_lambda(const FbmParams& p, double lambda, const Tolerance& tol) {
    check_finite_horizon(p);
    const double t_hor = p.horizon;
    const double two_h = 2.0 * p.hurst;
    const double var = p.sigma * p.sigma;
    double s2;
    if (std::fabs(lambda) < kTaylorSwitch) {
        s2 = var * (std::pow(t_hor, two_h) / (two_h + 2.0) +
                    lambda * std::pow(t_hor, two_h + 1.0) *
                        (1.0 / (two_h + 2.0) - 1.0 / (2.0 * two_h + 2.0)));
    } else if (lambda > 0.0) {
        // Weighted so every exponent is <= 0 regardless of lambda*T.
        const double u = lambda * t_hor;
        const double j_int = integrate(
            [lambda, two_h, t_hor](double t) { return std::pow(t, two_h) * std::exp(lambda * (t - t_hor)); },
            0.0, t_hor, tol);
        const double i_minus = integrate(
            [lambda, two_h](double t) { return std::pow(t, two_h) * std::exp(-lambda * t); }, 0.0,
            t_hor, tol);
        const double em = std::exp(-u);
        const double denom = -std::expm1(-u);  // 1 - e^{-u}
        s2 = lambda * var / (2.0 * denom * denom) * ((2.0 - em) * j_int - i_minus);
    } else {
        const double u = lambda * t_hor;
        const double i_plus = integrate(
            [lambda, two_h](double t) { return std::pow(t, two_h) * std::exp(lambda * t); }, 0.0,
            t_hor, tol);
        const double k_int = integrate(
            [lambda, two_h, t_hor](double t) {
                return std::pow(t, two_h) * std::exp(lambda * (2.0 * t_hor - t));
            },
            0.0, t_hor, tol);
        const double em1 = std::expm1(u);
        s2 = lambda * var / (2.0 * em1 * em1) * ((2.0 * std::exp(u) - 1.0) * i_plus - k_int);
    }
    if (s2 < 0.0) {
        if (s2 < -1e-10) throw AccuracyError("s_lambda: negative variance estimate", s2, -s2);
        s2 = 0.0;
    }
    return std::sqrt(s2);
}

BoundValue upper_cdf(const FbmParams& p, double x, double lambda, const Tolerance& tol) {
    check_finite_horizon(p);
    if (x <= 0.0) return BoundValue{0.0, BoundKind::Upper, 0.0};
    const double m = m_lambda(p, lambda);
    const double s = s_lambda(p, lambda, tol);
    double value;
    if (s == 0.0) {
        value = (std::log(x) >= m) ? 1.0 : 0.0;
    } else {
        value = phi_cdf((std::log(x) - m) / s);
    }
    return BoundValue{clamp01(value), BoundKind::Upper, 0.0};
}

FamilyBound upper_cdf_optimal(const FbmParams& p, double x, const Tolerance& tol) {
    check_finite_horizon(p);
    if (x <= 0.0) return FamilyBound{0.0, 0.0};
    const double cap = 50.0 / p.horizon;
    auto objective = [&](double lambda) {
        try {
            return upper_cdf(p, x, lambda, tol).value;
        } catch (const std::exception&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    MinimizeResult res = minimize_1d(objective, Bracket{-cap, cap}, tol);
    double best_value = res.value;
    double best_lambda = res.x;
    const double flat = objective(0.0);
    if (flat <= best_value) {
        best_value = flat;
        best_lambda = 0.0;
    }
    if (!std::isfinite(best_value))
        throw AccuracyError("upper_cdf_optimal: no tilt evaluated successfully", best_value, 0.0);
    return FamilyBound{best_value, best_lambda};
}

BoundValue lower_cdf_small_h(const FbmParams& p, double x,
                             const std::function<double(double)>& drift, const Tolerance& tol) {
    check_finite_horizon(p);
    if (p.hurst >= 0.5)
        throw std::domain_error("lower_cdf_small_h: requires hurst < 1/2");
    const double ln2 = std::log(2.0);
    const double c_h = 3.75 * std::sqrt(2.0 * 3.141592653589793238462643 / (p.hurst * ln2 * ln2 * ln2)) *
                       erfc_fn(std::sqrt(p.hurst * ln2 / 2.0));
    const double sup_mean = c_h * p.sigma * std::pow(p.horizon, p.hurst);
    const std::function<double(double)> zero = [](double) { return 0.0; };
    const GaussianModel model = fractional_model(p);
    return lower_cdf_bound_borell(model, drift ? drift : zero, sup_mean, x, tol);
}

BoundValue lower_cdf_large_h(const FbmParams& p, double x, double lambda, const Tolerance& tol) {
    check_finite_horizon(p);
    if (p.hurst < 0.5)
        throw std::domain_error("lower_cdf_large_h: requires hurst >= 1/2");
    const double a_mass = tilted_mass(p, lambda, tol);
    if (!(x > a_mass)) return BoundValue{0.0, BoundKind::Lower, a_mass};
    const double t_pow_h = std::pow(p.horizon, p.hurst);
    const double t_pow_2h = t_pow_h * t_pow_h;
    const double scale = p.sigma * t_pow_h;
    const double log_ratio = std::log(x / a_mass);
    const double z1 = (log_ratio + lambda * t_pow_2h) / scale;
    const double z2 = (-log_ratio + lambda * t_pow_2h) / scale;
    const double w = -2.0 * lambda / (p.sigma * p.sigma) * log_ratio;
    const double log_term2 = w + log_phi(z2);
    double value = phi_cdf(z1);
    if (log_term2 > -745.0) value -= std::exp(log_term2);
    return BoundValue{clamp01(value), BoundKind::Lower, a_mass};
}

BoundValue dung_tail_bound(const FbmParams& p, double x, const Tolerance& tol) {
    check_finite_horizon(p);
    const double b_mass = tilted_mass(p, p.sigma * p.sigma / 2.0, tol);
    if (x <= 0.0) return BoundValue{1.0, BoundKind::Upper, b_mass};
    const double t_pow_h = std::pow(p.horizon, p.hurst);
    const double spread = p.sigma * p.sigma * t_pow_h * t_pow_h;
    const double lr = std::log(x / b_mass);
    const double value = (x <= b_mass) ? 1.0 : 2.0 * std::exp(-lr * lr / (2.0 * spread));
    return BoundValue{clamp01(value), BoundKind::Upper, b_mass};
}

MomentBounds moment_bounds(const FbmParams& p, double pth) {
    check_finite_horizon(p);
    if (!(pth >= 1.0)) throw std::domain_error("moment_bounds: requires pth >= 1");
    const double t_hor = p.horizon;
    const double two_h = 2.0 * p.hurst;
    const double t_pow_2h = std::pow(t_hor, two_h);
    const double var_top = pth * pth * p.sigma * p.sigma * t_pow_2h;
    const double log_lower =
        pth * std::log(t_hor) + p.mu * pth * t_hor / 2.0 + var_top / (2.0 * two_h + 4.0);
    double log_upper;
    if (p.mu == 0.0) {
        log_upper = pth * std::log(t_hor) + var_top / 2.0;
    } else if (p.mu > 0.0) {
        log_upper = log_expm1_over(p.mu * pth * t_hor, p.mu * pth) +
                    (pth - 1.0) * std::log(t_hor) + var_top / 2.0;
    } else {
        log_upper = pth * std::log(std::expm1(p.mu * t_hor) / p.mu) + var_top / 2.0;
    }
    return MomentBounds{std::exp(log_lower), std::exp(log_upper)};
}

MgfBounds mgf_bounds(const FbmParams& p, double lam, const Tolerance& tol) {
    check_finite_horizon(p);
    if (!(lam > 0.0)) throw std::domain_error("mgf_bounds: requires lam > 0");
    const double t_hor = p.horizon;
    const double t_pow_h = std::pow(t_hor, p.hurst);
    const double center = std::log(t_hor) + p.mu * t_hor / 2.0;
    const double q = std::sqrt(2.0 * p.hurst + 2.0) / (p.sigma * t_pow_h);

    auto objective = [&](double eps) {
        const double loglog = std::log(-std::log(eps));
        return eps + (1.0 - eps) * phi_cdf(q * (loglog - std::log(lam) - center));
    };
    MinimizeResult res = minimize_1d(objective, Bracket{1e-12, 1.0 - 1e-12}, tol, 256);
    const double upper = std::min(1.0, res.value);

    const double k_mass = (p.mu == 0.0) ? t_hor : std::expm1(p.mu * t_hor) / p.mu;
    const double log_lk = std::log(lam * k_mass);
    const double spread2 = p.sigma * p.sigma * t_pow_h * t_pow_h;
    double lower = 0.0;
    if (p.hurst < 0.5) {
        const double c = 16.3 * p.sigma * t_pow_h / std::sqrt(p.hurst);
        const double log_xmax = -lam * k_mass * std::exp(c);
        if (log_xmax > -745.0) {
            const double x_max = std::exp(log_xmax);
            lower = integrate(
                [&](double u) {
                    const double dev = std::log(-std::log(u)) - log_lk - c;
                    if (dev <= 0.0) return 0.0;
                    return -std::expm1(-dev * dev / (2.0 * spread2));
                },
                0.0, x_max, tol);
        }
    } else {
        const double log_xmax = -lam * k_mass;
        if (log_xmax > -745.0) {
            const double x_max = std::exp(log_xmax);
            const double scale = p.sigma * t_pow_h;
            lower = integrate(
                [&](double u) {
                    const double z = (std::log(-std::log(u)) - log_lk) / scale;
                    return std::max(0.0, 2.0 * phi_cdf(z) - 1.0);
                },
                0.0, x_max, tol);
        }
    }
    return MgfBounds{clamp01(lower), upper};
}

double upper_bound_error_estimate(const FbmParams& p, double x) {
    check_finite_horizon(p);
    if (!(x > 0.0)) throw std::domain_error("upper_bound_error_estimate: requires x > 0");
    const double t_hor = p.horizon;
    const double t_pow_h = std::pow(t_hor, p.hurst);
    const double center = std::log(t_hor) + p.mu * t_hor / 2.0;
    const double term1 =
        phi_cdf(std::sqrt(2.0 * p.hurst + 2.0) / (p.sigma * t_pow_h) * (std::log(x) - center));
    const double k_mass = (p.mu == 0.0) ? t_hor : std::expm1(p.mu * t_hor) / p.mu;
    const double term2 = k_mass * std::exp(p.sigma * p.sigma * t_pow_h * t_pow_h / 2.0) / x;
    return std::min(term1, term2);
}

}  // namespace fbm_finite
}  // namespace fbmexp
