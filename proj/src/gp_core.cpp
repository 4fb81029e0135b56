#include "fbmexp/gp_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace fbmexp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Values past this are treated as numerically divergent. Every quantity fed
// through here lives on a log or probability scale, so 1e100 is far outside
// anything meaningful.
constexpr double kDivergenceCap = 1e100;

bool looks_divergent(const AccuracyError& e) {
    return std::isinf(e.best_estimate) || std::isinf(e.error_estimate) ||
           std::abs(e.best_estimate) > kDivergenceCap;
}

void validate_support(const GaussianModel& model, const ProbingDensity& f) {
    if (f.support() > model.horizon)
        throw std::domain_error("probing density support exceeds the model horizon");
}

// Infimum of g over [0, horizon). Unbounded horizons are folded onto the unit
// interval through t = u/(1-u); the scan then reaches t ~ 1e8.
double infimum_over_horizon(const std::function<double(double)>& g, double horizon,
                            const Tolerance& tol) {
    if (std::isfinite(horizon)) return minimize_1d(g, {0.0, horizon}, tol, 1024).value;
    auto mapped = [&g](double u) { return g(u / (1.0 - u)); };
    return minimize_1d(mapped, {0.0, 1.0 - 1e-8}, tol, 1024).value;
}

struct BorellData {
    double a_const;   // int exp(mean + drift)
    double f_inf;     // inf drift
    double sup_var;   // sup Var X_t
};

BorellData borell_data(const GaussianModel& model, const std::function<double(double)>& drift,
                       const Tolerance& tol) {
    auto a_integrand = [&](double t) { return std::exp(model.mean(t) + drift(t)); };
    double a;
    try {
        a = integrate(a_integrand, 0.0, model.horizon, tol);
    } catch (const AccuracyError& e) {
        if (looks_divergent(e))
            throw std::domain_error("lower_cdf_bound_borell: shifted mean integral diverges");
        throw;
    }
    const double f_inf = infimum_over_horizon(drift, model.horizon, tol);
    auto neg_var = [&model](double t) { return -model.cov(t, t); };
    const double sup_var = -infimum_over_horizon(neg_var, model.horizon, tol);
    if (!(a > 0.0) || !std::isfinite(a))
        throw std::domain_error("lower_cdf_bound_borell: degenerate scale constant");
    if (!std::isfinite(f_inf))
        throw std::domain_error("lower_cdf_bound_borell: drift unbounded below");
    if (!std::isfinite(sup_var) || sup_var < 0.0)
        throw std::domain_error("lower_cdf_bound_borell: variance not bounded on the horizon");
    return {a, f_inf, sup_var};
}

}  // namespace

ProbingDensity ProbingDensity::truncated_exponential(double lambda, double horizon) {
    if (!std::isfinite(horizon) || !(horizon > 0.0))
        throw std::domain_error("truncated_exponential: horizon must be finite and positive");
    if (!std::isfinite(lambda))
        throw std::domain_error("truncated_exponential: rate must be finite");
    ProbingDensity d;
    d.kind_ = DensityKind::TruncatedExponential;
    d.lambda_ = lambda;
    d.support_ = horizon;
    if (lambda == 0.0) {
        const double log_c = -std::log(horizon);
        d.log_pdf_ = [log_c](double) { return log_c; };
        d.pdf_ = [horizon](double) { return 1.0 / horizon; };
        return d;
    }
    // lambda / expm1(lambda * horizon) is positive for either sign of lambda.
    const double u = lambda * horizon;
    const double log_abs_em1 = (u > 36.0) ? u : std::log(std::abs(std::expm1(u)));
    const double log_c = std::log(std::abs(lambda)) - log_abs_em1;
    d.log_pdf_ = [log_c, lambda](double t) { return log_c + lambda * t; };
    d.pdf_ = [log_c, lambda](double t) { return std::exp(log_c + lambda * t); };
    return d;
}

ProbingDensity ProbingDensity::exponential(double lambda) {
    if (!std::isfinite(lambda) || !(lambda > 0.0))
        throw std::domain_error("exponential: rate must be positive");
    ProbingDensity d;
    d.kind_ = DensityKind::Exponential;
    d.lambda_ = lambda;
    d.support_ = kInf;
    const double log_l = std::log(lambda);
    d.log_pdf_ = [log_l, lambda](double t) { return log_l - lambda * t; };
    d.pdf_ = [log_l, lambda](double t) { return std::exp(log_l - lambda * t); };
    return d;
}

ProbingDensity ProbingDensity::tabulated(std::function<double(double)> pdf,
                                         std::function<double(double)> log_pdf,
                                         double support) {
    if (!(support > 0.0)) throw std::domain_error("tabulated: support must be positive");
    if (!pdf || !log_pdf) throw std::domain_error("tabulated: both callables are required");
    ProbingDensity d;
    d.kind_ = DensityKind::Tabulated;
    d.support_ = support;
    d.pdf_ = std::move(pdf);
    d.log_pdf_ = std::move(log_pdf);
    return d;
}

double ProbingDensity::pdf(double t) const {
    if (t < 0.0 || t > support_) return 0.0;
    return pdf_(t);
}

double ProbingDensity::log_pdf(double t) const {
    if (t < 0.0 || t > support_) return -kInf;
    return log_pdf_(t);
}

LogNormalParams lognormal_params(const GaussianModel& model, const ProbingDensity& f,
                                 const Tolerance& tol) {
    validate_support(model, f);
    const double hi = f.support();

    auto m_integrand = [&](double t) {
        const double p = f.pdf(t);
        if (p <= 0.0) return 0.0;
        return (-f.log_pdf(t) + model.mean(t)) * p;
    };
    double m;
    try {
        m = integrate(m_integrand, 0.0, hi, tol);
    } catch (const AccuracyError& e) {
        if (looks_divergent(e)) throw std::domain_error("lognormal_params: location integral diverges");
        throw;
    }

    // cov is symmetric, so the square integrates as twice the lower triangle.
    // Stopping the inner integral at the diagonal keeps it clear of the
    // |s - t| kink every kernel in scope carries there; a kink in the middle
    // of an inner panel can hide between quadrature nodes and silently bias
    // the value. The inner runs well below the outer tolerance so its noise
    // floor never turns into roughness the outer refinement chases.
    const Tolerance inner_tol{std::max(tol.abs_tol * 1e-3, 1e-15),
                              std::max(tol.rel_tol * 1e-3, 1e-15), tol.max_iter};
    auto outer = [&](double s) {
        const double ps = f.pdf(s);
        if (ps <= 0.0 || s <= 0.0) return 0.0;
        auto inner = [&](double t) { return model.cov(s, t) * f.pdf(t); };
        double below_diag;
        try {
            below_diag = integrate(inner, 0.0, s, inner_tol);
        } catch (const AccuracyError& e) {
            if (looks_divergent(e)) throw;
            below_diag = e.best_estimate;
        }
        return 2.0 * ps * below_diag;
    };
    double s2;
    try {
        s2 = integrate(outer, 0.0, hi, tol);
    } catch (const AccuracyError& e) {
        if (looks_divergent(e)) throw std::domain_error("lognormal_params: scale integral diverges");
        throw;
    }

    if (s2 < 0.0) {
        // Quadrature noise on a genuinely zero variance shows up as a tiny
        // negative number; anything larger means the covariance is bad input.
        if (s2 < -1e-10) throw std::domain_error("lognormal_params: negative aggregated variance");
        s2 = 0.0;
    }
    return {m, std::sqrt(s2)};
}

double upper_cdf_bound(const LogNormalParams& params, double x) {
    if (!(x > 0.0)) return 0.0;
    const double lx = std::log(x);
    if (params.s == 0.0) return lx < params.m ? 0.0 : 1.0;
    return phi_cdf((lx - params.m) / params.s);
}

FamilyBound best_upper_over_family(const GaussianModel& model, const Bracket& lambda_range,
                                   double x, const Tolerance& tol) {
    const bool finite_horizon = std::isfinite(model.horizon);
    auto bound_at = [&](double lam) -> double {
        try {
            const ProbingDensity f = finite_horizon
                                         ? ProbingDensity::truncated_exponential(lam, model.horizon)
                                         : ProbingDensity::exponential(lam);
            return upper_cdf_bound(lognormal_params(model, f, tol), x);
        } catch (const std::exception&) {
            return kInf;
        }
    };
    const MinimizeResult r = minimize_1d(bound_at, lambda_range, tol, 64);
    double best_value = r.value;
    double best_lambda = r.x;
    // The flat density is the canonical fallback; never report anything worse
    // than it when it is admissible.
    if (finite_horizon && lambda_range.lo <= 0.0 && 0.0 <= lambda_range.hi) {
        const double v0 = bound_at(0.0);
        if (v0 <= best_value) {
            best_value = v0;
            best_lambda = 0.0;
        }
    }
    if (!std::isfinite(best_value))
        throw AccuracyError("best_upper_over_family: no admissible rate in range", 1.0, 1.0);
    return {best_value, best_lambda};
}

BoundValue lower_cdf_bound_borell(const GaussianModel& model,
                                  const std::function<double(double)>& drift,
                                  double sup_mean_bound, double x, const Tolerance& tol) {
    const BorellData d = borell_data(model, drift, tol);
    const double valid_from = std::exp(sup_mean_bound - d.f_inf) * d.a_const;
    BoundValue out{0.0, BoundKind::Lower, valid_from};
    if (!(x > valid_from)) return out;
    if (d.sup_var == 0.0) {
        out.value = 1.0;
        return out;
    }
    const double dev = std::log(x / d.a_const) + d.f_inf - sup_mean_bound;
    out.value = -std::expm1(-dev * dev / (2.0 * d.sup_var));
    return out;
}

MomentBounds moment_bounds(const GaussianModel& model, const ProbingDensity& f, double p,
                           const Tolerance& tol) {
    if (!std::isfinite(p) || !(p > 0.0))
        throw std::domain_error("moment_bounds: order must be positive");
    validate_support(model, f);

    // Shared integral int exp(p mean + p^2 var / 2) f^{1-p}; serves as the
    // upper bound for p >= 1 and the lower bound for p < 1.
    auto tilted_integral = [&]() -> double {
        auto g = [&](double t) {
            const double w = (p == 1.0) ? 0.0 : (1.0 - p) * f.log_pdf(t);
            return std::exp(p * model.mean(t) + 0.5 * p * p * model.cov(t, t) + w);
        };
        try {
            return integrate(g, 0.0, f.support(), tol);
        } catch (const AccuracyError& e) {
            if (looks_divergent(e)) return kInf;
            throw;
        }
    };

    MomentBounds out{0.0, kInf};
    if (p >= 1.0) {
        // A density that fails to cover the horizon puts infinite weight on
        // the gap, so the tilted integral only applies when it covers.
        out.upper = (f.support() >= model.horizon) ? tilted_integral() : kInf;
        const LogNormalParams lp = lognormal_params(model, f, tol);
        out.lower = std::exp(p * lp.m + 0.5 * p * p * lp.s * lp.s);
    } else {
        out.lower = tilted_integral();
        auto first_moment = [&](double t) {
            return std::exp(model.mean(t) + 0.5 * model.cov(t, t));
        };
        double mean_int;
        try {
            mean_int = integrate(first_moment, 0.0, model.horizon, tol);
        } catch (const AccuracyError& e) {
            if (!looks_divergent(e)) throw;
            mean_int = kInf;
        }
        out.upper = std::isinf(mean_int) ? kInf : std::pow(mean_int, p);
    }
    return out;
}

double mgf_upper(const GaussianModel& model, const ProbingDensity& f, double lam,
                 const Tolerance& tol) {
    if (!std::isfinite(lam) || !(lam > 0.0))
        throw std::domain_error("mgf_upper: rate must be positive");
    const LogNormalParams par = lognormal_params(model, f, tol);
    const double log_lam = std::log(lam);
    auto objective = [&](double eps) {
        const double ll = std::log(std::log(1.0 / eps));
        const double z = ll - log_lam - par.m;
        const double tail = (par.s == 0.0) ? (z < 0.0 ? 0.0 : 1.0) : phi_cdf(z / par.s);
        return eps + (1.0 - eps) * tail;
    };
    const MinimizeResult r = minimize_1d(objective, {1e-12, 1.0 - 1e-12}, tol, 256);
    return std::min(1.0, r.value);
}

double mgf_lower(const GaussianModel& model, const std::function<double(double)>& drift,
                 double sup_mean_bound, double lam, const Tolerance& tol) {
    if (!std::isfinite(lam) || !(lam > 0.0))
        throw std::domain_error("mgf_lower: rate must be positive");
    const BorellData d = borell_data(model, drift, tol);
    const double valid_from = std::exp(sup_mean_bound - d.f_inf) * d.a_const;
    const double x_max = std::exp(-lam * valid_from);
    if (!(x_max > 0.0)) return 0.0;
    if (d.sup_var == 0.0) return x_max;
    auto g = [&](double u) {
        // u = exp(-lam * level) inverts to the threshold the bound is read at.
        const double level = -std::log(u) / lam;
        const double dev = std::log(level / d.a_const) + d.f_inf - sup_mean_bound;
        if (dev <= 0.0) return 0.0;
        return -std::expm1(-dev * dev / (2.0 * d.sup_var));
    };
    const double v = integrate(g, 0.0, x_max, tol);
    return std::clamp(v, 0.0, 1.0);
}

}  // namespace fbmexp
