#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace fbmexp {

// Shared accuracy knobs. abs_tol/rel_tol bound the acceptable error of the
// result, max_iter bounds refinement work (subdivisions, iterations).
struct Tolerance {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_iter = 200;
};

// Closed interval [lo, hi], lo < hi required.
struct Bracket {
    double lo;
    double hi;
};

// Raised when an iterative routine cannot certify the requested tolerance.
// best_estimate carries the value reached so callers can degrade gracefully;
// error_estimate is the residual error bound at the point of failure.
class AccuracyError : public std::runtime_error {
public:
    AccuracyError(const std::string& msg, double best, double err)
        : std::runtime_error(msg), best_estimate(best), error_estimate(err) {}
    double best_estimate;
    double error_estimate;
};

// Standard normal CDF. phi_cdf(z) + phi_cdf(-z) == 1 to machine precision.
double phi_cdf(double z);

// Complementary error function.
double erfc_fn(double x);

// Gamma function, restricted to z > 0.
double gamma_fn(double z);

// log Gamma, z > 0.
double log_gamma(double z);

// Regularized upper incomplete gamma Q(a, x) = Gamma(a,x)/Gamma(a),
// a > 0, x >= 0. Q(a, 0) = 1, Q decreasing in x.
double reg_upper_gamma(double a, double x);

// Lambert W, principal branch: w*exp(w) = x with w >= -1, for x >= -1/e.
// Residual |w e^w - x| <= 1e-13 * max(1, |x|).
double lambert_w0(double x);

// Lambert W, lower branch: w*exp(w) = x with w <= -1, for x in [-1/e, 0).
double lambert_wm1(double x);

// Adaptive Gauss-Kronrod quadrature of f over [lo, hi]; hi may be +infinity
// (mapped through t = lo + u/(1-u)). Throws AccuracyError when the error
// estimate cannot be brought under tolerance within max_iter subdivisions;
// a divergent integral surfaces as AccuracyError with best_estimate = +inf.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const Tolerance& tol = {});

struct MinimizeResult {
    double x;
    double value;
    bool interior;  // false: no interior decrease found, x is the better endpoint
};

// Scans a guard grid over the bracket (log-spaced when the bracket is
// positive and spans >= 3 decades, linear otherwise), then refines the best
// interior point by golden section. Endpoints are always candidates.
MinimizeResult minimize_1d(const std::function<double(double)>& f, const Bracket& b,
                           const Tolerance& tol = {}, int grid_points = 64);

// Brent-style root of f on [b.lo, b.hi]. Requires a sign change over the
// bracket (std::domain_error otherwise).
double find_root(const std::function<double(double)>& f, const Bracket& b,
                 const Tolerance& tol = {});

}  // namespace fbmexp
