#pragma once

#include "fbmexp/gp_core.hpp"
#include "fbmexp/numerics.hpp"

namespace fbmexp {

// Drifted fractional process parameters. horizon may be +infinity; the
// finite-horizon operations below reject an infinite one.
struct FbmParams {
    double mu;
    double sigma;    // > 0
    double hurst;    // in (0, 1]
    double horizon;  // > 0, possibly +infinity
};

struct MgfBounds {
    double lower;
    double upper;
};

namespace fbm_finite {

// Location of the log-normal comparison variable under the exponential tilt
// with rate lambda. Closed form; |lambda| < 1e-8 routed through a first-order
// expansion because the closed form is 0/0 at lambda = 0.
double m_lambda(const FbmParams& p, double lambda);

// Matching scale (the s, not s^2). Evaluated from one-dimensional integrals
// of t^{2H} weighted by exponentials, arranged so neither sign of lambda
// overflows. Same series switch at |lambda| < 1e-8.
double s_lambda(const FbmParams& p, double lambda, const Tolerance& tol = {});

// P[I <= x] <= Phi((log x - m_lambda)/s_lambda).
BoundValue upper_cdf(const FbmParams& p, double x, double lambda, const Tolerance& tol = {});

// Minimum of upper_cdf over lambda in [-50/T, 50/T]. The flat tilt
// lambda = 0 is always a candidate, so the result never exceeds it.
FamilyBound upper_cdf_optimal(const FbmParams& p, double x, const Tolerance& tol = {});

// Concentration lower bound for H < 1/2 under a drift shift (empty drift
// means zero). The supremum constant c_H is assembled on the spot from
// erfc; the bound is 0 below its validity threshold (valid_from).
BoundValue lower_cdf_small_h(const FbmParams& p, double x,
                             const std::function<double(double)>& drift = {},
                             const Tolerance& tol = {});

// Reflection-type lower bound for H >= 1/2, any real lambda:
//   Phi((log(x/A) + lam T^{2H})/(sigma T^H))
//     - (x/A)^{-2 lam/sigma^2} Phi((log(A/x) + lam T^{2H})/(sigma T^H)),
// A = int_0^T exp(mu t + lam t^{2H}) dt, valid for x > A.
BoundValue lower_cdf_large_h(const FbmParams& p, double x, double lambda,
                             const Tolerance& tol = {});

// Comparison tail estimate: P[I > x] <= 2 exp(-log^2(x/B)/(2 sigma^2 T^{2H}))
// with B = int_0^T exp(mu t + sigma^2 t^{2H}/2) dt, clamped to 1 below B.
BoundValue dung_tail_bound(const FbmParams& p, double x, const Tolerance& tol = {});

// Closed-form moment bracket for E[I^p], p >= 1.
MomentBounds moment_bounds(const FbmParams& p, double pth);

// Bracket for E[exp(-lam I)], lam > 0.
MgfBounds mgf_bounds(const FbmParams& p, double lam, const Tolerance& tol = {});

// Upper bound on the gap between the flat upper bound and the true law.
double upper_bound_error_estimate(const FbmParams& p, double x);

}  // namespace fbm_finite
}  // namespace fbmexp
