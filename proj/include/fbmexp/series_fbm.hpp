#pragma once

#include "fbmexp/fbm_finite.hpp"
#include "fbmexp/fbm_infinite.hpp"
#include "fbmexp/gp_core.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace fbmexp {

// Weighted sum of independent fractional processes under one drift:
// Z_t = mu t + sum_n w_n X_n(t), X_n of Hurst index h_n in (0, 1].
// Aggregate sums are accumulated in sorted order, so permuting the component
// lists cannot change any derived quantity by a single bit. A negative weight
// leaves every squared-weight quantity intact and only disables the
// operations that need rho = sum w_n.
class SeriesParams {
public:
    SeriesParams(std::vector<double> weights, std::vector<double> hursts, double mu);

    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& hursts() const { return hursts_; }
    double mu() const { return mu_; }

    // Aggregates below run over components with nonzero weight.
    double sigma_sq() const { return sigma_sq_; }
    double sigma() const { return sigma_; }
    double h_min() const { return h_min_; }
    double h_max() const { return h_max_; }
    std::size_t active_count() const { return active_; }
    bool has_negative_weight() const { return has_negative_; }

    // Plain weight sum; throws std::domain_error when any weight is negative.
    double rho() const;

private:
    std::vector<double> weights_;
    std::vector<double> hursts_;
    double mu_ = 0.0;
    double sigma_sq_ = 0.0;
    double sigma_ = 0.0;
    double h_min_ = 0.0;
    double h_max_ = 0.0;
    double rho_ = 0.0;
    std::size_t active_ = 0;
    bool has_negative_ = false;
};

namespace series_fbm {

// Log-normal comparison parameters of the aggregate functional. The location
// does not depend on the weights at all (every component shares the drift);
// the squared scale is the sum of the per-component squared scales.
LogNormalParams lognormal_params_series(const SeriesParams& s, const ProbingDensity& f,
                                        double horizon, const Tolerance& tol = {});

// Finite-horizon upper bound on P[I_T <= x]; the normal argument switches
// coefficient at the central value T e^{mu T / 2}, both sides meeting at 1/2.
BoundValue upper_cdf_finite(const SeriesParams& s, double horizon, double x);

// Infinite-horizon upper bound, split on the drift sign and on h_max. The
// Gamma-function minimum entering the h_max-side coefficients is located
// numerically at call time and sharpened to an endpoint value whenever the
// exponent range [2 h_min + 1, 2 h_max + 1] sits entirely on one side of the
// minimizer.
BoundValue upper_cdf_infinite(const SeriesParams& s, double x);

// Closed-form bracket for E[I_T^p], finite horizon, p >= 1. Depends on the
// weights only through sigma_sq, h_min and h_max.
MomentBounds moment_bounds_finite(const SeriesParams& s, double horizon, double pth);

// Bracket for E[I_inf^p], p > 0. Drift >= 0, or any component index above
// 1/2, makes the moment infinite (both sides +inf). All indices equal to 1/2
// collapse to the exact Brownian law. For mu < 0 with h_max < 1/2 the upper
// is closed form (orders below one via the power-mean reduction from p = 1)
// and the lower maximizes over the probing rate on a guarded grid; with
// h_min < h_max = 1/2 only that lower is available and the upper stays +inf.
MomentBounds moment_bounds_infinite(const SeriesParams& s, double pth,
                                    const Tolerance& tol = {});

// Concentration lower bound on P[I_T <= x] under an optional drift shift
// (empty drift means zero). Finite horizon requires every component index on
// one side of 1/2 and nonnegative weights; indices straddling 1/2 are not
// covered and throw. Infinite horizon requires mu < 0 and h_max < 1/2 and
// takes no drift shift. Value is 0 below valid_from.
BoundValue lower_cdf(const SeriesParams& s, double horizon, double x,
                     const std::function<double(double)>& drift = {},
                     const Tolerance& tol = {});

// Finiteness of the infinite-horizon functional. The undecided regime
// (mu < 0 with some index equal to 1) still carries a probability cap from
// the linear components alone.
FinitenessVerdict classify_finiteness_series(const SeriesParams& s);

}  // namespace series_fbm
}  // namespace fbmexp
