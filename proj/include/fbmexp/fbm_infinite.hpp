#pragma once

#include "fbmexp/fbm_finite.hpp"

namespace fbmexp {

enum class FinitenessTag {
    AlmostSurelyInfinite,
    AlmostSurelyFinite,
    FiniteWithProbAtMostHalf,
    FiniteWithProbAtMost,
    Unknown,
};

struct FinitenessVerdict {
    FinitenessTag tag;
    // Probability cap carried by FiniteWithProbAtMost and, when one is
    // derivable, by Unknown; NaN otherwise.
    double probability_cap;
};

namespace fbm_infinite {

// All operations here require p.horizon == +infinity.

FinitenessVerdict classify_finiteness(const FbmParams& p);

// Best Gaussian comparison upper bound on P[I <= x], optimized in closed
// form over the exponential probing family. Degenerate cases: 0 when the
// functional is almost surely infinite, the exact law at H = 1.
BoundValue upper_cdf(const FbmParams& p, double x);

// Weaker closed form obtained at the probe rate -mu; requires mu < 0, H < 1.
BoundValue upper_cdf_simple(const FbmParams& p, double x);

// Same optimization done numerically over a logarithmic grid in the probe
// rate. Exists to cross-check the closed form.
BoundValue upper_cdf_numeric(const FbmParams& p, double x, const Tolerance& tol = {});

// Lower bound on P[I <= x] for mu < 0, valid above x = -1/mu. For H < 1/2
// this is the better of a small-ball estimate and a Markov estimate; for
// H > 1/2 it is 1 - l_h at the small-ball rate; H in {1/2, 1} routes to the
// exact laws.
BoundValue lower_cdf(const FbmParams& p, double x, const Tolerance& tol = {});

// l_h(x) = (2 pi)^{-1/2} int_0^inf t^{-H} exp(-(t+x)^2/(2 t^{2H})) dt,
// decreasing in x. Defined for H in (1/2, 1).
double l_h(double x, double hurst, const Tolerance& tol = {});

// Closed upper estimate of the expected supremum constant entering the
// small-ball route, H in (0, 1/2).
double m_script_bound(double hurst);

// Bracket for E[I^p]. Infinite in every case where the moment diverges.
MomentBounds moment_bounds(const FbmParams& p, double pth, const Tolerance& tol = {});

// Upper bound on E[exp(-lam I)], minimized over the probe rate and the
// threshold split jointly.
double mgf_upper(const FbmParams& p, double lam, const Tolerance& tol = {});

// Gap estimate for the upper bound; requires mu < 0 and H < 1/2.
double upper_error_estimate(const FbmParams& p, double x);

}  // namespace fbm_infinite
}  // namespace fbmexp
