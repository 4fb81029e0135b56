#pragma once

#include "fbmexp/numerics.hpp"

#include <functional>

namespace fbmexp {

// Continuous Gaussian process on [0, horizon) described by its mean and
// covariance functions. horizon may be +infinity. cov must be symmetric and
// smooth away from the diagonal s = t (every kernel in scope is).
struct GaussianModel {
    std::function<double(double)> mean;             // t -> E[X_t]
    std::function<double(double, double)> cov;      // (s,t) -> Cov(X_s, X_t)
    double horizon;
};

enum class DensityKind { TruncatedExponential, Exponential, Tabulated };

// Probability density on [0, support). The two parametric kinds are the
// exponential tilts used throughout; Tabulated admits arbitrary callables.
// Every instance integrates to one over its support.
class ProbingDensity {
public:
    // f(t) = lambda e^{lambda t} / (e^{lambda T} - 1) on [0, T]; uniform at lambda = 0.
    static ProbingDensity truncated_exponential(double lambda, double horizon);
    // f(t) = lambda e^{-lambda t} on [0, inf); lambda > 0.
    static ProbingDensity exponential(double lambda);
    static ProbingDensity tabulated(std::function<double(double)> pdf,
                                    std::function<double(double)> log_pdf,
                                    double support);

    double pdf(double t) const;
    double log_pdf(double t) const;
    double support() const { return support_; }
    DensityKind kind() const { return kind_; }
    double param() const { return lambda_; }

private:
    ProbingDensity() = default;
    DensityKind kind_ = DensityKind::Tabulated;
    double lambda_ = 0.0;
    double support_ = 0.0;
    std::function<double(double)> pdf_;
    std::function<double(double)> log_pdf_;
};

// Parameters of the log-normal comparison variable: m location, s >= 0 scale.
struct LogNormalParams {
    double m;
    double s;
};

enum class BoundKind { Upper, Lower };

// A probability bound. value is in [0, 1]. For bounds with a validity
// threshold, valid_from is the x below which the bound degenerates (the
// value reported there is the trivial one).
struct BoundValue {
    double value;
    BoundKind kind;
    double valid_from;
};

struct MomentBounds {
    double lower;
    double upper;  // +inf when the estimate does not certify finiteness
};

// Location/scale of the log-normal dominating variable for the given density:
// m = int (-log f(t) + E[X_t]) f(t) dt, s^2 = int int Cov(X_s, X_t) f(s) f(t).
// Throws std::domain_error when either integral diverges. A tiny negative s^2
// from quadrature noise (>= -1e-10) is clamped to zero.
LogNormalParams lognormal_params(const GaussianModel& model, const ProbingDensity& f,
                                 const Tolerance& tol = {});

// P[functional <= x] <= Phi((log x - m)/s). Degenerate s = 0 yields a step
// at e^m: 0 for x < e^m, 1 otherwise.
double upper_cdf_bound(const LogNormalParams& params, double x);

struct FamilyBound {
    double value;
    double lambda;
};

// Minimizes the upper bound over the exponential-tilt family selected by the
// model horizon (truncated on finite horizons, decaying otherwise). When the
// range includes lambda = 0 on a finite horizon, that member is always a
// candidate, so the result never exceeds it.
FamilyBound best_upper_over_family(const GaussianModel& model, const Bracket& lambda_range,
                                   double x, const Tolerance& tol = {});

// Concentration lower bound for P[functional <= x] built from a drift shift f:
//   1 - exp(-(log(x/A) + inf f - sup_mean_bound)^2 / (2 max_t Var X_t)),
// A = int exp(E[X_t] + f(t)) dt, valid for x > exp(sup_mean_bound - inf f) A.
// sup_mean_bound must dominate E[sup_t (X_t - E X_t)]; it is the caller's
// responsibility (process-specific estimates live with each process).
BoundValue lower_cdf_bound_borell(const GaussianModel& model,
                                  const std::function<double(double)>& drift,
                                  double sup_mean_bound, double x,
                                  const Tolerance& tol = {});

// Two-sided bounds on E[functional^p], p > 0. The regimes p in (0,1) and
// p >= 1 swap which side the density integral serves. +inf signals a
// divergent estimate, which is a legal (uninformative) bound.
MomentBounds moment_bounds(const GaussianModel& model, const ProbingDensity& f, double p,
                           const Tolerance& tol = {});

// Upper bound for E[exp(-lam * functional)], lam > 0, minimized over the
// truncation level eps in (0,1).
double mgf_upper(const GaussianModel& model, const ProbingDensity& f, double lam,
                 const Tolerance& tol = {});

// Lower bound for E[exp(-lam * functional)], integrating the concentration
// lower bound over the unit interval. Same sup_mean_bound contract as
// lower_cdf_bound_borell.
double mgf_lower(const GaussianModel& model, const std::function<double(double)>& drift,
                 double sup_mean_bound, double lam, const Tolerance& tol = {});

}  // namespace fbmexp
