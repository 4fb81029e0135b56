#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fbmexp/fbm_finite.hpp"
#include "fbmexp/series_fbm.hpp"

namespace fbmexp {

// Uniform time grid t_k = k * horizon / n_steps, k = 1..n_steps.
// The origin t_0 = 0 is implicit and never stored (the path starts at zero).
struct PathGrid {
    int n_steps = 0;
    double horizon = 0.0;

    PathGrid(int steps, double T);

    double dt() const { return horizon / static_cast<double>(n_steps); }
    // k is 1-based: time(1) = dt(), time(n_steps) = horizon.
    double time(int k) const { return horizon * static_cast<double>(k) / static_cast<double>(n_steps); }
};

enum class SampleMethod { Cholesky, CirculantEmbedding };

// Row-major matrix of sampled path values. Row i holds one path evaluated at
// t_1..t_n; the value at t_0 = 0 is implicit. seed/method record how the rows
// were produced so downstream estimates can stamp their provenance.
struct PathMatrix {
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    std::vector<double> values;
    std::uint64_t seed = 0;
    SampleMethod method = SampleMethod::CirculantEmbedding;
    bool fallback_used = false;  // circulant embedding rejected, rows came from Cholesky

    double at(std::size_t path, std::size_t step) const {
        return values[path * n_steps + step];
    }
};

struct SampleMeta {
    double mu = 0.0;
    double sigma = 0.0;
    double hurst = 0.0;
    PathGrid grid{2, 1.0};
    SampleMethod method = SampleMethod::CirculantEmbedding;
    // |mean on full grid - mean on every-second-node grid| of the same paths;
    // NaN when n_steps is odd. A crude handle on discretisation bias.
    double half_grid_bias = 0.0;
};

struct SampleSet {
    std::vector<double> values;  // one functional value per path, in path order
    std::uint64_t seed = 0;
    SampleMeta meta;
};

struct EstimateResult {
    double mean = 0.0;
    double std_error = 0.0;
};

struct SandwichRow {
    double x = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double ecdf = 0.0;
    double ecdf_lo = 0.0;
    double ecdf_hi = 0.0;
    bool flag = false;
};

struct SandwichReport {
    std::vector<SandwichRow> rows;
    double dkw_eps = 0.0;
    SampleSet samples;  // kept so callers can reuse the draw for moment checks
};

namespace montecarlo {

// Exact draws of standard fractional Brownian motion on the grid.
//
// method = Cholesky factors the full covariance (n_steps <= 4096) with an
// escalating-jitter retry. method = CirculantEmbedding embeds the increment
// autocovariance in a circulant of the first power-of-two size >= 2(n-1) and
// synthesises increments spectrally; if the embedding has an eigenvalue below
// -1e-9 times the largest it falls back to Cholesky and notes that on the
// result (tiny negatives are clamped to zero). hurst = 1 is the degenerate
// ray t * N and bypasses both methods.
//
// Randomness comes from a counter-based generator (Philox4x32-10, keyed by
// seed) with the counter split as (draw index, path index), so any path is
// reproducible in isolation and results are independent of thread count and
// bit-identical across reruns. FBM_EXPFUN_THREADS caps worker threads.
PathMatrix sample_fbm_paths(double hurst, const PathGrid& grid, std::size_t n_paths,
                            std::uint64_t seed, SampleMethod method);

// Weighted sum of independent fractional Brownian paths, one per nonzero
// component of s, in list order. Component j (counting active components from
// zero) uses seed + j * 0x9E3779B97F4A7C15, so a single-component series
// reproduces sample_fbm_paths bit for bit and dropping zero-weight components
// changes nothing.
PathMatrix sample_series_paths(const SeriesParams& s, const PathGrid& grid, std::size_t n_paths,
                               std::uint64_t seed,
                               SampleMethod method = SampleMethod::CirculantEmbedding);

// Trapezoid estimate of the pathwise time integral of exp(mu t + sigma X_t)
// for every row of paths. p.sigma = 0 is allowed here (degenerate integrand);
// pass sigma = 1 for pre-weighted series paths. The half-grid bias of the
// estimate is recorded in meta.
SampleSet estimate_functional(const PathMatrix& paths, const FbmParams& p, const PathGrid& grid);

// Fraction of sample values <= x.
double ecdf(const SampleSet& samples, double x);

// Half-width eps = sqrt(log(2/delta) / (2n)) of the distribution-free
// confidence band: the true c.d.f. lies within eps of the e.c.d.f.
// everywhere with probability at least 1 - delta.
double dkw_band(std::size_t n, double delta);

// Sample mean and standard error of exp(-lam * value); lam >= 0.
// lam = 0 returns mean 1, error 0 exactly.
EstimateResult estimate_mgf(const SampleSet& samples, double lam);

// Sample mean and standard error of value^pth; pth = 0 returns mean 1, error 0.
EstimateResult estimate_moment(const SampleSet& samples, double pth);

// Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

// Asymptotic rejection threshold c(alpha) * sqrt((n+m)/(n m)) with
// c(alpha) = sqrt(-log(alpha/2) / 2).
double ks_threshold(std::size_t n, std::size_t m, double alpha);

// Bound/e.c.d.f. comparison table for the single-functional law on [0, T].
// Per grid point: the distribution upper bound (flat probing density), the
// H-appropriate lower bound (complemented tail estimate for hurst < 1/2,
// reflection lower bound at zero tilt for hurst >= 1/2, exact steps when
// sigma = 0), the e.c.d.f. with its band, and a flag raised when the band
// escapes the bounds (ecdf - eps > upper or ecdf + eps < lower).
SandwichReport sandwich_report(const FbmParams& p, const std::vector<double>& x_grid,
                               std::size_t n_paths, int n_steps, std::uint64_t seed, double delta,
                               SampleMethod method = SampleMethod::CirculantEmbedding);

// Series variant: upper bound from the two-regime comparison estimate, lower
// bound where one is available for the index range (none when the indices
// straddle 1/2 or a weight is negative; the lower column is then zero and
// never flags).
SandwichReport sandwich_report_series(const SeriesParams& s, double horizon,
                                      const std::vector<double>& x_grid, std::size_t n_paths,
                                      int n_steps, std::uint64_t seed, double delta,
                                      SampleMethod method = SampleMethod::CirculantEmbedding);

// CSV rendering: header x,lower,upper,ecdf,ecdf_lo,ecdf_hi,flag then one row
// per grid point, numbers at 17 significant digits, flag as 0/1.
std::string sandwich_csv(const SandwichReport& report);

}  // namespace montecarlo
}  // namespace fbmexp
