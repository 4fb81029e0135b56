#include "fbmexp/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <thread>
#include <utility>

#include <Eigen/Dense>

#include "fbmexp/numerics.hpp"

namespace fbmexp {

PathGrid::PathGrid(int steps, double T) : n_steps(steps), horizon(T) {
    if (steps < 2) throw std::domain_error("path grid needs at least 2 steps");
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw std::domain_error("path grid horizon must be finite and positive");
    }
}

namespace montecarlo {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInvSqrt2 = 0.70710678118654752440;
const double kNan = std::numeric_limits<double>::quiet_NaN();

// Philox4x32-10. One call turns (key = seed, counter = (draw, path)) into
// 128 output bits; callers never mutate shared state, so any path and any
// draw within it can be produced in isolation and in any order.
struct NormalPair {
    double a;
    double b;
};

inline void philox_round(std::uint32_t& c0, std::uint32_t& c1, std::uint32_t& c2,
                         std::uint32_t& c3, std::uint32_t k0, std::uint32_t k1) {
    const std::uint64_t p0 = 0xD2511F53ull * c0;
    const std::uint64_t p1 = 0xCD9E8D57ull * c2;
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c0 = hi1 ^ c1 ^ k0;
    c1 = lo1;
    c2 = hi0 ^ c3 ^ k1;
    c3 = lo0;
}

inline NormalPair philox_normals(std::uint64_t seed, std::uint64_t path, std::uint64_t draw) {
    std::uint32_t c0 = static_cast<std::uint32_t>(draw);
    std::uint32_t c1 = static_cast<std::uint32_t>(draw >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(path);
    std::uint32_t c3 = static_cast<std::uint32_t>(path >> 32);
    std::uint32_t k0 = static_cast<std::uint32_t>(seed);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
    for (int r = 0; r < 10; ++r) {
        philox_round(c0, c1, c2, c3, k0, k1);
        k0 += 0x9E3779B9u;
        k1 += 0xBB67AE85u;
    }
    const std::uint64_t u64a = (static_cast<std::uint64_t>(c1) << 32) | c0;
    const std::uint64_t u64b = (static_cast<std::uint64_t>(c3) << 32) | c2;
    // (0, 1) strictly, so the log below is always finite.
    const double u1 = (static_cast<double>(u64a >> 11) + 0.5) * 0x1p-53;
    const double u2 = (static_cast<double>(u64b >> 11) + 0.5) * 0x1p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * kPi * u2;
    return {r * std::cos(th), r * std::sin(th)};
}

// Hands out the normals of one path in a fixed order: draw block 0 gives
// normals 0 and 1, block 1 gives 2 and 3, and so on.
class NormalStream {
  public:
    NormalStream(std::uint64_t seed, std::uint64_t path) : seed_(seed), path_(path) {}

    double next() {
        if (pending_) {
            pending_ = false;
            return second_;
        }
        const NormalPair p = philox_normals(seed_, path_, draw_++);
        second_ = p.b;
        pending_ = true;
        return p.a;
    }

  private:
    std::uint64_t seed_;
    std::uint64_t path_;
    std::uint64_t draw_ = 0;
    double second_ = 0.0;
    bool pending_ = false;
};

std::size_t thread_budget(std::size_t jobs) {
    const unsigned hw = std::thread::hardware_concurrency();
    std::size_t n = hw > 0 ? hw : 1;
    if (const char* env = std::getenv("FBM_EXPFUN_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) n = std::min(n, static_cast<std::size_t>(v));
    }
    return std::max<std::size_t>(1, std::min(n, jobs));
}

// Static partition over path indices. Every path's output depends only on
// (seed, path index), so the split cannot change the result.
void parallel_over_paths(std::size_t n_paths,
                         const std::function<void(std::size_t, std::size_t)>& run_range) {
    const std::size_t workers = thread_budget(n_paths);
    if (workers <= 1) {
        run_range(0, n_paths);
        return;
    }
    const std::size_t chunk = (n_paths + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n_paths, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(run_range, lo, hi);
    }
    for (auto& t : pool) t.join();
}

// Autocovariance of unit-spacing increments, times spacing^{2H}.
double increment_autocov(double two_h, double scale_2h, std::uint64_t k) {
    const double kd = static_cast<double>(k);
    const double up = std::pow(kd + 1.0, two_h);
    const double mid = k == 0 ? 0.0 : 2.0 * std::pow(kd, two_h);
    const double down = k == 0 ? 1.0 : std::pow(kd - 1.0, two_h);
    return 0.5 * scale_2h * (up - mid + down);
}

Eigen::MatrixXd value_covariance(double hurst, const PathGrid& grid) {
    const int n = grid.n_steps;
    const double two_h = 2.0 * hurst;
    Eigen::MatrixXd cov(n, n);
    for (int i = 0; i < n; ++i) {
        const double ti = grid.time(i + 1);
        for (int j = i; j < n; ++j) {
            const double tj = grid.time(j + 1);
            const double v =
                0.5 * (std::pow(ti, two_h) + std::pow(tj, two_h) - std::pow(tj - ti, two_h));
            cov(i, j) = v;
            cov(j, i) = v;
        }
    }
    return cov;
}

Eigen::MatrixXd cholesky_factor(double hurst, const PathGrid& grid) {
    const Eigen::MatrixXd cov = value_covariance(hurst, grid);
    const double scale = cov.diagonal().maxCoeff();
    for (const double jitter : {0.0, 1e-12, 1e-10, 1e-8}) {
        Eigen::MatrixXd work = cov;
        if (jitter > 0.0) work.diagonal().array() += jitter * scale;
        Eigen::LLT<Eigen::MatrixXd> llt(work);
        if (llt.info() == Eigen::Success) return llt.matrixL();
    }
    throw AccuracyError("path covariance is not numerically positive definite", kNan, kNan);
}

// In-place forward transform a_k <- sum_j a_j exp(-2 pi i j k / n); n a power of two.
void fft_pow2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * kPi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

struct CirculantPlan {
    std::size_t m = 0;
    std::vector<double> sqrt_lambda;  // sqrt of clamped circulant eigenvalues
    bool ok = false;
};

CirculantPlan circulant_plan(double hurst, const PathGrid& grid) {
    CirculantPlan plan;
    const std::size_t n = static_cast<std::size_t>(grid.n_steps);
    const std::size_t target = 2 * (n - 1);
    std::size_t m = 2;
    while (m < target) m <<= 1;
    plan.m = m;

    const double two_h = 2.0 * hurst;
    const double scale_2h = std::pow(grid.dt(), two_h);
    std::vector<std::complex<double>> c(m);
    for (std::size_t j = 0; j < m; ++j) {
        const std::uint64_t k = static_cast<std::uint64_t>(std::min(j, m - j));
        c[j] = increment_autocov(two_h, scale_2h, k);
    }
    fft_pow2(c);

    double max_ev = 0.0;
    double min_ev = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double ev = c[j].real();
        max_ev = std::max(max_ev, ev);
        min_ev = std::min(min_ev, ev);
    }
    plan.ok = min_ev >= -1e-9 * max_ev;
    if (!plan.ok) return plan;

    plan.sqrt_lambda.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        plan.sqrt_lambda[j] = std::sqrt(std::max(c[j].real(), 0.0));
    }
    return plan;
}

// One path from the spectral embedding: draw the Hermitian-symmetric complex
// vector, transform, keep the real parts of the first n entries as
// increments, accumulate.
void circulant_fill_row(const CirculantPlan& plan, std::uint64_t seed, std::uint64_t path,
                        std::size_t n, double* row) {
    const std::size_t m = plan.m;
    const std::size_t half = m / 2;
    std::vector<std::complex<double>> w(m);
    NormalStream ns(seed, path);
    w[0] = plan.sqrt_lambda[0] * ns.next();
    w[half] = plan.sqrt_lambda[half] * ns.next();
    for (std::size_t j = 1; j < half; ++j) {
        const double re = ns.next();
        const double im = ns.next();
        const double amp = plan.sqrt_lambda[j] * kInvSqrt2;
        w[j] = std::complex<double>(amp * re, amp * im);
        w[m - j] = std::conj(w[j]);
    }
    fft_pow2(w);
    const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        acc += w[k].real() * inv_sqrt_m;
        row[k] = acc;
    }
}

void check_sample_args(double hurst, std::size_t n_paths) {
    if (!(hurst > 0.0) || hurst > 1.0) throw std::domain_error("hurst index must lie in (0, 1]");
    if (n_paths == 0) throw std::domain_error("need at least one path");
}

double mean_of(const std::vector<double>& v) {
    double acc = 0.0;
    for (const double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

EstimateResult mean_and_se(const std::vector<double>& v) {
    const std::size_t n = v.size();
    const double mean = mean_of(v);
    if (n < 2) return {mean, 0.0};
    double ss = 0.0;
    for (const double x : v) {
        const double d = x - mean;
        ss += d * d;
    }
    const double var = ss / static_cast<double>(n - 1);
    return {mean, std::sqrt(var / static_cast<double>(n))};
}

}  // namespace

PathMatrix sample_fbm_paths(double hurst, const PathGrid& grid, std::size_t n_paths,
                            std::uint64_t seed, SampleMethod method) {
    check_sample_args(hurst, n_paths);
    const std::size_t n = static_cast<std::size_t>(grid.n_steps);

    PathMatrix out;
    out.n_paths = n_paths;
    out.n_steps = n;
    out.seed = seed;
    out.method = method;
    out.values.assign(n_paths * n, 0.0);

    if (hurst == 1.0) {
        // Degenerate ray: every path is t times one standard normal.
        parallel_over_paths(n_paths, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                const double z = NormalStream(seed, i).next();
                double* row = out.values.data() + i * n;
                for (std::size_t k = 0; k < n; ++k) {
                    row[k] = grid.time(static_cast<int>(k) + 1) * z;
                }
            }
        });
        return out;
    }

    bool use_cholesky = method == SampleMethod::Cholesky;
    if (use_cholesky && grid.n_steps > 4096) {
        throw std::domain_error("cholesky sampling supports at most 4096 steps");
    }

    CirculantPlan plan;
    if (!use_cholesky) {
        plan = circulant_plan(hurst, grid);
        if (!plan.ok) {
            if (grid.n_steps > 4096) {
                throw AccuracyError(
                    "circulant embedding rejected and the grid is too large for the Cholesky "
                    "fallback",
                    kNan, kNan);
            }
            std::cerr << "fbmexp: circulant embedding has a significantly negative eigenvalue; "
                         "falling back to Cholesky sampling\n";
            out.fallback_used = true;
            use_cholesky = true;
        }
    }

    if (use_cholesky) {
        const Eigen::MatrixXd L = cholesky_factor(hurst, grid);
        parallel_over_paths(n_paths, [&](std::size_t lo, std::size_t hi) {
            Eigen::VectorXd z(static_cast<Eigen::Index>(n));
            for (std::size_t i = lo; i < hi; ++i) {
                NormalStream ns(seed, i);
                for (std::size_t k = 0; k < n; ++k) z[static_cast<Eigen::Index>(k)] = ns.next();
                const Eigen::VectorXd b = L.triangularView<Eigen::Lower>() * z;
                double* row = out.values.data() + i * n;
                for (std::size_t k = 0; k < n; ++k) row[k] = b[static_cast<Eigen::Index>(k)];
            }
        });
    } else {
        parallel_over_paths(n_paths, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                circulant_fill_row(plan, seed, i, n, out.values.data() + i * n);
            }
        });
    }
    return out;
}

PathMatrix sample_series_paths(const SeriesParams& s, const PathGrid& grid, std::size_t n_paths,
                               std::uint64_t seed, SampleMethod method) {
    if (n_paths == 0) throw std::domain_error("need at least one path");

    PathMatrix out;
    out.n_paths = n_paths;
    out.n_steps = static_cast<std::size_t>(grid.n_steps);
    out.seed = seed;
    out.method = method;
    out.values.assign(n_paths * out.n_steps, 0.0);

    std::uint64_t active = 0;
    for (std::size_t i = 0; i < s.weights().size(); ++i) {
        const double w = s.weights()[i];
        if (w == 0.0) continue;
        const std::uint64_t derived = seed + active * 0x9E3779B97F4A7C15ull;
        const PathMatrix comp = sample_fbm_paths(s.hursts()[i], grid, n_paths, derived, method);
        out.fallback_used = out.fallback_used || comp.fallback_used;
        for (std::size_t idx = 0; idx < out.values.size(); ++idx) {
            out.values[idx] += w * comp.values[idx];
        }
        ++active;
    }
    return out;
}

SampleSet estimate_functional(const PathMatrix& paths, const FbmParams& p, const PathGrid& grid) {
    if (static_cast<std::size_t>(grid.n_steps) != paths.n_steps) {
        throw std::domain_error("grid step count does not match the path matrix");
    }
    if (!std::isfinite(p.mu)) throw std::domain_error("mu must be finite");
    if (!(p.sigma >= 0.0) || !std::isfinite(p.sigma)) {
        throw std::domain_error("sigma must be finite and nonnegative");
    }
    if (p.horizon != grid.horizon) {
        throw std::domain_error("parameter horizon does not match the sampling grid");
    }

    const std::size_t n = paths.n_steps;
    const std::size_t n_paths = paths.n_paths;
    const double dt = grid.dt();

    std::vector<double> drift(n);
    for (std::size_t k = 0; k < n; ++k) {
        drift[k] = std::exp(p.mu * grid.time(static_cast<int>(k) + 1));
    }

    SampleSet out;
    out.seed = paths.seed;
    out.meta =
        SampleMeta{p.mu, p.sigma, p.hurst, grid, paths.method, kNan};
    out.values.assign(n_paths, 0.0);

    const bool even = n % 2 == 0;
    std::vector<double> coarse(even ? n_paths : 0, 0.0);

    parallel_over_paths(n_paths, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> g(n);
        for (std::size_t i = lo; i < hi; ++i) {
            const double* row = paths.values.data() + i * n;
            for (std::size_t k = 0; k < n; ++k) g[k] = drift[k] * std::exp(p.sigma * row[k]);
            // integrand at t_0 = 0 is exactly 1
            double acc = 0.5;
            for (std::size_t k = 0; k + 1 < n; ++k) acc += g[k];
            acc += 0.5 * g[n - 1];
            out.values[i] = dt * acc;
            if (even) {
                // same paths on every second node, for the bias diagnostic
                double acc2 = 0.5;
                for (std::size_t k = 1; k + 1 < n; k += 2) acc2 += g[k];
                acc2 += 0.5 * g[n - 1];
                coarse[i] = 2.0 * dt * acc2;
            }
        }
    });

    if (even) out.meta.half_grid_bias = std::abs(mean_of(out.values) - mean_of(coarse));
    return out;
}

double ecdf(const SampleSet& samples, double x) {
    if (samples.values.empty()) throw std::domain_error("empty sample set");
    std::vector<double> sorted = samples.values;
    std::sort(sorted.begin(), sorted.end());
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
    return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

double dkw_band(std::size_t n, double delta) {
    if (n == 0) throw std::domain_error("need at least one sample");
    if (!(delta > 0.0) || !(delta < 1.0)) throw std::domain_error("delta must lie in (0, 1)");
    return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

EstimateResult estimate_mgf(const SampleSet& samples, double lam) {
    if (samples.values.empty()) throw std::domain_error("empty sample set");
    if (!(lam >= 0.0) || !std::isfinite(lam)) {
        throw std::domain_error("transform rate must be finite and nonnegative");
    }
    if (lam == 0.0) return {1.0, 0.0};
    std::vector<double> t(samples.values.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::exp(-lam * samples.values[i]);
    return mean_and_se(t);
}

EstimateResult estimate_moment(const SampleSet& samples, double pth) {
    if (samples.values.empty()) throw std::domain_error("empty sample set");
    if (!std::isfinite(pth)) throw std::domain_error("moment order must be finite");
    if (pth == 0.0) return {1.0, 0.0};
    std::vector<double> t(samples.values.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::pow(samples.values[i], pth);
    return mean_and_se(t);
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::domain_error("both samples must be nonempty");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_threshold(std::size_t n, std::size_t m, double alpha) {
    if (n == 0 || m == 0) throw std::domain_error("both sample sizes must be positive");
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw std::domain_error("alpha must lie in (0, 1)");
    const double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
    const double nn = static_cast<double>(n);
    const double mm = static_cast<double>(m);
    return c * std::sqrt((nn + mm) / (nn * mm));
}

namespace {

SandwichReport assemble_sandwich(SampleSet samples, const std::vector<double>& x_grid,
                                 double delta,
                                 const std::function<double(double)>& upper_at,
                                 const std::function<double(double)>& lower_at) {
    SandwichReport report;
    report.dkw_eps = dkw_band(samples.values.size(), delta);

    std::vector<double> sorted = samples.values;
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());

    report.rows.reserve(x_grid.size());
    for (const double x : x_grid) {
        const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
        const double f = static_cast<double>(it - sorted.begin()) / n;
        SandwichRow row;
        row.x = x;
        row.lower = lower_at(x);
        row.upper = upper_at(x);
        row.ecdf = f;
        row.ecdf_lo = std::max(0.0, f - report.dkw_eps);
        row.ecdf_hi = std::min(1.0, f + report.dkw_eps);
        row.flag = (f - report.dkw_eps > row.upper) || (f + report.dkw_eps < row.lower);
        report.rows.push_back(row);
    }
    report.samples = std::move(samples);
    return report;
}

}  // namespace

SandwichReport sandwich_report(const FbmParams& p, const std::vector<double>& x_grid,
                               std::size_t n_paths, int n_steps, std::uint64_t seed, double delta,
                               SampleMethod method) {
    const PathGrid grid(n_steps, p.horizon);
    const PathMatrix paths = sample_fbm_paths(p.hurst, grid, n_paths, seed, method);
    SampleSet samples = estimate_functional(paths, p, grid);

    std::function<double(double)> upper_at;
    std::function<double(double)> lower_at;
    if (p.sigma == 0.0) {
        // Deterministic integral: both bounds collapse to unit steps.
        const double center = p.horizon * std::exp(p.mu * p.horizon / 2.0);
        const double mass =
            p.mu == 0.0 ? p.horizon : std::expm1(p.mu * p.horizon) / p.mu;
        upper_at = [center](double x) { return x >= center ? 1.0 : 0.0; };
        lower_at = [mass](double x) { return x > mass ? 1.0 : 0.0; };
    } else if (p.hurst < 0.5) {
        upper_at = [&p](double x) { return fbm_finite::upper_cdf(p, x, 0.0).value; };
        lower_at = [&p](double x) { return 1.0 - fbm_finite::dung_tail_bound(p, x).value; };
    } else {
        upper_at = [&p](double x) { return fbm_finite::upper_cdf(p, x, 0.0).value; };
        lower_at = [&p](double x) { return fbm_finite::lower_cdf_large_h(p, x, 0.0).value; };
    }
    return assemble_sandwich(std::move(samples), x_grid, delta, upper_at, lower_at);
}

SandwichReport sandwich_report_series(const SeriesParams& s, double horizon,
                                      const std::vector<double>& x_grid, std::size_t n_paths,
                                      int n_steps, std::uint64_t seed, double delta,
                                      SampleMethod method) {
    const PathGrid grid(n_steps, horizon);
    const PathMatrix paths = sample_series_paths(s, grid, n_paths, seed, method);
    const FbmParams effective{s.mu(), 1.0, s.h_max(), horizon};
    SampleSet samples = estimate_functional(paths, effective, grid);

    const bool have_lower =
        !s.has_negative_weight() && (s.h_max() < 0.5 || s.h_min() >= 0.5);
    const auto upper_at = [&s, horizon](double x) {
        return series_fbm::upper_cdf_finite(s, horizon, x).value;
    };
    const auto lower_at = [&s, horizon, have_lower](double x) {
        return have_lower ? series_fbm::lower_cdf(s, horizon, x).value : 0.0;
    };
    return assemble_sandwich(std::move(samples), x_grid, delta, upper_at, lower_at);
}

std::string sandwich_csv(const SandwichReport& report) {
    std::string out = "x,lower,upper,ecdf,ecdf_lo,ecdf_hi,flag\n";
    char buf[256];
    for (const SandwichRow& row : report.rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", row.x,
                      row.lower, row.upper, row.ecdf, row.ecdf_lo, row.ecdf_hi, row.flag ? 1 : 0);
        out += buf;
    }
    return out;
}

}  // namespace montecarlo
}  // namespace fbmexp
