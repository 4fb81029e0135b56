#include "fbmexp/exact_laws.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace fbmexp {
namespace exact_laws {
namespace {

void check_sigma_x(double sigma, double x) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw std::domain_error("exact law: sigma must be positive and finite");
    if (!(x > 0.0)) throw std::domain_error("exact law: x must be positive");
}

void check_negative_mu(double mu) {
    if (!(mu < 0.0) || !std::isfinite(mu))
        throw std::domain_error("exact law: requires mu < 0");
}

}  // namespace

double cdf_h1_finite(double mu, double sigma, double horizon, double x) {
    check_sigma_x(sigma, x);
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw std::domain_error("cdf_h1_finite: requires a finite positive horizon");
    const double v = horizon / x;
    const double arg = -v * std::exp(-v);
    const double z = (x >= horizon) ? lambert_wm1(arg) : lambert_w0(arg);
    return phi_cdf(-(mu + 1.0 / x + z / horizon) / sigma);
}

double cdf_h1_infinite(double mu, double sigma, double x) {
    check_sigma_x(sigma, x);
    return phi_cdf(-(mu + 1.0 / x) / sigma);
}

double cdf_h_half_infinite(double mu, double sigma, double x) {
    check_sigma_x(sigma, x);
    check_negative_mu(mu);
    const double var = sigma * sigma;
    return reg_upper_gamma(-2.0 * mu / var, 2.0 / (var * x));
}

double moments_h_half_infinite(double mu, double sigma, double pth) {
    if (!(sigma > 0.0)) throw std::domain_error("exact law: sigma must be positive");
    check_negative_mu(mu);
    if (!(pth > 0.0)) throw std::domain_error("moments_h_half_infinite: requires pth > 0");
    const double var = sigma * sigma;
    const double a = -2.0 * mu / var;
    if (pth >= a) return std::numeric_limits<double>::infinity();
    return std::exp(log_gamma(a - pth) - log_gamma(a) + pth * std::log(2.0 / var));
}

double kolmogorov_gap_h_half(double mu, double sigma, double t_split, int grid_size) {
    check_negative_mu(mu);
    if (!(sigma > 0.0)) throw std::domain_error("exact law: sigma must be positive");
    if (!(t_split > 0.0) || !std::isfinite(t_split))
        throw std::domain_error("kolmogorov_gap_h_half: t_split must be positive and finite");
    if (grid_size < 8) throw std::domain_error("kolmogorov_gap_h_half: grid too small");

    auto bound = [mu, sigma](double x) {
        const double w = lambert_w0(-mu * x * std::exp(1.0));
        const double r = std::sqrt(w);
        return phi_cdf(2.0 * std::sqrt(-2.0 * mu) / sigma * (r - 1.0 / r));
    };
    auto gap = [&](double x) { return bound(x) - cdf_h_half_infinite(mu, sigma, x); };

    const double lo = 1e-6 * t_split;
    const double step = std::log(t_split / lo) / (grid_size - 1);
    double best = 0.0;
    int best_idx = 0;
    std::vector<double> xs(grid_size);
    for (int i = 0; i < grid_size; ++i) {
        xs[i] = lo * std::exp(step * i);
        const double g = gap(xs[i]);
        if (g > best) {
            best = g;
            best_idx = i;
        }
    }
    const double bl = xs[std::max(0, best_idx - 1)];
    const double br = xs[std::min(grid_size - 1, best_idx + 1)];
    MinimizeResult refined =
        minimize_1d([&](double x) { return -gap(x); }, Bracket{bl, br}, Tolerance{}, 16);
    best = std::max(best, -refined.value);
    return std::max(best, 1.0 - cdf_h_half_infinite(mu, sigma, t_split));
}

}  // namespace exact_laws
}  // namespace fbmexp
