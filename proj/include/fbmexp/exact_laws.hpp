#pragma once

#include "fbmexp/numerics.hpp"

namespace fbmexp {
namespace exact_laws {

// Distribution function of int_0^T exp(mu t + sigma t N) dt, N standard
// normal. The Lambert equation z e^z = -(T/x) e^{-T/x} has two real roots;
// the right one switches branch at x = T, where both give z = -1.
double cdf_h1_finite(double mu, double sigma, double horizon, double x);

// Same functional over an unbounded horizon: Phi(-(mu + 1/x)/sigma).
// Mass below 1 is the defect P[I = infinity] = 1 - Phi(-mu/sigma).
double cdf_h1_infinite(double mu, double sigma, double x);

// H = 1/2, infinite horizon, mu < 0: the law is inverse-Gamma, so the
// distribution function is a regularized upper incomplete gamma.
double cdf_h_half_infinite(double mu, double sigma, double x);

// E[I^p] for the inverse-Gamma law; +infinity when p >= -2 mu/sigma^2.
double moments_h_half_infinite(double mu, double sigma, double pth);

// Worst-case distance on [0, t_split] between the Gaussian comparison upper
// bound (in its Lambert form) and the exact inverse-Gamma law, plus the mass
// the exact law leaves beyond t_split. Grid maximum refined locally.
double kolmogorov_gap_h_half(double mu, double sigma, double t_split = 100.0,
                             int grid_size = 10000);

}  // namespace exact_laws
}  // namespace fbmexp
