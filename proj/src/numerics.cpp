#include "fbmexp/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace fbmexp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double phi_cdf(double z) {
    if (std::isnan(z)) return z;
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double erfc_fn(double x) { return std::erfc(x); }

double gamma_fn(double z) {
    if (!(z > 0.0)) throw std::domain_error("gamma_fn: requires z > 0");
    return std::tgamma(z);
}

double log_gamma(double z) {
    if (!(z > 0.0)) throw std::domain_error("log_gamma: requires z > 0");
    return std::lgamma(z);
}

double reg_upper_gamma(double a, double x) {
    if (!(a > 0.0)) throw std::domain_error("reg_upper_gamma: requires a > 0");
    if (!(x >= 0.0)) throw std::domain_error("reg_upper_gamma: requires x >= 0");
    if (x == 0.0) return 1.0;
    const double log_prefac = -x + a * std::log(x) - std::lgamma(a);
    if (x < a + 1.0) {
        // lower series; Q = 1 - P
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
        }
        return 1.0 - sum * std::exp(log_prefac);
    }
    // modified Lentz continued fraction for Q
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(log_prefac) * h;
}

namespace {

// Series around the branch point x = -1/e in p = +-sqrt(2(1 + e x)).
double lambert_branch_series(double p) {
    const double p2 = p * p;
    return -1.0 + p - p2 / 3.0 + 11.0 * p2 * p / 72.0 - 43.0 * p2 * p2 / 540.0 +
           769.0 * p2 * p2 * p / 17280.0 - 221.0 * p2 * p2 * p2 / 8505.0;
}

// Halley refinement of w e^w = x; safe for moderate |w|.
double lambert_halley(double w, double x) {
    for (int i = 0; i < 60; ++i) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        if (std::fabs(f) <= 1e-15 * std::max(1.0, std::fabs(x))) break;
        const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
        const double step = f / denom;
        w -= step;
        if (std::fabs(step) <= 1e-17 * (1.0 + std::fabs(w))) break;
    }
    return w;
}

// Newton in log space for log(|w|) + w = log(|x|); used where e^w
// under/overflows. sign: both w and x on the same side of zero.
double lambert_log_newton(double w, double log_abs_x, bool negative) {
    for (int i = 0; i < 80; ++i) {
        const double lw = std::log(negative ? -w : w);
        const double res = lw + w - log_abs_x;
        if (std::fabs(res) <= 1e-15 * std::max(1.0, std::fabs(log_abs_x))) break;
        const double step = res * w / (1.0 + w);
        double wn = w - step;
        if (negative && wn > -1.0) wn = 0.5 * (w - 1.0);
        w = wn;
        if (std::fabs(step) <= 1e-16 * std::fabs(w)) break;
    }
    return w;
}

}  // namespace

double lambert_w0(double x) {
    const double em1 = std::exp(-1.0);
    if (std::isnan(x) || x < -em1 - 1e-12)
        throw std::domain_error("lambert_w0: requires x >= -1/e");
    if (x < -em1) x = -em1;
    if (x == 0.0) return 0.0;

    const double r = 1.0 + x * std::exp(1.0);  // 0 at the branch point
    if (r <= 0.0) return -1.0;
    if (x < 0.2) {
        const double p = std::sqrt(2.0 * r);
        const double w = lambert_branch_series(p);
        if (p < 1e-4) return w;  // Halley denominator degenerates at the branch point
        return lambert_halley(w, x);
    }
    if (x > 1e150) {
        const double l1 = std::log(x);
        const double l2 = std::log(l1);
        return lambert_log_newton(l1 - l2 + l2 / l1, l1, false);
    }
    double w;
    if (x < 3.0) {
        w = std::log1p(x) * 0.8;
    } else {
        const double l1 = std::log(x);
        const double l2 = std::log(l1);
        w = l1 - l2 + l2 / l1;
    }
    return lambert_halley(w, x);
}

double lambert_wm1(double x) {
    const double em1 = std::exp(-1.0);
    if (std::isnan(x) || x < -em1 - 1e-12 || x >= 0.0)
        throw std::domain_error("lambert_wm1: requires x in [-1/e, 0)");
    if (x < -em1) x = -em1;

    const double r = 1.0 + x * std::exp(1.0);
    if (r <= 0.0) return -1.0;
    if (r < 1e-8) {
        return lambert_branch_series(-std::sqrt(2.0 * r));
    }
    double w;
    if (x < -0.05) {
        w = lambert_branch_series(-std::sqrt(2.0 * r));
    } else {
        const double l1 = std::log(-x);
        const double l2 = std::log(-l1);
        w = l1 - l2 + l2 / l1;
    }
    if (w < -35.0) {
        return lambert_log_newton(w, std::log(-x), true);
    }
    // keep iterates on the lower branch
    for (int i = 0; i < 60; ++i) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        if (std::fabs(f) <= 1e-16 * std::max(1.0, std::fabs(x))) break;
        const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
        double wn = w - f / denom;
        if (wn > -1.0) wn = 0.5 * (w - 1.0);
        if (std::fabs(wn - w) <= 1e-17 * std::fabs(w)) { w = wn; break; }
        w = wn;
    }
    return w;
}

namespace {

// 15-point Kronrod nodes with embedded 7-point Gauss rule on [-1,1].
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct QkEstimate {
    double value;
    double error;
};

QkEstimate qk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    const double fc = f(c);
    double resg = kWg[3] * fc;
    double resk = kWgk[7] * fc;
    for (int j = 0; j < 3; ++j) {
        const double dx = hw * kXgk[2 * j + 1];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        resg += kWg[j] * (f1 + f2);
        resk += kWgk[2 * j + 1] * (f1 + f2);
    }
    for (int j = 0; j < 4; ++j) {
        const double dx = hw * kXgk[2 * j];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        resk += kWgk[2 * j] * (f1 + f2);
    }
    QkEstimate r;
    r.value = resk * hw;
    r.error = std::fabs((resk - resg) * hw);
    if (!std::isfinite(r.value)) r.error = kInf;
    return r;
}

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

double integrate_finite(const std::function<double(double)>& f, double lo, double hi,
                        const Tolerance& tol) {
    std::priority_queue<Segment> segs;
    double total = 0.0;
    double total_err = 0.0;
    // Seed with two panels split at the golden ratio. A single panel can
    // alias a feature sitting exactly on a node (both rules then see the
    // same values and report zero error); an irrational split breaks any
    // alignment with node lattices of enclosing integrals.
    const double split = lo + 0.6180339887498949 * (hi - lo);
    if (split > lo && split < hi) {
        const QkEstimate a = qk15(f, lo, split);
        const QkEstimate b = qk15(f, split, hi);
        total = a.value + b.value;
        total_err = a.error + b.error;
        segs.push({lo, split, a.value, a.error});
        segs.push({split, hi, b.value, b.error});
    } else {
        const QkEstimate first = qk15(f, lo, hi);
        total = first.value;
        total_err = first.error;
        segs.push({lo, hi, first.value, first.error});
    }
    int rounds = 0;
    const int budget = std::max(8, tol.max_iter);
    while (total_err > std::max(tol.abs_tol, tol.rel_tol * std::fabs(total))) {
        if (++rounds > budget) {
            throw AccuracyError("integrate: tolerance not reached", total, total_err);
        }
        Segment worst = segs.top();
        segs.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // interval no longer splittable in doubles
            segs.push({worst.a, worst.b, worst.value, 0.0});
            total_err -= worst.error;
            continue;
        }
        const QkEstimate left = qk15(f, worst.a, mid);
        const QkEstimate right = qk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        segs.push({worst.a, mid, left.value, left.error});
        segs.push({mid, worst.b, right.value, right.error});
        if (!std::isfinite(total)) {
            throw AccuracyError("integrate: divergent or non-finite integrand", total, kInf);
        }
    }
    if (!std::isfinite(total)) {
        throw AccuracyError("integrate: divergent or non-finite integrand", total, kInf);
    }
    return total;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const Tolerance& tol) {
    if (std::isnan(lo) || std::isnan(hi) || std::isinf(lo))
        throw std::domain_error("integrate: lower limit must be finite");
    if (hi < lo) throw std::domain_error("integrate: requires hi >= lo");
    if (hi == lo) return 0.0;
    if (std::isinf(hi)) {
        auto g = [&f, lo](double u) {
            const double om = 1.0 - u;
            const double t = lo + u / om;
            // nodes can round onto u = 1; the point at infinity carries no
            // mass for a convergent integral, and a divergent one still
            // blows up at interior nodes
            if (om <= 0.0 || !std::isfinite(t)) return 0.0;
            return f(t) / (om * om);
        };
        return integrate_finite(g, 0.0, 1.0, tol);
    }
    return integrate_finite(f, lo, hi, tol);
}

MinimizeResult minimize_1d(const std::function<double(double)>& f, const Bracket& b,
                           const Tolerance& tol, int grid_points) {
    if (!(b.lo < b.hi)) throw std::domain_error("minimize_1d: requires lo < hi");
    const int n = std::max(4, grid_points);
    const bool log_spaced = b.lo > 0.0 && b.hi / b.lo >= 1e3;
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        xs[i] = log_spaced ? b.lo * std::pow(b.hi / b.lo, t) : b.lo + (b.hi - b.lo) * t;
    }
    xs.front() = b.lo;
    xs.back() = b.hi;

    int best = -1;
    double fbest = kInf;
    std::vector<double> fvals(n);
    for (int i = 0; i < n; ++i) {
        double v = f(xs[i]);
        if (std::isnan(v)) v = kInf;
        fvals[i] = v;
        if (v < fbest) {
            fbest = v;
            best = i;
        }
    }
    if (best < 0) throw AccuracyError("minimize_1d: objective not finite on grid",
                                      xs[0], kInf);
    if (best == 0 || best == n - 1) {
        return {xs[best], fbest, false};
    }

    double a = xs[best - 1];
    double d = xs[best + 1];
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c1 = d - gr * (d - a);
    double c2 = a + gr * (d - a);
    double fc1 = f(c1);
    double fc2 = f(c2);
    for (int i = 0; i < tol.max_iter; ++i) {
        if (d - a <= tol.abs_tol + tol.rel_tol * 0.5 * (std::fabs(a) + std::fabs(d))) break;
        if (fc1 < fc2) {
            d = c2;
            c2 = c1;
            fc2 = fc1;
            c1 = d - gr * (d - a);
            fc1 = f(c1);
        } else {
            a = c1;
            c1 = c2;
            fc1 = fc2;
            c2 = a + gr * (d - a);
            fc2 = f(c2);
        }
    }
    double xr = fc1 < fc2 ? c1 : c2;
    double fr = std::min(fc1, fc2);
    if (fbest < fr) {
        xr = xs[best];
        fr = fbest;
    }
    return {xr, fr, true};
}

double find_root(const std::function<double(double)>& f, const Bracket& br,
                 const Tolerance& tol) {
    if (!(br.lo < br.hi)) throw std::domain_error("find_root: requires lo < hi");
    double a = br.lo, b = br.hi;
    double fa = f(a), fb = f(b);
    if (!std::isfinite(fa) || !std::isfinite(fb))
        throw std::domain_error("find_root: endpoint values must be finite");
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw std::domain_error("find_root: requires a sign change over the bracket");

    double c = a, fc = fa;
    double d = b - a, e = d;
    const double eps = std::numeric_limits<double>::epsilon();
    for (int iter = 0; iter < std::max(tol.max_iter, 60); ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * eps * std::fabs(b) + 0.5 * (tol.abs_tol + tol.rel_tol * std::fabs(b));
        const double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::fabs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::fabs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
    }
    throw AccuracyError("find_root: no convergence", b, std::fabs(c - b));
}

}  // namespace fbmexp
