#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "fbmexp/exact_laws.hpp"
#include "fbmexp/fbm_finite.hpp"
#include "fbmexp/fbm_infinite.hpp"
#include "fbmexp/montecarlo.hpp"
#include "fbmexp/numerics.hpp"
#include "fbmexp/series_fbm.hpp"

namespace {

using namespace fbmexp;

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kNan = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Accumulates `#`-prefixed metadata lines followed by CSV body text.
struct Report {
    std::ostringstream text;

    void meta(const std::string& key, double v) { text << "# " << key << "=" << num(v) << "\n"; }
    void meta(const std::string& key, long long v) { text << "# " << key << "=" << v << "\n"; }
    void meta(const std::string& key, const std::string& v) {
        text << "# " << key << "=" << v << "\n";
    }
    void line(const std::string& s) { text << s << "\n"; }
    void row(std::initializer_list<double> vs) {
        bool first = true;
        for (const double v : vs) {
            if (!first) text << ",";
            text << num(v);
            first = false;
        }
        text << "\n";
    }
};

void emit(const Report& r, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << r.text.str();
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error("cannot open output file: " + out_path);
    f << r.text.str();
}

// lo:hi:n with an optional trailing :log for geometric spacing
std::vector<double> parse_x_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur, ':')) parts.push_back(cur);
    if (parts.size() != 3 && parts.size() != 4) {
        throw std::domain_error("x grid must look like lo:hi:n or lo:hi:n:log");
    }
    const bool log_spaced = parts.size() == 4;
    if (log_spaced && parts[3] != "log") {
        throw std::domain_error("the fourth x grid field must be 'log'");
    }
    double lo, hi;
    int n;
    try {
        lo = std::stod(parts[0]);
        hi = std::stod(parts[1]);
        n = std::stoi(parts[2]);
    } catch (const std::exception&) {
        throw std::domain_error("could not parse the x grid fields");
    }
    if (n < 1) throw std::domain_error("x grid needs at least one point");
    if (log_spaced && (!(lo > 0.0) || !(hi > 0.0))) {
        throw std::domain_error("log-spaced x grids need positive endpoints");
    }
    std::vector<double> xs(n);
    if (n == 1) {
        xs[0] = lo;
        return xs;
    }
    if (log_spaced) {
        const double a = std::log(lo);
        const double b = std::log(hi);
        for (int i = 0; i < n; ++i) xs[i] = std::exp(a + (b - a) * i / double(n - 1));
    } else {
        for (int i = 0; i < n; ++i) xs[i] = lo + (hi - lo) * i / double(n - 1);
    }
    return xs;
}

std::vector<double> default_log_grid(double center, int n) {
    std::vector<double> xs(n);
    const double a = std::log(center / 50.0);
    const double b = std::log(center * 50.0);
    for (int i = 0; i < n; ++i) xs[i] = std::exp(a + (b - a) * i / double(n - 1));
    return xs;
}

SeriesParams load_series(const std::string& path, double mu) {
    std::ifstream f(path);
    if (!f) throw std::domain_error("cannot read weights file: " + path);
    std::vector<double> weights;
    std::vector<double> hursts;
    std::string line;
    while (std::getline(f, line)) {
        std::size_t i = line.find_first_not_of(" \t\r");
        if (i == std::string::npos || line[i] == '#') continue;
        double w, h;
        if (std::sscanf(line.c_str() + i, "%lf , %lf", &w, &h) != 2 &&
            std::sscanf(line.c_str() + i, "%lf %lf", &w, &h) != 2) {
            throw std::domain_error("weights file line is not 'sigma,hurst': " + line);
        }
        weights.push_back(w);
        hursts.push_back(h);
    }
    return SeriesParams(weights, hursts, mu);
}

const char* tag_name(FinitenessTag t) {
    switch (t) {
        case FinitenessTag::AlmostSurelyInfinite: return "almost_surely_infinite";
        case FinitenessTag::AlmostSurelyFinite: return "almost_surely_finite";
        case FinitenessTag::FiniteWithProbAtMostHalf: return "finite_with_prob_at_most_half";
        case FinitenessTag::FiniteWithProbAtMost: return "finite_with_prob_at_most";
        case FinitenessTag::Unknown: return "unknown";
    }
    return "unknown";
}

SampleMethod method_of(const std::string& name) {
    return name == "cholesky" ? SampleMethod::Cholesky : SampleMethod::CirculantEmbedding;
}

struct Options {
    double mu = 0.0;
    double sigma = 1.0;
    double hurst = 0.5;
    double t = 1.0;
    double lambda = 0.0;
    double x = kNan;
    double p = 1.0;
    double lam = 1.0;
    double delta = 0.01;
    double t_split = 100.0;
    int grid_size = 10000;
    int steps = 1024;
    long long paths = 1000;
    std::uint64_t seed = 0;
    std::string x_grid;
    std::string weights_file;
    std::string method = "circulant";
    std::string figure;
    std::string out;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "bounds, exact laws, moments, transforms and Monte Carlo checks for exponential "
        "functionals of drifted fractional Brownian motion"};
    app.require_subcommand(1);

    Options o;

    const auto add_out = [&](CLI::App* sc) {
        sc->add_option("--out", o.out, "write the report to this file instead of stdout");
    };
    const auto add_x = [&](CLI::App* sc) {
        auto* ox = sc->add_option("--x", o.x, "evaluation point");
        auto* og = sc->add_option("--x-grid", o.x_grid, "evaluation grid, lo:hi:n[:log]");
        ox->excludes(og);
    };
    const auto resolve_xs = [&]() -> std::vector<double> {
        if (!o.x_grid.empty()) return parse_x_grid(o.x_grid);
        if (!std::isnan(o.x)) return {o.x};
        throw CLI::RequiredError("--x or --x-grid");
    };
    const auto echo_x = [&](Report& r) {
        if (!o.x_grid.empty()) {
            r.meta("x_grid", o.x_grid);
        } else {
            r.meta("x", o.x);
        }
    };
    const auto add_core = [&](CLI::App* sc, bool with_t) {
        sc->add_option("--mu", o.mu, "drift coefficient")->required();
        sc->add_option("--sigma", o.sigma, "noise coefficient")->required();
        sc->add_option("--hurst", o.hurst, "roughness index in (0, 1]")->required();
        if (with_t) sc->add_option("--t", o.t, "time horizon")->required();
    };
    const auto echo_core = [&](Report& r, bool with_t) {
        r.meta("mu", o.mu);
        r.meta("sigma", o.sigma);
        r.meta("hurst", o.hurst);
        if (with_t) r.meta("t", o.t);
    };

    // ---------------- bound ----------------
    auto* bound = app.add_subcommand("bound", "distribution function bounds");
    bound->require_subcommand(1);

    auto* b_fu = bound->add_subcommand("finite-upper", "upper bound, finite horizon");
    add_core(b_fu, true);
    b_fu->add_option("--lambda", o.lambda, "probing rate (0 = flat)");
    add_x(b_fu);
    add_out(b_fu);
    b_fu->callback([&] {
        const std::vector<double> xs = resolve_xs();
        const FbmParams p{o.mu, o.sigma, o.hurst, o.t};
        Report r;
        echo_core(r, true);
        r.meta("lambda", o.lambda);
        echo_x(r);
        r.line("x,value,valid_from");
        for (const double x : xs) {
            const BoundValue b = fbm_finite::upper_cdf(p, x, o.lambda);
            r.row({x, b.value, b.valid_from});
        }
        emit(r, o.out);
    });

    auto* b_fl = bound->add_subcommand("finite-lower", "lower bound, finite horizon");
    add_core(b_fl, true);
    b_fl->add_option("--lambda", o.lambda, "probing rate, used when hurst >= 1/2");
    add_x(b_fl);
    add_out(b_fl);
    b_fl->callback([&] {
        const std::vector<double> xs = resolve_xs();
        const FbmParams p{o.mu, o.sigma, o.hurst, o.t};
        Report r;
        echo_core(r, true);
        r.meta("lambda", o.lambda);
        echo_x(r);
        r.line("x,value,valid_from");
        for (const double x : xs) {
            const BoundValue b = o.hurst < 0.5 ? fbm_finite::lower_cdf_small_h(p, x)
                                               : fbm_finite::lower_cdf_large_h(p, x, o.lambda);
            r.row({x, b.value, b.valid_from});
        }
        emit(r, o.out);
    });

    auto* b_fo = bound->add_subcommand("finite-optimal",
                                       "upper bound minimized over the probing rate");
    add_core(b_fo, true);
    add_x(b_fo);
    add_out(b_fo);
    b_fo->callback([&] {
        const std::vector<double> xs = resolve_xs();
        const FbmParams p{o.mu, o.sigma, o.hurst, o.t};
        Report r;
        echo_core(r, true);
        echo_x(r);
        r.line("x,value,lambda_star");
        for (const double x : xs) {
            const FamilyBound b = fbm_finite::upper_cdf_optimal(p, x);
            r.row({x, b.value, b.lambda});
        }
        emit(r, o.out);
    });

    auto* b_iu = bound->add_subcommand("infinite-upper", "upper bound, unbounded horizon");
    add_core(b_iu, false);
    add_x(b_iu);
    add_out(b_iu);
    b_iu->callback([&] {
        const std::vector<double> xs = resolve_xs();
        const FbmParams p{o.mu, o.sigma, o.hurst, kInf};
        Report r;
        echo_core(r, false);
        echo_x(r);
        r.line("x,value,valid_from");
        for (const double x : xs) {
            const BoundValue b = fbm_infinite::upper_cdf(p, x);
            r.row({x, b.value, b.valid_from});
        }
        emit(r, o.out);
    });

    auto* b_il = bound->add_subcommand("infinite-lower", "lower bound, unbounded horizon");
    add_core(b_il, false);
    add_x(b_il);
    add_out(b_il);
    b_il->callback([&] {
        const std::vector<double> xs = resolve_xs();
        const FbmParams p{o.mu, o.sigma, o.hurst, kInf};
        Report r;
        echo_core(r, false);
        echo_x(r);
        r.line("x,value,valid_from");
        for (const double x : xs) {
            const BoundValue b = fbm_infinite::lower_cdf(p, x);
            r.row({x, b.value, b.valid_from});
        }
        emit(r, o.out);
    });

    auto* b_dt = bound->add_subcommand("dung-tail", "comparison tail estimate, finite horizon");
    add_core(b_dt, true);
    add_x(b_dt);
    add_out(b_dt);
    b_dt->callback([&] {
        const std::vector<double> xs = resolve_xs();
        const FbmParams p{o.mu, o.sigma, o.hurst, o.t};
        Report r;
        echo_core(r, true);
        echo_x(r);
        r.line("x,value,valid_from");
        for (const double x : xs) {
            const BoundValue b = fbm_finite::dung_tail_bound(p, x);
            r.row({x, b.value, b.valid_from});
        }
        emit(r, o.out);
    });

    // ---------------- exact ----------------
    auto* exact = app.add_subcommand("exact", "closed-form laws and diagnostics");
    exact->require_subcommand(1);

    auto* e_h1f = exact->add_subcommand("h1-fin", "hurst = 1 law, finite horizon");
    e_h1f->add_option("--mu", o.mu, "drift coefficient")->required();
    e_h1f->add_option("--sigma", o.sigma, "noise coefficient")->required();
    e_h1f->add_option("--t", o.t, "time horizon")->required();
    add_x(e_h1f);
    add_out(e_h1f);
    e_h1f->callback([&] {
        const std::vector<double> xs = resolve_xs();
        Report r;
        r.meta("mu", o.mu);
        r.meta("sigma", o.sigma);
        r.meta("t", o.t);
        echo_x(r);
        r.line("x,value");
        for (const double x : xs) r.row({x, exact_laws::cdf_h1_finite(o.mu, o.sigma, o.t, x)});
        emit(r, o.out);
    });

    auto* e_h1i = exact->add_subcommand("h1-inf", "hurst = 1 law, unbounded horizon");
    e_h1i->add_option("--mu", o.mu, "drift coefficient")->required();
    e_h1i->add_option("--sigma", o.sigma, "noise coefficient")->required();
    add_x(e_h1i);
    add_out(e_h1i);
    e_h1i->callback([&] {
        const std::vector<double> xs = resolve_xs();
        Report r;
        r.meta("mu", o.mu);
        r.meta("sigma", o.sigma);
        echo_x(r);
        r.line("x,value");
        for (const double x : xs) r.row({x, exact_laws::cdf_h1_infinite(o.mu, o.sigma, x)});
        emit(r, o.out);
    });

    auto* e_hh = exact->add_subcommand("hhalf-inf", "hurst = 1/2 law, unbounded horizon");
    e_hh->add_option("--mu", o.mu, "drift coefficient, negative")->required();
    e_hh->add_option("--sigma", o.sigma, "noise coefficient")->required();
    add_x(e_hh);
    add_out(e_hh);
    e_hh->callback([&] {
        const std::vector<double> xs = resolve_xs();
        Report r;
        r.meta("mu", o.mu);
        r.meta("sigma", o.sigma);
        echo_x(r);
        r.line("x,value");
        for (const double x : xs) r.row({x, exact_laws::cdf_h_half_infinite(o.mu, o.sigma, x)});
        emit(r, o.out);
    });

    auto* e_kg = exact->add_subcommand(
        "kolmogorov-gap", "distance between the upper bound and the hurst = 1/2 law");
    e_kg->add_option("--mu", o.mu, "drift coefficient, negative")->required();
    e_kg->add_option("--sigma", o.sigma, "noise coefficient")->required();
    e_kg->add_option("--t-split", o.t_split, "tail split point");
    e_kg->add_option("--grid-size", o.grid_size, "search grid size");
    add_out(e_kg);
    e_kg->callback([&] {
        const double gap =
            exact_laws::kolmogorov_gap_h_half(o.mu, o.sigma, o.t_split, o.grid_size);
        Report r;
        r.meta("mu", o.mu);
        r.meta("sigma", o.sigma);
        r.meta("t_split", o.t_split);
        r.meta("grid_size", static_cast<long long>(o.grid_size));
        r.meta("kolmogorov_gap", gap);
        r.line("gap");
        r.row({gap});
        emit(r, o.out);
    });

    // ---------------- moments ----------------
    auto* moments = app.add_subcommand("moments", "moment brackets");
    moments->require_subcommand(1);

    auto* mo_f = moments->add_subcommand("finite", "finite horizon");
    add_core(mo_f, true);
    mo_f->add_option("--p", o.p, "moment order")->required();
    add_out(mo_f);
    mo_f->callback([&] {
        const MomentBounds mb = fbm_finite::moment_bounds({o.mu, o.sigma, o.hurst, o.t}, o.p);
        Report r;
        echo_core(r, true);
        r.meta("p", o.p);
        r.line("p,lower,upper");
        r.row({o.p, mb.lower, mb.upper});
        emit(r, o.out);
    });

    auto* mo_i = moments->add_subcommand("infinite", "unbounded horizon");
    add_core(mo_i, false);
    mo_i->add_option("--p", o.p, "moment order")->required();
    add_out(mo_i);
    mo_i->callback([&] {
        const MomentBounds mb =
            fbm_infinite::moment_bounds({o.mu, o.sigma, o.hurst, kInf}, o.p);
        Report r;
        echo_core(r, false);
        r.meta("p", o.p);
        r.line("p,lower,upper");
        r.row({o.p, mb.lower, mb.upper});
        emit(r, o.out);
    });

    // ---------------- mgf ----------------
    auto* mgf = app.add_subcommand("mgf", "Laplace transform estimates");
    mgf->require_subcommand(1);

    auto* mg_f = mgf->add_subcommand("finite", "finite horizon");
    add_core(mg_f, true);
    mg_f->add_option("--lam", o.lam, "transform rate")->required();
    add_out(mg_f);
    mg_f->callback([&] {
        const MgfBounds g = fbm_finite::mgf_bounds({o.mu, o.sigma, o.hurst, o.t}, o.lam);
        Report r;
        echo_core(r, true);
        r.meta("lam", o.lam);
        r.line("lam,lower,upper");
        r.row({o.lam, g.lower, g.upper});
        emit(r, o.out);
    });

    auto* mg_i = mgf->add_subcommand("infinite", "unbounded horizon");
    add_core(mg_i, false);
    mg_i->add_option("--lam", o.lam, "transform rate")->required();
    add_out(mg_i);
    mg_i->callback([&] {
        const double up = fbm_infinite::mgf_upper({o.mu, o.sigma, o.hurst, kInf}, o.lam);
        Report r;
        echo_core(r, false);
        r.meta("lam", o.lam);
        r.line("lam,upper");
        r.row({o.lam, up});
        emit(r, o.out);
    });

    // ---------------- series ----------------
    auto* series = app.add_subcommand("series", "weighted sums of independent components");
    series->require_subcommand(1);
    const auto add_series_core = [&](CLI::App* sc, bool with_t) {
        sc->add_option("--weights", o.weights_file, "two-column CSV file: sigma,hurst")
            ->required();
        sc->add_option("--mu", o.mu, "drift coefficient")->required();
        if (with_t) {
            sc->add_option("--t", o.t, "time horizon, 'inf' for unbounded")->required();
        }
    };
    const auto echo_series = [&](Report& r, bool with_t) {
        r.meta("weights", o.weights_file);
        r.meta("mu", o.mu);
        if (with_t) r.meta("t", o.t);
    };

    auto* se_u = series->add_subcommand("upper", "distribution upper bound");
    add_series_core(se_u, true);
    add_x(se_u);
    add_out(se_u);
    se_u->callback([&] {
        const std::vector<double> xs = resolve_xs();
        const SeriesParams s = load_series(o.weights_file, o.mu);
        Report r;
        echo_series(r, true);
        echo_x(r);
        r.line("x,value,valid_from");
        for (const double x : xs) {
            const BoundValue b = std::isinf(o.t) ? series_fbm::upper_cdf_infinite(s, x)
                                                 : series_fbm::upper_cdf_finite(s, o.t, x);
            r.row({x, b.value, b.valid_from});
        }
        emit(r, o.out);
    });

    auto* se_m = series->add_subcommand("moments", "moment bracket");
    add_series_core(se_m, true);
    se_m->add_option("--p", o.p, "moment order")->required();
    add_out(se_m);
    se_m->callback([&] {
        const SeriesParams s = load_series(o.weights_file, o.mu);
        const MomentBounds mb = std::isinf(o.t)
                                    ? series_fbm::moment_bounds_infinite(s, o.p)
                                    : series_fbm::moment_bounds_finite(s, o.t, o.p);
        Report r;
        echo_series(r, true);
        r.meta("p", o.p);
        r.line("p,lower,upper");
        r.row({o.p, mb.lower, mb.upper});
        emit(r, o.out);
    });

    auto* se_l = series->add_subcommand("lower", "distribution lower bound");
    add_series_core(se_l, true);
    add_x(se_l);
    add_out(se_l);
    se_l->callback([&] {
        const std::vector<double> xs = resolve_xs();
        const SeriesParams s = load_series(o.weights_file, o.mu);
        const double horizon = std::isinf(o.t) ? kInf : o.t;
        Report r;
        echo_series(r, true);
        echo_x(r);
        r.line("x,value,valid_from");
        for (const double x : xs) {
            const BoundValue b = series_fbm::lower_cdf(s, horizon, x);
            r.row({x, b.value, b.valid_from});
        }
        emit(r, o.out);
    });

    auto* se_c = series->add_subcommand("classify", "finiteness of the unbounded-horizon law");
    add_series_core(se_c, false);
    add_out(se_c);
    se_c->callback([&] {
        const SeriesParams s = load_series(o.weights_file, o.mu);
        const FinitenessVerdict v = series_fbm::classify_finiteness_series(s);
        Report r;
        echo_series(r, false);
        r.line("tag,probability_cap");
        r.line(std::string(tag_name(v.tag)) + "," + num(v.probability_cap));
        emit(r, o.out);
    });

    // ---------------- simulate ----------------
    auto* sim = app.add_subcommand("simulate", "Monte Carlo draws of the time integral");
    add_core(sim, true);
    sim->add_option("--paths", o.paths, "number of paths");
    sim->add_option("--steps", o.steps, "grid steps");
    sim->add_option("--seed", o.seed, "random seed");
    sim->add_option("--method", o.method, "cholesky or circulant")
        ->check(CLI::IsMember({"cholesky", "circulant"}));
    add_out(sim);
    sim->callback([&] {
        if (o.paths < 1) throw std::domain_error("need at least one path");
        const PathGrid grid(o.steps, o.t);
        const FbmParams p{o.mu, o.sigma, o.hurst, o.t};
        const PathMatrix m = montecarlo::sample_fbm_paths(
            o.hurst, grid, static_cast<std::size_t>(o.paths), o.seed, method_of(o.method));
        const SampleSet s = montecarlo::estimate_functional(m, p, grid);
        Report r;
        echo_core(r, true);
        r.meta("paths", o.paths);
        r.meta("steps", static_cast<long long>(o.steps));
        r.meta("seed", static_cast<long long>(o.seed));
        r.meta("method", o.method);
        r.meta("half_grid_bias", s.meta.half_grid_bias);
        r.line("value");
        for (const double v : s.values) r.row({v});
        emit(r, o.out);
    });

    // ---------------- compare ----------------
    auto* cmp = app.add_subcommand("compare",
                                   "bounds against the e.c.d.f. or the exact law as CSV");
    cmp->add_option("--figure", o.figure, "finite_1, finite_2, infinite or several_bounds")
        ->required()
        ->check(CLI::IsMember({"finite_1", "finite_2", "infinite", "several_bounds"}));
    auto* cmp_mu = cmp->add_option("--mu", o.mu, "drift coefficient");
    cmp->add_option("--sigma", o.sigma, "noise coefficient");
    auto* cmp_h = cmp->add_option("--hurst", o.hurst, "roughness index");
    cmp->add_option("--t", o.t, "time horizon");
    cmp->add_option("--paths", o.paths, "number of paths");
    cmp->add_option("--steps", o.steps, "grid steps");
    cmp->add_option("--seed", o.seed, "random seed");
    cmp->add_option("--delta", o.delta, "confidence-band level");
    cmp->add_option("--t-split", o.t_split, "tail split for the distance diagnostic");
    cmp->add_option("--method", o.method, "cholesky or circulant")
        ->check(CLI::IsMember({"cholesky", "circulant"}));
    cmp->add_option("--x-grid", o.x_grid, "evaluation grid, lo:hi:n[:log]");
    add_out(cmp);
    cmp->callback([&] {
        Report r;
        r.meta("figure", o.figure);
        if (o.figure == "finite_1" || o.figure == "finite_2") {
            if (cmp_h->count() == 0) o.hurst = o.figure == "finite_1" ? 0.25 : 0.75;
            if (o.paths < 1) throw std::domain_error("need at least one path");
            const FbmParams p{o.mu, o.sigma, o.hurst, o.t};
            const std::vector<double> xs =
                o.x_grid.empty() ? default_log_grid(o.t * std::exp(o.mu * o.t / 2.0), 201)
                                 : parse_x_grid(o.x_grid);
            const SandwichReport rep = montecarlo::sandwich_report(
                p, xs, static_cast<std::size_t>(o.paths), o.steps, o.seed, o.delta,
                method_of(o.method));
            echo_core(r, true);
            r.meta("paths", o.paths);
            r.meta("steps", static_cast<long long>(o.steps));
            r.meta("seed", static_cast<long long>(o.seed));
            r.meta("delta", o.delta);
            r.meta("dkw_eps", rep.dkw_eps);
            r.text << montecarlo::sandwich_csv(rep);
        } else if (o.figure == "infinite") {
            if (cmp_h->count() == 0) o.hurst = 0.5;
            if (o.hurst != 0.5) {
                throw std::domain_error("the exact-law comparison needs hurst = 1/2");
            }
            const FbmParams p{o.mu, o.sigma, o.hurst, kInf};
            const std::vector<double> xs =
                o.x_grid.empty() ? parse_x_grid("0.001:100:201:log") : parse_x_grid(o.x_grid);
            echo_core(r, false);
            r.meta("t_split", o.t_split);
            r.meta("kolmogorov_gap",
                   exact_laws::kolmogorov_gap_h_half(o.mu, o.sigma, o.t_split));
            r.line("x,lower,upper,exact");
            for (const double x : xs) {
                r.row({x, fbm_infinite::lower_cdf(p, x).value,
                       fbm_infinite::upper_cdf(p, x).value,
                       exact_laws::cdf_h_half_infinite(o.mu, o.sigma, x)});
            }
        } else {  // several_bounds
            if (cmp_mu->count() == 0) o.mu = 1.0;
            if (cmp_h->count() == 0) o.hurst = 0.75;
            const FbmParams p{o.mu, o.sigma, o.hurst, o.t};
            const std::vector<double> xs =
                o.x_grid.empty() ? default_log_grid(o.t * std::exp(o.mu * o.t / 2.0), 201)
                                 : parse_x_grid(o.x_grid);
            echo_core(r, true);
            const std::vector<double> lambdas = {-1.0, -0.5, 0.0, 0.5, 1.0};
            r.line("x,lam_-1,lam_-0.5,lam_0,lam_0.5,lam_1,optimal");
            for (const double x : xs) {
                std::vector<double> vals;
                vals.push_back(x);
                for (const double lam : lambdas) {
                    vals.push_back(fbm_finite::upper_cdf(p, x, lam).value);
                }
                vals.push_back(fbm_finite::upper_cdf_optimal(p, x).value);
                r.text << num(vals[0]);
                for (std::size_t i = 1; i < vals.size(); ++i) r.text << "," << num(vals[i]);
                r.text << "\n";
            }
        }
        emit(r, o.out);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        std::cerr << "run with --help for usage\n";
        return 64;
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const AccuracyError& e) {
        std::cerr << "accuracy error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
