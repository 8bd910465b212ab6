#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <string>
#include <vector>

#include "counting.hpp"
#include "enumerate.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "surface.hpp"

namespace flatcount {

struct FitResult {
    double c_hat = 0;
    double kappa_hat = 0;
    double kappa_se = 0;
    int points_used = 0;
    bool estimable = false;
};

// Structure fit for N_A(R) ~ c R^2 + O(R^{2-kappa}): c is the mean density
// over the top half of the radii grid; kappa is minus the least-squares slope
// of log|density residual| against log R.  Residuals below ten counting quanta
// (10/R^2) are quantization noise and are excluded; fewer than three surviving
// points leaves kappa not estimable.
inline FitResult fit_quadratic_growth(const std::vector<double>& radii,
                                      const std::vector<double>& counts) {
    FitResult fit;
    const std::size_t n = std::min(radii.size(), counts.size());
    if (n == 0) return fit;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return radii[a] > radii[b]; });
    const std::size_t top = (n + 1) / 2;
    double c = 0;
    for (std::size_t k = 0; k < top; ++k) {
        const double R = radii[order[k]];
        c += counts[order[k]] / (R * R);
    }
    c /= static_cast<double>(top);
    fit.c_hat = c;
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < n; ++k) {
        const double R = radii[order[k]];
        const double resid = std::fabs(counts[order[k]] / (R * R) - c);
        if (resid < 10.0 / (R * R)) continue;
        xs.push_back(std::log(R));
        ys.push_back(std::log(resid));
    }
    const std::size_t m = xs.size();
    if (m < 3) return fit;
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < m; ++k) {
        mx += xs[k];
        my += ys[k];
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);
    double sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < m; ++k) {
        sxx += (xs[k] - mx) * (xs[k] - mx);
        sxy += (xs[k] - mx) * (ys[k] - my);
    }
    if (!(sxx > 0)) return fit;
    const double slope = sxy / sxx;
    double rss = 0;
    for (std::size_t k = 0; k < m; ++k) {
        const double pred = my + slope * (xs[k] - mx);
        rss += (ys[k] - pred) * (ys[k] - pred);
    }
    fit.kappa_hat = -slope;
    fit.kappa_se = std::sqrt(rss / static_cast<double>(m - 2) / sxx);
    fit.points_used = static_cast<int>(m);
    fit.estimable = true;
    return fit;
}

struct CountingReport {
    std::string surface;
    std::string mode;
    double area = 0;
    double A = 0;
    std::vector<double> radii;
    std::vector<long> counts_N;
    std::vector<long> counts_NA;
    std::vector<long> counts_Nstar;
    double c_direct = 0;
    double kappa_hat = 0;
    double kappa_se = 0;
    bool kappa_estimable = false;
    int kappa_points = 0;
    double c_siegel = 0;
    double c_siegel_refinement = 0;
    bool pre_asymptotic = false;
    double t_used = 0;
    int theta_samples = 0;
    std::uint64_t seed = 0;
    int threads = 0;
    double runtime_seconds = 0;
};

namespace detail {

class RunTimer {
public:
    RunTimer() : start_(std::chrono::steady_clock::now()) {}
    // Reports 0.0 unless FLATCOUNT_TIMING=1, so identical runs produce
    // identical report bytes by default.
    double elapsed() const {
        const char* env = std::getenv("FLATCOUNT_TIMING");
        if (env == nullptr || std::string(env) != "1") return 0.0;
        const auto dt = std::chrono::steady_clock::now() - start_;
        return std::chrono::duration<double>(dt).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

// Convergence study: enumerate once out to R_max, count pairs on the grid
// R_j = R_max 2^{-j/4}, fit the growth law, and estimate the constant a second
// way through the circle average at the largest t the data certifies.
inline CountingReport run_convergence(const TranslationSurface& s, double A, double R_max,
                                      int grid_size = 13, int theta_samples = 4096,
                                      int threads = 0) {
    if (!(R_max > 0) || grid_size < 1) throw parse_error("run_convergence: bad grid");
    const detail::RunTimer timer;
    CountingReport rep;
    rep.surface = s.name;
    rep.mode = to_string(s.mode);
    rep.area = total_area(s);
    rep.A = A;
    rep.theta_samples = theta_samples;
    rep.threads = resolve_threads(threads);
    EnumerateOptions opt;
    opt.threads = threads;
    const HolonomyMultiset set = enumerate(s, R_max, opt);
    rep.radii.reserve(grid_size);
    for (int j = 0; j < grid_size; ++j)
        rep.radii.push_back(R_max * std::exp2(-0.25 * j));
    std::vector<double> both = rep.radii;
    for (double R : rep.radii) both.push_back(0.5 * R);
    const std::vector<long> counts = count_pairs_NA_multi(set, A, both, threads);
    rep.counts_NA.assign(counts.begin(), counts.begin() + grid_size);
    rep.counts_Nstar.reserve(grid_size);
    for (int j = 0; j < grid_size; ++j)
        rep.counts_Nstar.push_back(counts[j] - counts[grid_size + j]);
    rep.counts_N.reserve(grid_size);
    for (double R : rep.radii) rep.counts_N.push_back(count_N(set, R));
    std::vector<double> dens(rep.counts_NA.begin(), rep.counts_NA.end());
    const FitResult fit = fit_quadratic_growth(rep.radii, dens);
    rep.c_direct = fit.c_hat;
    rep.kappa_hat = fit.kappa_hat;
    rep.kappa_se = fit.kappa_se;
    rep.kappa_estimable = fit.estimable;
    rep.kappa_points = fit.points_used;
    rep.t_used = std::log(R_max / std::sqrt(2.0));
    const CircleAverage ca = circle_average_sv(set, A, rep.t_used, theta_samples, threads);
    rep.c_siegel = (4.0 / 3.0) * pi * ca.value;
    rep.c_siegel_refinement = (4.0 / 3.0) * pi * ca.refinement_error;
    rep.pre_asymptotic = rep.t_used < 0.5 * std::log(2.0 * A + 1.0);
    rep.runtime_seconds = timer.elapsed();
    return rep;
}

struct SiegelEstimate {
    double c_siegel = 0;
    double refinement = 0;  // quadrature refinement error, same (4/3)pi scale
    double t = 0;
    int theta_samples = 0;
    bool pre_asymptotic = false;
};

// Siegel-route constant estimate (4/3) pi A_t h_A at one t.  Flagged
// pre-asymptotic when t is too small for the trapezoid mass to have entered
// the |z| > sqrt(2A+1) regime.
inline SiegelEstimate run_siegel(const TranslationSurface& s, double A, double t,
                                 int theta_samples = 4096, int threads = 0) {
    SiegelEstimate out;
    out.t = t;
    out.theta_samples = theta_samples;
    out.pre_asymptotic = t < 0.5 * std::log(2.0 * A + 1.0);
    EnumerateOptions opt;
    opt.threads = threads;
    const double L = std::sqrt(2.0) * std::exp(t) * (1.0 + 1e-12);
    const HolonomyMultiset set = enumerate(s, L, opt);
    const CircleAverage ca = circle_average_sv(set, A, t, theta_samples, threads);
    out.c_siegel = (4.0 / 3.0) * pi * ca.value;
    out.refinement = (4.0 / 3.0) * pi * ca.refinement_error;
    return out;
}

struct DecompositionCheck {
    DecompositionTerms terms;
    double tolerance = 0;
    bool pass = false;
};

// Runs the shell-count decomposition and checks the bucket identity: the
// residual must sit within the quadrature budget and every contributing pair
// must land in a locus.
inline DecompositionCheck run_decomposition_check(const TranslationSurface& s, double A,
                                                  double t, int theta_samples = 4096,
                                                  int threads = 0) {
    EnumerateOptions opt;
    opt.threads = threads;
    const double L = std::sqrt(2.0) * std::exp(t) * (1.0 + 1e-12);
    const HolonomyMultiset set = enumerate(s, L, opt);
    DecompositionCheck chk;
    chk.terms = decomposition_terms(set, A, t, theta_samples, threads);
    const double et = std::exp(t);
    chk.tolerance = pi * et * et * chk.terms.refinement_total;
    chk.pass = std::fabs(chk.terms.residual) <= chk.tolerance &&
               chk.terms.coverage_violations == 0;
    return chk;
}

inline DecompositionCheck check_decomposition_terms(const DecompositionTerms& terms) {
    DecompositionCheck chk;
    chk.terms = terms;
    const double et = std::exp(terms.t);
    chk.tolerance = pi * et * et * terms.refinement_total;
    chk.pass = std::fabs(terms.residual) <= chk.tolerance &&
               terms.coverage_violations == 0;
    return chk;
}

}  // namespace flatcount
