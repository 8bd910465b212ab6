// Acceptance gate: one pass/fail line per criterion, nonzero exit on failure.
// Runs single-process with a pinned environment so timings and counts are
// reproducible.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include <flatcount/flatcount.hpp>

#include "support/halton.hpp"
#include "support/oracles.hpp"

using namespace flatcount;

namespace {

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::chrono::steady_clock::time_point now() { return std::chrono::steady_clock::now(); }

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

struct Gate {
    int failures = 0;
    void report(int id, bool pass, const std::string& detail) {
        std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
    }
};

struct SharedState {
    double torus_c_direct = 0.0;
};

std::vector<Vec2> sorted_xy(std::vector<Vec2> v) {
    std::sort(v.begin(), v.end(),
              [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    return v;
}

bool same_holonomy_sequence(const HolonomyMultiset& a, const HolonomyMultiset& b) {
    if (a.entries.size() != b.entries.size()) return false;
    for (std::size_t i = 0; i < a.entries.size(); ++i)
        if (a.entries[i].holonomy.x != b.entries[i].holonomy.x ||
            a.entries[i].holonomy.y != b.entries[i].holonomy.y)
            return false;
    return true;
}

// 1. Quadratic growth on the square torus: the primitive-vector density at
// R = 200 must land in [1.87, 1.95] (the limit is 6/pi ~= 1.9099) within the
// single-threaded time budget, and the enumeration must equal the gcd oracle.
void criterion_growth(Gate& g, SharedState&) {
    EnumerateOptions opt;
    opt.threads = 1;
    const auto t0 = now();
    const HolonomyMultiset set = enumerate(make_torus(), 200.0, opt);
    const long n = count_N(set, 200.0);
    const double secs = elapsed(t0);
    const double density = static_cast<double>(n) / (200.0 * 200.0);

    const std::vector<Vec2> mine = sorted_xy(oracle::holonomies(set));
    const std::vector<Vec2> prim = sorted_xy(oracle::primitive_vectors(200.0));
    bool oracle_ok = mine.size() == prim.size();
    for (std::size_t i = 0; oracle_ok && i < mine.size(); ++i)
        oracle_ok = mine[i].x == prim[i].x && mine[i].y == prim[i].y;

    const bool pass = density >= 1.87 && density <= 1.95 && secs <= 10.0 && oracle_ok;
    g.report(1, pass,
             fmt("N(200)=%ld density=%.4f time=%.2fs oracle=%s", n, density, secs,
                 oracle_ok ? "exact" : "mismatch"));
}

// 2. The straight-line enumerator and the integer origami enumerator must
// produce identical holonomy multisets on square-tiled surfaces.
void criterion_origami(Gate& g, SharedState&) {
    const HolonomyMultiset t_dfs = enumerate(make_torus(), 50.0);
    const HolonomyMultiset t_int = enumerate_origami(make_torus(), 50.0);
    const HolonomyMultiset l_dfs = enumerate(make_l_origami(), 30.0);
    const HolonomyMultiset l_int = enumerate_origami(make_l_origami(), 30.0);
    const bool torus_ok = same_holonomy_sequence(t_dfs, t_int);
    const bool l_ok = same_holonomy_sequence(l_dfs, l_int);
    g.report(2, torus_ok && l_ok,
             fmt("torus@50: %zu vs %zu (%s)  L-origami@30: %zu vs %zu (%s)",
                 t_dfs.entries.size(), t_int.entries.size(), torus_ok ? "equal" : "differ",
                 l_dfs.entries.size(), l_int.entries.size(), l_ok ? "equal" : "differ"));
}

// 3. Hand-counted pair statistics on the torus.
void criterion_frozen_counts(Gate& g, SharedState&) {
    const HolonomyMultiset set = enumerate(make_torus(), 2.0);
    const long a = count_pairs_NA(set, 1.0, 1.0);
    const long b = count_pairs_NA(set, 0.5, 1.0);
    const long c = count_pairs_NA(set, 1.0, 1.5);
    const double s = sv_transform_pairs(set, PairRegion::trapezoid_hA(1.0));
    const bool pass = a == 16 && b == 8 && c == 40 && s == 20.0;
    g.report(3, pass,
             fmt("N_1(1)=%ld N_{1/2}(1)=%ld N_1(1.5)=%ld trapezoid_sum=%g "
                 "(want 16/8/40/20)",
                 a, b, c, s));
}

// 4. Convergence study at A = 1: densities at R = 200/100/50 agree within 10%
// and the error-exponent fit is positive and significant, for the torus and
// the unit-area L-origami, inside five minutes.
void criterion_convergence(Gate& g, SharedState& shared) {
    const auto t0 = now();
    const CountingReport torus = run_convergence(make_torus(), 1.0, 200.0, 13, 4096);
    shared.torus_c_direct = torus.c_direct;
    const CountingReport lsurf =
        run_convergence(normalize(make_l_origami()), 1.0, 200.0, 13, 4096);
    const double secs = elapsed(t0);

    struct Checked {
        double var = 0;
        bool ok = false;
    };
    const auto check = [](const CountingReport& rep) {
        Checked c;
        double d[3];
        for (int k = 0; k < 3; ++k) {
            const int j = 4 * k;  // R_max, R_max/2, R_max/4
            d[k] = static_cast<double>(rep.counts_NA[j]) / (rep.radii[j] * rep.radii[j]);
        }
        const double mx = std::max({d[0], d[1], d[2]});
        const double mn = std::min({d[0], d[1], d[2]});
        c.var = (mx - mn) / ((d[0] + d[1] + d[2]) / 3.0);
        c.ok = c.var < 0.10 && rep.kappa_estimable && rep.kappa_hat > 0.0 &&
               rep.kappa_se < rep.kappa_hat;
        return c;
    };
    const Checked ct = check(torus);
    const Checked cl = check(lsurf);
    const bool pass = ct.ok && cl.ok && secs <= 300.0;
    g.report(4, pass,
             fmt("torus: var=%.1f%% kappa=%.2f+-%.2f | L: var=%.1f%% kappa=%.2f+-%.2f | "
                 "%.0fs",
                 100.0 * ct.var, torus.kappa_hat, torus.kappa_se, 100.0 * cl.var,
                 lsurf.kappa_hat, lsurf.kappa_se, secs));
}

// 5. The circle-average route to the counting constant agrees with the direct
// density fit within 15% on the torus.
void criterion_siegel(Gate& g, SharedState& shared) {
    const auto t0 = now();
    double c_direct = shared.torus_c_direct;
    if (!(c_direct > 0.0))
        c_direct = run_convergence(make_torus(), 1.0, 200.0, 13, 4096).c_direct;
    const SiegelEstimate sv = run_siegel(make_torus(), 1.0, 3.0, 4096);
    const double secs = elapsed(t0);
    const double gap = std::fabs(c_direct - sv.c_siegel) / c_direct;
    const bool pass = gap <= 0.15 && secs <= 600.0;
    g.report(5, pass,
             fmt("c_direct=%.4f c_siegel=%.4f gap=%.1f%% time=%.0fs", c_direct, sv.c_siegel,
                 100.0 * gap, secs));
}

// 6. Shell-count decomposition balances within its quadrature budget with
// every contributing pair tagged, on the torus and the L-origami at t = 1, 2.
void criterion_decomposition(Gate& g, SharedState&) {
    bool pass = true;
    std::string detail;
    for (const auto& [name, surf] :
         {std::pair<const char*, TranslationSurface>{"torus", make_torus()},
          std::pair<const char*, TranslationSurface>{"L-origami", make_l_origami()}}) {
        for (const double t : {1.0, 2.0}) {
            const DecompositionCheck chk = run_decomposition_check(surf, 1.0, t);
            pass = pass && chk.pass;
            detail += fmt("%s(t=%g): %s resid=%.2e tol=%.2e viol=%ld  ", name, t,
                          chk.pass ? "ok" : "FAIL", chk.terms.residual, chk.tolerance,
                          static_cast<long>(chk.terms.coverage_violations));
        }
    }
    g.report(6, pass, detail);
}

// 7. Pointwise bound: pi * (A_t h_A)(z, w) <= arctan(e^{-2t}) up to the
// reported quadrature refinement, over a deterministic low-discrepancy stream
// of 10^4 pairs covering the support at t = 3.
void criterion_pointwise_bound(Gate& g, SharedState&) {
    const double t = 3.0;
    const double cap = std::atan(std::exp(-2.0 * t));
    const testsupport::HaltonPairs pairs(std::sqrt(2.0) * std::exp(t));
    long violations = 0;
    double worst = -1.0;
    for (std::uint64_t i = 1; i <= 10000; ++i) {
        Vec2 z, w;
        pairs.get(i, z, w);
        const CircleAverage q = At_hA_point(z, w, 1.0, t, 4096);
        const double margin = pi * q.value - (cap + pi * q.refinement_error);
        if (margin > 0.0) ++violations;
        worst = std::max(worst, margin);
    }
    g.report(7, violations == 0,
             fmt("violations=%ld/10000 cap=%.6f worst_margin=%.3e", violations, cap, worst));
}

// 8. Acting on a certified holonomy list agrees with mapping a larger list
// and re-truncating, for 20 random unimodular matrices with entries in
// [-2, 2].
void criterion_equivariance(Gate& g, SharedState&) {
    std::mt19937_64 rng(20250814ULL);
    std::uniform_real_distribution<double> entry(-2.0, 2.0);
    const HolonomyMultiset base10 = enumerate(make_torus(), 10.0);
    int checked = 0;
    int agreed = 0;
    while (checked < 20) {
        double a = entry(rng), b = entry(rng), c = entry(rng), d = entry(rng);
        double dt = a * d - b * c;
        if (dt < 0.0) {
            std::swap(a, c);
            std::swap(b, d);
            dt = -dt;
        }
        if (dt < 1e-6) continue;
        const double s = std::sqrt(dt);
        a /= s;
        b /= s;
        c /= s;
        d /= s;
        if (std::fabs(a) > 2.0 || std::fabs(b) > 2.0 || std::fabs(c) > 2.0 ||
            std::fabs(d) > 2.0)
            continue;
        Mat2 m;
        try {
            m = make_raw(a, b, c, d);
        } catch (const geometry_error&) {
            continue;
        }
        ++checked;

        const HolonomyMultiset moved = act_on_holonomies(m, base10);
        const double shrink = op_norm(inverse(m));
        const double bound = 10.0 / shrink;
        const double keep2 = bound * bound * (1.0 + 2e-9);
        const HolonomyMultiset big = enumerate(make_torus(), 10.0 * shrink);
        std::vector<Vec2> ref;
        for (const SaddleConnection& e : big.entries) {
            const Vec2 mv = m.apply(e.holonomy);
            if (norm2(mv) <= keep2) ref.push_back(mv);
        }
        const std::vector<Vec2> got = sorted_xy(oracle::holonomies(moved));
        const std::vector<Vec2> want = sorted_xy(std::move(ref));
        bool ok = got.size() == want.size();
        for (std::size_t i = 0; ok && i < got.size(); ++i)
            ok = std::fabs(got[i].x - want[i].x) <= 1e-6 &&
                 std::fabs(got[i].y - want[i].y) <= 1e-6;
        if (ok) ++agreed;
    }
    g.report(8, agreed == 20, fmt("matrices agreeing: %d/20", agreed));
}

// 9. The wedge multiset (all |z ^ w| over ordered pairs) is invariant under
// rotations of the certified list.
void criterion_rotation_invariance(Gate& g, SharedState&) {
    const HolonomyMultiset set = enumerate(make_torus(), 5.0);
    const std::vector<double> base = oracle::wedge_multiset(oracle::holonomies(set));
    std::mt19937_64 rng(19900321ULL);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * pi);
    int agreed = 0;
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        const HolonomyMultiset rot = act_on_holonomies(make_rot(angle(rng)), set);
        if (rot.entries.size() != set.entries.size()) continue;
        const std::vector<double> moved = oracle::wedge_multiset(oracle::holonomies(rot));
        double local = 0.0;
        for (std::size_t i = 0; i < base.size(); ++i)
            local = std::max(local, std::fabs(moved[i] - base[i]));
        worst = std::max(worst, local);
        if (local <= 1e-9) ++agreed;
    }
    g.report(9, agreed == 10, fmt("rotations agreeing: %d/10 worst=%.2e", agreed, worst));
}

// 10. Geodesic-flow distortion is repaired: after flips every flowed catalog
// surface is Delaunay with its area intact, and the flowed torus has the
// expected shortest connection e^{-1}.
void criterion_delaunay(Gate& g, SharedState&) {
    const std::pair<const char*, TranslationSurface> surfaces[] = {
        {"torus", make_torus()},
        {"L-origami", make_l_origami()},
        {"regular-octagon", make_octagon()},
        {"random-origami", make_random_origami(6, 1)},
    };
    bool all = true;
    double worst_inc = -1.0;
    int repaired = 0;
    for (const auto& [name, surf] : surfaces) {
        (void)name;
        for (const double t : {0.5, 1.0, 2.0}) {
            TranslationSurface moved = act_on_surface(make_gt(t), surf);
            const double area0 = total_area(moved);
            delaunayize(moved);
            const double inc = max_incircle(moved);
            const bool ok = validate(moved).ok() && inc <= 1e-9 &&
                            std::fabs(total_area(moved) - area0) <=
                                1e-9 * std::max(1.0, area0);
            worst_inc = std::max(worst_inc, inc);
            all = all && ok;
            if (ok) ++repaired;
        }
    }
    const double sys = systole(act_on_surface(make_gt(1.0), make_torus()));
    const bool sys_ok = std::fabs(sys - std::exp(-1.0)) <= 1e-9;
    g.report(10, all && sys_ok,
             fmt("repaired=%d/12 max_incircle=%.2e systole(g_1 torus)=%.9f", repaired,
                 worst_inc, sys));
}

// 11. Stratum identification of the catalog surfaces.
void criterion_strata(Gate& g, SharedState&) {
    const SurfaceTopology t1 = build_topology(make_torus());
    const SurfaceTopology t2 = build_topology(make_l_origami());
    const SurfaceTopology t3 = build_topology(make_octagon());
    const std::string s1 = stratum_label(t1);
    const std::string s2 = stratum_label(t2);
    const std::string s3 = stratum_label(t3);
    const bool pass = s1 == "H(0)" && t1.genus == 1 && s2 == "H(2)" && t2.genus == 2 &&
                      s3 == "H(2)" && t3.genus == 2;
    g.report(11, pass,
             fmt("torus=%s g=%d  L-origami=%s g=%d  octagon=%s g=%d", s1.c_str(), t1.genus,
                 s2.c_str(), t2.genus, s3.c_str(), t3.genus));
}

}  // namespace

int main() {
    ::unsetenv("FLATCOUNT_THREADS");
    ::unsetenv("FLATCOUNT_TIMING");
    std::printf("flatcount acceptance gate\n");
    Gate g;
    SharedState shared;
    using Criterion = void (*)(Gate&, SharedState&);
    const std::pair<int, Criterion> criteria[] = {
        {1, criterion_growth},        {2, criterion_origami},
        {3, criterion_frozen_counts}, {4, criterion_convergence},
        {5, criterion_siegel},        {6, criterion_decomposition},
        {7, criterion_pointwise_bound}, {8, criterion_equivariance},
        {9, criterion_rotation_invariance}, {10, criterion_delaunay},
        {11, criterion_strata},
    };
    for (const auto& [id, fn] : criteria) {
        try {
            fn(g, shared);
        } catch (const std::exception& e) {
            g.report(id, false, fmt("unhandled exception: %s", e.what()));
        }
    }
    if (g.failures == 0)
        std::printf("acceptance: all 11 criteria passed\n");
    else
        std::printf("acceptance: %d criterion(s) failed\n", g.failures);
    return g.failures == 0 ? 0 : 1;
}
