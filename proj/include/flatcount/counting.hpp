#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "enumerate.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "parallel.hpp"

namespace flatcount {

// Unsigned wedge |x_z y_w - y_z x_w|; SL(2,R)-invariant.
inline double virtual_area(Vec2 z, Vec2 w) { return std::fabs(cross(z, w)); }

// Indicator of the fibered trapezoid: 1/2 <= Im z <= 1, |Re z| <= Im z,
// |Im w| <= Im z, wedge at most A.  All conditions closed.
inline bool eval_hA(Vec2 z, Vec2 w, double A) {
    return z.y >= 0.5 && z.y <= 1.0 && std::fabs(z.x) <= z.y &&
           std::fabs(w.y) <= z.y && virtual_area(z, w) <= A;
}

// Indicator of the pair band: r_lo < |z| < r_hi strictly, |w| <= |z|, wedge
// at most A.  Band arguments are normalized to (lo, hi).  The |w| <= |z|
// comparison is closed so that the band composes exactly with the pair
// counting functions (which include parallel ties such as w = -z).
inline bool in_DA(Vec2 z, Vec2 w, double A, double r_lo, double r_hi) {
    if (r_lo > r_hi) std::swap(r_lo, r_hi);
    const double nz2 = norm2(z);
    if (!(nz2 > r_lo * r_lo && nz2 < r_hi * r_hi)) return false;
    return norm2(w) <= nz2 && virtual_area(z, w) <= A;
}

// Counting workhorse over a canonically sorted holonomy list.  Entries are
// grouped into dyadic norm shells; within a shell they are sorted by direction
// mod pi, so a wedge constraint |z ^ w| <= A cuts the candidate list to a
// narrow angular window around z's direction.  All final decisions are made
// by exact per-candidate tests; the shell/window machinery only has to
// produce a superset of the passing candidates.
class PairCounter {
public:
    explicit PairCounter(const HolonomyMultiset& set) {
        const auto& es = set.entries;
        const std::size_t n = es.size();
        xs_.resize(n);
        ys_.resize(n);
        n2_.resize(n);
        r_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs_[i] = es[i].holonomy.x;
            ys_[i] = es[i].holonomy.y;
            n2_[i] = norm2(es[i].holonomy);
            r_[i] = std::sqrt(n2_[i]);
        }
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (n2_[i] > n2_[i + 1])
                throw geometry_error("holonomy list is not sorted by norm");
        if (n == 0) return;
        k0_ = std::ilogb(r_.front());
        const int k1 = std::ilogb(r_.back());
        shells_.resize(static_cast<std::size_t>(k1 - k0_) + 1);
        for (std::size_t idx = 0; idx < shells_.size(); ++idx)
            shells_[idx].rmin = std::ldexp(1.0, k0_ + static_cast<int>(idx));
        std::size_t b = 0;
        while (b < n) {
            const int k = std::ilogb(r_[b]);
            std::size_t e = b;
            while (e < n && std::ilogb(r_[e]) == k) ++e;
            Shell& sh = shells_[static_cast<std::size_t>(k - k0_)];
            sh.begin = b;
            sh.end = e;
            std::vector<std::pair<double, std::uint32_t>> tmp;
            tmp.reserve(e - b);
            for (std::size_t i = b; i < e; ++i)
                tmp.emplace_back(angle_mod_pi(xs_[i], ys_[i]), static_cast<std::uint32_t>(i));
            std::sort(tmp.begin(), tmp.end());
            sh.alpha.reserve(tmp.size());
            sh.order.reserve(tmp.size());
            for (const auto& [a, i] : tmp) {
                sh.alpha.push_back(a);
                sh.order.push_back(i);
            }
            b = e;
        }
    }

    std::size_t size() const { return xs_.size(); }
    Vec2 holonomy(std::size_t j) const { return {xs_[j], ys_[j]}; }
    double radius2(std::size_t j) const { return n2_[j]; }

    // First index with norm^2 above q (entries are norm-ascending).
    std::size_t upper_index(double q) const {
        return static_cast<std::size_t>(
            std::upper_bound(n2_.begin(), n2_.end(), q) - n2_.begin());
    }
    // First index with norm^2 at least q.
    std::size_t lower_index(double q) const {
        return static_cast<std::size_t>(
            std::lower_bound(n2_.begin(), n2_.end(), q) - n2_.begin());
    }

    // Number of entries w with norm2(w) <= norm2(z_i) and |z_i ^ w| <= A;
    // identical to the brute-force double loop.
    long pairs_anchored_at(std::size_t i, double A) const {
        const double rz = r_[i];
        const double nz2 = n2_[i];
        // Radii small enough that both conditions hold automatically.
        const double cap = std::min(rz * (1.0 - 1e-12), (A / rz) * (1.0 - 1e-9));
        const std::size_t m = prefix_below(cap);
        long cnt = static_cast<long>(m);
        const double azi = angle_mod_pi(xs_[i], ys_[i]);
        const double rz_hi = rz * (1.0 + 1e-12);
        for (const Shell& sh : shells_) {
            if (sh.rmin > rz_hi) break;
            if (sh.alpha.empty() || r_[sh.end - 1] <= cap) continue;
            const double rmin_eff = std::max(sh.rmin, cap);
            const double delta =
                std::asin(std::min(1.0, (A * (1.0 + 1e-9)) / (rz * rmin_eff))) + 1e-9;
            scan_window(sh, azi, delta, [&](std::size_t j) {
                if (j < m) return;
                if (!(n2_[j] <= nz2)) return;
                if (std::fabs(xs_[i] * ys_[j] - ys_[i] * xs_[j]) <= A) ++cnt;
            });
        }
        return cnt;
    }

    // Visits a superset of { j : |z_i ^ w_j| <= A, r_j <= wcap }, each index at
    // most once.  Callers apply their own exact tests.
    template <typename Fn>
    void for_each_wedge_candidate(std::size_t i, double A, double wcap, Fn&& fn) const {
        const double rz = r_[i];
        const double cap = std::min(wcap, (A / rz) * (1.0 - 1e-9));
        const std::size_t m = prefix_below(cap);
        for (std::size_t j = 0; j < m; ++j) fn(j);
        const double azi = angle_mod_pi(xs_[i], ys_[i]);
        for (const Shell& sh : shells_) {
            if (sh.rmin > wcap) break;
            if (sh.alpha.empty() || r_[sh.end - 1] <= cap) continue;
            const double rmin_eff = std::max(sh.rmin, cap);
            const double delta =
                std::asin(std::min(1.0, (A * (1.0 + 1e-9)) / (rz * rmin_eff))) + 1e-9;
            scan_window(sh, azi, delta, [&](std::size_t j) {
                if (j >= m) fn(j);
            });
        }
    }

    static double angle_mod_pi(double x, double y) {
        double a = std::atan2(y, x);
        if (a < 0) a += pi;
        if (a >= pi) a -= pi;
        return a;
    }

private:
    struct Shell {
        std::size_t begin = 0, end = 0;
        double rmin = 0;
        std::vector<double> alpha;
        std::vector<std::uint32_t> order;
    };

    std::size_t prefix_below(double cap) const {
        if (!(cap > 0)) return 0;
        return static_cast<std::size_t>(
            std::upper_bound(r_.begin(), r_.end(), cap) - r_.begin());
    }

    template <typename Fn>
    void scan_segment(const Shell& sh, double lo, double hi, Fn&& fn) const {
        const auto first = std::lower_bound(sh.alpha.begin(), sh.alpha.end(), lo);
        const auto last = std::upper_bound(first, sh.alpha.end(), hi);
        for (auto it = first; it != last; ++it)
            fn(static_cast<std::size_t>(sh.order[static_cast<std::size_t>(it - sh.alpha.begin())]));
    }

    template <typename Fn>
    void scan_window(const Shell& sh, double alpha, double delta, Fn&& fn) const {
        if (2.0 * delta >= pi) {
            for (std::size_t j = sh.begin; j < sh.end; ++j) fn(j);
            return;
        }
        const double lo = alpha - delta, hi = alpha + delta;
        if (lo < 0) {
            scan_segment(sh, 0.0, hi, fn);
            scan_segment(sh, lo + pi, pi, fn);
        } else if (hi >= pi) {
            scan_segment(sh, lo, pi, fn);
            scan_segment(sh, 0.0, hi - pi, fn);
        } else {
            scan_segment(sh, lo, hi, fn);
        }
    }

    std::vector<double> xs_, ys_, n2_, r_;
    std::vector<Shell> shells_;
    int k0_ = 0;
};

namespace detail {

inline void require_radius(const HolonomyMultiset& set, double R, const char* what) {
    if (R > set.bound_L * (1.0 + 1e-9))
        throw certificate_error(std::string(what) +
                                ": requested radius exceeds the certified bound");
}

}  // namespace detail

// Number of entries with norm <= R, multiplicity counted.
inline long count_N(const HolonomyMultiset& set, double R) {
    detail::require_radius(set, R, "count_N");
    const double R2 = R * R;
    const auto& es = set.entries;
    const auto it = std::upper_bound(
        es.begin(), es.end(), R2,
        [](double v, const SaddleConnection& e) { return v < norm2(e.holonomy); });
    return static_cast<long>(it - es.begin());
}

// Ordered pairs (z, w) with |z|, |w| <= R, |w| <= |z| and wedge <= A, for each
// requested radius.  One shared counter build; per-anchor counts are prefix
// summed so every radius is a lookup.
inline std::vector<long> count_pairs_NA_multi(const HolonomyMultiset& set, double A,
                                              const std::vector<double>& radii,
                                              int threads = 1) {
    double rmax = 0;
    for (double R : radii) {
        detail::require_radius(set, R, "count_pairs_NA");
        rmax = std::max(rmax, R);
    }
    PairCounter pc(set);
    const std::size_t n = pc.size() == 0 ? 0 : pc.upper_index(rmax * rmax);
    std::vector<long> per_z(n, 0);
    parallel_chunks(n, threads, [&](int, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) per_z[i] = pc.pairs_anchored_at(i, A);
    });
    std::vector<long> prefix(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + per_z[i];
    std::vector<long> out;
    out.reserve(radii.size());
    for (double R : radii) out.push_back(prefix[std::min(n, pc.upper_index(R * R))]);
    return out;
}

inline long count_pairs_NA(const HolonomyMultiset& set, double A, double R, int threads = 1) {
    return count_pairs_NA_multi(set, A, {R}, threads)[0];
}

// Shell count N*_A(R) = N_A(R) - N_A(R/2).
inline long count_pairs_Nstar(const HolonomyMultiset& set, double A, double R, int threads = 1) {
    const std::vector<long> v = count_pairs_NA_multi(set, A, {R, 0.5 * R}, threads);
    return v[0] - v[1];
}

// Quadrature result for one circle average; counts are kept in integer form so
// downstream identities can be checked exactly.
struct CircleAverage {
    double value = 0;
    double refinement_error = 0;  // |value - value on the halved grid|
    double t = 0;
    int theta_samples = 0;
    long count = 0;       // passing samples, fine grid
    long count_half = 0;  // passing samples, halved grid
};

namespace detail {

inline void require_theta_samples(int m) {
    if (m < 16 || (m & (m - 1)) != 0)
        throw parse_error("theta sample count must be a power of two, at least 16");
}

struct ThetaGrid {
    std::vector<double> ct, st;
    explicit ThetaGrid(int m) : ct(m), st(m) {
        for (int j = 0; j < m; ++j) {
            const double th = (2.0 * pi) * ((static_cast<double>(j) + 0.5) / m);
            ct[j] = std::cos(th);
            st[j] = std::sin(th);
        }
    }
};

// Midpoint grids are shared by every quadrature in the process, so the same M
// always means the same sample angles (and bitwise the same results).
inline const ThetaGrid& theta_grid(int m) {
    static std::mutex mu;
    static std::map<int, ThetaGrid> cache;
    const std::scoped_lock lk(mu);
    auto it = cache.find(m);
    if (it == cache.end()) it = cache.emplace(m, ThetaGrid(m)).first;
    return it->second;
}

// z-side of the trapezoid test after g_t r_theta; yields Im z' on success.
// The wedge condition is theta-independent and handled by the caller.
inline bool hA_z_sample(Vec2 z, double ct, double st, double et, double emt, double& im_out) {
    const double ry = st * z.x + ct * z.y;
    const double im = emt * ry;
    if (!(im >= 0.5 && im <= 1.0)) return false;
    const double rx = ct * z.x - st * z.y;
    if (!(std::fabs(et * rx) <= im)) return false;
    im_out = im;
    return true;
}

inline bool hA_w_sample(Vec2 w, double ct, double st, double emt, double im_z) {
    return std::fabs(emt * (st * w.x + ct * w.y)) <= im_z;
}

}  // namespace detail

// Midpoint-rule circle average of the trapezoid indicator along g_t r_theta
// applied to one pair, with the refinement error taken against the halved
// grid.  The short-circuits return 0 exactly in cases where no sample can
// pass, so they never disagree with the full quadrature.
inline CircleAverage At_hA_point(Vec2 z, Vec2 w, double A, double t, int theta_samples = 4096) {
    detail::require_theta_samples(theta_samples);
    const int M = theta_samples;
    CircleAverage out;
    out.t = t;
    out.theta_samples = M;
    const double et = std::exp(t), emt = std::exp(-t);
    if (virtual_area(z, w) > A) return out;
    const double nz = norm(z);
    // Largest possible Im z' is e^-t |z|; the passing region also forces
    // |z'| <= sqrt(2), hence e^-t |z| <= sqrt(2).
    if (emt * nz < 0.5 * (1.0 - 1e-12)) return out;
    if (emt * nz > std::sqrt(2.0) * (1.0 + 1e-12)) return out;
    const auto& g = detail::theta_grid(M);
    const auto& h = detail::theta_grid(M / 2);
    long c1 = 0, c2 = 0;
    double im = 0;
    for (int j = 0; j < M; ++j)
        if (detail::hA_z_sample(z, g.ct[j], g.st[j], et, emt, im) &&
            detail::hA_w_sample(w, g.ct[j], g.st[j], emt, im))
            ++c1;
    for (int j = 0; j < M / 2; ++j)
        if (detail::hA_z_sample(z, h.ct[j], h.st[j], et, emt, im) &&
            detail::hA_w_sample(w, h.ct[j], h.st[j], emt, im))
            ++c2;
    out.count = c1;
    out.count_half = c2;
    out.value = static_cast<double>(c1) / M;
    out.refinement_error =
        std::fabs(static_cast<double>(c1) / M - static_cast<double>(c2) / (M / 2));
    return out;
}

enum class LocusTag { main_term, e1, e2, e3, e4, none };

inline const char* to_string(LocusTag tag) {
    switch (tag) {
        case LocusTag::main_term: return "m_t";
        case LocusTag::e1: return "e1";
        case LocusTag::e2: return "e2";
        case LocusTag::e3: return "e3";
        case LocusTag::e4: return "e4";
        default: return "none";
    }
}

namespace detail {

// Shared thresholds for the pair loci at scale t.  s splits the band at
// sqrt(cosh(2t)/2); c2 is the squared slope separating the main part from e2.
struct LocusFrame {
    double A, t, et, half_et, s, c2;
    LocusFrame(double A_, double t_)
        : A(A_),
          t(t_),
          et(std::exp(t_)),
          half_et(0.5 * std::exp(t_)),
          s(std::sqrt(0.5 * std::cosh(2.0 * t_))),
          c2(1.0 / (1.0 + std::exp(-4.0 * t_))) {}
};

inline LocusTag locus_tag(const LocusFrame& f, Vec2 z, Vec2 w, bool at_positive) {
    if (in_DA(z, w, f.A, f.s, f.et))
        return norm2(w) < f.c2 * norm2(z) ? LocusTag::main_term : LocusTag::e2;
    if (in_DA(z, w, f.A, f.half_et, f.s)) return LocusTag::e1;
    if (at_positive) {
        const double nz2 = norm2(z);
        if (nz2 > f.et * f.et) return LocusTag::e3;
        if (nz2 > f.half_et * f.half_et && nz2 < f.et * f.et && norm2(w) > nz2)
            return LocusTag::e4;
    }
    return LocusTag::none;
}

}  // namespace detail

// Which decomposition locus the pair belongs to at scale t.  Positivity of the
// circle average is decided from the quadrature with its refinement error
// subtracted, so quadrature noise cannot promote a pair into e3/e4.
inline LocusTag locus_membership(Vec2 z, Vec2 w, double A, double t, int theta_samples = 4096) {
    const CircleAverage q = At_hA_point(z, w, A, t, theta_samples);
    return detail::locus_tag(detail::LocusFrame(A, t), z, w,
                             q.value - q.refinement_error > 0.0);
}

// Built-in two-variable region indicators for the Siegel-Veech transform.
struct PairRegion {
    enum class Kind { trapezoid, band, ball_product, ball };
    Kind kind = Kind::trapezoid;
    double A = 1.0;
    double r_lo = 0.0, r_hi = 0.0;

    static PairRegion trapezoid_hA(double A) {
        PairRegion f;
        f.kind = Kind::trapezoid;
        f.A = A;
        return f;
    }
    static PairRegion band_DA(double A, double lo, double hi) {
        PairRegion f;
        f.kind = Kind::band;
        f.A = A;
        f.r_lo = lo;
        f.r_hi = hi;
        return f;
    }
    static PairRegion ball_product(double R1, double R2) {
        PairRegion f;
        f.kind = Kind::ball_product;
        f.r_lo = R1;
        f.r_hi = R2;
        return f;
    }
    static PairRegion ball(double R) {
        PairRegion f;
        f.kind = Kind::ball;
        f.r_lo = R;
        return f;
    }

    bool two_variable() const { return kind != Kind::ball; }

    // Radius out to which the data must be certified complete for the sum to
    // be exact.  The trapezoid bounds its first slot by |z| <= sqrt(2); the
    // band bounds it by r_hi and its second slot by |w| <= |z|.
    double support_radius() const {
        switch (kind) {
            case Kind::trapezoid: return std::sqrt(2.0);
            case Kind::band: return std::max(r_lo, r_hi);
            case Kind::ball_product: return std::max(r_lo, r_hi);
            case Kind::ball: return r_lo;
        }
        return 0.0;
    }

    bool contains(Vec2 z, Vec2 w) const {
        switch (kind) {
            case Kind::trapezoid: return eval_hA(z, w, A);
            case Kind::band: return in_DA(z, w, A, r_lo, r_hi);
            case Kind::ball_product:
                return norm2(z) <= r_lo * r_lo && norm2(w) <= r_hi * r_hi;
            case Kind::ball: return norm2(z) <= r_lo * r_lo;
        }
        return false;
    }
};

// Definitional Siegel-Veech transform: f summed over all ordered pairs of
// entries (over single entries in the one-variable case), multiplicity
// respected.  Quadratic in the list size; intended for small certified sets
// and as the oracle for the windowed kernels.
inline double sv_transform_pairs(const HolonomyMultiset& set, const PairRegion& f) {
    if (f.support_radius() > set.bound_L * (1.0 + 1e-9))
        throw certificate_error(
            "sv_transform_pairs: region support exceeds the certified radius");
    const auto& es = set.entries;
    long total = 0;
    if (!f.two_variable()) {
        for (const auto& e : es)
            if (f.contains(e.holonomy, {0.0, 0.0})) ++total;
        return static_cast<double>(total);
    }
    for (const auto& ez : es)
        for (const auto& ew : es)
            if (f.contains(ez.holonomy, ew.holonomy)) ++total;
    return static_cast<double>(total);
}

namespace detail {

// Shared per-anchor state for the quadrature kernels: which theta samples the
// z-side of the trapezoid passes, on the fine and halved grids.
struct PassingThetas {
    std::vector<int> idx;
    std::vector<double> im;

    void build(Vec2 z, const ThetaGrid& g, int m, double et, double emt) {
        idx.clear();
        im.clear();
        double v = 0;
        for (int j = 0; j < m; ++j)
            if (hA_z_sample(z, g.ct[j], g.st[j], et, emt, v)) {
                idx.push_back(j);
                im.push_back(v);
            }
    }
};

// Anchor norms outside this window cannot pass the z-side test at any theta;
// w candidates beyond wcap cannot pass the w-side tests while the wedge
// constraint holds.  Both windows carry slack so they strictly contain the
// support of the computed predicates.
struct SvWindow {
    double zlo2, zhi2, wcap;
    SvWindow(double A, double et) {
        const double zlo = 0.5 * et * (1.0 - 1e-9);
        const double zhi = std::sqrt(2.0) * et * (1.0 + 1e-9);
        zlo2 = zlo * zlo;
        zhi2 = zhi * zhi;
        wcap = et * std::sqrt(1.0 + (2.0 * A + 1.0) * (2.0 * A + 1.0)) * (1.0 + 1e-9);
    }
};

}  // namespace detail

// Circle average of the pair Siegel-Veech transform of the trapezoid
// indicator: the average over theta of the number of ordered pairs (z, w)
// with g_t r_theta (z, w) inside the trapezoid.  Evaluates the same per-pair
// sample tests as At_hA_point on the same grids, so the result equals the sum
// of At_hA_point over all ordered pairs exactly.
inline CircleAverage circle_average_sv(const HolonomyMultiset& set, double A, double t,
                                       int theta_samples = 4096, int threads = 1) {
    detail::require_theta_samples(theta_samples);
    const int M = theta_samples;
    const double et = std::exp(t), emt = std::exp(-t);
    if (std::sqrt(2.0) * et > set.bound_L * (1.0 + 1e-9))
        throw certificate_error(
            "circle_average_sv: needs data certified out to sqrt(2)*e^t");
    const auto& g = detail::theta_grid(M);
    const auto& h = detail::theta_grid(M / 2);
    const detail::SvWindow win(A, et);
    PairCounter pc(set);
    const std::size_t ib = pc.lower_index(win.zlo2);
    const std::size_t ie = pc.upper_index(win.zhi2);
    const std::size_t nz = ie > ib ? ie - ib : 0;
    const int slots = resolve_threads(threads);
    std::vector<long> c1(slots, 0), c2(slots, 0);
    parallel_chunks(nz, threads, [&](int chunk, std::size_t b, std::size_t e) {
        detail::PassingThetas fine, half;
        long s1 = 0, s2 = 0;
        for (std::size_t k = b; k < e; ++k) {
            const std::size_t i = ib + k;
            const Vec2 z = pc.holonomy(i);
            fine.build(z, g, M, et, emt);
            half.build(z, h, M / 2, et, emt);
            if (fine.idx.empty() && half.idx.empty()) continue;
            pc.for_each_wedge_candidate(i, A, win.wcap, [&](std::size_t j) {
                const Vec2 w = pc.holonomy(j);
                if (virtual_area(z, w) > A) return;
                for (std::size_t q = 0; q < fine.idx.size(); ++q)
                    if (detail::hA_w_sample(w, g.ct[fine.idx[q]], g.st[fine.idx[q]], emt,
                                            fine.im[q]))
                        ++s1;
                for (std::size_t q = 0; q < half.idx.size(); ++q)
                    if (detail::hA_w_sample(w, h.ct[half.idx[q]], h.st[half.idx[q]], emt,
                                            half.im[q]))
                        ++s2;
            });
        }
        c1[chunk] = s1;
        c2[chunk] = s2;
    });
    long C1 = 0, C2 = 0;
    for (int k = 0; k < slots; ++k) {
        C1 += c1[k];
        C2 += c2[k];
    }
    CircleAverage out;
    out.t = t;
    out.theta_samples = M;
    out.count = C1;
    out.count_half = C2;
    out.value = static_cast<double>(C1) / M;
    out.refinement_error =
        std::fabs(static_cast<double>(C1) / M - static_cast<double>(C2) / (M / 2));
    return out;
}

// One decomposition run: per ordered pair, d(z, w) = chi_band - pi e^{2t} x
// (per-pair circle average), accumulated into the bucket named by the pair's
// locus.  Counts are kept in integer/dyadic form so the residual against
// N*_A - pi e^{2t} (circle average) is exact up to the untagged quadrature
// mass, which the refinement budget bounds.
struct DecompositionTerms {
    double A = 0, t = 0;
    int theta_samples = 0;
    double m_t = 0, e1 = 0, e2 = 0, e3 = 0, e4 = 0;
    double lhs = 0;
    double residual = 0;
    long nstar = 0;
    long pairs_evaluated = 0;
    long coverage_violations = 0;
    double refinement_total = 0;  // summed per-pair refinement errors
    CircleAverage circle_average;
};

inline DecompositionTerms decomposition_terms(const HolonomyMultiset& set, double A, double t,
                                              int theta_samples = 4096, int threads = 1) {
    detail::require_theta_samples(theta_samples);
    const int M = theta_samples;
    const double et = std::exp(t), emt = std::exp(-t);
    if (std::sqrt(2.0) * et > set.bound_L * (1.0 + 1e-9))
        throw certificate_error(
            "decomposition_terms: needs data certified out to sqrt(2)*e^t");
    const auto& g = detail::theta_grid(M);
    const auto& h = detail::theta_grid(M / 2);
    const detail::SvWindow win(A, et);
    const detail::LocusFrame frame(A, t);
    PairCounter pc(set);
    const std::size_t ib = pc.lower_index(win.zlo2);
    const std::size_t ie = pc.upper_index(win.zhi2);
    const std::size_t nz = ie > ib ? ie - ib : 0;

    struct Acc {
        long c1 = 0, c2 = 0;
        long nstar = 0;
        long chi[5] = {0, 0, 0, 0, 0};
        long smp[5] = {0, 0, 0, 0, 0};
        long violations = 0;
        long pairs = 0;
        double ref_sum = 0;
    };
    const int slots = resolve_threads(threads);
    std::vector<Acc> accs(slots);

    parallel_chunks(nz, threads, [&](int chunk, std::size_t b, std::size_t e) {
        Acc a;
        detail::PassingThetas fine, half;
        for (std::size_t k = b; k < e; ++k) {
            const std::size_t i = ib + k;
            const Vec2 z = pc.holonomy(i);
            const double nz2 = pc.radius2(i);
            const bool in_shell =
                nz2 > frame.half_et * frame.half_et && nz2 <= frame.et * frame.et;
            if (in_shell) a.nstar += pc.pairs_anchored_at(i, A);
            fine.build(z, g, M, et, emt);
            half.build(z, h, M / 2, et, emt);
            if (fine.idx.empty() && half.idx.empty() && !in_shell) continue;
            pc.for_each_wedge_candidate(i, A, win.wcap, [&](std::size_t j) {
                const Vec2 w = pc.holonomy(j);
                if (virtual_area(z, w) > A) return;
                long cnt = 0, cnt2 = 0;
                for (std::size_t q = 0; q < fine.idx.size(); ++q)
                    if (detail::hA_w_sample(w, g.ct[fine.idx[q]], g.st[fine.idx[q]], emt,
                                            fine.im[q]))
                        ++cnt;
                for (std::size_t q = 0; q < half.idx.size(); ++q)
                    if (detail::hA_w_sample(w, h.ct[half.idx[q]], h.st[half.idx[q]], emt,
                                            half.im[q]))
                        ++cnt2;
                a.c1 += cnt;
                a.c2 += cnt2;
                const bool chi = in_DA(z, w, A, frame.half_et, frame.et);
                if (cnt == 0 && cnt2 == 0 && !chi) return;
                ++a.pairs;
                const double value = static_cast<double>(cnt) / M;
                const double ref = std::fabs(static_cast<double>(cnt) / M -
                                             static_cast<double>(cnt2) / (M / 2));
                a.ref_sum += ref;
                const bool positive = value - ref > 0.0;
                const LocusTag tag = detail::locus_tag(frame, z, w, positive);
                if (tag == LocusTag::none) {
                    if (chi || positive) ++a.violations;
                } else {
                    a.chi[static_cast<int>(tag)] += chi ? 1 : 0;
                    a.smp[static_cast<int>(tag)] += cnt;
                }
            });
        }
        accs[chunk] = a;
    });

    Acc total;
    for (int k = 0; k < slots; ++k) {
        const Acc& a = accs[k];
        total.c1 += a.c1;
        total.c2 += a.c2;
        total.nstar += a.nstar;
        for (int q = 0; q < 5; ++q) {
            total.chi[q] += a.chi[q];
            total.smp[q] += a.smp[q];
        }
        total.violations += a.violations;
        total.pairs += a.pairs;
        total.ref_sum += a.ref_sum;
    }

    DecompositionTerms out;
    out.A = A;
    out.t = t;
    out.theta_samples = M;
    out.nstar = total.nstar;
    out.pairs_evaluated = total.pairs;
    out.coverage_violations = total.violations;
    out.refinement_total = total.ref_sum;
    out.circle_average.t = t;
    out.circle_average.theta_samples = M;
    out.circle_average.count = total.c1;
    out.circle_average.count_half = total.c2;
    out.circle_average.value = static_cast<double>(total.c1) / M;
    out.circle_average.refinement_error =
        std::fabs(static_cast<double>(total.c1) / M -
                  static_cast<double>(total.c2) / (M / 2));
    const double scale = pi * et * et;
    const double bucket[5] = {
        static_cast<double>(total.chi[0]) - scale * (static_cast<double>(total.smp[0]) / M),
        static_cast<double>(total.chi[1]) - scale * (static_cast<double>(total.smp[1]) / M),
        static_cast<double>(total.chi[2]) - scale * (static_cast<double>(total.smp[2]) / M),
        static_cast<double>(total.chi[3]) - scale * (static_cast<double>(total.smp[3]) / M),
        static_cast<double>(total.chi[4]) - scale * (static_cast<double>(total.smp[4]) / M)};
    out.m_t = bucket[0];
    out.e1 = bucket[1];
    out.e2 = bucket[2];
    out.e3 = bucket[3];
    out.e4 = bucket[4];
    out.lhs = static_cast<double>(total.nstar) - scale * out.circle_average.value;
    long chi_tagged = 0, smp_tagged = 0;
    for (int q = 0; q < 5; ++q) {
        chi_tagged += total.chi[q];
        smp_tagged += total.smp[q];
    }
    out.residual = static_cast<double>(total.nstar - chi_tagged) -
                   scale * (static_cast<double>(total.c1 - smp_tagged) / M);
    return out;
}

// True when the pair sits near one of the degeneracy walls: matched |Im|
// ratio, wedge near A, Im z near the window height, or |Re z| near Im z.
inline bool near_degenerate_pair(Vec2 z, Vec2 w, double A, double L, double L_prime,
                                 double eps) {
    if (norm(z) > L || norm(w) > L) return false;
    if (z.y != 0.0) {
        const double ratio = std::fabs(w.y) / std::fabs(z.y);
        if (ratio >= 1.0 - eps && ratio <= 1.0 + eps) return true;
    }
    const double va = virtual_area(z, w);
    if (va >= (1.0 - eps) * A && va <= (1.0 + eps) * A) return true;
    if (std::fabs(z.y - L_prime) < eps) return true;
    const double rx = std::fabs(z.x);
    if (rx >= (1.0 - eps) * z.y && rx <= (1.0 + eps) * z.y) return true;
    return false;
}

}  // namespace flatcount
