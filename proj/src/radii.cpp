#include "padic/radii.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace padic {

namespace {

Rat vp_factorial(unsigned long s, unsigned p) {
    // v_p(s!) = sum_{i>=1} floor(s/p^i)
    unsigned long acc = 0, q = s;
    while (q) {
        q /= p;
        acc += q;
    }
    return Rat((long)acc);
}

Rat floor_val(unsigned p, const LogRadius& r) {
    // -log_p of the spectral norm of d/dt on analytic elements: 1/(p-1) - r.
    Rat f(1, (long)p - 1);
    f.canonicalize();
    return f - r;
}

mpz_class factorial(unsigned n) {
    mpz_class f = 1;
    for (unsigned i = 2; i <= n; ++i) f *= i;
    return f;
}

bool quantized(const Rat& slope, unsigned n) {
    Rat q = slope * Rat(factorial(n));
    q.canonicalize();
    return q.get_den() == 1;
}

// One radius slot: exact when lo == hi.
struct Slot {
    Rat lo, hi;
    bool exact() const { return lo == hi; }
};

// Newton-polygon root valuations of the twisted polynomial attached to a
// cyclic vector of M at radius r, turned into radius slots at this level.
// Visible roots (valuation < -r, i.e. norm above the operator norm of d/dt)
// give exact f = (1/(p-1) - r) - lambda; the rest are bracketed by the
// visibility threshold 1/(p-1).
std::vector<Slot> np_slots(const DiffModule& M, const LogRadius& r) {
    const unsigned n = M.rank();
    const unsigned p = M.prime();
    CyclicData cd = cyclic_data(M, r);
    Radii at = M.radii_at(r);
    Val vW = cd.wronskian.gauss_valuation(at);
    if (vW.is_inf()) throw certification_error("cyclic vector with zero Wronskian");
    // Polygon points (i, v(a_i)), i = 0..n, a_n = 1.
    std::vector<std::pair<unsigned, Rat>> pts;
    for (unsigned i = 0; i < n; ++i) {
        Val vi = cd.cramer_num[i].gauss_valuation(at);
        if (!vi.is_inf()) pts.emplace_back(i, vi.finite() - vW.finite());
    }
    pts.emplace_back(n, Rat(0));
    // Lower convex hull, left to right.
    std::vector<std::pair<unsigned, Rat>> hull;
    for (const auto& pt : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull[hull.size() - 1];
            // keep if slope(a,b) < slope(b,pt)
            Rat lhs = (b.second - a.second) * Rat((long)pt.first - (long)b.first);
            Rat rhs = (pt.second - b.second) * Rat((long)b.first - (long)a.first);
            if (lhs < rhs) break;
            hull.pop_back();
        }
        hull.push_back(pt);
    }
    std::vector<Slot> slots;
    const Rat fl = floor_val(p, r);
    const Rat inv_cap = Rat(1, (long)p - 1);
    // Slots for indices left of the first finite point carry infinite root
    // valuation (zero low coefficients): invisible.
    for (unsigned i = 0; i < hull.front().first; ++i) slots.push_back({Rat(0), inv_cap});
    for (size_t s = 0; s + 1 < hull.size(); ++s) {
        unsigned len = hull[s + 1].first - hull[s].first;
        Rat slope = (hull[s + 1].second - hull[s].second) / Rat((long)len);
        slope.canonicalize();
        Rat lambda = -slope;
        if (lambda < -r) {
            Rat f = fl - lambda;
            for (unsigned c = 0; c < len; ++c) slots.push_back({f, f});
        } else {
            for (unsigned c = 0; c < len; ++c) slots.push_back({Rat(0), inv_cap});
        }
    }
    if (slots.size() != n) throw std::logic_error("newton polygon slot count mismatch");
    return slots;
}

// Undo one Frobenius pushforward step on a slot multiset (level k -> k-1).
std::vector<Slot> undo_pushforward(const std::vector<Slot>& slots, unsigned p) {
    const Rat junk(Rat((long)p) / Rat((long)p - 1));
    const Rat cap(1, (long)p - 1);
    std::map<Rat, unsigned> exact_big;  // values > junk
    unsigned junk_count = 0;
    std::vector<Slot> type1;
    for (const auto& s : slots) {
        if (s.exact()) {
            if (s.lo > junk)
                ++exact_big[s.lo];
            else if (s.lo == junk)
                ++junk_count;
            else
                type1.push_back(s);
        } else {
            if (!(s.hi <= cap)) throw std::logic_error("interval slot above threshold");
            type1.push_back(s);
        }
    }
    std::vector<Slot> out;
    for (const auto& [v, c] : exact_big) {
        if (c % p != 0)
            throw certification_error("pushforward dictionary: big-radius multiplicity not divisible by p");
        Rat f = v - 1;
        for (unsigned i = 0; i < c / p; ++i) out.push_back({f, f});
    }
    for (const auto& s : type1) {
        Rat lo = s.lo / Rat((long)p), hi = s.hi / Rat((long)p);
        lo.canonicalize();
        hi.canonicalize();
        out.push_back({lo, hi});
    }
    long need_junk = (long)(p - 1) * (long)type1.size();
    long rem = (long)junk_count - need_junk;
    if (rem < 0 || rem % (long)p != 0)
        throw certification_error("pushforward dictionary: junk bookkeeping mismatch");
    Rat f = cap;
    for (long i = 0; i < rem / (long)p; ++i) out.push_back({f, f});
    return out;
}

std::vector<RadiusBound> slots_to_bounds(std::vector<Slot> slots, unsigned pushes) {
    std::sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) {
        if (a.hi != b.hi) return a.hi > b.hi;
        return a.lo > b.lo;
    });
    std::vector<RadiusBound> out;
    for (size_t i = 0; i < slots.size(); ++i) {
        RadiusBound rb;
        rb.level = static_cast<unsigned>(i + 1);
        rb.lower = slots[i].lo;
        rb.upper = slots[i].hi;
        rb.cert = slots[i].exact() ? RadiusBound::Cert::newton_exact
                                   : RadiusBound::Cert::spectral_truncated;
        rb.budget = pushes;
        out.push_back(std::move(rb));
    }
    return out;
}

}  // namespace

bool derivation_terminates(const DiffModule& M, unsigned cap) {
    DiffModule Md = M.converted(Convention::ddt);
    const LMat& N = Md.matrix();
    LMat cur = N;
    for (unsigned s = 1; s <= cap; ++s) {
        if (s > 1) cur = N * cur + cur.derived(Convention::ddt);
        if (cur.is_zero()) return true;
    }
    return false;
}

SpectralBound spectral_radius_bounds(const DiffModule& M, const LogRadius& r, unsigned S) {
    if (S < 2) throw input_error("spectral cap S must be >= 2");
    if (!M.annulus().contains(r))
        throw input_error("radius outside annulus");
    const unsigned p = M.prime();
    DiffModule Md = M.converted(Convention::ddt);
    const Rat fl = floor_val(p, r);
    Radii at = Md.radii_at(r);

    std::vector<Val> V(S + 1, Val(Rat(0)));  // V[b] = v_r(N_b), V[0] = 0
    bool terminated = false;
    {
        const LMat& N = Md.matrix();
        LMat cur = N;
        for (unsigned s = 1; s <= S; ++s) {
            if (s > 1) cur = N * cur + cur.derived(Convention::ddt);
            if (cur.is_zero()) {
                for (unsigned b = s; b <= S; ++b) V[b] = Val::infinity();
                terminated = true;
                break;
            }
            V[s] = cur.min_valuation(at);
        }
    }

    SpectralBound out;
    out.used_S = S;
    out.bound.level = 1;
    out.bound.budget = S;
    out.bound.cert = RadiusBound::Cert::spectral_truncated;

    if (terminated) {
        out.bound.lower = out.bound.upper = Rat(0);
        out.bound.cert = RadiusBound::Cert::newton_exact;
        out.estimate = Rat(0);
        return out;
    }

    // Fekete: v_sp >= Omega_s / s for every s, where Omega_s bounds the
    // operator valuation of D^s from below.
    std::optional<Rat> best;
    for (unsigned s = 1; s <= S; ++s) {
        Val omega = Val::infinity();
        for (unsigned a = 0; a <= s; ++a) {
            unsigned b = s - a;
            Val term = V[b] + Val(vp_factorial(a, p) - Rat((long)a) * r);
            omega = min(omega, term);
        }
        if (omega.is_inf()) continue;
        Rat q = omega.finite() / Rat((long)s);
        q.canonicalize();
        if (!best || q > *best) best = q;
    }
    Rat up = fl - *best;
    if (up < 0) up = 0;
    out.bound.upper = up;
    out.bound.lower = Rat(0);

    // Rank-1 dominant-monomial certificate: if v(N_1) < -r strictly then the
    // recursion v(N_{s+1}) = v(N_1) + v(N_s) holds exactly (Gauss norms of
    // elements are multiplicative), so f = floor - v(N_1) exactly.
    if (M.rank() == 1 && !V[1].is_inf() && V[1] < Val(-r)) {
        Rat f = fl - V[1].finite();
        out.bound.lower = out.bound.upper = f;
        out.bound.cert = RadiusBound::Cert::newton_exact;
        out.estimate = f;
        return out;
    }

    // p^k-subsequence estimate (diagnostic, clamped into the bracket).
    unsigned long pk = 1;
    while (pk * p <= S) pk *= p;
    Rat est = up;
    if (!V[pk].is_inf()) {
        est = fl - V[pk].finite() / Rat((long)pk);
        est.canonicalize();
    } else
        est = Rat(0);
    if (est < out.bound.lower) est = out.bound.lower;
    if (est > out.bound.upper) est = out.bound.upper;
    out.estimate = est;
    return out;
}

std::vector<RadiusBound> newton_radii(const DiffModule& M, const LogRadius& r,
                                      unsigned max_pushforwards, unsigned rank_cap) {
    if (!M.annulus().contains(r)) throw input_error("radius outside annulus");
    const unsigned p = M.prime();
    DiffModule cur = M.converted(Convention::ddt);
    if (derivation_terminates(cur, M.rank() + 4)) {
        std::vector<Slot> zero(M.rank(), Slot{Rat(0), Rat(0)});
        return slots_to_bounds(zero, 0);
    }
    // Basis-invariant exact-zero certificate: a full polynomial horizontal
    // basis pins every radius at 0 even for gauges where the derivation
    // powers never terminate.
    if (M.rank() <= 6 && M.matrix().nparams() == 0) {
        int span = 4;
        for (unsigned i = 0; i < M.rank(); ++i)
            for (unsigned j = 0; j < M.rank(); ++j) {
                auto w = cur.matrix().at(i, j).window(0);
                span = std::max({span, std::abs(w.first), std::abs(w.second)});
            }
        if (has_polynomial_horizontal_basis(cur, 2 * span + 8)) {
            std::vector<Slot> zero(M.rank(), Slot{Rat(0), Rat(0)});
            return slots_to_bounds(zero, 0);
        }
    }
    LogRadius rk = r;
    unsigned k = 0;
    std::vector<Slot> slots;
    for (;;) {
        slots = np_slots(cur, rk);
        bool all_exact = std::all_of(slots.begin(), slots.end(),
                                     [](const Slot& s) { return s.exact(); });
        if (all_exact || k == max_pushforwards || cur.rank() * p > rank_cap) break;
        cur = frobenius_pushforward(cur);
        rk = rk * Rat((long)p);
        ++k;
    }
    for (unsigned i = 0; i < k; ++i) slots = undo_pushforward(slots, p);
    if (slots.size() != M.rank()) throw std::logic_error("radius slot count mismatch");
    return slots_to_bounds(slots, k);
}

PartialSum partial_sum(const std::vector<RadiusBound>& radii, unsigned level) {
    if (level < 1 || level > radii.size()) throw input_error("partial_sum level out of range");
    PartialSum ps{Rat(0), Rat(0), true};
    for (unsigned i = 0; i < level; ++i) {
        ps.lo += radii[i].lower;
        ps.hi += radii[i].upper;
        ps.exact &= radii[i].exact();
    }
    ps.lo.canonicalize();
    ps.hi.canonicalize();
    return ps;
}

RadiusProfile radius_profile(const DiffModule& M, unsigned level, std::vector<LogRadius> grid,
                             unsigned max_pushforwards) {
    if (grid.size() < 3) throw input_error("profile grid needs at least 3 points");
    if (level < 1 || level > M.rank()) throw input_error("profile level out of range");
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    RadiusProfile prof;
    prof.level = level;
    prof.grid = grid;
    prof.samples.resize(grid.size());
    // Grid points are independent; computed in parallel, assembled by index.
    const long n = static_cast<long>(grid.size());
    std::vector<std::string> errors(grid.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(configured_threads())
#endif
    for (long j = 0; j < n; ++j) {
        try {
            auto radii = newton_radii(M, grid[size_t(j)], max_pushforwards);
            prof.samples[size_t(j)] = partial_sum(radii, level);
        } catch (const std::exception& e) {
            errors[size_t(j)] = e.what();
        }
    }
    for (size_t j = 0; j < grid.size(); ++j)
        if (!errors[j].empty())
            throw certification_error("profile point r=" + rat_str(grid[j]) + ": " + errors[j]);

    // Convexity and quantization checks on exact samples.
    std::vector<std::pair<Rat, Rat>> exact_pts;
    for (size_t j = 0; j < grid.size(); ++j)
        if (prof.samples[j].exact) exact_pts.emplace_back(grid[j], prof.samples[j].lo);
    if (exact_pts.size() >= 2) {
        std::vector<Rat> slopes;
        for (size_t j = 0; j + 1 < exact_pts.size(); ++j) {
            Rat s = (exact_pts[j + 1].second - exact_pts[j].second) /
                    (exact_pts[j + 1].first - exact_pts[j].first);
            s.canonicalize();
            if (!quantized(s, M.rank())) {
                std::ostringstream os;
                os << "slope " << rat_str(s) << " on [" << rat_str(exact_pts[j].first) << ","
                   << rat_str(exact_pts[j + 1].first) << "] is not in (1/" << M.rank()
                   << "!)Z";
                throw certification_error(os.str());
            }
            if (!slopes.empty() && s < slopes.back())
                throw certification_error("sampled values violate convexity at r=" +
                                          rat_str(exact_pts[j].first));
            slopes.push_back(s);
        }
        // Segment assembly: merge equal consecutive slopes.
        prof.breakpoints.push_back(exact_pts.front().first);
        prof.values.push_back(exact_pts.front().second);
        for (size_t j = 0; j < slopes.size(); ++j) {
            bool last = j + 1 == slopes.size();
            if (last || slopes[j + 1] != slopes[j]) {
                prof.slopes.push_back(slopes[j]);
                prof.breakpoints.push_back(exact_pts[j + 1].first);
                prof.values.push_back(exact_pts[j + 1].second);
            }
        }
    }
    // Inexact samples must be consistent with the envelope within their gaps:
    // they already carry their own honest brackets, nothing to tighten here.
    return prof;
}

BreakData break_slopes(const DiffModule& M, std::vector<LogRadius> grid,
                       unsigned max_pushforwards) {
    if (grid.size() < 2) throw input_error("break grid needs at least 2 points");
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    const unsigned n = M.rank();

    BreakData bd;
    bd.grid = grid;
    bd.F.assign(n, std::vector<PartialSum>(grid.size()));
    const long npts = static_cast<long>(grid.size());
    std::vector<std::string> errors(grid.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(configured_threads())
#endif
    for (long j = 0; j < npts; ++j) {
        try {
            auto radii = newton_radii(M, grid[size_t(j)], max_pushforwards);
            for (unsigned i = 1; i <= n; ++i) bd.F[i - 1][size_t(j)] = partial_sum(radii, i);
        } catch (const std::exception& e) {
            errors[size_t(j)] = e.what();
        }
    }
    for (size_t j = 0; j < grid.size(); ++j)
        if (!errors[j].empty())
            throw certification_error("break point r=" + rat_str(grid[j]) + ": " + errors[j]);

    const Rat r1 = grid[0];
    mpz_class nf = factorial(n);
    std::vector<Rat> slopes(n);
    for (unsigned i = 1; i <= n; ++i) {
        const PartialSum& a = bd.F[i - 1][0];
        // Pin the slope against the nearest second point whose bound gap
        // leaves a unique candidate in (1/n!)Z. Exact pairs pin immediately;
        // bracketed levels may need a wider-spaced partner (the caller's grid
        // declares the final germ segment either way).
        bool pinned = false;
        for (size_t j = 1; j < grid.size() && !pinned; ++j) {
            const PartialSum& b = bd.F[i - 1][j];
            const Rat dr = grid[j] - r1;
            if (a.exact && b.exact) {
                Rat s = (b.lo - a.lo) / dr;
                s.canonicalize();
                if (!quantized(s, n))
                    throw certification_error(
                        "final-segment slope not quantized in (1/n!)Z at level " +
                        std::to_string(i));
                slopes[i - 1] = s;
                pinned = true;
                break;
            }
            Rat lo_s = (b.lo - a.hi) / dr, hi_s = (b.hi - a.lo) / dr;
            lo_s.canonicalize();
            hi_s.canonicalize();
            mpz_class klo, khi;
            mpz_cdiv_q(klo.get_mpz_t(), mpz_class(lo_s.get_num() * nf).get_mpz_t(),
                       lo_s.get_den().get_mpz_t());
            mpz_fdiv_q(khi.get_mpz_t(), mpz_class(hi_s.get_num() * nf).get_mpz_t(),
                       hi_s.get_den().get_mpz_t());
            if (klo == khi) {
                Rat s(klo, nf);
                s.canonicalize();
                slopes[i - 1] = s;
                pinned = true;
            }
        }
        if (!pinned)
            throw certification_error(
                "grid too coarse to certify the final slope at level " + std::to_string(i) +
                " (bound gaps straddle two candidates in (1/n!)Z)");
        if (slopes[i - 1] < 0)
            throw certification_error("negative final slope: module not solvable at 1");
    }

    // Solvability: the final segment of F_n passes through the origin,
    // checked on the two smallest grid points within the bound gaps.
    {
        const PartialSum &a = bd.F[n - 1][0], &b = bd.F[n - 1][1];
        const Rat r2 = grid[1];
        Rat lo = a.lo * r2 - b.hi * r1, hi = a.hi * r2 - b.lo * r1;
        bd.solvable = (lo <= 0 && 0 <= hi);
        if (!bd.solvable)
            throw certification_error(
                "module not solvable at 1: final segment of F_n misses the origin");
    }

    bd.b.resize(n);
    for (unsigned i = 0; i < n; ++i) {
        bd.b[i] = i == 0 ? slopes[0] : slopes[i] - slopes[i - 1];
        bd.b[i].canonicalize();
        if (bd.b[i] < 0)
            throw certification_error("break slopes not nonincreasing across levels");
    }

    // Big-slope criterion: F_i(r) >= (b_1 + .. + b_i) r across the grid.
    for (unsigned i = 1; i <= n; ++i) {
        for (size_t j = 0; j < grid.size(); ++j) {
            Rat need = slopes[i - 1] * grid[j];
            if (bd.F[i - 1][j].hi < need)
                throw certification_error("big-slope criterion fails at level " +
                                          std::to_string(i) + ", r=" + rat_str(grid[j]));
        }
    }
    return bd;
}

}  // namespace padic
