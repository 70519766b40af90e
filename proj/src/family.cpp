#include "padic/family.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace padic {

FamilyModule::FamilyModule(unsigned p, unsigned rank, Convention conv, Annulus ann, LMat N,
                           std::vector<ParamBox> boxes)
    : p_(p), rank_(rank), conv_(conv), ann_(std::move(ann)), N_(std::move(N)),
      boxes_(std::move(boxes)) {
    if (N_.rows() != rank_ || N_.cols() != rank_)
        throw input_error("family matrix shape does not match rank");
    if (N_.nparams() != boxes_.size()) throw input_error("family parameter arity mismatch");
}

std::string FiberPoint::str() const {
    if (kind == Kind::gauss) return "gauss(" + rat_str(r) + ")";
    return "x=" + value.str();
}

DiffModule specialize(const FamilyModule& F, const std::vector<FiberPoint>& point) {
    if (point.size() != F.nparams())
        throw input_error("specialize: expected " + std::to_string(F.nparams()) +
                          " parameter assignments");
    const unsigned n = F.rank();
    LMat cur = F.matrix();
    std::vector<LogRadius> gauss_radii;
    // Evaluate classical parameters from the last index down so earlier
    // indices stay stable; Gauss parameters stay formal with their radii.
    std::vector<unsigned> order(F.nparams());
    for (unsigned l = 0; l < F.nparams(); ++l) order[l] = l;
    // First collect gauss radii in declaration order.
    for (unsigned l = 0; l < F.nparams(); ++l)
        if (point[l].kind == FiberPoint::Kind::gauss) gauss_radii.push_back(point[l].r);
    for (unsigned l = F.nparams(); l-- > 0;) {
        const FiberPoint& pt = point[l];
        const ParamBox& box = F.boxes()[l];
        if (pt.kind == FiberPoint::Kind::classical) {
            if (pt.value.is_zero()) throw input_error("specialize: zero parameter value");
            Val v = pt.value.valuation();
            if (v.finite() < box.r_min || v.finite() > box.r_max)
                throw input_error("specialize: point outside parameter region (valuation " +
                                  v.str() + ")");
            LMat next(n, n, F.prime(), cur.nparams() - 1);
            for (unsigned i = 0; i < n; ++i)
                for (unsigned j = 0; j < n; ++j)
                    next.at(i, j) = cur.at(i, j).eval_param(l + 1, pt.value);
            cur = std::move(next);
        } else {
            if (pt.r < box.r_min || pt.r > box.r_max)
                throw input_error("specialize: Gauss radius outside parameter region");
        }
    }
    // Remaining formal variables are exactly the Gauss ones, in order.
    if (cur.nparams() != gauss_radii.size())
        throw std::logic_error("specialize: parameter bookkeeping mismatch");
    return DiffModule(F.prime(), n, F.convention(), F.annulus(), std::move(cur), gauss_radii);
}

ScanResult semicontinuity_scan(const FamilyModule& F,
                               const std::vector<std::vector<FiberPoint>>& points,
                               unsigned level, std::vector<LogRadius> grid,
                               unsigned max_pushforwards) {
    if (level < 1 || level > F.rank()) throw input_error("scan level out of range");
    ScanResult out;
    out.level = level;
    out.rows.resize(points.size());
    const long n = static_cast<long>(points.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(configured_threads())
#endif
    for (long idx = 0; idx < n; ++idx) {
        ScanRow& row = out.rows[size_t(idx)];
        row.point = points[size_t(idx)];
        try {
            DiffModule fib = specialize(F, row.point);
            BreakData bd = break_slopes(fib, grid, max_pushforwards);
            Rat acc(0);
            for (unsigned i = 0; i < level; ++i) acc += bd.b[i];
            acc.canonicalize();
            row.value = acc;
            row.solvable = bd.solvable;
        } catch (const std::exception& e) {
            row.solvable = false;
            row.note = e.what();  // flagged row, excluded from the verdict
        }
    }
    // Verdict data.
    std::set<Rat> distinct;
    std::optional<Rat> max_classical_generic;
    for (size_t idx = 0; idx < points.size(); ++idx) {
        const ScanRow& row = out.rows[idx];
        if (!row.value) continue;
        distinct.insert(*row.value);
        bool all_gauss = true, generic = true;
        for (size_t l = 0; l < row.point.size(); ++l) {
            all_gauss &= row.point[l].kind == FiberPoint::Kind::gauss;
            if (row.point[l].kind == FiberPoint::Kind::classical) {
                // Generic locus: parameter stays a unit (valuation 0).
                generic &= row.point[l].value.valuation() == Val(Rat(0));
            } else
                generic &= row.point[l].r == 0;
        }
        if (all_gauss) out.gauss_value = *row.value;
        if (generic && !all_gauss)
            if (!max_classical_generic || *row.value > *max_classical_generic)
                max_classical_generic = *row.value;
    }
    out.distinct_values = static_cast<unsigned>(distinct.size());
    if (out.gauss_value) {
        Rat best(0);
        bool any = false;
        for (const auto& row : out.rows) {
            if (!row.value) continue;
            bool all_gauss = true;
            for (const auto& pt : row.point)
                all_gauss &= pt.kind == FiberPoint::Kind::gauss;
            if (all_gauss) continue;
            if (!any || *row.value > best) best = *row.value;
            any = true;
        }
        out.gauss_attains_max = !any || *out.gauss_value >= best;
        out.generic_locus_consistent =
            !max_classical_generic || *max_classical_generic <= *out.gauss_value;
    }
    return out;
}

ConstancyResult partial_frobenius_constancy(const FamilyModule& F, const Laurent& phi_x,
                                            const LMat& A_x, std::vector<LogRadius> r_x_grid,
                                            std::vector<LogRadius> t_grid,
                                            const Rat& tol_valuation,
                                            unsigned max_pushforwards) {
    if (F.nparams() != 1)
        throw input_error("partial_frobenius_constancy expects a one-parameter family");
    ConstancyResult res;
    // Gate: phi_x must be a Frobenius-lift shape in x, and A_x must intertwine
    // the t-connection: D_t(A) + N A - A N(x -> phi_x(x)) small on the box.
    const unsigned p = F.prime();
    const unsigned n = F.rank();
    {
        // Shape check |phi_x - x^q| < 1 across the parameter box.
        bool shaped = false;
        for (unsigned q = p; q <= 1u << 16 && !shaped; q *= p) {
            Laurent::Key key(2, 0);
            key[1] = int(q);
            Laurent u = phi_x - Laurent::monomial_multi(p, Scalar::one(p), key);
            bool ok = true;
            for (const LogRadius& rx : {F.boxes()[0].r_min, F.boxes()[0].r_max})
                for (const LogRadius& rt : {F.annulus().r_min, F.annulus().r_max}) {
                    Radii at(rt, {rx});
                    ok &= u.is_zero() || u.gauss_valuation(at) > Val(Rat(0));
                }
            shaped = ok;
        }
        if (!shaped) {
            res.note = "phi_x is not a Frobenius lift x^q + u with |u| < 1 on the box";
            return res;
        }
    }
    {
        Radii mid(F.annulus().r_max, {F.boxes()[0].r_max});
        LMat Nphi(n, n, p, 1);
        bool subst_ok = true;
        for (unsigned i = 0; i < n && subst_ok; ++i)
            for (unsigned j = 0; j < n && subst_ok; ++j) {
                try {
                    Nphi.at(i, j) =
                        F.matrix().at(i, j).substituted(1, phi_x, mid, Val(tol_valuation + Rat(8)))
                            .first;
                } catch (const std::exception& e) {
                    res.note = std::string("substitution failed: ") + e.what();
                    subst_ok = false;
                }
            }
        if (!subst_ok) return res;
        LMat residual = A_x.derived(F.convention()) + F.matrix() * A_x - A_x * Nphi;
        Val worst = Val::infinity();
        for (const LogRadius& rx : {F.boxes()[0].r_min, F.boxes()[0].r_max})
            for (const LogRadius& rt : {F.annulus().r_min, F.annulus().r_max})
                worst = min(worst, residual.min_valuation(Radii(rt, {rx})));
        if (!(worst > Val(tol_valuation))) {
            res.note = "Frobenius verification failed (residual valuation " + worst.str() +
                       "); constancy verdict refused";
            return res;
        }
        res.frobenius_verified = true;
    }
    // t-breaks per Gauss fiber.
    std::sort(r_x_grid.begin(), r_x_grid.end());
    bool constant = true;
    std::optional<std::vector<Rat>> first;
    for (const LogRadius& rx : r_x_grid) {
        DiffModule fib = specialize(F, {FiberPoint::gauss(rx)});
        BreakData bd = break_slopes(fib, t_grid, max_pushforwards);
        res.t_breaks.emplace_back(rx, bd.b);
        if (!first)
            first = bd.b;
        else
            constant &= (*first == bd.b);
    }
    res.constant = constant;
    // Bivariate convexity of F_i(r_x, r_t) on the sampled lattice: midpoint
    // inequality along rows, columns and both diagonals.
    std::sort(t_grid.begin(), t_grid.end());
    std::vector<std::vector<Rat>> Fi(r_x_grid.size(), std::vector<Rat>(t_grid.size()));
    bool exact_all = true;
    for (size_t a = 0; a < r_x_grid.size(); ++a) {
        DiffModule fib = specialize(F, {FiberPoint::gauss(r_x_grid[a])});
        for (size_t b = 0; b < t_grid.size(); ++b) {
            auto radii = newton_radii(fib, t_grid[b], max_pushforwards);
            auto ps = partial_sum(radii, n);
            exact_all &= ps.exact;
            Fi[a][b] = ps.lo;
        }
    }
    bool convex = true;
    auto mid_ok = [&](const Rat& f0, const Rat& f1, const Rat& f2) {
        return f1 + f1 <= f0 + f2;
    };
    for (size_t a = 0; a < r_x_grid.size(); ++a)
        for (size_t b = 0; b + 2 < t_grid.size(); ++b)
            if (t_grid[b + 1] - t_grid[b] == t_grid[b + 2] - t_grid[b + 1])
                convex &= mid_ok(Fi[a][b], Fi[a][b + 1], Fi[a][b + 2]);
    for (size_t b = 0; b < t_grid.size(); ++b)
        for (size_t a = 0; a + 2 < r_x_grid.size(); ++a)
            if (r_x_grid[a + 1] - r_x_grid[a] == r_x_grid[a + 2] - r_x_grid[a + 1])
                convex &= mid_ok(Fi[a][b], Fi[a + 1][b], Fi[a + 2][b]);
    for (size_t a = 0; a + 2 < r_x_grid.size(); ++a)
        for (size_t b = 0; b + 2 < t_grid.size(); ++b)
            if (r_x_grid[a + 1] - r_x_grid[a] == r_x_grid[a + 2] - r_x_grid[a + 1] &&
                t_grid[b + 1] - t_grid[b] == t_grid[b + 2] - t_grid[b + 1]) {
                convex &= mid_ok(Fi[a][b], Fi[a + 1][b + 1], Fi[a + 2][b + 2]);
                convex &= mid_ok(Fi[a][b + 2], Fi[a + 1][b + 1], Fi[a + 2][b]);
            }
    res.convexity_consistent = convex && exact_all;
    if (res.note.empty())
        res.note = constant ? "t-breaks constant across the sampled Gauss fibers"
                            : "t-breaks vary across the sampled Gauss fibers";
    return res;
}

std::string regular_probe_str(RegularProbe r) {
    switch (r) {
        case RegularProbe::regular: return "regular";
        case RegularProbe::not_regular: return "not-regular";
        default: return "undecided";
    }
}

std::vector<RegularProbe> regular_locus_probe(const FamilyModule& F,
                                              const std::vector<std::vector<FiberPoint>>& points,
                                              std::vector<LogRadius> grid,
                                              unsigned max_pushforwards) {
    std::vector<RegularProbe> out(points.size(), RegularProbe::undecided);
    for (size_t idx = 0; idx < points.size(); ++idx) {
        try {
            DiffModule fib = specialize(F, points[idx]);
            BreakData bd = break_slopes(fib, grid, max_pushforwards);
            out[idx] = bd.b[0] == 0 ? RegularProbe::regular : RegularProbe::not_regular;
        } catch (const std::exception&) {
            out[idx] = RegularProbe::undecided;
        }
    }
    return out;
}

}  // namespace padic
