#include "padic/decomp.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace padic {

namespace {

mpz_class binom_z(unsigned n, unsigned k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

Laurent derived_k(const Laurent& f, Convention conv, unsigned k) {
    Laurent g = f;
    for (unsigned i = 0; i < k; ++i) g = g.derived(conv);
    return g;
}

}  // namespace

unsigned TPoly::degree() const {
    for (size_t i = c.size(); i-- > 0;)
        if (!c[i].is_zero()) return static_cast<unsigned>(i);
    return 0;
}

bool TPoly::is_zero() const {
    for (const auto& x : c)
        if (!x.is_zero()) return false;
    return true;
}

TPoly TPoly::from_monic(const TwistedPoly& P) {
    TPoly out;
    out.p = P.p;
    out.conv = P.conv;
    out.c = P.a;
    for (auto& x : out.c) x = -x;  // T^n - a_{n-1}T^{n-1} - .. - a_0
    out.c.push_back(Laurent::constant(P.p, Scalar::one(P.p),
                                      P.a.empty() ? 0 : P.a[0].nparams()));
    return out;
}

TPoly tp_add(const TPoly& A, const TPoly& B) {
    TPoly R = A;
    if (B.c.size() > R.c.size())
        R.c.resize(B.c.size(), Laurent(A.p, A.c.empty() ? 0 : A.c[0].nparams()));
    for (size_t i = 0; i < B.c.size(); ++i) R.c[i] = R.c[i] + B.c[i];
    return R;
}

TPoly tp_sub(const TPoly& A, const TPoly& B) {
    TPoly nB = B;
    for (auto& x : nB.c) x = -x;
    return tp_add(A, nB);
}

TPoly tp_mul(const TPoly& A, const TPoly& B) {
    TPoly R;
    R.p = A.p;
    R.conv = A.conv;
    unsigned np = A.c.empty() ? 0 : A.c[0].nparams();
    R.c.assign(A.c.size() + B.c.size(), Laurent(A.p, np));
    for (size_t i = 0; i < A.c.size(); ++i) {
        if (A.c[i].is_zero()) continue;
        for (size_t j = 0; j < B.c.size(); ++j) {
            if (B.c[j].is_zero()) continue;
            // T^i b = sum_k C(i,k) D^k(b) T^{i-k}
            for (unsigned k = 0; k <= i; ++k) {
                Laurent dk = derived_k(B.c[j], A.conv, k);
                if (dk.is_zero()) continue;
                Scalar bin(A.p, Rat(binom_z(static_cast<unsigned>(i), k)));
                R.c[i - k + j] = R.c[i - k + j] + (A.c[i] * dk).scaled(bin);
            }
        }
    }
    while (R.c.size() > 1 && R.c.back().is_zero()) R.c.pop_back();
    return R;
}

std::pair<TPoly, TPoly> tp_divmod_right(const TPoly& A, const TPoly& B) {
    unsigned d = B.degree();
    if (!B.c[d].exact() || B.c[d].term_count() != 1 ||
        !(B.c[d].coeff_t(0) == Scalar::one(B.p)))
        throw std::logic_error("tp_divmod_right: divisor must be monic");
    TPoly Q, R = A;
    Q.p = A.p;
    Q.conv = A.conv;
    unsigned np = A.c.empty() ? 0 : A.c[0].nparams();
    Q.c.assign(A.c.size(), Laurent(A.p, np));
    while (!R.is_zero() && R.degree() >= d) {
        unsigned m = R.degree();
        if (R.c[m].is_zero()) {
            R.c.pop_back();
            continue;
        }
        TPoly qt;
        qt.p = A.p;
        qt.conv = A.conv;
        qt.c.assign(m - d + 1, Laurent(A.p, np));
        qt.c[m - d] = R.c[m];
        Q.c[m - d] = Q.c[m - d] + R.c[m];
        R = tp_sub(R, tp_mul(qt, B));
        if (R.degree() >= m && !R.c[m].is_zero())
            throw std::logic_error("tp_divmod_right: no degree drop");
    }
    R.c.resize(std::max<unsigned>(d, 1), Laurent(A.p, np));
    while (Q.c.size() > 1 && Q.c.back().is_zero()) Q.c.pop_back();
    return {Q, R};
}

std::vector<Laurent> tp_apply(const TPoly& A, const DiffModule& M,
                              const std::vector<Laurent>& v) {
    const unsigned n = M.rank();
    std::vector<Laurent> out(n, Laurent(M.prime(), M.matrix().nparams()));
    std::vector<Laurent> cur = v;
    for (size_t i = 0; i < A.c.size(); ++i) {
        if (!A.c[i].is_zero())
            for (unsigned r = 0; r < n; ++r) out[r] = out[r] + A.c[i] * cur[r];
        if (i + 1 == A.c.size()) break;
        std::vector<Laurent> nxt(n, Laurent(M.prime(), M.matrix().nparams()));
        for (unsigned r = 0; r < n; ++r) {
            Laurent acc = cur[r].derived(M.convention());
            for (unsigned j = 0; j < n; ++j) acc = acc + M.matrix().at(r, j) * cur[j];
            nxt[r] = std::move(acc);
        }
        cur = std::move(nxt);
    }
    return out;
}

std::vector<Laurent> solve_linear(const LMat& A, const std::vector<Laurent>& b, const Radii& at,
                                  const Rat& guarantee) {
    const unsigned n = A.rows();
    if (A.cols() != n || b.size() != n) throw std::logic_error("solve_linear shape");
    std::vector<std::vector<Laurent>> m(n, std::vector<Laurent>(n + 1, Laurent(A.prime(),
                                                                               A.nparams())));
    for (unsigned i = 0; i < n; ++i) {
        for (unsigned j = 0; j < n; ++j) m[i][j] = A.at(i, j);
        m[i][n] = b[i];
    }
    std::vector<unsigned> perm(n);
    for (unsigned col = 0; col < n; ++col) {
        // Pivot: row with minimal valuation entry in this column.
        int best = -1;
        Val bestv = Val::infinity();
        for (unsigned r = col; r < n; ++r) {
            Val v = m[r][col].gauss_valuation(at);
            if (v < bestv) {
                bestv = v;
                best = static_cast<int>(r);
            }
        }
        if (best < 0 || bestv.is_inf())
            throw certification_error("solve_linear: singular system at working radius");
        std::swap(m[col], m[static_cast<unsigned>(best)]);
        auto [pinv, pg] = m[col][col].inverted(at, Val(guarantee + Rat(8)));
        for (unsigned j = col; j <= n; ++j) {
            m[col][j] = m[col][j] * pinv;
            m[col][j].clip_valuation(at, guarantee + Rat(24));
        }
        for (unsigned r = 0; r < n; ++r) {
            if (r == col || m[r][col].is_zero()) continue;
            Laurent f = m[r][col];
            for (unsigned j = col; j <= n; ++j) {
                m[r][j] = m[r][j] - f * m[col][j];
                m[r][j].clip_valuation(at, guarantee + Rat(24));
            }
        }
        (void)perm;
    }
    std::vector<Laurent> x(n, Laurent(A.prime(), A.nparams()));
    for (unsigned i = 0; i < n; ++i) x[i] = m[i][n];
    return x;
}

LMat invert_matrix(const LMat& G, const Radii& at, const Rat& guarantee) {
    const unsigned n = G.rows();
    LMat inv(n, n, G.prime(), G.nparams());
    for (unsigned c = 0; c < n; ++c) {
        std::vector<Laurent> e(n, Laurent(G.prime(), G.nparams()));
        e[c] = Laurent::constant(G.prime(), Scalar::one(G.prime()), G.nparams());
        auto x = solve_linear(G, e, at, guarantee);
        for (unsigned r = 0; r < n; ++r) inv.at(r, c) = x[r];
    }
    return inv;
}

namespace {

Val tp_valuation(const TPoly& A, const Radii& at) {
    Val v = Val::infinity();
    for (const auto& x : A.c) v = min(v, x.gauss_valuation(at));
    return v;
}

void tp_clip(TPoly& A, int lo, int hi, const Radii& at, const Rat& floor_guard) {
    for (auto& x : A.c) {
        Val dropped = x.clip(0, lo, hi, at);
        if (dropped < Val(floor_guard))
            throw certification_error("twisted factor window too small for the target guarantee");
        x.clip_valuation(at, floor_guard + Rat(24));
    }
}

}  // namespace

std::pair<TPoly, TPoly> hensel_split(const TPoly& P, unsigned d_right, bool flip,
                                     const Radii& at, const Rat& target_valuation,
                                     unsigned iter_budget) {
    const unsigned n = P.degree();
    const unsigned d = d_right;
    if (d == 0 || d >= n) throw input_error("hensel_split: trivial cut");
    unsigned np = P.c[0].nparams();
    TPoly R;
    R.p = P.p;
    R.conv = P.conv;
    R.c.assign(d + 1, Laurent(P.p, np));
    if (!flip) {
        auto [lead_inv, lg] = P.c[d].inverted(at, Val(target_valuation + Rat(8)));
        for (unsigned i = 0; i < d; ++i) R.c[i] = P.c[i] * lead_inv;
    } else {
        for (unsigned i = 0; i < d; ++i) R.c[i] = P.c[n - d + i];
    }
    R.c[d] = Laurent::constant(P.p, Scalar::one(P.p), np);
    TPoly Q = tp_divmod_right(P, R).first;
    tp_clip(R, -(1 << 20), 1 << 20, at, target_valuation + Rat(4));
    tp_clip(Q, -(1 << 20), 1 << 20, at, target_valuation + Rat(4));

    auto wP = P.c[0].window(0);
    for (const auto& x : P.c) {
        auto w = x.window(0);
        wP.first = std::min(wP.first, w.first);
        wP.second = std::max(wP.second, w.second);
    }
    int W = 8 * (wP.second - wP.first + 4) + 64;

    Val last = Val(Rat(-100000));
    for (unsigned it = 0; it <= iter_budget; ++it) {
        TPoly E = tp_sub(P, tp_mul(Q, R));
        for (auto& x : E.c) x.clip_valuation(at, target_valuation + Rat(24));
        Val vE = tp_valuation(E, at);
        if (vE.is_inf() || vE > Val(target_valuation)) return {Q, R};
        if (it == iter_budget) break;
        // Solve rem_right(Q * dR, R) = rem_right(E, R) for dR of degree < d.
        LMat L(d, d, P.p, np);
        for (unsigned j = 0; j < d; ++j) {
            TPoly tj;
            tj.p = P.p;
            tj.conv = P.conv;
            tj.c.assign(j + 1, Laurent(P.p, np));
            tj.c[j] = Laurent::constant(P.p, Scalar::one(P.p), np);
            TPoly rem = tp_divmod_right(tp_mul(Q, tj), R).second;
            for (unsigned i = 0; i < d; ++i)
                L.at(i, j) = i < rem.c.size() ? rem.c[i] : Laurent(P.p, np);
        }
        TPoly remE = tp_divmod_right(E, R).second;
        std::vector<Laurent> rhs(d, Laurent(P.p, np));
        for (unsigned i = 0; i < d && i < remE.c.size(); ++i) rhs[i] = remE.c[i];
        std::vector<Laurent> x = solve_linear(L, rhs, at, target_valuation + Rat(8));
        TPoly dR;
        dR.p = P.p;
        dR.conv = P.conv;
        dR.c = x;
        TPoly dQ = tp_divmod_right(tp_sub(E, tp_mul(Q, dR)), R).first;
        R = tp_add(R, dR);
        Q = tp_add(Q, dQ);
        tp_clip(R, -W, W, at, target_valuation + Rat(4));
        tp_clip(Q, -W, W, at, target_valuation + Rat(4));
        if (!(vE > last) && it > 2)
            throw certification_error("hensel_split: residual stalled (no certified gap?)");
        last = vE;
    }
    throw certification_error("hensel_split: iteration budget exhausted before target residual");
}

namespace {

struct FactorBasis {
    Rat slope;
    std::vector<std::vector<Laurent>> columns;  // coordinate vectors in M's basis
};

// Columns w, Dw, .., D^{k-1}w.
std::vector<std::vector<Laurent>> iterate_columns(const DiffModule& M,
                                                  const std::vector<Laurent>& w, unsigned k) {
    std::vector<std::vector<Laurent>> cols;
    std::vector<Laurent> cur = w;
    for (unsigned s = 0; s < k; ++s) {
        cols.push_back(cur);
        if (s + 1 == k) break;
        std::vector<Laurent> nxt(M.rank(), Laurent(M.prime(), M.matrix().nparams()));
        for (unsigned i = 0; i < M.rank(); ++i) {
            Laurent acc = cur[i].derived(M.convention());
            for (unsigned j = 0; j < M.rank(); ++j) acc = acc + M.matrix().at(i, j) * cur[j];
            nxt[i] = std::move(acc);
        }
        cur = std::move(nxt);
    }
    return cols;
}

// One binary split of M at working radius r_star into (top break group, rest).
// Returns basis columns for both parts.
std::pair<FactorBasis, FactorBasis> split_once(const DiffModule& M, unsigned top_count,
                                               const Rat& top_slope, const Rat& rest_slope_max,
                                               const LogRadius& r_star,
                                               const Rat& target_valuation,
                                               unsigned iter_budget) {
    const unsigned n = M.rank();
    Radii at = M.radii_at(r_star);
    CyclicData cd = cyclic_data(M, r_star);
    auto [winv, wg] = cd.wronskian.inverted(at, Val(target_valuation + Rat(16)));
    TwistedPoly TP;
    TP.p = M.prime();
    TP.conv = M.convention();
    TP.a.resize(n, Laurent(M.prime(), M.matrix().nparams()));
    for (unsigned i = 0; i < n; ++i) {
        TP.a[i] = cd.cramer_num[i] * winv;
        TP.a[i].clip_valuation(at, target_valuation + Rat(32));
    }
    TPoly P = TPoly::from_monic(TP);

    // Orientation A: R from the low-degree side (large root valuations = small
    // radii group); submodule generated by R(D)v is the top break group.
    auto [Q1, R1] = hensel_split(P, n - top_count, false, at, target_valuation, iter_budget);
    FactorBasis top;
    top.slope = top_slope;
    top.columns = iterate_columns(M, tp_apply(R1, M, cd.v), top_count);
    // Orientation B: R from the high-degree side; submodule = complement.
    auto [Q2, R2] = hensel_split(P, top_count, true, at, target_valuation, iter_budget);
    FactorBasis rest;
    rest.slope = rest_slope_max;
    rest.columns = iterate_columns(M, tp_apply(R2, M, cd.v), n - top_count);
    return {top, rest};
}

}  // namespace

SlopeDecomposition slope_decompose(const DiffModule& M, std::vector<LogRadius> r_grid,
                                   const Rat& target_valuation, unsigned iter_budget,
                                   unsigned max_pushforwards) {
    std::sort(r_grid.begin(), r_grid.end());
    SlopeDecomposition out;
    out.breaks = break_slopes(M, r_grid, max_pushforwards);
    out.residual_guarantee = target_valuation;
    const unsigned n = M.rank();
    const unsigned p = M.prime();

    // Distinct break groups, descending.
    std::vector<std::pair<Rat, unsigned>> groups;
    for (const auto& b : out.breaks.b) {
        if (!groups.empty() && groups.back().first == b)
            groups.back().second++;
        else
            groups.emplace_back(b, 1);
    }
    if (groups.size() == 1) {
        out.factors.push_back({groups[0].first, M, n});
        out.basis = LMat::identity(n, p, M.matrix().nparams());
        out.basis_inv = out.basis;
        return out;
    }

    // Working radius: largest grid point where the top group is visible at
    // level 0 and separated from the rest.
    std::optional<LogRadius> r_star;
    unsigned top = groups[0].second;
    for (size_t j = r_grid.size(); j-- > 0;) {
        try {
            auto radii = newton_radii(M, r_grid[j], 0);
            bool ok = true;
            for (unsigned i = 0; i < top; ++i)
                ok &= radii[i].exact() && radii[i].lower > Rat(1, (long)p - 1);
            if (ok && top < n) ok &= radii[top - 1].lower > radii[top].upper;
            if (ok) {
                r_star = r_grid[j];
                break;
            }
        } catch (const std::exception&) {
            continue;
        }
    }
    if (!r_star)
        throw certification_error(
            "slope_decompose: no grid radius with a Newton-visible certified gap; extend the "
            "grid away from the boundary");

    auto [topb, restb] = split_once(M, top, groups[0].first, groups[1].first, *r_star,
                                    target_valuation, iter_budget);

    LMat G(n, n, p, M.matrix().nparams());
    for (unsigned c = 0; c < top; ++c)
        for (unsigned i = 0; i < n; ++i) G.at(i, c) = topb.columns[c][i];
    for (unsigned c = 0; c < n - top; ++c)
        for (unsigned i = 0; i < n; ++i) G.at(i, top + c) = restb.columns[c][i];
    Radii at = M.radii_at(*r_star);
    for (unsigned i = 0; i < n; ++i)
        for (unsigned j = 0; j < n; ++j) G.at(i, j).clip_valuation(at, target_valuation + Rat(32));
    LMat Ginv = invert_matrix(G, at, target_valuation + Rat(8));
    LMat Np = Ginv * (M.matrix() * G + G.derived(M.convention()));
    for (unsigned i = 0; i < n; ++i)
        for (unsigned j = 0; j < n; ++j) Np.at(i, j).clip_valuation(at, target_valuation + Rat(32));

    // Off-diagonal residual must exceed the guarantee; clean the blocks.
    Val offdiag = Val::infinity();
    for (unsigned i = 0; i < n; ++i)
        for (unsigned j = 0; j < n; ++j) {
            bool in_top = i < top && j < top, in_rest = i >= top && j >= top;
            if (!in_top && !in_rest) offdiag = min(offdiag, Np.at(i, j).gauss_valuation(at));
        }
    if (!(offdiag > Val(target_valuation)))
        throw certification_error("slope_decompose: off-diagonal residual " + offdiag.str() +
                                  " below guarantee " + rat_str(target_valuation));

    LMat Ntop(top, top, p, M.matrix().nparams());
    for (unsigned i = 0; i < top; ++i)
        for (unsigned j = 0; j < top; ++j) Ntop.at(i, j) = Np.at(i, j);
    LMat Nrest(n - top, n - top, p, M.matrix().nparams());
    for (unsigned i = 0; i < n - top; ++i)
        for (unsigned j = 0; j < n - top; ++j) Nrest.at(i, j) = Np.at(top + i, top + j);

    DiffModule Mtop(p, top, M.convention(), M.annulus(), std::move(Ntop), M.param_radii());
    DiffModule Mrest(p, n - top, M.convention(), M.annulus(), std::move(Nrest),
                     M.param_radii());

    out.factors.push_back({groups[0].first, Mtop, top});
    out.basis = G;
    out.basis_inv = Ginv;

    if (groups.size() == 2) {
        out.factors.push_back({groups[1].first, Mrest, n - top});
    } else {
        SlopeDecomposition sub =
            slope_decompose(Mrest, r_grid, target_valuation, iter_budget, max_pushforwards);
        for (auto& f : sub.factors) out.factors.push_back(f);
        // Compose basis: G * blockdiag(I_top, G_sub).
        LMat B(n, n, p, M.matrix().nparams());
        for (unsigned i = 0; i < top; ++i)
            B.at(i, i) = Laurent::constant(p, Scalar::one(p), M.matrix().nparams());
        for (unsigned i = 0; i < n - top; ++i)
            for (unsigned j = 0; j < n - top; ++j)
                B.at(top + i, top + j) = sub.basis.at(i, j);
        out.basis = out.basis * B;
        out.basis_inv = invert_matrix(out.basis, at, target_valuation + Rat(8));
    }
    return out;
}

DiffModule regular_component(const DiffModule& M, std::vector<LogRadius> r_grid,
                             const Rat& target_valuation) {
    SlopeDecomposition dec = slope_decompose(M, r_grid, target_valuation);
    for (const auto& f : dec.factors)
        if (f.slope == 0) return f.module;
    return DiffModule(M.prime(), 0, M.convention(), M.annulus(),
                      LMat(0, 0, M.prime(), M.matrix().nparams()), M.param_radii());
}

std::string sim_verdict_str(SimVerdict v) {
    switch (v) {
        case SimVerdict::holds: return "holds";
        case SimVerdict::fails: return "fails";
        default: return "undecided";
    }
}

SimVerdict check_sim_relation(const DiffModule& M1, const DiffModule& M2,
                              const LogRadius& fiber_r, std::vector<LogRadius> r_grid,
                              std::string* diag) {
    const unsigned n1 = M1.rank(), n2 = M2.rank();
    const unsigned p = M1.prime();
    DiffModule H = M1.dual().tensor(M2);
    SlopeDecomposition dec;
    try {
        dec = slope_decompose(H, r_grid);
    } catch (const certification_error& e) {
        if (diag) *diag = std::string("decomposition uncertified: ") + e.what();
        return SimVerdict::undecided;
    }
    // Columns of the slope-0 factor inside the basis (factors are ordered by
    // decreasing slope, so the regular block is the trailing one when present).
    unsigned f = 0, offset = 0;
    bool found = false;
    unsigned run = 0;
    for (const auto& fac : dec.factors) {
        if (fac.slope == 0) {
            f = fac.rank;
            offset = run;
            found = true;
        }
        run += fac.rank;
    }
    if (!found || f == 0) {
        if (diag) *diag = "regular component is zero";
        return (n1 == 0 && n2 == 0) ? SimVerdict::holds : SimVerdict::fails;
    }
    // J: (n1*n2) x f inclusion of the regular component.
    auto J = [&](unsigned row, unsigned a) -> const Laurent& {
        return dec.basis.at(row, offset + a);
    };
    // Contraction F (x) M1 -> M2 and F^v (x) M2 -> M1.
    LMat C1(n2, f * n1, p, H.matrix().nparams());
    LMat C2(n1, f * n2, p, H.matrix().nparams());
    for (unsigned a = 0; a < f; ++a)
        for (unsigned i = 0; i < n1; ++i)
            for (unsigned j = 0; j < n2; ++j) {
                C1.at(j, a * n1 + i) = J(i * n2 + j, a);
                C2.at(i, a * n2 + j) = J(i * n2 + j, a);
            }
    // Full row rank over the fraction field, evaluated by elimination with
    // dominant-monomial pivots at the fiber radius.
    Radii at = H.radii_at(fiber_r);
    auto full_row_rank = [&](LMat C, unsigned rows) -> bool {
        unsigned rank = 0;
        std::vector<std::vector<Laurent>> m(rows);
        for (unsigned i = 0; i < rows; ++i)
            for (unsigned j = 0; j < C.cols(); ++j) m[i].push_back(C.at(i, j));
        for (unsigned col = 0; col < C.cols() && rank < rows; ++col) {
            int best = -1;
            Val bv = Val::infinity();
            for (unsigned r = rank; r < rows; ++r) {
                Val v = m[r][col].gauss_valuation(at);
                if (v < bv) {
                    bv = v;
                    best = int(r);
                }
            }
            if (best < 0 || bv.is_inf()) continue;
            std::swap(m[rank], m[unsigned(best)]);
            auto [pinv, pg] = m[rank][col].inverted(at, Val(Rat(48)));
            for (unsigned j = col; j < C.cols(); ++j) m[rank][j] = m[rank][j] * pinv;
            for (unsigned r = rank + 1; r < rows; ++r) {
                if (m[r][col].is_zero()) continue;
                Laurent fct = m[r][col];
                for (unsigned j = col; j < C.cols(); ++j)
                    m[r][j] = m[r][j] - fct * m[rank][j];
            }
            ++rank;
        }
        return rank == rows;
    };
    bool s1 = full_row_rank(C1, n2);
    bool s2 = full_row_rank(C2, n1);
    if (diag)
        *diag = std::string("contractions surjective: ") + (s1 ? "yes" : "no") + "/" +
                (s2 ? "yes" : "no");
    return (s1 && s2) ? SimVerdict::holds : SimVerdict::fails;
}

bool has_log_horizontal_basis(const DiffModule& Min, int t_window) {
    DiffModule M = Min.converted(Convention::ddt);
    if (M.matrix().nparams() > 0)
        throw input_error("log-horizontal check expects a parameter-free module");
    const unsigned n = M.rank();
    const unsigned p = M.prime();
    const int W = t_window;
    const unsigned L = n;  // log-degree < n suffices for unipotent of length n
    // Unknowns u[i][e][l]: coefficient of t^e log^l in component i.
    auto idx = [&](unsigned i, int e, unsigned l) {
        return (size_t(i) * (2 * W + 1) + size_t(e + W)) * L + l;
    };
    const size_t nu = size_t(n) * (2 * W + 1) * L;
    // Equations: coefficient of (i, t^{e}, log^l) in D(h) = 0 for interior e.
    // D(h)_i = sum dv_i/dt + (N h)_i + (l+1) u[i][.][l+1] * t^{-1}.
    int span = 0;
    for (unsigned i = 0; i < n; ++i)
        for (unsigned j = 0; j < n; ++j) {
            auto w = M.matrix().at(i, j).window(0);
            span = std::max(span, std::max(std::abs(w.first), std::abs(w.second)));
        }
    // Equations cover the full support of D(h): out-of-window unknowns are
    // structurally zero, so D(h) = 0 is imposed as a complete identity.
    std::vector<std::vector<Scalar>> rows;
    for (unsigned i = 0; i < n; ++i)
        for (int e = -W - span - 1; e <= W + span; ++e)
            for (unsigned l = 0; l < L; ++l) {
                std::vector<Scalar> row(nu, Scalar::zero(p));
                // d/dt term: (e+1) u[i][e+1][l]
                if (e + 1 >= -W && e + 1 <= W)
                    row[idx(i, e + 1, l)] = row[idx(i, e + 1, l)] + Scalar(p, Rat(e + 1));
                // log derivative: (l+1) u[i][e+1][l+1]  (D log t = 1/t)
                if (l + 1 < L && e + 1 >= -W && e + 1 <= W)
                    row[idx(i, e + 1, l + 1)] =
                        row[idx(i, e + 1, l + 1)] + Scalar(p, Rat((long)l + 1));
                // N h
                for (unsigned j = 0; j < n; ++j)
                    for (const auto& [k, c] : M.matrix().at(i, j).terms()) {
                        int ep = e - k[0];
                        if (ep >= -W && ep <= W)
                            row[idx(j, ep, l)] = row[idx(j, ep, l)] + c;
                    }
                bool nz = false;
                for (const auto& s : row) nz |= !s.is_zero();
                if (nz) rows.push_back(std::move(row));
            }
    // Kernel via Gaussian elimination over K.
    size_t nr = rows.size();
    std::vector<int> pivot_of_col(nu, -1);
    size_t rank = 0;
    for (size_t col = 0; col < nu && rank < nr; ++col) {
        size_t piv = rank;
        while (piv < nr && rows[piv][col].is_zero()) ++piv;
        if (piv == nr) continue;
        std::swap(rows[rank], rows[piv]);
        Scalar inv = rows[rank][col].inverse();
        for (size_t j = col; j < nu; ++j) rows[rank][j] = rows[rank][j] * inv;
        for (size_t r = 0; r < nr; ++r) {
            if (r == rank || rows[r][col].is_zero()) continue;
            Scalar f = rows[r][col];
            for (size_t j = col; j < nu; ++j) rows[r][j] = rows[r][j] - f * rows[rank][j];
        }
        pivot_of_col[col] = static_cast<int>(rank);
        ++rank;
    }
    // Kernel basis from free columns.
    std::vector<std::vector<Scalar>> kernel;
    for (size_t col = 0; col < nu; ++col) {
        if (pivot_of_col[col] >= 0) continue;
        std::vector<Scalar> v(nu, Scalar::zero(p));
        v[col] = Scalar::one(p);
        for (size_t c2 = 0; c2 < nu; ++c2)
            if (pivot_of_col[c2] >= 0) v[c2] = -rows[size_t(pivot_of_col[c2])][col];
        kernel.push_back(std::move(v));
    }
    if (kernel.size() < n) return false;
    // Need n sections forming a basis: det over K[t^,log] of some n columns.
    // Sections as n x n matrices with entries in Laurent[log]; test det != 0
    // as a polynomial in log with Laurent coefficients, over candidate
    // subsets (first few combinations).
    auto section_entry = [&](const std::vector<Scalar>& v, unsigned i) {
        // entry i as vector of Laurents per log degree
        std::vector<Laurent> out(L, Laurent(p));
        for (int e = -W; e <= W; ++e)
            for (unsigned l = 0; l < L; ++l) {
                const Scalar& s = v[idx(i, e, l)];
                if (!s.is_zero()) out[l] = out[l] + Laurent::monomial(p, s, e);
            }
        return out;
    };
    // log-polynomial arithmetic: vector<Laurent> coefficientwise
    auto lp_mul = [&](const std::vector<Laurent>& a, const std::vector<Laurent>& b) {
        std::vector<Laurent> r(a.size() + b.size() - 1, Laurent(p));
        for (size_t i = 0; i < a.size(); ++i)
            for (size_t j = 0; j < b.size(); ++j) r[i + j] = r[i + j] + a[i] * b[j];
        return r;
    };
    auto lp_sub = [&](std::vector<Laurent> a, const std::vector<Laurent>& b) {
        if (b.size() > a.size()) a.resize(b.size(), Laurent(p));
        for (size_t j = 0; j < b.size(); ++j) a[j] = a[j] - b[j];
        return a;
    };
    auto lp_add = [&](std::vector<Laurent> a, const std::vector<Laurent>& b) {
        if (b.size() > a.size()) a.resize(b.size(), Laurent(p));
        for (size_t j = 0; j < b.size(); ++j) a[j] = a[j] + b[j];
        return a;
    };
    auto lp_zero = [&](const std::vector<Laurent>& a) {
        for (const auto& x : a)
            if (!x.is_zero()) return false;
        return true;
    };
    std::function<std::vector<Laurent>(std::vector<std::vector<std::vector<Laurent>>>&)> det_lp =
        [&](std::vector<std::vector<std::vector<Laurent>>>& mat) -> std::vector<Laurent> {
        size_t m = mat.size();
        if (m == 1) return mat[0][0];
        std::vector<Laurent> acc(1, Laurent(p));
        for (size_t r = 0; r < m; ++r) {
            std::vector<std::vector<std::vector<Laurent>>> minor;
            for (size_t i = 0; i < m; ++i) {
                if (i == r) continue;
                std::vector<std::vector<std::vector<Laurent>>>::value_type rowm;
                for (size_t j = 1; j < m; ++j) rowm.push_back(mat[i][j]);
                minor.push_back(rowm);
            }
            auto sub = det_lp(minor);
            auto term = lp_mul(mat[r][0], sub);
            acc = (r % 2 == 0) ? lp_add(acc, term) : lp_sub(acc, term);
        }
        return acc;
    };
    // Try combinations of kernel vectors (bounded search).
    std::vector<size_t> pick(n);
    std::function<bool(size_t, size_t)> search = [&](size_t at, size_t start) -> bool {
        if (at == n) {
            std::vector<std::vector<std::vector<Laurent>>> mat(n);
            for (unsigned i = 0; i < n; ++i)
                for (unsigned k = 0; k < n; ++k)
                    mat[i].push_back(section_entry(kernel[pick[k]], i));
            auto d = det_lp(mat);
            return !lp_zero(d);
        }
        for (size_t c = start; c < kernel.size() && c < start + 6; ++c) {
            pick[at] = c;
            if (search(at + 1, c + 1)) return true;
        }
        return false;
    };
    return search(0, 0);
}

}  // namespace padic
