#include "padic/exponents.hpp"

#include <algorithm>
#include <functional>

namespace padic {

namespace {

mpz_class pow_z(unsigned p, unsigned k) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), p, k);
    return r;
}

// Kuhn's augmenting-path bipartite matching; adj[i] = admissible j's.
std::optional<std::vector<unsigned>> perfect_matching(
    const std::vector<std::vector<unsigned>>& adj, unsigned n) {
    std::vector<int> match_right(n, -1);
    std::function<bool(unsigned, std::vector<bool>&)> try_aug =
        [&](unsigned i, std::vector<bool>& seen) -> bool {
        for (unsigned j : adj[i]) {
            if (seen[j]) continue;
            seen[j] = true;
            if (match_right[j] < 0 || try_aug(unsigned(match_right[j]), seen)) {
                match_right[j] = int(i);
                return true;
            }
        }
        return false;
    };
    for (unsigned i = 0; i < n; ++i) {
        std::vector<bool> seen(n, false);
        if (!try_aug(i, seen)) return std::nullopt;
    }
    std::vector<unsigned> sigma(n);  // sigma[j] = i matched to j
    for (unsigned j = 0; j < n; ++j) sigma[j] = unsigned(match_right[j]);
    return sigma;
}

}  // namespace

Rat bracket(unsigned p, const Rat& x, unsigned m) {
    Rat y = x / Rat(pow_z(p, m));
    y.canonicalize();
    if (y == 0) return Rat(0);
    mpz_class den = y.get_den();
    long k = 0;
    {
        mpz_class d = den, q, r;
        for (;;) {
            mpz_fdiv_qr_ui(q.get_mpz_t(), r.get_mpz_t(), d.get_mpz_t(), p);
            if (r != 0) break;
            d = q;
            ++k;
        }
        den = d;  // p-coprime part
    }
    if (k == 0) return Rat(0);  // y in Z_p
    mpz_class pk = pow_z(p, unsigned(k));
    mpz_class binv;
    if (mpz_invert(binv.get_mpz_t(), den.get_mpz_t(), pk.get_mpz_t()) == 0)
        throw input_error("bracket: denominator not invertible mod p^k");
    mpz_class c = (y.get_num() % pk) * binv % pk;
    if (c < 0) c += pk;
    // Balanced representative; p = 2 midpoint tie keeps the nonnegative one.
    if (2 * c > pk) c -= pk;
    Rat out = Rat(c) / Rat(pk) * Rat(pow_z(p, m));
    out.canonicalize();
    return out;
}

std::optional<std::vector<unsigned>> equivalent(const ExponentTuple& A, const ExponentTuple& B,
                                                long shift_bound) {
    if (!A.exact || !B.exact)
        throw input_error("equivalent() needs exact rational tuples (precision-only tuples are "
                          "undecidable)");
    if (A.p != B.p || A.size() != B.size()) throw input_error("equivalent: shape mismatch");
    const unsigned n = A.size();
    std::vector<std::vector<unsigned>> adj(n);
    for (unsigned i = 0; i < n; ++i)
        for (unsigned j = 0; j < n; ++j) {
            Rat d = B.entries[j] - A.entries[i];
            d.canonicalize();
            if (d.get_den() == 1 && abs(d.get_num()) <= shift_bound) adj[i].push_back(j);
        }
    return perfect_matching(adj, n);
}

WeakEquivalenceReport weakly_equivalent_up_to(const ExponentTuple& A, const ExponentTuple& B,
                                              unsigned m_max, const Rat& c) {
    if (A.p != B.p || A.size() != B.size())
        throw input_error("weakly_equivalent_up_to: shape mismatch");
    if (!A.exact && A.precision < m_max)
        throw input_error("weakly_equivalent_up_to: entries not known mod p^m_max");
    if (!B.exact && B.precision < m_max)
        throw input_error("weakly_equivalent_up_to: entries not known mod p^m_max");
    const unsigned n = A.size();
    WeakEquivalenceReport rep;
    rep.feasible.resize(m_max);
    for (unsigned m = 1; m <= m_max; ++m) {
        std::vector<std::vector<unsigned>> adj(n);
        for (unsigned i = 0; i < n; ++i)
            for (unsigned j = 0; j < n; ++j) {
                Rat br = bracket(A.p, A.entries[i] - B.entries[j], m);
                if (abs(br) <= c * Rat((long)m)) adj[i].push_back(j);
            }
        rep.feasible[m - 1] = perfect_matching(adj, n).has_value();
    }
    return rep;
}

namespace {

// Column slices c^_j(i) = sum_{s>=j} (-1)^{s-j} C(s,j) (t^s/s!) D^s(e_i),
// truncated at series_cap and clipped to the t-window. P_{m,a}(e_i) is the
// plain subsequence sum over j = a mod p^m, so the determinant recursion
// det(S_{m,A}) = sum_B det(S_{m+1,B}) is exact by multilinearity.
struct SliceData {
    std::vector<std::vector<std::vector<Laurent>>> chat;  // chat[j][i] = vector over components
    unsigned n;
    unsigned cap;
};

SliceData build_slices(const DiffModule& Min, unsigned cap, int W) {
    DiffModule M = Min.converted(Convention::ddt);
    const unsigned n = M.rank();
    const unsigned p = M.prime();
    const unsigned np = M.matrix().nparams();
    Radii at = M.radii_at(Rat(0));
    // dhat[s][i] = (t^s/s!) D^s(e_i), clipped.
    std::vector<std::vector<std::vector<Laurent>>> dhat(cap + 1);
    std::vector<std::vector<Laurent>> cur(n);
    for (unsigned i = 0; i < n; ++i) {
        std::vector<Laurent> e(n, Laurent(p, np));
        e[i] = Laurent::constant(p, Scalar::one(p), np);
        cur[i] = e;
    }
    Rat sfac(1);
    bool all_zero_tail = false;
    for (unsigned s = 0; s <= cap; ++s) {
        if (s > 0) {
            sfac *= Rat((long)s);
            for (unsigned i = 0; i < n; ++i) {
                std::vector<Laurent> nxt(n, Laurent(p, np));
                for (unsigned r = 0; r < n; ++r) {
                    Laurent acc = cur[i][r].derived(Convention::ddt);
                    for (unsigned j = 0; j < n; ++j)
                        acc = acc + M.matrix().at(r, j) * cur[i][j];
                    nxt[r] = std::move(acc);
                }
                cur[i] = std::move(nxt);
            }
        }
        dhat[s].resize(n);
        all_zero_tail = true;
        Scalar inv_sfac(p, Rat(1) / sfac);
        for (unsigned i = 0; i < n; ++i) {
            dhat[s][i].resize(n, Laurent(p, np));
            for (unsigned r = 0; r < n; ++r) {
                Laurent x = cur[i][r].shifted_t(int(s)).scaled(inv_sfac);
                x.clip(0, -W, W, at);
                dhat[s][i][r] = std::move(x);
                all_zero_tail &= dhat[s][i][r].is_zero();
            }
        }
        if (all_zero_tail && s > 0) {
            dhat.resize(s + 1);
            cap = s;
            break;
        }
    }
    SliceData sd;
    sd.n = n;
    sd.cap = cap;
    sd.chat.assign(cap + 1, std::vector<std::vector<Laurent>>(
                                n, std::vector<Laurent>(n, Laurent(p, np))));
    // Rolling binomial row: row[j] = C(s, j).
    std::vector<mpz_class> row(cap + 1, 0);
    for (unsigned s = 0; s <= sd.cap; ++s) {
        if (s == 0)
            row[0] = 1;
        else
            for (unsigned j = s; j > 0; --j) row[j] = row[j] + row[j - 1];
        bool skip = true;
        for (unsigned i = 0; i < n && skip; ++i)
            for (unsigned r = 0; r < n && skip; ++r) skip &= dhat[s][i][r].is_zero();
        if (skip) continue;
        for (unsigned j = 0; j <= s; ++j) {
            mpz_class coef = (s - j) % 2 == 0 ? row[j] : -row[j];
            Scalar sc(p, Rat(coef));
            if (sc.is_zero()) continue;
            for (unsigned i = 0; i < n; ++i)
                for (unsigned r = 0; r < n; ++r) {
                    if (dhat[s][i][r].is_zero()) continue;
                    sd.chat[j][i][r] = sd.chat[j][i][r] + dhat[s][i][r].scaled(sc);
                }
        }
    }
    return sd;
}

// Column i of S_{m,A_i}: subsequence sum of slices over j = a mod p^m.
std::vector<Laurent> column(const SliceData& sd, unsigned p, unsigned m, const mpz_class& a,
                            unsigned i) {
    mpz_class pm = pow_z(p, m);
    std::vector<Laurent> col(sd.n, Laurent(p, sd.chat[0][i][0].nparams()));
    for (unsigned j = 0; j <= sd.cap; ++j) {
        if (mpz_class(j) % pm != a % pm) continue;
        for (unsigned r = 0; r < sd.n; ++r) col[r] = col[r] + sd.chat[j][i][r];
    }
    return col;
}

Laurent det_of_columns(const std::vector<std::vector<Laurent>>& cols, unsigned p, unsigned np) {
    const unsigned n = static_cast<unsigned>(cols.size());
    LMat A(n, n, p, np);
    for (unsigned c = 0; c < n; ++c)
        for (unsigned r = 0; r < n; ++r) A.at(r, c) = cols[c][r];
    return A.det();
}

Val constant_term_signal(const Laurent& d) {
    Laurent::Key zero(1 + d.nparams(), 0);
    Scalar c = d.coeff(zero);
    return c.valuation();
}

}  // namespace

RecoveredExponent recover_exponent(const DiffModule& M, const LogRadius& j_lo,
                                   const LogRadius& j_hi, unsigned m, unsigned budget) {
    const unsigned p = M.prime();
    const unsigned n = M.rank();
    if (m == 0 || m > 12) throw input_error("recover_exponent: level m out of range");
    if (!(j_lo < j_hi)) throw input_error("recover_exponent: empty interval");
    // Regularity certificate on J: f_1 = 0 exactly or bracketed below the
    // pushforward resolution.
    for (const LogRadius& r : {j_lo, j_hi}) {
        auto radii = newton_radii(M, r, 3);
        Rat cap = Rat(1, (long)(p - 1)) / Rat((long)(p * p));
        cap.canonicalize();
        if (!(radii[0].upper <= cap))
            throw certification_error("recover_exponent: module not certified regular on J");
    }
    unsigned cap = unsigned(std::min<unsigned long>(
        (unsigned long)(m + 2) * (unsigned long)pow_z(p, m - 1).get_ui() * (p - 1), 600));
    SliceData sd = build_slices(M, cap, 48);

    RecoveredExponent out;
    out.series_cap = sd.cap;
    const unsigned np = M.matrix().nparams();

    // DFS over levels and coordinates, candidates ranked by signal valuation.
    std::vector<mpz_class> A(n, 0);
    std::vector<std::vector<Laurent>> cols(n);
    for (unsigned i = 0; i < n; ++i) cols[i] = column(sd, p, 0, 0, i);
    Laurent det_prev = det_of_columns(cols, p, np);
    {
        Val base = constant_term_signal(det_prev);
        if (base.is_inf())
            throw certification_error("recover_exponent: level-0 determinant degenerate");
    }
    unsigned visited = 0;
    Rat thresh = Rat((long)m + 3);

    std::function<bool(unsigned)> solve_level = [&](unsigned level) -> bool {
        if (level > m) return true;
        // Identity check: det(S_{level-1,A}) = sum over per-column refinements.
        mpz_class pl = pow_z(p, level - 1);
        {
            std::vector<unsigned> digit(n, 0);
            Laurent sum(p, np);
            std::vector<std::vector<Laurent>> work = cols;
            std::function<void(unsigned)> rec = [&](unsigned c) {
                if (c == n) {
                    sum = sum + det_of_columns(work, p, np);
                    return;
                }
                for (unsigned d = 0; d < p; ++d) {
                    work[c] = column(sd, p, level, A[c] + mpz_class(d) * pl, c);
                    rec(c + 1);
                }
                work[c] = cols[c];
            };
            rec(0);
            if (!(sum == det_prev))
                throw std::logic_error("determinant recursion identity violated");
        }
        out.identity_verified = true;

        // Refine each coordinate greedily with backtracking.
        std::function<bool(unsigned)> refine = [&](unsigned coord) -> bool {
            if (coord == n) {
                Val sig = constant_term_signal(det_prev);
                out.signals.push_back(sig.is_inf() ? Rat(1000000) : sig.finite());
                return solve_level(level + 1);
            }
            // Rank candidates by signal of the mixed det.
            std::vector<std::pair<Val, unsigned>> ranked;
            std::vector<std::vector<Laurent>> saved = cols;
            for (unsigned d = 0; d < p; ++d) {
                cols[coord] = column(sd, p, level, A[coord] + mpz_class(d) * pl, coord);
                Val sig = constant_term_signal(det_of_columns(cols, p, np));
                ranked.emplace_back(sig, d);
            }
            cols = saved;
            std::stable_sort(ranked.begin(), ranked.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            for (const auto& [sig, d] : ranked) {
                if (sig.is_inf() || sig > Val(thresh)) break;  // degenerate
                if (++visited > budget)
                    throw certification_error("recover_exponent: backtracking budget exhausted");
                mpz_class oldA = A[coord];
                auto old_col = cols[coord];
                Laurent old_det = det_prev;
                A[coord] = A[coord] + mpz_class(d) * pl;
                cols[coord] = column(sd, p, level, A[coord], coord);
                det_prev = det_of_columns(cols, p, np);
                if (refine(coord + 1)) return true;
                A[coord] = oldA;
                cols[coord] = old_col;
                det_prev = old_det;
            }
            return false;
        };
        return refine(0);
    };
    if (!solve_level(1))
        throw certification_error(
            "recover_exponent: all cosets degenerate at some level (dead end after backtracking)");

    out.tuple.p = p;
    out.tuple.exact = false;
    out.tuple.precision = m;
    for (unsigned i = 0; i < n; ++i) out.tuple.entries.push_back(Rat(A[i]));
    return out;
}

std::string bridge_verdict_str(BridgeVerdict v) {
    switch (v) {
        case BridgeVerdict::equivalent: return "equivalent";
        case BridgeVerdict::not_equivalent: return "not-equivalent";
        default: return "undecided";
    }
}

BridgeResult bridge_extend(const ExponentTuple& A, const ExponentTuple& B,
                           bool non_liouville_certified, unsigned m_levels, long shift_bound) {
    BridgeResult res;
    if (!A.exact || !non_liouville_certified) {
        res.verdict = BridgeVerdict::undecided;
        res.reason = "uncertified non-Liouville input";
        return res;
    }
    if (B.exact) {
        auto match = equivalent(A, B, shift_bound);
        if (match) {
            auto weak = weakly_equivalent_up_to(A, B, m_levels, Rat(1));
            res.verdict = BridgeVerdict::equivalent;
            res.matching = match;
            res.reason = weak.all_feasible()
                             ? "integer-shift matching; weak certificates feasible at all levels"
                             : "integer-shift matching";
        } else {
            res.verdict = BridgeVerdict::not_equivalent;
            res.reason = "no permutation matches entries up to integer shifts";
        }
        return res;
    }
    // Residue-level B: weak certificates at the working precision only.
    unsigned mm = std::min(m_levels, B.precision);
    auto weak = weakly_equivalent_up_to(A, B, mm, Rat(1));
    if (!weak.all_feasible()) {
        res.verdict = BridgeVerdict::not_equivalent;
        res.reason = "weak-equivalence certificate fails at some level <= " + std::to_string(mm);
    } else {
        res.verdict = BridgeVerdict::undecided;
        res.reason = "residue-level data consistent; equivalence needs exact entries";
    }
    return res;
}

}  // namespace padic
