#include "padic/diffmod.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace padic {

LMat LMat::identity(unsigned n, unsigned p, unsigned nparams) {
    LMat I(n, n, p, nparams);
    for (unsigned i = 0; i < n; ++i)
        I.at(i, i) = Laurent::constant(p, Scalar::one(p), nparams);
    return I;
}

LMat LMat::operator+(const LMat& o) const {
    LMat r = *this;
    for (size_t i = 0; i < e_.size(); ++i) r.e_[i] = r.e_[i] + o.e_[i];
    return r;
}

LMat LMat::operator-(const LMat& o) const {
    LMat r = *this;
    for (size_t i = 0; i < e_.size(); ++i) r.e_[i] = r.e_[i] - o.e_[i];
    return r;
}

LMat LMat::operator-() const {
    LMat r = *this;
    for (auto& x : r.e_) x = -x;
    return r;
}

LMat LMat::operator*(const LMat& o) const {
    if (cols_ != o.rows_) throw std::logic_error("LMat dimension mismatch");
    LMat r(rows_, o.cols_, p_, nparams_);
    const long total = long(rows_) * o.cols_;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(configured_threads()) if (total >= 16)
#endif
    for (long idx = 0; idx < total; ++idx) {
        unsigned i = unsigned(idx / o.cols_), j = unsigned(idx % o.cols_);
        Laurent acc(p_, nparams_);
        for (unsigned k = 0; k < cols_; ++k) acc = acc + at(i, k) * o.at(k, j);
        r.at(i, j) = std::move(acc);
    }
    return r;
}

LMat LMat::transposed() const {
    LMat r(cols_, rows_, p_, nparams_);
    for (unsigned i = 0; i < rows_; ++i)
        for (unsigned j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
}

LMat LMat::derived(Convention conv) const {
    LMat r = *this;
    for (auto& x : r.e_) x = x.derived(conv);
    return r;
}

LMat LMat::scaled(const Laurent& f) const {
    LMat r = *this;
    for (auto& x : r.e_) x = x * f;
    return r;
}

bool LMat::is_zero() const {
    for (const auto& x : e_)
        if (!x.is_zero()) return false;
    return true;
}

Val LMat::min_valuation(const Radii& at) const {
    Val best = Val::infinity();
    for (const auto& x : e_) best = min(best, x.gauss_valuation(at));
    return best;
}

Laurent LMat::det() const {
    if (rows_ != cols_) throw std::logic_error("det of non-square matrix");
    const unsigned n = rows_;
    if (n == 0) return Laurent::constant(p_, Scalar::one(p_), nparams_);
    std::vector<Laurent> a = e_;
    auto A = [&](unsigned i, unsigned j) -> Laurent& { return a[size_t(i) * n + j]; };
    int sign = 1;
    Laurent prev = Laurent::constant(p_, Scalar::one(p_), nparams_);
    for (unsigned k = 0; k + 1 < n; ++k) {
        if (A(k, k).is_zero()) {
            unsigned swap_row = k + 1;
            while (swap_row < n && A(swap_row, k).is_zero()) ++swap_row;
            if (swap_row == n) return Laurent(p_, nparams_);  // singular
            for (unsigned j = 0; j < n; ++j) std::swap(A(k, j), A(swap_row, j));
            sign = -sign;
        }
        for (unsigned i = k + 1; i < n; ++i)
            for (unsigned j = k + 1; j < n; ++j) {
                Laurent num = A(k, k) * A(i, j) - A(i, k) * A(k, j);
                A(i, j) = Laurent::divide_exact(num, prev);
            }
        prev = A(k, k);
    }
    Laurent d = A(n - 1, n - 1);
    if (sign < 0) d = -d;
    return d;
}

LMat::CramerFF LMat::cramer_ff(const std::vector<Laurent>& b) const {
    if (rows_ != cols_ || b.size() != rows_) throw std::logic_error("cramer_ff shape");
    const unsigned n = rows_;
    CramerFF out;
    if (n == 0) {
        out.det = Laurent::constant(p_, Scalar::one(p_), nparams_);
        return out;
    }
    // Bareiss forward elimination on [A | b].
    std::vector<Laurent> a(size_t(n) * (n + 1), Laurent(p_, nparams_));
    auto A = [&](unsigned i, unsigned j) -> Laurent& { return a[size_t(i) * (n + 1) + j]; };
    for (unsigned i = 0; i < n; ++i) {
        for (unsigned j = 0; j < n; ++j) A(i, j) = at(i, j);
        A(i, n) = b[i];
    }
    int sign = 1;
    Laurent prev = Laurent::constant(p_, Scalar::one(p_), nparams_);
    for (unsigned k = 0; k + 1 < n; ++k) {
        if (A(k, k).is_zero()) {
            unsigned sr = k + 1;
            while (sr < n && A(sr, k).is_zero()) ++sr;
            if (sr == n) {
                out.det = Laurent(p_, nparams_);
                return out;  // singular
            }
            for (unsigned j = 0; j <= n; ++j) std::swap(A(k, j), A(sr, j));
            sign = -sign;
        }
        for (unsigned i = k + 1; i < n; ++i)
            for (unsigned j = k + 1; j <= n; ++j) {
                Laurent num = A(k, k) * A(i, j) - A(i, k) * A(k, j);
                A(i, j) = Laurent::divide_exact(num, prev);
            }
        prev = A(k, k);
    }
    Laurent det = A(n - 1, n - 1);
    if (det.is_zero()) {
        out.det = det;
        return out;
    }
    // Fraction-free back substitution: N_i * A(i,i) = A(i,n)*det - sum_{j>i} A(i,j)*N_j.
    out.num.assign(n, Laurent(p_, nparams_));
    out.num[n - 1] = A(n - 1, n);
    for (unsigned ii = n - 1; ii-- > 0;) {
        Laurent acc = A(ii, n) * det;
        for (unsigned j = ii + 1; j < n; ++j) acc = acc - A(ii, j) * out.num[j];
        out.num[ii] = Laurent::divide_exact(acc, A(ii, ii));
    }
    if (sign < 0) {
        det = -det;
        for (auto& x : out.num) x = -x;
    }
    out.det = det;
    return out;
}

unsigned LMat::rank_ff() const {
    std::vector<Laurent> a = e_;
    unsigned n = rows_, m = cols_;
    auto A = [&](unsigned i, unsigned j) -> Laurent& { return a[size_t(i) * m + j]; };
    unsigned rank = 0;
    Laurent prev = Laurent::constant(p_, Scalar::one(p_), nparams_);
    for (unsigned col = 0; col < m && rank < n; ++col) {
        unsigned piv = rank;
        while (piv < n && A(piv, col).is_zero()) ++piv;
        if (piv == n) continue;
        for (unsigned j = 0; j < m; ++j) std::swap(A(rank, j), A(piv, j));
        for (unsigned i = rank + 1; i < n; ++i)
            for (unsigned j = col + 1; j < m; ++j) {
                Laurent num = A(rank, col) * A(i, j) - A(i, col) * A(rank, j);
                A(i, j) = Laurent::divide_exact(num, prev);
            }
        for (unsigned i = rank + 1; i < n; ++i) A(i, col) = Laurent(p_, nparams_);
        prev = A(rank, col);
        ++rank;
    }
    return rank;
}

DiffModule::DiffModule(unsigned p, unsigned rank, Convention conv, Annulus ann, LMat N,
                       std::vector<LogRadius> param_radii)
    : p_(p), rank_(rank), conv_(conv), ann_(std::move(ann)), N_(std::move(N)),
      param_radii_(std::move(param_radii)) {
    if (N_.rows() != rank_ || N_.cols() != rank_)
        throw input_error("connection matrix shape does not match rank");
    if (N_.nparams() != param_radii_.size())
        throw input_error("parameter radii arity mismatch");
    if (ann_.r_min > ann_.r_max) throw input_error("empty annulus");
}

DiffModule DiffModule::converted(Convention target) const {
    if (target == conv_) return *this;
    LMat M = N_;
    for (unsigned i = 0; i < rank_; ++i)
        for (unsigned j = 0; j < rank_; ++j)
            M.at(i, j) = M.at(i, j).shifted_t(target == Convention::ddt ? -1 : 1);
    return DiffModule(p_, rank_, target, ann_, std::move(M), param_radii_);
}

DiffModule DiffModule::dual() const {
    return DiffModule(p_, rank_, conv_, ann_, -N_.transposed(), param_radii_);
}

DiffModule DiffModule::tensor(const DiffModule& o) const {
    if (conv_ != o.conv_) throw input_error("tensor: mismatched conventions");
    if (p_ != o.p_) throw input_error("tensor: mixed primes");
    if (!(ann_.r_min == o.ann_.r_min && ann_.r_max == o.ann_.r_max))
        throw input_error("tensor: mismatched annuli");
    unsigned n1 = rank_, n2 = o.rank_;
    LMat T(n1 * n2, n1 * n2, p_, N_.nparams());
    for (unsigned i = 0; i < n1; ++i)
        for (unsigned k = 0; k < n1; ++k)
            for (unsigned j = 0; j < n2; ++j)
                for (unsigned l = 0; l < n2; ++l) {
                    Laurent x(p_, N_.nparams());
                    if (j == l) x = x + N_.at(i, k);
                    if (i == k) x = x + o.N_.at(j, l);
                    T.at(i * n2 + j, k * n2 + l) = std::move(x);
                }
    return DiffModule(p_, n1 * n2, conv_, ann_, std::move(T), param_radii_);
}

DiffModule DiffModule::direct_sum(const DiffModule& a, const DiffModule& b) {
    if (a.conv_ != b.conv_ || a.p_ != b.p_) throw input_error("direct_sum: mismatch");
    unsigned n = a.rank_ + b.rank_;
    LMat S(n, n, a.p_, a.N_.nparams());
    for (unsigned i = 0; i < a.rank_; ++i)
        for (unsigned j = 0; j < a.rank_; ++j) S.at(i, j) = a.N_.at(i, j);
    for (unsigned i = 0; i < b.rank_; ++i)
        for (unsigned j = 0; j < b.rank_; ++j) S.at(a.rank_ + i, a.rank_ + j) = b.N_.at(i, j);
    return DiffModule(a.p_, n, a.conv_, a.ann_, std::move(S), a.param_radii_);
}

DiffModule DiffModule::conjugated(const LMat& G, const LMat& G_inv) const {
    LMat M = G_inv * (N_ * G + G.derived(conv_));
    return DiffModule(p_, rank_, conv_, ann_, std::move(M), param_radii_);
}

bool DiffModule::operator==(const DiffModule& o) const {
    return p_ == o.p_ && rank_ == o.rank_ && conv_ == o.conv_ && N_ == o.N_;
}

std::vector<LMat> derivation_powers(const DiffModule& M, unsigned S, size_t max_terms) {
    std::vector<LMat> out;
    out.reserve(S);
    const LMat& N = M.matrix();
    LMat cur = N;
    for (unsigned s = 1; s <= S; ++s) {
        if (s > 1) cur = N * cur + cur.derived(M.convention());
        size_t terms = 0;
        for (unsigned i = 0; i < cur.rows(); ++i)
            for (unsigned j = 0; j < cur.cols(); ++j) terms += cur.at(i, j).term_count();
        if (terms > max_terms)
            throw input_error("derivation_powers: window overflow beyond configured bounds");
        out.push_back(cur);
    }
    return out;
}

namespace {

// Columns v, Dv, ..., D^{k-1}v as an n x k matrix.
LMat iterate_vector(const DiffModule& M, const std::vector<Laurent>& v, unsigned k) {
    unsigned n = M.rank();
    LMat B(n, k, M.prime(), M.matrix().nparams());
    std::vector<Laurent> cur = v;
    for (unsigned c = 0; c < k; ++c) {
        for (unsigned i = 0; i < n; ++i) B.at(i, c) = cur[i];
        if (c + 1 == k) break;
        std::vector<Laurent> nxt(n, Laurent(M.prime(), M.matrix().nparams()));
        for (unsigned i = 0; i < n; ++i) {
            Laurent acc = cur[i].derived(M.convention());
            for (unsigned j = 0; j < n; ++j) acc = acc + M.matrix().at(i, j) * cur[j];
            nxt[i] = std::move(acc);
        }
        cur = std::move(nxt);
    }
    return B;
}

std::vector<Laurent> apply_D(const DiffModule& M, const std::vector<Laurent>& v) {
    unsigned n = M.rank();
    std::vector<Laurent> nxt(n, Laurent(M.prime(), M.matrix().nparams()));
    for (unsigned i = 0; i < n; ++i) {
        Laurent acc = v[i].derived(M.convention());
        for (unsigned j = 0; j < n; ++j) acc = acc + M.matrix().at(i, j) * v[j];
        nxt[i] = std::move(acc);
    }
    return nxt;
}

}  // namespace

CyclicData cyclic_data(const DiffModule& M, const LogRadius& r_probe, unsigned random_budget,
                       uint64_t seed) {
    const unsigned n = M.rank();
    const unsigned p = M.prime();
    const unsigned np = M.matrix().nparams();
    auto attempt = [&](const std::vector<Laurent>& v) -> std::optional<CyclicData> {
        LMat B = iterate_vector(M, v, n);
        std::vector<Laurent> vn = v;
        for (unsigned s = 0; s < n; ++s) vn = apply_D(M, vn);
        LMat::CramerFF cf = B.cramer_ff(vn);
        if (cf.det.is_zero()) return std::nullopt;
        CyclicData cd;
        cd.v = v;
        cd.wronskian = cf.det;
        cd.cramer_num = std::move(cf.num);
        return cd;
    };

    // Deterministic ladder: e_1 alone, then v = e_1 + t^{c} e_2 + t^{2c} e_3 + ...
    {
        std::vector<Laurent> v(n, Laurent(p, np));
        v[0] = Laurent::constant(p, Scalar::one(p), np);
        if (auto cd = attempt(v)) return *cd;
    }
    static const int shifts[] = {0, 1, -1, 2, -2, 3, -3};
    for (int c : shifts) {
        std::vector<Laurent> v(n, Laurent(p, np));
        for (unsigned i = 0; i < n; ++i) v[i] = Laurent::t_power(p, c * int(i), np);
        if (auto cd = attempt(v)) return *cd;
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> coef(-3, 3), expo(-2, 2);
    for (unsigned trial = 0; trial < random_budget; ++trial) {
        std::vector<Laurent> v(n, Laurent(p, np));
        for (unsigned i = 0; i < n; ++i) {
            int c = coef(rng);
            if (c == 0 && i == 0) c = 1;
            if (c != 0) v[i] = Laurent::monomial(p, Scalar(p, Rat(c)), expo(rng), np);
        }
        if (auto cd = attempt(v)) return *cd;
    }
    throw certification_error("cyclic vector search exhausted (all candidates degenerate)");
    (void)r_probe;
}

std::pair<std::vector<Laurent>, TwistedPoly> cyclic_vector(const DiffModule& M,
                                                           const LogRadius& r_probe,
                                                           const Rat& guarantee) {
    CyclicData cd = cyclic_data(M, r_probe);
    Radii at = M.radii_at(r_probe);
    auto [winv, wg] = cd.wronskian.inverted(at, Val(guarantee + Rat(16)));
    TwistedPoly P;
    P.p = M.prime();
    P.conv = M.convention();
    P.a.resize(M.rank(), Laurent(M.prime(), M.matrix().nparams()));
    for (unsigned i = 0; i < M.rank(); ++i) P.a[i] = cd.cramer_num[i] * winv;
    return {cd.v, P};
}

DiffModule pullback(const DiffModule& M, const Laurent& g, Convention new_conv,
                    const Annulus& new_annulus, const LogRadius& r_u_probe,
                    const Rat& guarantee) {
    DiffModule Md = M.converted(Convention::ddt);
    const unsigned n = M.rank();
    Radii at(r_u_probe, std::vector<LogRadius>(M.param_radii()));
    Laurent gp = g.derived(Convention::ddt);
    LMat out(n, n, M.prime(), M.matrix().nparams());
    for (unsigned i = 0; i < n; ++i)
        for (unsigned j = 0; j < n; ++j) {
            auto [sv, sg] = Md.matrix().at(i, j).substituted(0, g, at, Val(guarantee));
            out.at(i, j) = sv * gp;
        }
    DiffModule res(M.prime(), n, Convention::ddt, new_annulus, std::move(out),
                   M.param_radii());
    return res.converted(new_conv);
}

DiffModule frobenius_pushforward(const DiffModule& M) {
    const unsigned p = M.prime();
    const unsigned n = M.rank();
    const unsigned np = M.matrix().nparams();
    DiffModule Md = M.converted(Convention::ddt);
    // Basis e_i t^j, 0 <= j < p, over the u-annulus, u = t^p:
    //   d/du (e_i t^j) = (1/(p t^{p-1})) [ sum_k N_{ki} t^j e_k + j t^{j-1} e_i ].
    // A monomial c t^a e_k maps to c u^q (e_k t^{j'}) with a = p q + j'.
    LMat out(n * p, n * p, p, np);
    auto slot = [&](unsigned k, int jp) { return k * p + unsigned(jp); };
    auto deposit = [&](unsigned row_k, unsigned col, const Laurent& f, int textra) {
        // f * t^textra expanded into u^q t^{j'} pieces onto rows (row_k, j').
        for (const auto& [key, c] : f.terms()) {
            long a = key[0] + textra;
            long q = a >= 0 ? a / p : -((-a + p - 1) / p);
            int jp = int(a - q * long(p));
            Laurent::Key kk = key;
            kk[0] = int(q);
            out.at(slot(row_k, jp), col).add_term(kk, c);
        }
    };
    Scalar inv_p = Scalar(p, Rat(1, (long)p));
    for (unsigned i = 0; i < n; ++i)
        for (unsigned j = 0; j < p; ++j) {
            unsigned col = slot(i, int(j));
            for (unsigned k = 0; k < n; ++k)
                deposit(k, col, Md.matrix().at(k, i).scaled(inv_p), int(j) - int(p) + 1);
            if (j > 0) {
                Laurent jj = Laurent::constant(p, Scalar(p, Rat((long)j, (long)p)), np);
                deposit(i, col, jj, int(j) - int(p));
            }
        }
    return DiffModule(p, n * p, Convention::ddt, Md.annulus().scaled(Rat((long)p)),
                      std::move(out), M.param_radii());
}

unsigned frobenius_lift_exponent(const Laurent& phi, const Annulus& ann) {
    const unsigned p = phi.prime();
    // phi = t^q + u: locate the unit monomial t^q with q a power of p.
    for (unsigned q = p;; q *= p) {
        Laurent u = phi - Laurent::t_power(p, int(q), phi.nparams());
        Radii lo(ann.r_min), hi(ann.r_max);
        lo.params.assign(phi.nparams(), Rat(0));
        hi.params.assign(phi.nparams(), Rat(0));
        if (u.is_zero()) return q;
        if (u.gauss_valuation(lo) > Val(Rat(0)) && u.gauss_valuation(hi) > Val(Rat(0))) return q;
        if (q > 1u << 20) break;
    }
    throw input_error("phi is not a Frobenius lift t^q + u with |u| < 1 on the annulus");
}

bool verify_frobenius_structure(const DiffModule& M, const Laurent& phi, const LMat& A,
                                const Rat& tol_valuation, std::string* diag) {
    unsigned q = frobenius_lift_exponent(phi, M.annulus());
    (void)q;
    const unsigned n = M.rank();
    Radii at(M.annulus().r_max, std::vector<LogRadius>(M.param_radii()));
    Val target(tol_valuation + Rat(8));
    LMat Nphi(n, n, M.prime(), M.matrix().nparams());
    for (unsigned i = 0; i < n; ++i)
        for (unsigned j = 0; j < n; ++j)
            Nphi.at(i, j) = M.matrix().at(i, j).substituted(0, phi, at, target).first;
    Laurent factor = phi.derived(Convention::ddt);
    if (M.convention() == Convention::t_ddt) {
        // t phi'/phi: phi has dominant monomial t^q, invert under the guarantee.
        Laurent tphi = factor.shifted_t(1);
        factor = tphi * phi.inverted(at, target).first;
    }
    LMat residual = A.derived(M.convention()) + M.matrix() * A - (A * Nphi).scaled(factor);
    // Gauss valuations are concave in r, so positivity on the two annulus ends
    // gives positivity across the closed annulus.
    Radii lo(M.annulus().r_min, std::vector<LogRadius>(M.param_radii()));
    Radii hi(M.annulus().r_max, std::vector<LogRadius>(M.param_radii()));
    Val v = min(residual.min_valuation(lo), residual.min_valuation(hi));
    bool ok = v > Val(tol_valuation);
    if (diag) *diag = "residual min valuation " + v.str() + " vs tol " + rat_str(tol_valuation);
    return ok;
}

bool has_polynomial_horizontal_basis(const DiffModule& Min, int W) {
    if (Min.matrix().nparams() > 0) return false;
    DiffModule M = Min.converted(Convention::ddt);
    const unsigned n = M.rank();
    const unsigned p = M.prime();
    int span = 0;
    for (unsigned i = 0; i < n; ++i)
        for (unsigned j = 0; j < n; ++j) {
            auto w = M.matrix().at(i, j).window(0);
            span = std::max({span, std::abs(w.first), std::abs(w.second)});
        }
    // Unknowns u[i][e], e in [-W, W]; impose every coefficient of D(h) = 0
    // (out-of-window unknowns are structurally zero).
    auto idx = [&](unsigned i, int e) { return size_t(i) * (2 * W + 1) + size_t(e + W); };
    const size_t nu = size_t(n) * (2 * W + 1);
    std::vector<std::vector<Scalar>> rows;
    for (unsigned i = 0; i < n; ++i)
        for (int e = -W - span - 1; e <= W + span; ++e) {
            std::vector<Scalar> row(nu, Scalar::zero(p));
            if (e + 1 >= -W && e + 1 <= W)
                row[idx(i, e + 1)] = row[idx(i, e + 1)] + Scalar(p, Rat(e + 1));
            for (unsigned j = 0; j < n; ++j)
                for (const auto& [k, c] : M.matrix().at(i, j).terms()) {
                    int ep = e - k[0];
                    if (ep >= -W && ep <= W) row[idx(j, ep)] = row[idx(j, ep)] + c;
                }
            bool nz = false;
            for (const auto& s : row) nz |= !s.is_zero();
            if (nz) rows.push_back(std::move(row));
        }
    // Kernel over K.
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
    std::vector<std::vector<Scalar>> kernel;
    for (size_t col = 0; col < nu; ++col) {
        if (pivot_of_col[col] >= 0) continue;
        std::vector<Scalar> v(nu, Scalar::zero(p));
        v[col] = Scalar::one(p);
        for (size_t c2 = 0; c2 < nu; ++c2)
            if (pivot_of_col[c2] >= 0) v[c2] = -rows[size_t(pivot_of_col[c2])][col];
        kernel.push_back(std::move(v));
        if (kernel.size() >= 2 * n + 4) break;  // enough candidates
    }
    if (kernel.size() < n) return false;
    // A basis needs n sections with invertible section matrix over K(t):
    // test determinants of n-subsets (bounded search).
    auto section = [&](const std::vector<Scalar>& v) {
        std::vector<Laurent> s(n, Laurent(p));
        for (unsigned i = 0; i < n; ++i)
            for (int e = -W; e <= W; ++e)
                if (!v[idx(i, e)].is_zero()) s[i].add_term({e}, v[idx(i, e)]);
        return s;
    };
    std::vector<size_t> pick(n);
    std::function<bool(size_t, size_t)> search = [&](size_t at2, size_t start) -> bool {
        if (at2 == n) {
            LMat S(n, n, p);
            for (unsigned c = 0; c < n; ++c) {
                auto s = section(kernel[pick[c]]);
                for (unsigned i = 0; i < n; ++i) S.at(i, c) = s[i];
            }
            return !S.det().is_zero();
        }
        for (size_t c = start; c < kernel.size() && c < start + 5; ++c) {
            pick[at2] = c;
            if (search(at2 + 1, c + 1)) return true;
        }
        return false;
    };
    return search(0, 0);
}

std::pair<LMat, LMat> random_gauge(unsigned p, unsigned n, std::mt19937_64& rng,
                                   unsigned nparams) {
    LMat G = LMat::identity(n, p, nparams), Ginv = LMat::identity(n, p, nparams);
    std::uniform_int_distribution<int> pick_i(0, int(n) - 1), coef(-2, 2), expo(-1, 1),
        which(0, 2);
    unsigned steps = 2 + n;
    for (unsigned s = 0; s < steps; ++s) {
        int op = which(rng);
        if (op == 0 && n >= 2) {
            // Shear E_{ij}(c t^k): inverse is E_{ij}(-c t^k).
            int i = pick_i(rng), j = pick_i(rng);
            if (i == j) j = (j + 1) % int(n);
            int c = coef(rng);
            if (c == 0) c = 1;
            Laurent f = Laurent::monomial(p, Scalar(p, Rat(c)), expo(rng), nparams);
            LMat E = LMat::identity(n, p, nparams), Einv = E;
            E.at(i, j) = f;
            Einv.at(i, j) = -f;
            G = G * E;
            Ginv = Einv * Ginv;
        } else if (op == 1) {
            // Diagonal rescale by unit c t^k.
            int i = pick_i(rng);
            int c = coef(rng);
            if (c == 0 || c % int(p) == 0) c = 1;
            int k = expo(rng);
            LMat Dm = LMat::identity(n, p, nparams), Dinv = Dm;
            Rat rc(1, c);
            rc.canonicalize();  // two-arg mpq ctor does not normalize signs
            Dm.at(i, i) = Laurent::monomial(p, Scalar(p, Rat(c)), k, nparams);
            Dinv.at(i, i) = Laurent::monomial(p, Scalar(p, rc), -k, nparams);
            G = G * Dm;
            Ginv = Dinv * Ginv;
        } else if (n >= 2) {
            int i = pick_i(rng), j = pick_i(rng);
            if (i == j) continue;
            LMat P(n, n, p, nparams);
            for (unsigned k = 0; k < n; ++k) {
                unsigned kk = k == unsigned(i) ? unsigned(j) : (k == unsigned(j) ? unsigned(i) : k);
                P.at(k, kk) = Laurent::constant(p, Scalar::one(p), nparams);
            }
            G = G * P;
            Ginv = P * Ginv;
        }
    }
    return {G, Ginv};
}

}  // namespace padic
