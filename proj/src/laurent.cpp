#include "padic/laurent.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace padic {

std::string convention_str(Convention c) {
    return c == Convention::ddt ? "d/dt" : "t*d/dt";
}

Convention parse_convention(const std::string& s) {
    if (s == "d/dt") return Convention::ddt;
    if (s == "t*d/dt" || s == "t d/dt" || s == "tddt") return Convention::t_ddt;
    throw input_error("unknown derivation convention: " + s);
}

int configured_threads() {
    if (const char* env = std::getenv("PADIC_ANNULUS_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

Laurent Laurent::constant(unsigned p, const Scalar& c, unsigned nparams) {
    return monomial(p, c, 0, nparams);
}

Laurent Laurent::monomial(unsigned p, const Scalar& c, int t_exp, unsigned nparams) {
    Laurent l(p, nparams);
    Key k(1 + nparams, 0);
    k[0] = t_exp;
    l.set(k, c);
    return l;
}

Laurent Laurent::monomial_multi(unsigned p, const Scalar& c, const Key& exps) {
    if (exps.empty()) throw input_error("empty exponent key");
    Laurent l(p, static_cast<unsigned>(exps.size() - 1));
    l.set(exps, c);
    return l;
}

void Laurent::set(const Key& k, const Scalar& c) {
    if (k.size() != 1 + nparams_) throw input_error("exponent arity mismatch");
    if (c.is_zero())
        terms_.erase(k);
    else
        terms_[k] = c;
}

void Laurent::add_term(const Key& k, const Scalar& c) {
    if (k.size() != 1 + nparams_) throw input_error("exponent arity mismatch");
    if (c.is_zero()) return;
    auto it = terms_.find(k);
    if (it == terms_.end()) {
        terms_.emplace(k, c);
    } else {
        it->second = it->second + c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

Scalar Laurent::coeff(const Key& k) const {
    auto it = terms_.find(k);
    return it == terms_.end() ? Scalar::zero(p_) : it->second;
}

Scalar Laurent::coeff_t(int i) const {
    return coeff(key_t(i));
}

std::pair<int, int> Laurent::window(unsigned var) const {
    if (terms_.empty()) return {0, 0};
    int lo = 0, hi = 0;
    bool first = true;
    for (const auto& [k, c] : terms_) {
        int e = k[var];
        if (first) {
            lo = hi = e;
            first = false;
        } else {
            lo = std::min(lo, e);
            hi = std::max(hi, e);
        }
    }
    return {lo, hi};
}

void Laurent::require_compat(const Laurent& o) const {
    if (p_ != o.p_) throw input_error("mixed primes in Laurent arithmetic");
    if (nparams_ != o.nparams_) throw input_error("mixed parameter arity in Laurent arithmetic");
}

Laurent Laurent::operator-() const {
    Laurent r(*this);
    for (auto& [k, c] : r.terms_) c = -c;
    return r;
}

Laurent Laurent::operator+(const Laurent& o) const {
    require_compat(o);
    Laurent r(*this);
    r.exact_ = exact_ && o.exact_;
    for (const auto& [k, c] : o.terms_) r.add_term(k, c);
    return r;
}

Laurent Laurent::operator-(const Laurent& o) const {
    require_compat(o);
    Laurent r(*this);
    r.exact_ = exact_ && o.exact_;
    for (const auto& [k, c] : o.terms_) r.add_term(k, -c);
    return r;
}

Laurent Laurent::mul_serial(const Laurent& a, const Laurent& b) {
    a.require_compat(b);
    Laurent r(a.p_, a.nparams_);
    r.exact_ = a.exact_ && b.exact_;
    Key k(1 + a.nparams_, 0);
    for (const auto& [ka, ca] : a.terms_) {
        for (const auto& [kb, cb] : b.terms_) {
            for (size_t v = 0; v < k.size(); ++v) k[v] = ka[v] + kb[v];
            r.add_term(k, ca * cb);
        }
    }
    return r;
}

Laurent Laurent::mul_parallel(const Laurent& a, const Laurent& b) {
    a.require_compat(b);
    std::vector<const std::pair<const Key, Scalar>*> ta, tb;
    ta.reserve(a.terms_.size());
    tb.reserve(b.terms_.size());
    for (const auto& t : a.terms_) ta.push_back(&t);
    for (const auto& t : b.terms_) tb.push_back(&t);
    const long na = static_cast<long>(ta.size()), nb = static_cast<long>(tb.size());
    std::vector<std::pair<Key, Scalar>> prod(static_cast<size_t>(na * nb),
                                             {Key(), Scalar::zero(a.p_)});
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(configured_threads())
#endif
    for (long idx = 0; idx < na * nb; ++idx) {
        const auto& [ka, ca] = *ta[static_cast<size_t>(idx / nb)];
        const auto& [kb, cb] = *tb[static_cast<size_t>(idx % nb)];
        Key k(ka.size());
        for (size_t v = 0; v < k.size(); ++v) k[v] = ka[v] + kb[v];
        prod[static_cast<size_t>(idx)] = {std::move(k), ca * cb};
    }
    Laurent r(a.p_, a.nparams_);
    r.exact_ = a.exact_ && b.exact_;
    for (auto& [k, c] : prod) r.add_term(k, c);
    return r;
}

Laurent Laurent::operator*(const Laurent& o) const {
    const size_t work = terms_.size() * o.terms_.size();
    if (work >= 4096 && configured_threads() > 1) return mul_parallel(*this, o);
    return mul_serial(*this, o);
}

Laurent Laurent::scaled(const Scalar& c) const {
    Laurent r(p_, nparams_);
    r.exact_ = exact_;
    if (c.is_zero()) return r;
    for (const auto& [k, x] : terms_) r.terms_[k] = x * c;
    return r;
}

Laurent Laurent::shifted_t(int kshift) const {
    Laurent r(p_, nparams_);
    r.exact_ = exact_;
    for (const auto& [k, x] : terms_) {
        Key kk = k;
        kk[0] += kshift;
        r.terms_[kk] = x;
    }
    return r;
}

bool Laurent::operator==(const Laurent& o) const {
    return p_ == o.p_ && nparams_ == o.nparams_ && terms_ == o.terms_;
}

Val Laurent::gauss_valuation(const Radii& at) const {
    if (at.params.size() < nparams_) throw input_error("missing parameter radii");
    Val best = Val::infinity();
    for (const auto& [k, c] : terms_) {
        Rat w = c.valuation().finite();
        w += Rat(k[0]) * at.t;
        for (unsigned l = 0; l < nparams_; ++l) w += Rat(k[1 + l]) * at.params[l];
        best = min(best, Val(w));
    }
    return best;
}

Laurent Laurent::derived(Convention conv) const {
    Laurent r(p_, nparams_);
    r.exact_ = exact_;
    for (const auto& [k, c] : terms_) {
        if (k[0] == 0) continue;
        Key kk = k;
        if (conv == Convention::ddt) kk[0] -= 1;
        r.add_term(kk, c * Scalar(p_, Rat(k[0])));
    }
    return r;
}

std::pair<Laurent, Val> Laurent::inverted(const Radii& at, const Val& target_guarantee,
                                          long depth_budget) const {
    if (is_zero()) throw input_error("inversion of zero");
    // Locate the dominant monomial: unique term of minimal valuation at `at`.
    Val vmin = gauss_valuation(at);
    const Key* dom = nullptr;
    int count = 0;
    for (const auto& [k, c] : terms_) {
        Rat w = c.valuation().finite() + Rat(k[0]) * at.t;
        for (unsigned l = 0; l < nparams_; ++l) w += Rat(k[1 + l]) * at.params[l];
        if (Val(w) == vmin) {
            dom = &k;
            ++count;
        }
    }
    if (count != 1)
        throw input_error("no dominant monomial at the working radius (tie among " +
                          std::to_string(count) + " terms)");
    Scalar dc = terms_.at(*dom);
    // this = m(1 + w), v(w) > 0 at `at`.
    Laurent m_inv(p_, nparams_);
    {
        Key k = *dom;
        for (auto& e : k) e = -e;
        m_inv.set(k, dc.inverse());
    }
    Laurent w = mul_serial(m_inv, *this);
    {
        Key k0(1 + nparams_, 0);
        w.add_term(k0, -Scalar::one(p_));
    }
    if (w.is_zero()) return {m_inv, Val::infinity()};  // exact monomial inverse
    Val dv = w.gauss_valuation(at);
    if (!(dv > Val(Rat(0)))) throw std::logic_error("inversion: dominant term not dominant");
    // (1+w)^-1 = sum (-w)^k; stop when (depth+1)*v(w) reaches the target.
    Laurent acc = constant(p_, Scalar::one(p_), nparams_);
    Laurent pw = constant(p_, Scalar::one(p_), nparams_);
    long depth = 0;
    Val tail = dv;
    // Dropped inverse terms sit at -vmin + k*dv; they exceed the target iff
    // the geometric tail passes target + vmin.
    Val tgt = target_guarantee + vmin;
    while (tail <= tgt) {
        if (++depth > depth_budget)
            throw certification_error("inversion depth budget exhausted before guarantee");
        pw = pw * w;
        pw = -pw;
        if (!tgt.is_inf()) pw.clip_valuation(at, tgt.finite());  // working precision
        acc = acc + pw;
        tail = tail + dv;
    }
    Laurent out = m_inv * acc;
    out.exact_ = false;
    return {out, vmin * Rat(-1) + tail};
}

std::pair<Laurent, Val> Laurent::substituted(unsigned var, const Laurent& g, const Radii& at,
                                             const Val& target_guarantee,
                                             long depth_budget) const {
    if (var > nparams_) throw input_error("substitution variable out of range");
    g.require_compat(*this);
    auto [lo, hi] = window(var);
    Laurent gpow_inv(p_, nparams_);
    Val inv_guarantee = Val::infinity();
    if (lo < 0) {
        // Guarantee needed for g^-1 so that worst power keeps the target.
        Val vg = g.gauss_valuation(at);
        Rat slack = target_guarantee.is_inf() ? Rat(0) : target_guarantee.finite();
        Rat per = slack;
        if (!vg.is_inf()) {
            Rat neg = vg.finite() * Rat(-1);
            if (neg < 0) neg = 0;
            per = per + neg * Rat(-lo) + Rat(1);
        }
        auto inv = g.inverted(at, Val(per), depth_budget);
        gpow_inv = inv.first;
        inv_guarantee = inv.second;
    }
    // Cache powers of g and g^-1.
    std::map<int, Laurent> pow_cache;
    pow_cache[0] = constant(p_, Scalar::one(p_), nparams_);
    auto power = [&](int e) -> const Laurent& {
        auto it = pow_cache.find(e);
        if (it != pow_cache.end()) return it->second;
        Laurent base = e > 0 ? g : gpow_inv;
        int step = e > 0 ? 1 : -1;
        int have = 0;
        for (auto& [k, v] : pow_cache)
            if ((e > 0) == (k > 0) || k == 0)
                if (std::abs(k) <= std::abs(e) && std::abs(k) > std::abs(have)) have = k;
        Laurent acc = pow_cache[have];
        while (have != e) {
            acc = acc * base;
            have += step;
            pow_cache[have] = acc;
        }
        return pow_cache[e];
    };
    Laurent out(p_, nparams_);
    out.exact_ = exact_ && g.exact();
    Val guarantee = inv_guarantee;
    for (const auto& [k, c] : terms_) {
        const Laurent& gp = power(k[var]);
        Key rest = k;
        rest[var] = 0;
        Laurent term = gp.scaled(c);
        bool nontrivial = false;
        for (size_t v = 0; v < rest.size(); ++v) nontrivial |= rest[v] != 0;
        if (nontrivial) term = term * monomial_multi(p_, Scalar::one(p_), rest);
        out = out + term;
    }
    if (!inv_guarantee.is_inf()) out.exact_ = false;
    return {out, guarantee};
}

Val Laurent::clip(unsigned var, int lo, int hi, const Radii& at) {
    Val dropped = Val::infinity();
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (it->first[var] < lo || it->first[var] > hi) {
            Rat w = it->second.valuation().finite() + Rat(it->first[0]) * at.t;
            for (unsigned l = 0; l < nparams_; ++l)
                w += Rat(it->first[1 + l]) * at.params[l];
            dropped = min(dropped, Val(w));
            it = terms_.erase(it);
            exact_ = false;
        } else
            ++it;
    }
    return dropped;
}

Val Laurent::clip_valuation(const Radii& at, const Rat& cutoff) {
    Val dropped = Val::infinity();
    for (auto it = terms_.begin(); it != terms_.end();) {
        Rat w = it->second.valuation().finite() + Rat(it->first[0]) * at.t;
        for (unsigned l = 0; l < nparams_; ++l) w += Rat(it->first[1 + l]) * at.params[l];
        if (w > cutoff) {
            dropped = min(dropped, Val(w));
            it = terms_.erase(it);
            exact_ = false;
        } else
            ++it;
    }
    return dropped;
}

Laurent Laurent::eval_param(unsigned param_idx, const Scalar& value) const {
    if (param_idx < 1 || param_idx > nparams_) throw input_error("parameter index out of range");
    Laurent r(p_, nparams_ - 1);
    r.exact_ = exact_;
    for (const auto& [k, c] : terms_) {
        int e = k[param_idx];
        Scalar coef = c;
        if (e != 0) {
            if (value.is_zero()) {
                if (e < 0) throw input_error("specialization at 0 with negative exponent");
                continue;
            }
            Scalar pw = e > 0 ? value.pow(static_cast<unsigned long>(e))
                              : value.inverse().pow(static_cast<unsigned long>(-e));
            coef = coef * pw;
        }
        Key kk;
        kk.reserve(k.size() - 1);
        for (size_t v = 0; v < k.size(); ++v)
            if (v != param_idx) kk.push_back(k[v]);
        r.add_term(kk, coef);
    }
    return r;
}

Laurent Laurent::with_nparams(unsigned k) const {
    if (k < nparams_) throw input_error("cannot drop parameters implicitly");
    if (k == nparams_) return *this;
    Laurent r(p_, k);
    r.exact_ = exact_;
    for (const auto& [key, c] : terms_) {
        Key kk = key;
        kk.resize(1 + k, 0);
        r.terms_[kk] = c;
    }
    return r;
}

Laurent Laurent::divide_exact(const Laurent& a, const Laurent& b) {
    a.require_compat(b);
    if (b.is_zero()) throw std::logic_error("divide_exact by zero");
    Laurent rem = a, quo(a.p_, a.nparams_);
    quo.exact_ = a.exact_ && b.exact_;
    const auto& blt = *b.terms_.rbegin();  // lex-leading term of divisor
    while (!rem.is_zero()) {
        Key rk = rem.terms_.rbegin()->first;
        Scalar rc = rem.terms_.rbegin()->second;
        Key k(rk.size());
        for (size_t v = 0; v < k.size(); ++v) k[v] = rk[v] - blt.first[v];
        Scalar c = rc / blt.second;
        Laurent m = monomial_multi(a.p_, c, k);
        quo = quo + m;
        rem = rem - mul_serial(m, b);
        if (!rem.is_zero() && !(rem.terms_.rbegin()->first < rk))
            throw std::logic_error("divide_exact: not exactly divisible");
    }
    return quo;
}

std::string Laurent::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : terms_) {
        if (!first) os << " + ";
        os << "(" << c.str() << ")";
        if (k[0] != 0) os << "*t^" << k[0];
        for (unsigned l = 0; l < nparams_; ++l)
            if (k[1 + l] != 0) os << "*x" << (l + 1) << "^" << k[1 + l];
        first = false;
    }
    return os.str();
}

}  // namespace padic
