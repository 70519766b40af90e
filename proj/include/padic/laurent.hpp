#pragma once

#include <map>
#include <vector>

#include "padic/scalar.hpp"

namespace padic {

// Log-radius r >= 0 meaning rho = p^(-r); r = 0 is the outer boundary rho = 1.
using LogRadius = Rat;

// Evaluation point in log coordinates: one radius for t plus one per parameter.
struct Radii {
    LogRadius t;
    std::vector<LogRadius> params;

    Radii() : t(0) {}
    explicit Radii(LogRadius rt) : t(std::move(rt)) {}
    Radii(LogRadius rt, std::vector<LogRadius> ps) : t(std::move(rt)), params(std::move(ps)) {}
};

enum class Convention { ddt, t_ddt };

std::string convention_str(Convention c);
Convention parse_convention(const std::string& s);

// Finite Laurent polynomial / truncated Laurent series over K in t and
// optional parameter variables x_1..x_k. Term key = [i, j_1, .., j_k].
// The Gauss valuation at (r, r_1..r_k) is min over terms of
// val(coeff) + i*r + sum j_l*r_l, exact (log form of |x|_alpha = sup |x_i| alpha^i).
class Laurent {
public:
    using Key = std::vector<int>;

    Laurent() : p_(0), nparams_(0) {}
    Laurent(unsigned p, unsigned nparams = 0) : p_(p), nparams_(nparams) {}

    static Laurent zero(unsigned p, unsigned nparams = 0) { return Laurent(p, nparams); }
    static Laurent constant(unsigned p, const Scalar& c, unsigned nparams = 0);
    static Laurent monomial(unsigned p, const Scalar& c, int t_exp, unsigned nparams = 0);
    // Monomial with full exponent vector [i, j_1..j_k].
    static Laurent monomial_multi(unsigned p, const Scalar& c, const Key& exps);
    static Laurent t_power(unsigned p, int k, unsigned nparams = 0) {
        return monomial(p, Scalar::one(p), k, nparams);
    }

    unsigned prime() const { return p_; }
    unsigned nparams() const { return nparams_; }
    bool is_zero() const { return terms_.empty(); }
    bool exact() const { return exact_; }
    void mark_inexact() { exact_ = false; }
    size_t term_count() const { return terms_.size(); }
    const std::map<Key, Scalar>& terms() const { return terms_; }

    void set(const Key& k, const Scalar& c);
    void add_term(const Key& k, const Scalar& c);
    Scalar coeff(const Key& k) const;
    Scalar coeff_t(int i) const;  // univariate convenience

    // Support window in variable `var` (0 = t); {0,0} for zero element.
    std::pair<int, int> window(unsigned var = 0) const;

    Laurent operator-() const;
    Laurent operator+(const Laurent& o) const;
    Laurent operator-(const Laurent& o) const;
    Laurent operator*(const Laurent& o) const;
    Laurent scaled(const Scalar& c) const;
    Laurent shifted_t(int k) const;  // multiply by t^k
    bool operator==(const Laurent& o) const;

    // Reference kernel and OpenMP kernel; operator* dispatches on size.
    static Laurent mul_serial(const Laurent& a, const Laurent& b);
    static Laurent mul_parallel(const Laurent& a, const Laurent& b);

    // Exact Gauss valuation at the given radii; infinity for 0.
    Val gauss_valuation(const Radii& at) const;
    Val gauss_valuation(const LogRadius& r) const { return gauss_valuation(Radii(r)); }

    // Termwise derivation in t for the chosen convention; exact.
    Laurent derived(Convention conv) const;

    // Substitute variable `var` (0 = t, 1.. = params) by g. Negative powers of
    // g expand by geometric series; g must have a unique dominant monomial at
    // `at`. Returns (value, guarantee): dropped terms have valuation > the
    // guarantee (infinity when exact). Throws certification_error if the
    // expansion depth budget cannot reach `target_guarantee` and input_error
    // if g has no dominant monomial.
    std::pair<Laurent, Val> substituted(unsigned var, const Laurent& g, const Radii& at,
                                        const Val& target_guarantee,
                                        long depth_budget = 256) const;

    // Inverse via dominant-monomial geometric expansion, same contract.
    std::pair<Laurent, Val> inverted(const Radii& at, const Val& target_guarantee,
                                     long depth_budget = 256) const;

    // Clip support to [lo, hi] in variable var; returns min valuation of
    // dropped terms at `at` (infinity if nothing dropped).
    Val clip(unsigned var, int lo, int hi, const Radii& at);

    // Drop terms whose valuation at `at` exceeds cutoff (working-precision
    // truncation); returns the min dropped valuation (> cutoff by contract).
    Val clip_valuation(const Radii& at, const Rat& cutoff);

    // Substitute a scalar for parameter `param_idx` (1-based over params);
    // result has one fewer parameter.
    Laurent eval_param(unsigned param_idx, const Scalar& value) const;
    // Reinterpret with a different parameter count (embedding); exponents of
    // missing parameters are zero.
    Laurent with_nparams(unsigned k) const;

    // Exact division (throws std::logic_error if not exactly divisible).
    static Laurent divide_exact(const Laurent& a, const Laurent& b);

    std::string str() const;  // human-readable, t and x1..xk

private:
    void require_compat(const Laurent& o) const;
    Key key_t(int i) const {
        Key k(1 + nparams_, 0);
        k[0] = i;
        return k;
    }

    unsigned p_;
    unsigned nparams_;
    std::map<Key, Scalar> terms_;
    bool exact_ = true;
};

// Parallel map over an index range honoring PADIC_ANNULUS_THREADS; results
// are written by index so assembly is deterministic. Serial reference kept
// for testing.
int configured_threads();

}  // namespace padic
