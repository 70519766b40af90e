#pragma once

#include <vector>

#include "padic/rational.hpp"

namespace padic {

// Element of K = Q_p(pi) with pi^(p-1) = -p, stored as sum c_j pi^j with
// exact rational c_j, 0 <= j <= p-2. Since pi is Eisenstein the representation
// is unique and val(sum c_j pi^j) = min_j (v_p(c_j) + j/(p-1)) holds exactly:
// the fractional parts j/(p-1) are pairwise distinct, so no two terms share a
// valuation and the ultrametric minimum is attained once.
class Scalar {
public:
    Scalar() : p_(0) {}
    explicit Scalar(unsigned p) : p_(p), c_(deg(p)) { check_p(p); }
    Scalar(unsigned p, const Rat& c0) : p_(p), c_(deg(p)) {
        check_p(p);
        c_[0] = c0;
    }

    static Scalar zero(unsigned p) { return Scalar(p); }
    static Scalar one(unsigned p) { return Scalar(p, 1); }
    static Scalar pi(unsigned p) {
        Scalar s(p);
        if (deg(p) < 2) {
            // p = 2: pi = -2 itself.
            s.c_[0] = -2;
        } else {
            s.c_[1] = 1;
        }
        return s;
    }
    static Scalar from_rational(unsigned p, const Rat& q) { return Scalar(p, q); }
    // pi^k for k >= 0, reduced.
    static Scalar pi_pow(unsigned p, unsigned k);

    unsigned prime() const { return p_; }
    bool is_zero() const;
    const std::vector<Rat>& coeffs() const { return c_; }
    const Rat& coeff(size_t j) const { return c_.at(j); }

    // Exact rational if the element lies in Q, else nullopt.
    std::optional<Rat> as_rational() const;

    Scalar operator-() const;
    Scalar operator+(const Scalar& o) const;
    Scalar operator-(const Scalar& o) const;
    Scalar operator*(const Scalar& o) const;
    Scalar operator/(const Scalar& o) const;
    Scalar inverse() const;
    Scalar pow(unsigned long e) const;
    bool operator==(const Scalar& o) const;
    bool operator!=(const Scalar& o) const { return !(*this == o); }

    // Exact valuation in (1/(p-1))Z, +inf for 0; |x| = p^(-valuation).
    Val valuation() const;

    // Text form "c0 + c1*pi + ...", omitting zero terms ("0" for zero).
    std::string str() const;
    static Scalar parse(unsigned p, const std::string& text);

private:
    static size_t deg(unsigned p) { return p - 1; }
    static void check_p(unsigned p) {
        if (p < 2) throw input_error("prime must be >= 2");
    }
    void require_same(const Scalar& o) const {
        if (p_ != o.p_) throw input_error("mixed primes in scalar arithmetic");
    }

    unsigned p_;
    std::vector<Rat> c_;  // length p-1
};

}  // namespace padic
