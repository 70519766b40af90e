#pragma once

#include <gmpxx.h>

#include <compare>
#include <optional>
#include <stdexcept>
#include <string>

namespace padic {

using Rat = mpq_class;

// Error taxonomy shared across the library. input_error maps to CLI exit 1,
// certification_error ("could not certify at this budget") to exit 2.
struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct certification_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Rat rat_of(long n, long d = 1) {
    Rat q(n, d);
    q.canonicalize();
    return q;
}

// Parses "a/b" or "a". Throws input_error on malformed text or zero denominator.
Rat parse_rat(const std::string& s);
std::string rat_str(const Rat& q);

// p-adic valuation of a nonzero integer.
long int_valp(const mpz_class& z, unsigned long p);

// p-adic valuation of a nonzero rational.
long rat_valp(const Rat& q, unsigned long p);

// Value in Q ∪ {+∞}; +∞ encodes the valuation of 0.
class Val {
public:
    Val() : inf_(true) {}
    explicit Val(Rat v) : inf_(false), v_(std::move(v)) {}
    static Val infinity() { return Val(); }

    bool is_inf() const { return inf_; }
    const Rat& finite() const {
        if (inf_) throw std::logic_error("Val: infinite");
        return v_;
    }

    Val operator+(const Val& o) const {
        if (inf_ || o.inf_) return infinity();
        return Val(v_ + o.v_);
    }
    Val operator*(const Rat& c) const {
        if (inf_) return infinity();
        return Val(v_ * c);
    }
    friend Val min(const Val& a, const Val& b) { return a <= b ? a : b; }

    // Total order with +∞ maximal.
    bool operator==(const Val& o) const {
        if (inf_ != o.inf_) return false;
        return inf_ || v_ == o.v_;
    }
    bool operator<(const Val& o) const {
        if (inf_) return false;
        if (o.inf_) return true;
        return v_ < o.v_;
    }
    bool operator<=(const Val& o) const { return *this < o || *this == o; }
    bool operator>(const Val& o) const { return o < *this; }
    bool operator>=(const Val& o) const { return o <= *this; }

    std::string str() const { return inf_ ? "inf" : rat_str(v_); }

private:
    bool inf_;
    Rat v_;
};

}  // namespace padic
