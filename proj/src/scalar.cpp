#include "padic/scalar.hpp"

#include <sstream>

namespace padic {

namespace {

// Reduce a coefficient vector of length up to 2(p-1)-1 modulo pi^(p-1) = -p.
std::vector<Rat> reduce(unsigned p, std::vector<Rat> c) {
    const size_t d = p - 1;
    for (size_t j = c.size(); j-- > d;) {
        if (c[j] != 0) c[j - d] += c[j] * Rat(-(long)p);
        c[j] = 0;
    }
    c.resize(d);
    return c;
}

// Polynomial arithmetic over Q used by the extended Euclid below.
using Poly = std::vector<Rat>;  // coefficient list, low degree first

void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    trim(r);
    return r;
}

Poly sub(Poly a, const Poly& b) {
    if (b.size() > a.size()) a.resize(b.size());
    for (size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
    trim(a);
    return a;
}

// a = q*b + r with deg r < deg b; b nonzero.
std::pair<Poly, Poly> divmod(Poly a, const Poly& b) {
    Poly q;
    trim(a);
    while (a.size() >= b.size()) {
        size_t k = a.size() - b.size();
        Rat c = a.back() / b.back();
        if (q.size() < k + 1) q.resize(k + 1);
        q[k] += c;
        for (size_t i = 0; i < b.size(); ++i) a[k + i] -= c * b[i];
        trim(a);
    }
    return {q, a};
}

}  // namespace

Scalar Scalar::pi_pow(unsigned p, unsigned k) {
    Scalar r = one(p);
    Scalar b = pi(p);
    for (unsigned i = 0; i < k; ++i) r = r * b;
    return r;
}

bool Scalar::is_zero() const {
    for (const auto& c : c_)
        if (c != 0) return false;
    return true;
}

std::optional<Rat> Scalar::as_rational() const {
    for (size_t j = 1; j < c_.size(); ++j)
        if (c_[j] != 0) return std::nullopt;
    return c_[0];
}

Scalar Scalar::operator-() const {
    Scalar r(*this);
    for (auto& c : r.c_) c = -c;
    return r;
}

Scalar Scalar::operator+(const Scalar& o) const {
    require_same(o);
    Scalar r(*this);
    for (size_t j = 0; j < c_.size(); ++j) r.c_[j] += o.c_[j];
    return r;
}

Scalar Scalar::operator-(const Scalar& o) const {
    require_same(o);
    Scalar r(*this);
    for (size_t j = 0; j < c_.size(); ++j) r.c_[j] -= o.c_[j];
    return r;
}

Scalar Scalar::operator*(const Scalar& o) const {
    require_same(o);
    const size_t d = p_ - 1;
    std::vector<Rat> c(2 * d - 1);
    for (size_t i = 0; i < d; ++i) {
        if (c_[i] == 0) continue;
        for (size_t j = 0; j < d; ++j) {
            if (o.c_[j] == 0) continue;
            c[i + j] += c_[i] * o.c_[j];
        }
    }
    Scalar r(p_);
    r.c_ = reduce(p_, std::move(c));
    return r;
}

Scalar Scalar::inverse() const {
    if (is_zero()) throw input_error("division by zero scalar");
    // Extended Euclid in Q[X] against the minimal polynomial X^(p-1) + p.
    Poly m(p_);
    m[0] = Rat((long)p_);
    m[p_ - 1] = 1;
    Poly a(c_.begin(), c_.end());
    trim(a);
    Poly r0 = m, r1 = a, s0 = {}, s1 = {Rat(1)};
    while (!r1.empty()) {
        auto [q, r2] = divmod(r0, r1);
        Poly s2 = sub(s0, mul(q, s1));
        r0 = std::move(r1);
        r1 = std::move(r2);
        s0 = std::move(s1);
        s1 = std::move(s2);
    }
    // r0 = gcd (a nonzero constant, since m is irreducible and a != 0).
    if (r0.size() != 1) throw std::logic_error("scalar inverse: gcd not constant");
    Scalar out(p_);
    for (size_t j = 0; j < s0.size() && j < out.c_.size(); ++j) out.c_[j] = s0[j] / r0[0];
    return out;
}

Scalar Scalar::operator/(const Scalar& o) const {
    require_same(o);
    return *this * o.inverse();
}

Scalar Scalar::pow(unsigned long e) const {
    Scalar r = one(p_), b = *this;
    while (e) {
        if (e & 1) r = r * b;
        b = b * b;
        e >>= 1;
    }
    return r;
}

bool Scalar::operator==(const Scalar& o) const {
    return p_ == o.p_ && c_ == o.c_;
}

Val Scalar::valuation() const {
    Val best = Val::infinity();
    for (size_t j = 0; j < c_.size(); ++j) {
        if (c_[j] == 0) continue;
        Rat frac((long)j, (long)(p_ - 1));
        frac.canonicalize();  // j may share a factor with p-1 (or be 0)
        Rat v = Rat(rat_valp(c_[j], p_)) + frac;
        best = min(best, Val(v));
    }
    return best;
}

std::string Scalar::str() const {
    std::ostringstream os;
    bool first = true;
    for (size_t j = 0; j < c_.size(); ++j) {
        if (c_[j] == 0) continue;
        if (!first) os << " + ";
        if (j == 0)
            os << rat_str(c_[j]);
        else if (c_[j] == 1)
            os << (j == 1 ? "pi" : "pi^" + std::to_string(j));
        else {
            os << rat_str(c_[j]) << "*pi";
            if (j > 1) os << "^" << j;
        }
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

Scalar Scalar::parse(unsigned p, const std::string& text) {
    Scalar out(p);
    std::string t;
    for (char c : text)
        if (!isspace(static_cast<unsigned char>(c))) t.push_back(c);
    if (t.empty()) throw input_error("empty scalar literal");
    // Split into +/- separated monomials "c", "c*pi", "c*pi^k", "pi", "pi^k".
    size_t i = 0;
    while (i < t.size()) {
        int sign = 1;
        while (i < t.size() && (t[i] == '+' || t[i] == '-')) {
            if (t[i] == '-') sign = -sign;
            ++i;
        }
        size_t j = i;
        while (j < t.size() && t[j] != '+' && t[j] != '-') {
            // keep exponent signs like pi^-1 out of scope; exponents are >= 0
            ++j;
        }
        std::string mono = t.substr(i, j - i);
        if (mono.empty()) throw input_error("bad scalar literal: " + text);
        Rat coef = 1;
        unsigned deg = 0;
        size_t star = mono.find("*pi");
        size_t pip = mono.find("pi");
        if (star != std::string::npos) {
            coef = parse_rat(mono.substr(0, star));
            std::string rest = mono.substr(star + 3);
            if (!rest.empty()) {
                if (rest[0] != '^') throw input_error("bad scalar literal: " + text);
                deg = std::stoul(rest.substr(1));
            } else
                deg = 1;
        } else if (pip == 0) {
            std::string rest = mono.substr(2);
            if (!rest.empty()) {
                if (rest[0] != '^') throw input_error("bad scalar literal: " + text);
                deg = std::stoul(rest.substr(1));
            } else
                deg = 1;
        } else {
            coef = parse_rat(mono);
            deg = 0;
        }
        Scalar term = pi_pow(p, deg);
        Scalar cs(p, coef * sign);
        out = out + cs * term;
        i = j;
    }
    return out;
}

}  // namespace padic
