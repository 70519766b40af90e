#include "padic/rational.hpp"

namespace padic {

Rat parse_rat(const std::string& s) {
    std::string t;
    for (char c : s)
        if (!isspace(static_cast<unsigned char>(c))) t.push_back(c);
    if (t.empty()) throw input_error("empty rational literal");
    try {
        Rat q;
        if (q.set_str(t, 10) != 0) throw input_error("bad rational literal: " + s);
        if (q.get_den() == 0) throw input_error("zero denominator: " + s);
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw input_error("bad rational literal: " + s);
    }
}

std::string rat_str(const Rat& q) {
    return q.get_str();
}

long int_valp(const mpz_class& z, unsigned long p) {
    if (z == 0) throw std::logic_error("int_valp(0)");
    mpz_class n = abs(z), r, q;
    long v = 0;
    for (;;) {
        mpz_fdiv_qr_ui(q.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(), p);
        if (r != 0) return v;
        n = q;
        ++v;
    }
}

long rat_valp(const Rat& q, unsigned long p) {
    if (q == 0) throw std::logic_error("rat_valp(0)");
    long v = 0;
    if (q.get_num() != 0) v += int_valp(q.get_num(), p);
    v -= int_valp(q.get_den(), p);
    return v;
}

}  // namespace padic
