#include "padic/catalog.hpp"

namespace padic {

namespace {

DiffModule trivial_module(unsigned p, unsigned n, const Annulus& ann) {
    return DiffModule(p, n, Convention::ddt, ann, LMat(n, n, p));
}

DiffModule artin_schreier(unsigned p, unsigned m, const std::vector<Rat>& f,
                          const Annulus& ann) {
    // nabla(v) = pi * sum_{i=1..m} f_i t^{-i-1} dt, f_m a unit (default f_m = 1).
    Laurent entry(p);
    std::vector<Rat> coef = f;
    if (coef.empty()) coef.assign(m, Rat(0));
    if (coef.size() != m) throw input_error("artin-schreier: need f_1..f_m");
    if (coef[m - 1] == 0) coef[m - 1] = 1;
    for (unsigned i = 1; i <= m; ++i) {
        if (coef[i - 1] == 0) continue;
        Scalar c = Scalar::pi(p) * Scalar(p, coef[i - 1]);
        entry = entry + Laurent::monomial(p, c, -(int)i - 1);
    }
    LMat N(1, 1, p);
    N.at(0, 0) = entry;
    return DiffModule(p, 1, Convention::ddt, ann, std::move(N));
}

DiffModule exponent_module(unsigned p, const std::vector<Rat>& iota, const Annulus& ann) {
    // nabla(e_i) = e_i (x) iota_i dt/t, stored in the paper's t*d/dt form.
    unsigned n = static_cast<unsigned>(iota.size());
    LMat N(n, n, p);
    for (unsigned i = 0; i < n; ++i)
        N.at(i, i) = Laurent::constant(p, Scalar(p, iota[i]));
    return DiffModule(p, n, Convention::t_ddt, ann, std::move(N));
}

DiffModule bessel(unsigned p, const Annulus& ann) {
    if (p == 2) throw input_error("bessel fixture needs p != 2");
    LMat N(2, 2, p);
    N.at(0, 1) = Laurent::t_power(p, -1);
    N.at(1, 0) = Laurent::monomial(p, Scalar::pi(p) * Scalar::pi(p), -2);
    return DiffModule(p, 2, Convention::ddt, ann, std::move(N));
}

FamilyModule as_family(unsigned p, unsigned m, const Annulus& ann) {
    // nabla(v) = pi * x * t^{-m-1} dt
    LMat N(1, 1, p, 1);
    Laurent::Key key = {-(int)m - 1, 1};
    N.at(0, 0) = Laurent::monomial_multi(p, Scalar::pi(p), key);
    return FamilyModule(p, 1, Convention::ddt, ann, std::move(N), {ParamBox{Rat(0), Rat(4)}});
}

FamilyModule bessel_family(unsigned p, const Annulus& ann) {
    // Pullback of the Bessel module along (x,t) -> x^{-1} t:
    // N~ = x^{-1} N(x^{-1} t), i.e. [[0, t^-1],[pi^2 x t^-2, 0]].
    if (p == 2) throw input_error("bessel-family fixture needs p != 2");
    LMat N(2, 2, p, 1);
    N.at(0, 1) = Laurent::monomial_multi(p, Scalar::one(p), {-1, 0});
    N.at(1, 0) = Laurent::monomial_multi(p, Scalar::pi(p) * Scalar::pi(p), {-2, 1});
    return FamilyModule(p, 2, Convention::ddt, ann, std::move(N), {ParamBox{Rat(0), Rat(2)}});
}

FamilyModule exponent_family(unsigned p, const std::vector<Rat>& a, const std::vector<Rat>& b,
                             const Annulus& ann) {
    // nabla(e_i) = e_i (x) (a_i + b_i x) dt/t
    unsigned n = static_cast<unsigned>(a.size());
    LMat N(n, n, p, 1);
    for (unsigned i = 0; i < n; ++i) {
        Laurent e = Laurent::monomial_multi(p, Scalar(p, a[i]), {0, 0});
        if (i < b.size() && b[i] != 0)
            e = e + Laurent::monomial_multi(p, Scalar(p, b[i]), {0, 1});
        N.at(i, i) = e;
    }
    return FamilyModule(p, n, Convention::t_ddt, ann, std::move(N),
                        {ParamBox{Rat(0), Rat(4)}});
}

FamilyModule box_as(unsigned p, unsigned m, const Annulus& ann) {
    // Box product: t-direction AS break-m, x-direction carries its own
    // Frobenius structure (see dwork_frobenius_matrix).
    LMat N(1, 1, p, 1);
    N.at(0, 0) = Laurent::monomial_multi(p, Scalar::pi(p), {-(int)m - 1, 0});
    return FamilyModule(p, 1, Convention::ddt, ann, std::move(N), {ParamBox{Rat(0), Rat(2)}});
}

}  // namespace

Laurent dwork_frobenius_matrix(unsigned p, const Laurent& N_entry, int window) {
    if (N_entry.nparams() != 0)
        throw input_error("dwork_frobenius_matrix expects a univariate entry");
    // g = phi' N(phi) - N for phi = t^p; requires support in exponents <= -2.
    Laurent Nphi(p);
    for (const auto& [k, c] : N_entry.terms())
        Nphi.add_term({k[0] * (int)p}, c);
    Laurent g = Nphi.shifted_t((int)p - 1).scaled(Scalar(p, Rat((long)p))) - N_entry;
    for (const auto& [k, c] : g.terms())
        if (k[0] >= -1)
            throw input_error("dwork_frobenius_matrix: no Laurent solution (term at t^" +
                              std::to_string(k[0]) + ")");
    // A' = A g with A = 1 + sum_{j<0} a_j t^j: a_j = (1/j) sum_d g_d a_{j-1-d}.
    std::map<int, Scalar> a;
    a[0] = Scalar::one(p);
    for (int j = -1; j >= -window; --j) {
        Scalar acc = Scalar::zero(p);
        for (const auto& [k, c] : g.terms()) {
            int src = j - 1 - k[0];
            auto it = a.find(src);
            if (it != a.end()) acc = acc + c * it->second;
        }
        if (!acc.is_zero()) a[j] = acc / Scalar(p, Rat(j));
    }
    Laurent A(p);
    for (const auto& [j, c] : a) A.add_term({j}, c);
    A.mark_inexact();
    return A;
}

Example make_example(const std::string& name, const ExampleParams& prm) {
    Example ex;
    if (name == "trivial") {
        ex.module = trivial_module(prm.p, prm.n, prm.annulus);
    } else if (name == "artin-schreier") {
        ex.module = artin_schreier(prm.p, prm.m, prm.f, prm.annulus);
    } else if (name == "exponent") {
        std::vector<Rat> iota = prm.iota;
        if (iota.empty()) iota = {Rat(0), Rat(1), Rat(2)};
        ex.module = exponent_module(prm.p, iota, prm.annulus);
    } else if (name == "bessel") {
        ex.module = bessel(prm.p == 3 ? 5 : prm.p, prm.annulus);
    } else if (name == "as-family") {
        ex.is_family = true;
        ex.family = as_family(prm.p, prm.m, prm.annulus);
    } else if (name == "bessel-family") {
        ex.is_family = true;
        ex.family = bessel_family(prm.p == 3 ? 5 : prm.p, prm.annulus);
    } else if (name == "exponent-family") {
        ex.is_family = true;
        std::vector<Rat> a = prm.iota;
        if (a.empty()) a = {Rat(0), Rat(1)};
        std::vector<Rat> b = prm.iota_slope;
        if (b.empty()) b.assign(a.size(), Rat(1));
        ex.family = exponent_family(prm.p, a, b, prm.annulus);
    } else if (name == "box-as") {
        ex.is_family = true;
        ex.family = box_as(prm.p, prm.m, prm.annulus);
    } else {
        throw input_error("unknown example name: " + name);
    }
    return ex;
}

std::vector<std::string> example_names() {
    return {"trivial",   "artin-schreier", "exponent",        "bessel",
            "as-family", "bessel-family",  "exponent-family", "box-as"};
}

}  // namespace padic
