#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "padic/catalog.hpp"
#include "padic/radii.hpp"

using namespace padic;

namespace {

const Annulus kAnn{Rat(0), Rat(4), true};

DiffModule rand_module(unsigned p, unsigned n, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> e(-3, 2), c(-4, 4), fill(0, 2);
    LMat N(n, n, p);
    for (unsigned i = 0; i < n; ++i)
        for (unsigned j = 0; j < n; ++j) {
            Laurent x(p);
            int terms = fill(rng);
            for (int k = 0; k < terms; ++k) {
                int cv = c(rng);
                if (cv) x.add_term({e(rng)}, Scalar(p, Rat(cv)));
            }
            N.at(i, j) = x;
        }
    return DiffModule(p, n, Convention::ddt, kAnn, std::move(N));
}

// Independent oracle: iterated symbolic differentiation of basis vectors via
// the Leibniz rule, no matrix recursion.
std::vector<Laurent> oracle_Ds(const DiffModule& M, unsigned j, unsigned s) {
    std::vector<Laurent> v(M.rank(), Laurent(M.prime()));
    v[j] = Laurent::constant(M.prime(), Scalar::one(M.prime()));
    for (unsigned step = 0; step < s; ++step) {
        std::vector<Laurent> w(M.rank(), Laurent(M.prime()));
        for (unsigned i = 0; i < M.rank(); ++i) {
            w[i] = v[i].derived(M.convention());
            for (unsigned k = 0; k < M.rank(); ++k)
                w[i] = w[i] + M.matrix().at(i, k) * v[k];
        }
        v = std::move(w);
    }
    return v;
}

}  // namespace

TEST_CASE("derivation powers: spec examples") {
    // N = 0 -> all N_s = 0
    DiffModule Z(3, 2, Convention::ddt, kAnn, LMat(2, 2, 3));
    for (const auto& Ns : derivation_powers(Z, 5)) CHECK(Ns.is_zero());
    // rank 1, constant N = (c), D = d/dt -> N_s = (c^s)
    LMat C(1, 1, 5);
    C.at(0, 0) = Laurent::constant(5, Scalar(5, Rat(7)));
    DiffModule Mc(5, 1, Convention::ddt, kAnn, C);
    auto pows = derivation_powers(Mc, 4);
    CHECK(pows[3].at(0, 0) == Laurent::constant(5, Scalar(5, Rat(2401))));
    // rank 1, N = t^-1, D = d/dt: N_2 = t^-2 - t^-2 = 0 (exponent-1 module)
    LMat E(1, 1, 3);
    E.at(0, 0) = Laurent::t_power(3, -1);
    DiffModule Me(3, 1, Convention::ddt, kAnn, E);
    auto ep = derivation_powers(Me, 3);
    CHECK(ep[1].is_zero());
    CHECK(ep[2].is_zero());
}

TEST_CASE("derivation powers agree with direct symbolic differentiation (random rank <= 3)") {
    std::mt19937_64 rng(101);
    for (unsigned n : {1u, 2u, 3u}) {
        for (int trial = 0; trial < 8; ++trial) {
            DiffModule M = rand_module(3, n, rng);
            auto pows = derivation_powers(M, 4);
            for (unsigned s = 1; s <= 4; ++s)
                for (unsigned j = 0; j < n; ++j) {
                    auto col = oracle_Ds(M, j, s);
                    for (unsigned i = 0; i < n; ++i) CHECK(pows[s - 1].at(i, j) == col[i]);
                }
        }
    }
}

TEST_CASE("dual and tensor") {
    std::mt19937_64 rng(103);
    DiffModule M = rand_module(3, 2, rng);
    CHECK(M.dual().dual() == M);
    // tensor with the trivial rank-1 module returns M
    DiffModule T(3, 1, Convention::ddt, kAnn, LMat(1, 1, 3));
    CHECK(M.tensor(T) == M);
    // rank-1 E (x) E^dual is trivial
    LMat A(1, 1, 3);
    A.at(0, 0) = Laurent::monomial(3, Scalar::pi(3), -2);
    DiffModule E(3, 1, Convention::ddt, kAnn, A);
    CHECK(E.tensor(E.dual()).matrix().is_zero());
    // mismatched conventions rejected
    CHECK_THROWS_AS(M.tensor(M.converted(Convention::t_ddt)), input_error);
}

TEST_CASE("convention conversion is involutive and scales by t") {
    std::mt19937_64 rng(105);
    DiffModule M = rand_module(5, 2, rng);
    DiffModule M2 = M.converted(Convention::t_ddt).converted(Convention::ddt);
    CHECK(M == M2);
}

TEST_CASE("cyclic vector: spec examples") {
    // rank 1 -> v = e_1, polynomial T - N_11
    LMat A(1, 1, 3);
    A.at(0, 0) = Laurent::monomial(3, Scalar::pi(3), -2);
    DiffModule E(3, 1, Convention::ddt, kAnn, A);
    auto [v, P] = cyclic_vector(E, Rat(1));
    CHECK(v[0] == Laurent::constant(3, Scalar::one(3)));
    CHECK(P.a[0] == A.at(0, 0));

    // Bessel: degree-2 twisted polynomial, a_0 = pi^2 t^-3 (from direct
    // elimination: D^2 v = pi^2 t^-3 v - 2 t^-1 Dv), a_1 = -2 t^-1
    ExampleParams bp;
    bp.p = 5;
    DiffModule B = make_example("bessel", bp).module;
    auto [vb, PB] = cyclic_vector(B, Rat(1));
    CHECK(PB.a[0] == Laurent::monomial(5, Scalar::pi(5) * Scalar::pi(5), -3));
    CHECK(PB.a[1] == Laurent::monomial(5, Scalar(5, Rat(-2)), -1));

    // diagonal module diag(i1, i2) dt/t with i1 != i2: v = e_1 + e_2 works
    ExampleParams ep;
    ep.p = 3;
    ep.iota = {Rat(0), Rat(1)};
    DiffModule D2 = make_example("exponent", ep).module;
    CyclicData cd = cyclic_data(D2, Rat(1));
    CHECK(!cd.wronskian.is_zero());
    CHECK(cd.v[0] == Laurent::constant(3, Scalar::one(3)));
}

TEST_CASE("pullback examples") {
    // g = u (identity) -> unchanged
    ExampleParams ap;
    ap.p = 3;
    ap.m = 1;
    DiffModule AS = make_example("artin-schreier", ap).module;
    DiffModule same = pullback(AS, Laurent::t_power(3, 1), Convention::ddt, kAnn, Rat(1));
    CHECK(same == AS);
    // rank-1 break-m pulled along g = u^d -> break d*m (tame, d = 2, m = 1)
    DiffModule pulled = pullback(AS, Laurent::t_power(3, 2), Convention::ddt, kAnn, Rat(1));
    auto bd = break_slopes(pulled, {Rat(1, 8), Rat(1, 4), Rat(1, 2)});
    CHECK(bd.b[0] == Rat(2));
    // Bessel family fixture equals the pullback of Bessel along x^-1 t
    ExampleParams bp;
    bp.p = 5;
    DiffModule B = make_example("bessel", bp).module;
    FamilyModule BF = make_example("bessel-family", bp).family;
    LMat wide(2, 2, 5, 1);
    for (unsigned i = 0; i < 2; ++i)
        for (unsigned j = 0; j < 2; ++j) wide.at(i, j) = B.matrix().at(i, j).with_nparams(1);
    DiffModule Bw(5, 2, Convention::ddt, kAnn, wide, {Rat(0)});
    Laurent g = Laurent::monomial_multi(5, Scalar::one(5), {1, -1});  // x^-1 t
    DiffModule pb = pullback(Bw, g, Convention::ddt, kAnn, Rat(1));
    CHECK(pb.matrix() == BF.matrix());
}

TEST_CASE("frobenius pushforward: rank and trivial-module radii") {
    ExampleParams tp;
    tp.p = 3;
    tp.n = 1;
    DiffModule T = make_example("trivial", tp).module;
    DiffModule P = frobenius_pushforward(T);
    CHECK(P.rank() == 3);
    CHECK(P.annulus().r_max == Rat(12));
    // radii of the pushforward of the trivial module = p-Kummer cover module:
    // one exact zero and (p-1) copies of p/(p-1)
    auto radii = newton_radii(P, Rat(3, 2), 0);
    CHECK(radii[0].lower == Rat(3, 2));
    CHECK(radii[0].upper == Rat(3, 2));
    CHECK(radii[1].lower == Rat(3, 2));
    // the slot with f = 0 stays bracketed at level 0 (invisible)
    CHECK(radii[2].lower == Rat(0));
    // explicit basis oracle: the direct sum of exponent-(j/p) modules has the
    // same radii multiset
    LMat K(3, 3, 3);
    for (unsigned j = 0; j < 3; ++j) {
        Rat jp((long)j, 3);
        jp.canonicalize();
        K.at(j, j) = Laurent::monomial(3, Scalar(3, jp), -1);
    }
    DiffModule Kummer(3, 3, Convention::ddt, P.annulus(), K);
    auto kr = newton_radii(Kummer, Rat(3, 2), 0);
    for (unsigned i = 0; i < 3; ++i) {
        CHECK(kr[i].lower == radii[i].lower);
        CHECK(kr[i].upper == radii[i].upper);
    }
}

TEST_CASE("pushforward of AS break-m agrees with direct radii of the rank-p module") {
    // Cross-check between the two radius algorithms: breaks of the pushforward
    // read through the dictionary equal direct NP radii of the rank-p result.
    ExampleParams ap;
    ap.p = 3;
    ap.m = 1;
    DiffModule AS = make_example("artin-schreier", ap).module;
    DiffModule P = frobenius_pushforward(AS);
    Rat r(1, 2);  // u-radius; corresponds to t-radius 1/6
    auto direct = newton_radii(P, r, 2);  // rank-3 module, direct NP route
    // dictionary oracle: f_t = m * (r/p) = 1/6 < 1/(p-1) => slots {p f} + junk
    std::vector<Rat> expect = {Rat(3, 2), Rat(3, 2), Rat(1, 2)};
    for (unsigned i = 0; i < 3; ++i) {
        CHECK(direct[i].exact());
        CHECK(direct[i].lower == expect[i]);
    }
}

TEST_CASE("frobenius structure verification: spec examples") {
    // trivial module, A = I, phi = t^p -> true
    ExampleParams tp;
    tp.p = 3;
    tp.n = 2;
    tp.annulus = Annulus{Rat(0), Rat(1, 8), true};
    DiffModule T = make_example("trivial", tp).module;
    CHECK(verify_frobenius_structure(T, Laurent::t_power(3, 3), LMat::identity(2, 3), Rat(5)));
    // rank-1 exponent module, A = (1): equation forces iota = p iota -> false
    ExampleParams ep;
    ep.p = 3;
    ep.iota = {Rat(1)};
    ep.annulus = Annulus{Rat(0), Rat(1, 8), true};
    DiffModule E = make_example("exponent", ep).module;
    CHECK_FALSE(verify_frobenius_structure(E, Laurent::t_power(3, 3), LMat::identity(1, 3),
                                           Rat(5)));
    // but iota = 0 passes
    ExampleParams zp;
    zp.p = 3;
    zp.iota = {Rat(0)};
    zp.annulus = Annulus{Rat(0), Rat(1, 8), true};
    DiffModule Z = make_example("exponent", zp).module;
    CHECK(verify_frobenius_structure(Z, Laurent::t_power(3, 3), LMat::identity(1, 3), Rat(5)));
    // rank-1 AS module with its standard q=p Frobenius matrix solved order by
    // order -> true at tol 5 (the order-by-order solve is its own oracle)
    ExampleParams ap;
    ap.p = 3;
    ap.m = 1;
    ap.annulus = Annulus{Rat(0), Rat(1, 8), true};
    DiffModule AS = make_example("artin-schreier", ap).module;
    Laurent A = dwork_frobenius_matrix(3, AS.matrix().at(0, 0), 120);
    LMat Am(1, 1, 3);
    Am.at(0, 0) = A;
    CHECK(verify_frobenius_structure(AS, Laurent::t_power(3, 3), Am, Rat(5)));
    // shape violation: phi = t^2 is not t^(p^k) + small
    CHECK_THROWS_AS(frobenius_lift_exponent(Laurent::t_power(3, 2), T.annulus()), input_error);
}

TEST_CASE("pullback along u^d then pushforward keeps rank bookkeeping consistent") {
    ExampleParams ap;
    ap.p = 3;
    ap.m = 2;
    DiffModule AS = make_example("artin-schreier", ap).module;
    DiffModule up = pullback(AS, Laurent::t_power(3, 2), Convention::ddt, kAnn, Rat(1));
    DiffModule down = frobenius_pushforward(up);
    CHECK(down.rank() == up.rank() * 3);
    Laurent det_in = up.matrix().det();
    CHECK(!det_in.is_zero());
}
