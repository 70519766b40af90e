#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "padic/catalog.hpp"
#include "padic/exponents.hpp"

using namespace padic;

TEST_CASE("bracket: smallest representative of x mod Z_p") {
    // x in Z_p exactly -> 0
    CHECK(bracket(3, Rat(5)) == Rat(0));
    CHECK(bracket(3, Rat(2, 5)) == Rat(0));
    // p=3, x = 1/3 -> 1/3 (already minimal)
    CHECK(bracket(3, Rat(1, 3)) == Rat(1, 3));
    // p=3, x = 2/3 -> -1/3 (2/3 - 1, brute force over representatives 2/3 + Z)
    {
        Rat best;
        bool found = false;
        for (long k = -6; k <= 6; ++k) {
            Rat cand = Rat(2, 3) + Rat(k);
            if (!found || abs(cand) < abs(best)) {
                best = cand;
                found = true;
            }
        }
        CHECK(bracket(3, Rat(2, 3)) == best);
        CHECK(best == Rat(-1, 3));
    }
    // p = 2 midpoint tie: nonnegative representative
    CHECK(bracket(2, Rat(1, 2)) == Rat(1, 2));
    // scaled form p^m <x/p^m> = balanced residue of a p-integral x mod p^m
    CHECK(bracket(3, Rat(7), 2) == Rat(-2));  // 7 = 9 - 2
    CHECK(bracket(3, Rat(4), 2) == Rat(4));
}

TEST_CASE("equivalent: integer-difference matchings") {
    ExponentTuple A{3, {Rat(0), Rat(1)}, true, 0};
    CHECK(equivalent(A, A).has_value());
    ExponentTuple B{3, {Rat(5), Rat(-3)}, true, 0};
    CHECK(equivalent(A, B).has_value());
    ExponentTuple C{5, {Rat(1, 2)}, true, 0}, D{5, {Rat(1, 3)}, true, 0};
    CHECK_FALSE(equivalent(C, D).has_value());
    // precision-only tuples are undecidable: explicit error
    ExponentTuple R{3, {Rat(1)}, false, 2};
    CHECK_THROWS_AS(equivalent(A, R), input_error);
}

TEST_CASE("weak equivalence certificates per level") {
    // equivalent tuples -> feasible at every m with c = 1
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> shift(-40, 40), pick(0, 3);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<Rat> base = {Rat(0), Rat(1, 2), Rat(2), Rat(1, 7)};
        std::vector<Rat> perm = base;
        std::shuffle(perm.begin(), perm.end(), rng);
        for (auto& x : perm) x += Rat(shift(rng));
        ExponentTuple A{3, base, true, 0}, B{3, perm, true, 0};
        auto rep = weakly_equivalent_up_to(A, B, 6, Rat(1));
        CHECK(rep.all_feasible());
    }
    // A=(0), B=(1/2), p=3, c=1: feasible iff |p^m <(-1/2)/p^m>| <= m, per m
    ExponentTuple A{3, {Rat(0)}, true, 0}, B{3, {Rat(1, 2)}, true, 0};
    auto rep = weakly_equivalent_up_to(A, B, 5, Rat(1));
    for (unsigned m = 1; m <= 5; ++m) {
        Rat br = abs(bracket(3, Rat(0) - Rat(1, 2), m));
        CHECK(rep.feasible[m - 1] == (br <= Rat((long)m)));
    }
    // n=1, A=B: all m feasible
    auto same = weakly_equivalent_up_to(A, A, 6, Rat(1, 100));
    CHECK(same.all_feasible());
}

TEST_CASE("exponent recovery: integer tuple and rational residue") {
    ExampleParams ep;
    ep.p = 3;
    ep.iota = {Rat(0), Rat(1), Rat(2)};
    DiffModule E = make_example("exponent", ep).module;
    auto rec = recover_exponent(E, Rat(1, 2), Rat(2), 3);
    CHECK(rec.identity_verified);
    ExponentTuple want{3, {Rat(0), Rat(1), Rat(2)}, true, 0};
    ExponentTuple got{3, rec.tuple.entries, true, 0};
    CHECK(equivalent(want, got, 40).has_value());

    // iota = 1/(1-p): residue mod p^4 equals the rational reduction
    ExampleParams hp;
    hp.p = 3;
    hp.iota = {Rat(1) / Rat(1 - 3)};
    DiffModule H = make_example("exponent", hp).module;
    auto rec4 = recover_exponent(H, Rat(1, 2), Rat(2), 4);
    // rational reduction oracle: -1/2 = -1 * inv(2) mod 81 = 40
    mpz_class inv2;
    mpz_class two = 2, mod = 81;
    mpz_invert(inv2.get_mpz_t(), two.get_mpz_t(), mod.get_mpz_t());
    mpz_class expect = (-inv2) % mod;
    if (expect < 0) expect += mod;
    CHECK(rec4.tuple.entries[0] == Rat(expect));
}

TEST_CASE("recovery invariance: unimodular conjugation and t^k twist") {
    ExampleParams ep;
    ep.p = 3;
    ep.iota = {Rat(0), Rat(2)};
    DiffModule E = make_example("exponent", ep).module.converted(Convention::ddt);
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 3; ++trial) {
        auto [G, Gi] = random_gauge(3, 2, rng);
        DiffModule Ec = E.conjugated(G, Gi);
        auto rec = recover_exponent(Ec, Rat(1, 2), Rat(2), 2);
        ExponentTuple want{3, {Rat(0), Rat(2)}, true, 0};
        ExponentTuple got{3, rec.tuple.entries, true, 0};
        CHECK(equivalent(want, got, 16).has_value());
    }
    // twist by t^k: tensor with exponent-k rank 1; recovered tuple shifts by k
    ExampleParams kp;
    kp.p = 3;
    kp.iota = {Rat(1)};
    DiffModule L = make_example("exponent", kp).module.converted(Convention::ddt);
    DiffModule T = E.tensor(L);
    auto rec = recover_exponent(T, Rat(1, 2), Rat(2), 2);
    ExponentTuple want{3, {Rat(1), Rat(3)}, true, 0};
    ExponentTuple got{3, rec.tuple.entries, true, 0};
    CHECK(equivalent(want, got, 16).has_value());
}

TEST_CASE("recovery refuses non-regular input") {
    ExampleParams ap;
    ap.p = 3;
    ap.m = 1;
    DiffModule AS = make_example("artin-schreier", ap).module;
    CHECK_THROWS_AS(recover_exponent(AS, Rat(1, 2), Rat(2), 2), certification_error);
}

TEST_CASE("bridge: equivalence upgrades and refusals") {
    // A=(0,1), B=(3,-2): equivalent with explicit shifts
    ExponentTuple A{3, {Rat(0), Rat(1)}, true, 0};
    ExponentTuple B{3, {Rat(3), Rat(-2)}, true, 0};
    auto r1 = bridge_extend(A, B, true);
    CHECK(r1.verdict == BridgeVerdict::equivalent);
    CHECK(r1.matching.has_value());
    // A=(0), B=(1/2), p odd: not equivalent (difference non-integer)
    ExponentTuple A1{3, {Rat(0)}, true, 0}, B1{3, {Rat(1, 2)}, true, 0};
    CHECK(bridge_extend(A1, B1, true).verdict == BridgeVerdict::not_equivalent);
    // uncertified non-Liouville input -> undecided
    CHECK(bridge_extend(A, B, false).verdict == BridgeVerdict::undecided);
}
