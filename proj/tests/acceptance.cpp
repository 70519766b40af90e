// Acceptance suite: one line per criterion, exit code = number of failures.
// Every tolerance is pinned here; exact rational arithmetic means most checks
// are equality checks.

#include <chrono>
#include <iostream>
#include <random>
#include <sstream>

#include "padic/catalog.hpp"
#include "padic/decomp.hpp"
#include "padic/exponents.hpp"
#include "padic/hensel.hpp"
#include "padic/io.hpp"

using namespace padic;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int idx, const std::string& name, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << idx << ": " << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << std::endl;
    if (!ok) ++failures;
}

double elapsed(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

DiffModule as_module(unsigned p, unsigned m) {
    ExampleParams prm;
    prm.p = p;
    prm.m = m;
    return make_example("artin-schreier", prm).module;
}

}  // namespace

// 1. Artin-Schreier breaks: p in {3,5}, m in {1,2,3}: exactly [m], < 1 s each.
// The (p,m) = (3,3) sub-case cannot pass: the source construction carries the
// hypothesis p does not divide m, and indeed the fixture with p | m is not
// even solvable at 1 (f_1(r) -> 1/3, verified by the exact rank-1 radii of
// its Frobenius pushforward); rank-1 breaks divisible by p would need a
// Witt-vector character outside this fixture family. The sub-case is run as
// stated and reported honestly. See the reviewer notes for the analysis.
static void criterion1() {
    bool ok = true;
    std::ostringstream d;
    for (unsigned p : {3u, 5u})
        for (unsigned m : {1u, 2u, 3u}) {
            auto t0 = Clock::now();
            bool one = false;
            std::string why;
            try {
                auto bd = break_slopes(as_module(p, m), {Rat(1, 8), Rat(1, 4)});
                one = bd.b.size() == 1 && bd.b[0] == Rat((long)m) && bd.solvable;
                if (!one) why = "got b_1 = " + rat_str(bd.b[0]);
            } catch (const std::exception& ex) {
                why = ex.what();
            }
            double dt = elapsed(t0);
            if (dt >= 1.0) {
                one = false;
                why += " [runtime " + std::to_string(dt) + "s]";
            }
            if (!one) {
                ok = false;
                d << "p=" << p << ",m=" << m << ": " << why << "; ";
            }
        }
    report(1, "Artin-Schreier breaks b = [m], exact, < 1s each", ok, d.str());
}

// 2. Regularity of the exponent example: profile identically 0, exact.
static void criterion2() {
    ExampleParams prm;
    prm.p = 3;
    prm.iota = {Rat(0), Rat(1), Rat(2)};
    DiffModule E = make_example("exponent", prm).module;
    bool ok = true;
    for (const Rat& r : {Rat(2), Rat(1), Rat(1, 2), Rat(1, 4)}) {
        auto radii = newton_radii(E, r, 3);
        for (const auto& b : radii) ok &= b.exact() && b.lower == Rat(0);
    }
    auto prof = radius_profile(E, 1, {Rat(1, 4), Rat(1, 2), Rat(1), Rat(2)});
    for (const auto& s : prof.samples) ok &= s.exact && s.lo == Rat(0);
    report(2, "exponent example (0,1,2) is regular: IR = 1 exactly on the grid", ok);
}

// 3. Exponent recovery at level 3 and the 1/(1-p) residue at level 4, < 30 s.
static void criterion3() {
    auto t0 = Clock::now();
    bool ok = true;
    std::ostringstream d;
    {
        ExampleParams prm;
        prm.p = 3;
        prm.iota = {Rat(0), Rat(1), Rat(2)};
        DiffModule E = make_example("exponent", prm).module;
        auto rec = recover_exponent(E, Rat(1, 2), Rat(2), 3);
        ExponentTuple want{3, {Rat(0), Rat(1), Rat(2)}, true, 0};
        ExponentTuple got{3, rec.tuple.entries, true, 0};
        ok &= equivalent(want, got, 64).has_value();
        if (!ok) d << "tuple mismatch; ";
    }
    {
        ExampleParams prm;
        prm.p = 3;
        prm.iota = {Rat(1) / Rat(1 - 3)};
        DiffModule H = make_example("exponent", prm).module;
        auto rec = recover_exponent(H, Rat(1, 2), Rat(2), 4);
        // rational reduction oracle: residue of -1/2 mod 3^4
        mpz_class inv2, two = 2, mod = 81;
        mpz_invert(inv2.get_mpz_t(), two.get_mpz_t(), mod.get_mpz_t());
        mpz_class expect = (-inv2) % mod;
        if (expect < 0) expect += mod;
        ok &= rec.tuple.entries[0] == Rat(expect);
        if (rec.tuple.entries[0] != Rat(expect))
            d << "residue " << rat_str(rec.tuple.entries[0]) << " != " << expect.get_str();
    }
    double dt = elapsed(t0);
    ok &= dt < 30.0;
    report(3, "exponent recovery: (0,1,2) at m=3 and 1/(1-p) mod p^4, < 30s", ok,
           d.str().empty() ? (std::to_string(dt) + "s") : d.str());
}

// 4. Determinant recursion identity verified at every level on >= 3 fixtures.
static void criterion4() {
    bool ok = true;
    int count = 0;
    auto run = [&](DiffModule M, unsigned m) {
        auto rec = recover_exponent(M, Rat(1, 2), Rat(2), m);
        ok &= rec.identity_verified;  // the operation asserts the identity per level
        ++count;
    };
    ExampleParams a;
    a.p = 3;
    a.iota = {Rat(0), Rat(1), Rat(2)};
    run(make_example("exponent", a).module, 3);
    ExampleParams b;
    b.p = 3;
    b.iota = {Rat(1) / Rat(1 - 3)};
    run(make_example("exponent", b).module, 4);
    ExampleParams c;
    c.p = 5;
    c.iota = {Rat(0), Rat(3)};
    run(make_example("exponent", c).module, 2);
    std::mt19937_64 rng(51);
    ExampleParams e;
    e.p = 3;
    e.iota = {Rat(0), Rat(2)};
    DiffModule E = make_example("exponent", e).module.converted(Convention::ddt);
    auto [G, Gi] = random_gauge(3, 2, rng);
    run(E.conjugated(G, Gi), 2);
    report(4, "det(S) recursion identity holds exactly at every recovery level", ok,
           std::to_string(count) + " fixtures");
}

// 5. Convexity/quantization on every catalog module and 50 random conjugates;
//    conjugated modules yield identical RadiusBounds.
static void criterion5() {
    bool ok = true;
    std::ostringstream d;
    std::vector<DiffModule> cat;
    {
        ExampleParams t;
        t.p = 3;
        t.n = 2;
        cat.push_back(make_example("trivial", t).module);
        cat.push_back(as_module(3, 1));
        cat.push_back(as_module(3, 2));
        ExampleParams bp;
        bp.p = 5;
        cat.push_back(make_example("bessel", bp).module);
        ExampleParams e;
        e.p = 3;
        e.iota = {Rat(0), Rat(1), Rat(2)};
        cat.push_back(make_example("exponent", e).module);
    }
    std::mt19937_64 rng(2718);
    const std::vector<LogRadius> grid = {Rat(1, 2), Rat(1), Rat(3, 2), Rat(2)};
    int conjugates = 0;
    for (const auto& M : cat) {
        try {
            radius_profile(M, 1, grid, 3);  // rejects on convexity/quantization violation
        } catch (const std::exception& ex) {
            ok = false;
            d << "profile rejected: " << ex.what() << "; ";
        }
        for (int trial = 0; trial < 10; ++trial) {
            auto [G, Gi] = random_gauge(M.prime(), M.rank(), rng);
            DiffModule Mc = M.conjugated(G, Gi);
            ++conjugates;
            for (const Rat& r : {Rat(1, 2), Rat(3, 2)}) {
                auto a = newton_radii(M, r, 2);
                auto b = newton_radii(Mc, r, 2);
                for (size_t i = 0; i < a.size(); ++i)
                    if (a[i].lower != b[i].lower || a[i].upper != b[i].upper) {
                        ok = false;
                        d << "bounds differ under conjugation at r=" << rat_str(r) << "; ";
                    }
            }
            try {
                radius_profile(Mc, M.rank(), grid, 3);
            } catch (const std::exception& ex) {
                ok = false;
                d << "conjugate profile rejected: " << ex.what() << "; ";
            }
        }
    }
    report(5, "convexity + (1/n!)Z quantization + basis-invariant bounds", ok,
           std::to_string(conjugates) + " conjugates" + (d.str().empty() ? "" : "; " + d.str()));
}

// 6. Newton values lie within spectral brackets (S = 64); rank-1 exact match.
static void criterion6() {
    bool ok = true;
    std::ostringstream d;
    std::vector<std::pair<DiffModule, bool>> fixtures;  // (module, rank1-visible probes)
    fixtures.emplace_back(as_module(3, 1), true);
    fixtures.emplace_back(as_module(3, 2), true);
    fixtures.emplace_back(as_module(5, 3), true);
    {
        ExampleParams bp;
        bp.p = 5;
        fixtures.emplace_back(make_example("bessel", bp).module, false);
        ExampleParams e;
        e.p = 3;
        e.iota = {Rat(0), Rat(1), Rat(2)};
        fixtures.emplace_back(make_example("exponent", e).module, false);
        ExampleParams t;
        t.p = 3;
        t.n = 3;
        fixtures.emplace_back(make_example("trivial", t).module, false);
    }
    for (const auto& [M, rank1] : fixtures) {
        std::vector<Rat> probes = rank1 ? std::vector<Rat>{Rat(1), Rat(2)}
                                        : std::vector<Rat>{Rat(1, 2), Rat(1), Rat(2)};
        for (const Rat& r : probes) {
            auto nr = newton_radii(M, r, 3);
            auto sb = spectral_radius_bounds(M, r, 64);
            if (!(nr[0].lower >= sb.bound.lower && nr[0].upper <= sb.bound.upper)) {
                ok = false;
                d << "containment fails at r=" << rat_str(r) << "; ";
            }
            if (rank1 && !(sb.bound.exact() && sb.bound.lower == nr[0].lower)) {
                ok = false;
                d << "rank-1 exact agreement fails at r=" << rat_str(r) << "; ";
            }
        }
    }
    report(6, "newton radii within spectral brackets; rank-1 agree exactly", ok, d.str());
}

// 7. Direct-sum recovery under 10 random conjugations.
static void criterion7() {
    bool ok = true;
    std::ostringstream d;
    ExampleParams pe;
    pe.p = 3;
    pe.iota = {Rat(1)};
    DiffModule E1 = make_example("exponent", pe).module.converted(Convention::ddt);
    DiffModule E2 = as_module(3, 2);
    DiffModule M0 = DiffModule::direct_sum(E1, E2);
    const std::vector<LogRadius> grid = {Rat(1, 8), Rat(1, 4), Rat(1, 2), Rat(1), Rat(2)};
    const Rat target(24);
    for (unsigned seed = 1; seed <= 10; ++seed) {
        std::mt19937_64 rng(seed);
        auto [G, Gi] = random_gauge(3, 2, rng);
        DiffModule M = M0.conjugated(G, Gi);
        try {
            auto dec = slope_decompose(M, grid, target);
            bool good = dec.factors.size() == 2 && dec.factors[0].slope == Rat(2) &&
                        dec.factors[0].rank == 1 && dec.factors[1].slope == Rat(0) &&
                        dec.factors[1].rank == 1;
            // re-verify the off-diagonal residual from the returned basis
            LMat Np = dec.basis_inv *
                      (M.matrix() * dec.basis + dec.basis.derived(M.convention()));
            Radii at = M.radii_at(Rat(1));
            Val off = min(Np.at(0, 1).gauss_valuation(at), Np.at(1, 0).gauss_valuation(at));
            good &= off > Val(target);
            if (!good) {
                ok = false;
                d << "seed " << seed << " bad (offdiag " << off.str() << "); ";
            }
        } catch (const std::exception& ex) {
            ok = false;
            d << "seed " << seed << ": " << ex.what() << "; ";
        }
    }
    report(7, "slope_decompose recovers ranks (1,1), slopes (0,2), residual certified", ok,
           d.str());
}

// 8. Bessel breaks (1/2, 1/2); spectral truncation at S >= 100 pins the slope
//    via (1/n!)-quantization with n = 2. Runtime < 5 min.
static void criterion8() {
    auto t0 = Clock::now();
    ExampleParams bp;
    bp.p = 5;
    DiffModule B = make_example("bessel", bp).module;
    auto bd = break_slopes(B, {Rat(1, 8), Rat(1, 4)});
    bool ok = bd.b.size() == 2 && bd.b[0] == Rat(1, 2) && bd.b[1] == Rat(1, 2) && bd.solvable;
    // derived oracle: spectral truncation at S = 125 brackets f_1 = r/2 and
    // the p^k estimate lands on it exactly at both grid radii
    for (const Rat& r : {Rat(1, 8), Rat(1, 4)}) {
        auto sb = spectral_radius_bounds(B, r, 125);
        ok &= sb.bound.lower <= r / 2 && r / 2 <= sb.bound.upper;
        ok &= sb.estimate == r / 2;
        // the bracket is tight enough to pin the quantized slope candidate
        ok &= sb.bound.upper - r / 2 < Rat(1, 4) * r;
    }
    double dt = elapsed(t0);
    ok &= dt < 300.0;
    report(8, "Bessel breaks (1/2, 1/2), spectral oracle at S = 125 concurs", ok,
           std::to_string(dt) + "s");
}

// 9. Hensel lifting: quadratic residual growth and exact square-back check.
static void criterion9() {
    LaurentPoly P;
    Laurent target = Laurent::constant(5, Scalar::one(5)) +
                     Laurent::monomial(5, Scalar(5, Rat(5)), -1);
    P.c = {-target, Laurent(5), Laurent::constant(5, Scalar::one(5))};
    bool ok = true;
    std::ostringstream d;
    try {
        auto hr = hensel_lift(P, Laurent::constant(5, Scalar::one(5)), Rat(20));
        // residual after k iterations >= 2^k v0 - C with C = 0 here (P'(x0)
        // is a unit on the certified interval)
        Rat v0 = hr.residual_trace.front().finite();
        for (size_t k = 1; k < hr.residual_trace.size(); ++k) {
            if (hr.residual_trace[k].is_inf()) break;
            Rat bound = v0 * Rat(1 << std::min<size_t>(k, 20));
            if (hr.residual_trace[k].finite() < bound) {
                ok = false;
                d << "trace[" << k << "] below 2^k v0; ";
            }
        }
        Laurent resid = hr.root * hr.root - target;
        Val rv = min(resid.gauss_valuation(Rat(0)), resid.gauss_valuation(Rat(1, 4)));
        if (!(rv > Val(Rat(20)))) {
            ok = false;
            d << "square-back residual " << rv.str() << " <= 20";
        }
    } catch (const std::exception& ex) {
        ok = false;
        d << ex.what();
    }
    report(9, "hensel_lift: 2^k residual growth, square matches to valuation 20", ok, d.str());
}

// 10. Family semicontinuity scan: (m, m, 0, 0) and gauss attains the max.
static void criterion10() {
    ExampleParams prm;
    prm.p = 3;
    prm.m = 2;
    FamilyModule F = make_example("as-family", prm).family;
    std::vector<std::vector<FiberPoint>> pts = {
        {FiberPoint::gauss(Rat(0))},
        {FiberPoint::classical(Scalar::one(3))},
        {FiberPoint::classical(Scalar(3, Rat(3)))},
        {FiberPoint::classical(Scalar(3, Rat(9)))}};
    auto scan = semicontinuity_scan(F, pts, 1, {Rat(1, 8), Rat(1, 4)});
    bool ok = scan.rows.size() == 4;
    std::vector<Rat> want = {Rat(2), Rat(2), Rat(0), Rat(0)};
    for (size_t i = 0; ok && i < 4; ++i)
        ok &= scan.rows[i].value && *scan.rows[i].value == want[i] && scan.rows[i].solvable;
    ok &= scan.gauss_attains_max && scan.generic_locus_consistent;
    report(10, "AS family scan yields breaks (m, m, 0, 0); Gauss value attains the max", ok);
}

// 11. Partial-Frobenius constancy: box product passes and is constant; the
//     Bessel x^-1 t family is refused at the Frobenius gate.
static void criterion11() {
    bool ok = true;
    std::ostringstream d;
    {
        ExampleParams prm;
        prm.p = 3;
        prm.m = 2;
        FamilyModule F = make_example("box-as", prm).family;
        Laurent Nx = Laurent::monomial(3, Scalar::pi(3), -2);
        Laurent Ax_uni = dwork_frobenius_matrix(3, Nx, 80);
        Laurent Ax(3, 1);
        for (const auto& [k, c] : Ax_uni.terms()) Ax.add_term({0, k[0]}, c);
        Ax.mark_inexact();
        LMat Am(1, 1, 3, 1);
        Am.at(0, 0) = Ax;
        Laurent phix(3, 1);
        phix.add_term({0, 3}, Scalar::one(3));
        auto cr = partial_frobenius_constancy(F, phix, Am,
                                              {Rat(1, 4), Rat(1, 2), Rat(1), Rat(2)},
                                              {Rat(1, 8), Rat(1, 4)});
        ok &= cr.frobenius_verified && cr.constant && cr.convexity_consistent;
        for (const auto& [rx, b] : cr.t_breaks) ok &= b.size() == 1 && b[0] == Rat(2);
        if (!cr.frobenius_verified) d << "box product gate failed; ";
    }
    {
        ExampleParams bp;
        bp.p = 5;
        FamilyModule BF = make_example("bessel-family", bp).family;
        Laurent phix(5, 1);
        phix.add_term({0, 5}, Scalar::one(5));
        auto cr = partial_frobenius_constancy(BF, phix, LMat::identity(2, 5, 1),
                                              {Rat(1, 4), Rat(1, 2)}, {Rat(1, 8), Rat(1, 4)});
        ok &= !cr.frobenius_verified && !cr.constant;
        if (cr.frobenius_verified) d << "Bessel family was not refused; ";
    }
    report(11, "box product constant across r_x; Bessel family refused at the gate", ok,
           d.str());
}

// 12. Equivalence logic: equivalent => weakly equivalent with c = 1 for all
//     m <= 6 on 100 random pairs; non-integer differences rejected.
static void criterion12() {
    bool ok = true;
    std::mt19937_64 rng(314159);
    std::uniform_int_distribution<int> shift(-50, 50), nsel(1, 4), den(1, 9), num(-30, 30);
    int pairs = 0;
    for (int trial = 0; trial < 100; ++trial) {
        unsigned p = trial % 2 ? 3u : 5u;
        unsigned n = unsigned(nsel(rng));
        std::vector<Rat> base;
        for (unsigned i = 0; i < n; ++i) {
            int dd = den(rng);
            while (dd % (int)p == 0) ++dd;
            Rat x(num(rng), dd);
            x.canonicalize();
            base.push_back(x);
        }
        std::vector<Rat> other = base;
        std::shuffle(other.begin(), other.end(), rng);
        for (auto& x : other) x += Rat(shift(rng));
        ExponentTuple A{p, base, true, 0}, B{p, other, true, 0};
        if (!equivalent(A, B, 128).has_value()) {
            ok = false;
            continue;
        }
        auto rep = weakly_equivalent_up_to(A, B, 6, Rat(1));
        ok &= rep.all_feasible();
        ++pairs;
    }
    // non-equivalent rational pairs with non-integer differences are rejected
    ExponentTuple A{5, {Rat(1, 2), Rat(0)}, true, 0};
    ExponentTuple B{5, {Rat(1, 3), Rat(0)}, true, 0};
    ok &= !equivalent(A, B, 128).has_value();
    report(12, "equivalent => weak (c=1, m<=6) on 100 pairs; non-integer diffs rejected", ok,
           std::to_string(pairs) + " pairs");
}

int main() {
    auto t0 = Clock::now();
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    criterion11();
    criterion12();
    std::cout << (failures == 0 ? "ALL CRITERIA PASS" : "FAILURES: " + std::to_string(failures))
              << " (" << elapsed(t0) << "s total)" << std::endl;
    return failures;
}
