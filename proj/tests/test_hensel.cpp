#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "padic/hensel.hpp"

using namespace padic;

namespace {

Laurent one(unsigned p) { return Laurent::constant(p, Scalar::one(p)); }

}  // namespace

TEST_CASE("tail norm certificates") {
    // x in O_K[t] with integral coefficients: no binding constraint
    Laurent x = Laurent::t_power(3, 2) + Laurent::constant(3, Scalar(3, Rat(3)));
    auto ca = tail_norm_certificate(x, TailMode::integral_image);
    CHECK(ca.unbounded);
    // x = p t^-1, p=3: 1 - r > 0 iff r < 1, so r_0 = 1
    Laurent y = Laurent::monomial(3, Scalar(3, Rat(3)), -1);
    auto cb = tail_norm_certificate(y, TailMode::maximal_ideal);
    CHECK_FALSE(cb.unbounded);
    CHECK(cb.r0 == Rat(1));
    // x = p t^-2 + t: r_0 = 1/2 (intersection of 1 - 2r > 0 with termwise min)
    Laurent z = Laurent::monomial(3, Scalar(3, Rat(3)), -2) + Laurent::t_power(3, 1);
    auto cc = tail_norm_certificate(z, TailMode::integral_image);
    CHECK(cc.r0 == Rat(1, 2));
    // certified inequality: valuation >= 0 on (0, r_0)
    for (const Rat& r : {Rat(1, 4), Rat(1, 3)})
        CHECK(z.gauss_valuation(r) >= Val(Rat(0)));
    // hypothesis violations pinpoint the term
    Laurent bad = Laurent::monomial(3, Scalar(3, Rat(1, 3)), 1);
    CHECK_THROWS_WITH_AS(tail_norm_certificate(bad, TailMode::integral_image),
                         doctest::Contains("t^1"), input_error);
    Laurent unit_neg = Laurent::t_power(3, -1);
    CHECK_THROWS_AS(tail_norm_certificate(unit_neg, TailMode::integral_image), input_error);
}

TEST_CASE("hensel lift: exact root immediately") {
    // P = x^2 - 1 from x0 = 1
    LaurentPoly P;
    P.c = {-one(5), Laurent(5), one(5)};
    auto hr = hensel_lift(P, one(5), Rat(30));
    CHECK(hr.iterations == 0);
    CHECK(hr.root == one(5));
    CHECK(hr.residual_valuation.is_inf());
}

TEST_CASE("hensel lift: x^2 = 1 + p t^-1 at p = 5") {
    LaurentPoly P;
    Laurent target = one(5) + Laurent::monomial(5, Scalar(5, Rat(5)), -1);
    P.c = {-target, Laurent(5), one(5)};
    auto hr = hensel_lift(P, one(5), Rat(20));
    // leading coefficients: 1 + (p/2) t^-1 - (p^2/8) t^-2 + ...
    CHECK(hr.root.coeff_t(0) == Scalar::one(5));
    CHECK(hr.root.coeff_t(-1) == Scalar(5, Rat(5, 2)));
    CHECK(hr.root.coeff_t(-2) == Scalar(5, Rat(-25, 8)));
    // squaring the output matches 1 + p t^-1 to the target valuation
    Laurent resid = hr.root * hr.root - target;
    CHECK(resid.gauss_valuation(Rat(1, 4)).finite() > Rat(20));
    // quadratic convergence: residual valuation at least doubles each step
    for (size_t i = 1; i + 1 < hr.residual_trace.size(); ++i) {
        if (hr.residual_trace[i].is_inf() || hr.residual_trace[i + 1].is_inf()) break;
        CHECK(hr.residual_trace[i + 1].finite() >= hr.residual_trace[i].finite() * 2);
    }
}

TEST_CASE("hensel lift: Artin-Schreier-type polynomial x^p - x - p u t^-1") {
    const unsigned p = 3;
    LaurentPoly P;
    Laurent c0 = Laurent::monomial(p, Scalar(p, Rat(-3)), -1);  // -p u t^-1, u = 1
    P.c = {c0, -one(p), Laurent(p), one(p)};                    // x^3 - x - 3 t^-1
    auto hr = hensel_lift(P, Laurent(p), Rat(18));
    // substitution check and positive-valuation coefficients
    Laurent eval = hr.root * hr.root * hr.root - hr.root - (-c0);
    CHECK(eval.gauss_valuation(Rat(1, 8)).finite() > Rat(18));
    for (const auto& [k, c] : hr.root.terms()) CHECK(c.valuation() > Val(Rat(0)));
}

TEST_CASE("lifted roots are unique at the certified precision") {
    LaurentPoly P;
    Laurent target = one(5) + Laurent::monomial(5, Scalar(5, Rat(5)), -1);
    P.c = {-target, Laurent(5), one(5)};
    auto h1 = hensel_lift(P, one(5), Rat(16));
    // second gate-satisfying start within the gate bound
    Laurent x0b = one(5) + Laurent::monomial(5, Scalar(5, Rat(25)), -1);
    auto h2 = hensel_lift(P, x0b, Rat(16));
    Laurent diff = h1.root - h2.root;
    if (!diff.is_zero()) CHECK(diff.gauss_valuation(Rat(1, 4)).finite() > Rat(8));
}

TEST_CASE("gate failure is an input-side certification error") {
    // P = x^2 - p: P(0) = -p, P'(0) = 0 -> no gate anywhere
    LaurentPoly P;
    P.c = {Laurent::constant(3, Scalar(3, Rat(-3))), Laurent(3), one(3)};
    CHECK_THROWS_AS(hensel_lift(P, Laurent(3), Rat(10)), std::exception);
}
