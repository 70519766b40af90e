#pragma once

#include "padic/laurent.hpp"

namespace padic {

// Per-term affine certificate that a bounded-Robba-ring element keeps Gauss
// valuation >= 0 (integral_image) or > 0 (maximal_ideal) on (0, r0).
enum class TailMode { integral_image, maximal_ideal };

struct TailCertificate {
    LogRadius r0;        // valid on (0, r0); r0 = +inf encoded by unbounded=true
    bool unbounded = false;
    // per negative-exponent term: (exponent, coefficient valuation, binding r)
    struct TermBound {
        int exponent;
        Rat coeff_valuation;
        Rat r_limit;
    };
    std::vector<TermBound> witnesses;
};

// Throws input_error naming the offending term when the mode's hypothesis on
// the coefficients fails.
TailCertificate tail_norm_certificate(const Laurent& x, TailMode mode);

// Monic polynomial over the Laurent ring, low degree first, c.back() == 1.
struct LaurentPoly {
    std::vector<Laurent> c;
    unsigned degree() const { return static_cast<unsigned>(c.size()) - 1; }
};

Laurent poly_eval(const LaurentPoly& P, const Laurent& x, const Radii& at);
LaurentPoly poly_derivative(const LaurentPoly& P);

struct HenselResult {
    Laurent root;
    Val residual_valuation;          // v_r(P(root)) at the working radius
    std::vector<Val> residual_trace; // per-iteration residuals
    LogRadius r0;                    // certified interval (0, r0)
    unsigned iterations = 0;
};

// Newton-Raphson lifting gated by v_r(P(x0)) > 2 v_r(P'(x0)) on (0, r0).
// Residual valuation must at least double (minus the constant P'(x0) deficit)
// every step; that invariant is asserted per iteration.
HenselResult hensel_lift(const LaurentPoly& P, const Laurent& x0, const Rat& target_valuation,
                         unsigned iter_budget = 64, int window = 96);

}  // namespace padic
