#include "padic/hensel.hpp"

namespace padic {

TailCertificate tail_norm_certificate(const Laurent& x, TailMode mode) {
    if (x.nparams() != 0) throw input_error("tail certificate expects a univariate element");
    TailCertificate cert;
    cert.unbounded = true;
    cert.r0 = Rat(0);
    for (const auto& [k, c] : x.terms()) {
        Val v = c.valuation();
        const Rat& vq = v.finite();
        if (vq < 0)
            throw input_error("coefficient of t^" + std::to_string(k[0]) +
                              " has negative valuation " + rat_str(vq));
        if (mode == TailMode::maximal_ideal && vq == 0)
            throw input_error("coefficient of t^" + std::to_string(k[0]) +
                              " is a unit; not in the maximal ideal");
        if (k[0] < 0) {
            if (vq == 0)
                throw input_error("negative-exponent coefficient of t^" +
                                  std::to_string(k[0]) + " is a unit");
            // v + k r > 0  <=>  r < v / (-k)
            Rat lim = vq / Rat(-(long)k[0]);
            lim.canonicalize();
            cert.witnesses.push_back({k[0], vq, lim});
            if (cert.unbounded || lim < cert.r0) {
                cert.r0 = lim;
                cert.unbounded = false;
            }
        }
    }
    if (cert.unbounded) cert.r0 = Rat(0);  // no constraint; caller treats as +inf
    return cert;
}

Laurent poly_eval(const LaurentPoly& P, const Laurent& x, const Radii& at) {
    (void)at;
    Laurent acc(x.prime(), x.nparams());
    for (size_t i = P.c.size(); i-- > 0;) {
        acc = acc * x;
        acc = acc + P.c[i];
    }
    return acc;
}

LaurentPoly poly_derivative(const LaurentPoly& P) {
    LaurentPoly D;
    for (size_t i = 1; i < P.c.size(); ++i) {
        Scalar k(P.c[i].prime(), Rat((long)i));
        D.c.push_back(P.c[i].scaled(k));
    }
    return D;
}

namespace {

// Valuation of f on the open interval (0, r0): per-term affine minimum
// evaluated at both ends (valuations are concave piecewise affine in r).
Val interval_valuation(const Laurent& f, const LogRadius& r0) {
    Val v0 = f.gauss_valuation(Rat(0));
    Val v1 = f.gauss_valuation(r0);
    return min(v0, v1);
}

}  // namespace

HenselResult hensel_lift(const LaurentPoly& P, const Laurent& x0, const Rat& target_valuation,
                         unsigned iter_budget, int window) {
    const unsigned p = x0.prime();
    if (P.c.empty() || !(P.c.back() == Laurent::constant(p, Scalar::one(p))))
        throw input_error("hensel_lift: polynomial must be monic");
    LaurentPoly dP = poly_derivative(P);

    // Certified interval: start from the tail structure of P(x0) and P'(x0).
    Laurent e0 = poly_eval(P, x0, Radii(Rat(0)));
    Laurent d0 = poly_eval(dP, x0, Radii(Rat(0)));
    if (d0.is_zero()) throw input_error("hensel_lift: P'(x0) = 0");
    // Choose r0 from the gate v_r(P(x0)) > 2 v_r(P'(x0)): both sides are
    // piecewise affine in r; sample the germ at 0 and bisect down from 1.
    LogRadius r0(1);
    auto gate_holds = [&](const LogRadius& r) {
        Val ve = e0.gauss_valuation(r);
        Val vd = d0.gauss_valuation(r);
        if (ve.is_inf()) return true;
        return ve > vd + vd;
    };
    {
        Val ve0 = e0.gauss_valuation(Rat(0));
        Val vd0 = d0.gauss_valuation(Rat(0));
        if (!(ve0.is_inf() || ve0 > vd0 + vd0))
            throw certification_error("hensel_lift: Newton gate fails at the boundary germ");
        unsigned guard = 0;
        while (!gate_holds(r0)) {
            r0 /= 2;
            if (++guard > 64)
                throw certification_error("hensel_lift: no certified interval for the gate");
        }
    }
    LogRadius r_work = r0 / 2;
    Radii at(r_work);

    HenselResult res;
    res.r0 = r0;
    Laurent x = x0;
    Val deficit = interval_valuation(d0, r0);  // v(P'(x0)), fixed Newton deficit
    Val last = interval_valuation(e0, r0);
    res.residual_trace.push_back(last);
    for (unsigned it = 0; it < iter_budget; ++it) {
        Laurent e = poly_eval(P, x, at);
        Val ve = min(e.gauss_valuation(Rat(0)), e.gauss_valuation(r_work));
        if (ve.is_inf() || ve > Val(target_valuation)) {
            res.root = x;
            res.residual_valuation = ve;
            res.iterations = it;
            return res;
        }
        Laurent d = poly_eval(dP, x, at);
        auto [dinv, g] = d.inverted(at, Val(target_valuation + Rat(16)));
        Laurent step = e * dinv;
        x = x - step;
        Val dropped = x.clip(0, -window, window, at);
        if (dropped < Val(target_valuation + Rat(4)))
            throw certification_error("hensel_lift: window too small for the target valuation");
        // Quadratic convergence check: new residual >= 2*old - 2*deficit.
        Laurent e2 = poly_eval(P, x, at);
        Val ve2 = min(e2.gauss_valuation(Rat(0)), e2.gauss_valuation(r_work));
        res.residual_trace.push_back(ve2);
        if (!ve2.is_inf()) {
            Val bound = ve + ve + (deficit * Rat(-2));
            if (ve2 < bound)
                throw std::logic_error(
                    "hensel_lift: residual grew slower than the certified quadratic rate");
        }
        last = ve2;
    }
    throw certification_error("hensel_lift: iteration budget exhausted before target (gate bug?)");
}

}  // namespace padic
