#pragma once

#include "padic/family.hpp"

namespace padic {

// Built-in fixtures. Matrices are stored in the presentation the source uses
// (dt vs dt/t) and converted on load.
//
//   trivial            rank n, zero matrix (params: p, n)
//   artin-schreier     rank 1, D(v) = pi * sum f_i t^{-i-1} v, d/dt (params: p, m, f_i)
//   exponent           rank n, D(e_i) = iota_i e_i, t*d/dt (params: p, iota tuple)
//   bessel             rank 2, matrix [[0, t^-1],[pi^2 t^-2, 0]], d/dt (params: p odd)
//   as-family          rank 1, D(v) = pi * x * t^{-m-1} v (params: p, m)
//   bessel-family      rank 2, Bessel pulled back along (x,t) -> x^-1 t
//   exponent-family    rank n, D(e_i) = (a_i + b_i x) e_i, t*d/dt
//   box-as             rank 1, D(v) = pi t^{-m-1} v with x-direction
//                      Frobenius data available via dwork_frobenius_matrix

struct ExampleParams {
    unsigned p = 3;
    unsigned n = 1;
    unsigned m = 1;
    std::vector<Rat> iota;         // exponent fixtures
    std::vector<Rat> f;            // Artin-Schreier coefficients f_1..f_m
    std::vector<Rat> iota_slope;   // exponent-family b_i
    Annulus annulus{Rat(0), Rat(4), true};
};

struct Example {
    bool is_family = false;
    DiffModule module;
    FamilyModule family;
};

Example make_example(const std::string& name, const ExampleParams& params);

// Order-by-order solution of the rank-1 Frobenius horizontality equation
// A' = A (phi' N(phi) - N) for phi = t^p, normalized A(0-term) = 1; the Dwork
// exponential truncated to the window. var 0 = t; for families pass the
// matching variable index.
Laurent dwork_frobenius_matrix(unsigned p, const Laurent& N_entry, int window);

std::vector<std::string> example_names();

}  // namespace padic
