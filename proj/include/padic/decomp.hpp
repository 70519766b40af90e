#pragma once

#include "padic/radii.hpp"

namespace padic {

// Dense twisted polynomial over the Laurent ring: sum c[i] T^i with
// T f = f T + D(f) for the module's derivation convention.
struct TPoly {
    unsigned p = 0;
    Convention conv = Convention::ddt;
    std::vector<Laurent> c;  // low degree first; may be non-monic

    unsigned degree() const;
    bool is_zero() const;
    static TPoly from_monic(const TwistedPoly& P);
};

TPoly tp_mul(const TPoly& A, const TPoly& B);
TPoly tp_add(const TPoly& A, const TPoly& B);
TPoly tp_sub(const TPoly& A, const TPoly& B);
// Right division A = Q*B + R, deg R < deg B; B must be monic.
std::pair<TPoly, TPoly> tp_divmod_right(const TPoly& A, const TPoly& B);
// Apply sum c_i D^i to a coordinate vector of M.
std::vector<Laurent> tp_apply(const TPoly& A, const DiffModule& M,
                              const std::vector<Laurent>& v);

// Solve A x = b over the Laurent ring by elimination with dominant-monomial
// pivot inversion at `at` (entries may be truncated; result carries the
// guarantee discipline of the inversion machinery).
std::vector<Laurent> solve_linear(const LMat& A, const std::vector<Laurent>& b,
                                  const Radii& at, const Rat& guarantee);
LMat invert_matrix(const LMat& G, const Radii& at, const Rat& guarantee);

// Newton-polygon slope-gap factorization P = Q*R (Hensel-style iteration) of
// a monic twisted polynomial, cutting after `d_right` roots counted from the
// low-degree side of the polygon. flip=false initializes R from the
// low-degree coefficients (R carries the large-valuation root group); flip=
// true from the high side. The iteration is gated on the residual valuation
// at `at` reaching target_valuation within the budget.
std::pair<TPoly, TPoly> hensel_split(const TPoly& P, unsigned d_right, bool flip,
                                     const Radii& at, const Rat& target_valuation,
                                     unsigned iter_budget);

struct SlopeFactor {
    Rat slope;           // common break of the factor
    DiffModule module;   // cleaned block
    unsigned rank;
};

struct SlopeDecomposition {
    std::vector<SlopeFactor> factors;  // sorted by decreasing slope
    LMat basis;                        // columns: new basis in old coordinates
    LMat basis_inv;
    Rat residual_guarantee;            // off-diagonal entries exceed this valuation
    BreakData breaks;
};

// Christol-Mebkhout slope decomposition via cyclic vector, twisted-polynomial
// slope-gap factorization and conversion of factors back to submodule bases.
// The working radius is chosen from the grid (largest point where the top
// break group is Newton-visible). Equal breaks return M as a single factor.
SlopeDecomposition slope_decompose(const DiffModule& M, std::vector<LogRadius> r_grid,
                                   const Rat& target_valuation = Rat(24),
                                   unsigned iter_budget = 64, unsigned max_pushforwards = 3);

// The slope-0 factor (possibly rank 0).
DiffModule regular_component(const DiffModule& M, std::vector<LogRadius> r_grid,
                             const Rat& target_valuation = Rat(24));

enum class SimVerdict { holds, fails, undecided };
std::string sim_verdict_str(SimVerdict v);

// Tests E1 ~ E2 via surjectivity of the two contraction maps through the
// regular component of E1^v (x) E2 (full row rank over the fraction field).
// The verdict is germ-level only insofar as the decomposition certificates
// cover the sampled grid; "undecided" when certification fails.
SimVerdict check_sim_relation(const DiffModule& M1, const DiffModule& M2,
                              const LogRadius& fiber_r, std::vector<LogRadius> r_grid,
                              std::string* diag = nullptr);

// Constructive unipotence test: solves for n independent horizontal sections
// of M[log t] (D log t = 1/t resp. 1) with bounded log degree on a truncated
// t-window, order by order over K.
bool has_log_horizontal_basis(const DiffModule& M, int t_window = 12);

}  // namespace padic
