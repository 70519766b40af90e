#pragma once

#include "padic/diffmod.hpp"

namespace padic {

// Bounds on f_i = -log_p s_i(M, p^-r) at one radius. newton_exact entries have
// lower == upper. spectral_truncated entries are honest brackets whose width
// reflects the truncation budget (never silently tightened).
struct RadiusBound {
    enum class Cert { newton_exact, spectral_truncated };
    unsigned level = 1;  // i, 1-based; level 1 is the smallest radius s_1
    Rat lower{0}, upper{0};
    Cert cert = Cert::spectral_truncated;
    unsigned budget = 0;  // truncation cap S or pushforward count

    bool exact() const { return lower == upper; }
};

struct SpectralBound {
    RadiusBound bound;     // level 1
    Rat estimate{0};       // p^k-subsequence estimate, clamped into the bracket
    unsigned used_S = 0;
};

// Certified bounds on f_1 from the derivation-power sequence:
//   upper: Fekete/subadditivity over Omega_s = min_{a+b=s}(v_p(a!) - a r + v(N_b)),
//          including the derivation's own norm floor (a = s term);
//   lower: 0 unless a certificate applies (rank-1 dominant monomial below -r,
//          or terminating derivation powers, both of which pin f exactly).
SpectralBound spectral_radius_bounds(const DiffModule& M, const LogRadius& r, unsigned S);

// Full multiset f_1 >= f_2 >= ... >= f_n at radius r via cyclic vector ->
// twisted-polynomial Newton polygon, applying Frobenius pushforwards (up to
// max_pushforwards) until slopes enter the visible regime f > 1/(p-1), then
// undoing the pushforward dictionary:
//   f < 1/(p-1): {p f} + (p-1) copies of p/(p-1);    f >= 1/(p-1): p copies of f+1.
// Slots that stay invisible come back as brackets [0, (1/(p-1)) p^-k].
// Pushing stops early when the pushed rank would exceed rank_cap (the
// Newton-polygon cost grows fast with rank); remaining brackets are honest.
std::vector<RadiusBound> newton_radii(const DiffModule& M, const LogRadius& r,
                                      unsigned max_pushforwards, unsigned rank_cap = 12);

// Partial sums F_i = f_1 + .. + f_i with interval-aware bounds.
struct PartialSum {
    Rat lo, hi;
    bool exact;
};
PartialSum partial_sum(const std::vector<RadiusBound>& radii, unsigned level);

// Exact piecewise-affine convex profile of F_i over a grid.
struct RadiusProfile {
    unsigned level = 1;
    std::vector<LogRadius> breakpoints;          // sampled r values that end segments
    std::vector<Rat> slopes;                     // per segment, in (1/n!)Z
    std::vector<Rat> values;                     // F_i at breakpoints
    std::vector<LogRadius> grid;                 // all sampled points
    std::vector<PartialSum> samples;             // F_i data per grid point
};

// Computes F_i on the grid, verifies convexity and (1/n!)Z slope quantization
// on the exact points, and assembles the lower convex envelope. Throws
// certification_error with a diagnostic on violation beyond certified gaps.
RadiusProfile radius_profile(const DiffModule& M, unsigned level,
                             std::vector<LogRadius> grid, unsigned max_pushforwards = 3);

// Boundary break slopes b_1 >= ... >= b_n from the final profile segments.
struct BreakData {
    std::vector<Rat> b;
    bool solvable = false;
    std::vector<LogRadius> grid;
    std::vector<std::vector<PartialSum>> F;  // F[i-1][j] over grid
};

// Requires the two smallest grid points to carry exact values on the final
// germ segment: certifies solvability (final segment through the origin),
// reads slopes, checks b_i in (1/n!)Z_{>=0}, and runs the big-slope criterion
// F_i(r) >= (b_1+..+b_i) r at every grid point.
BreakData break_slopes(const DiffModule& M, std::vector<LogRadius> grid,
                       unsigned max_pushforwards = 3);

// True iff derivation powers vanish identically by step `cap` (a full basis of
// polynomial horizontal sections exists, so every f_i = 0 exactly).
bool derivation_terminates(const DiffModule& M, unsigned cap);

}  // namespace padic
