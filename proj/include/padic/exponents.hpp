#pragma once

#include "padic/radii.hpp"

namespace padic {

// Tuple in Z_p^n: entries are exact rationals with p-coprime denominator
// (exact = true) or integer residues in [0, p^precision) (exact = false).
struct ExponentTuple {
    unsigned p = 2;
    std::vector<Rat> entries;
    bool exact = true;
    unsigned precision = 0;  // meaningful when !exact

    unsigned size() const { return static_cast<unsigned>(entries.size()); }
};

// p^m <x/p^m>, the balanced representative: the smallest-absolute-value
// element of Z[1/p] congruent to x modulo p^m Z_p. With m = 0 this is <x>
// itself. For p = 2 midpoint ties the nonnegative representative is chosen.
Rat bracket(unsigned p, const Rat& x, unsigned m = 0);

// Decides Z wr S_n equivalence for exact tuples: a permutation sigma and
// integer shifts k_i with |k_i| <= shift_bound and B_i = A_{sigma(i)} + k_i.
// Returns the matching (index into A per B slot) if one exists.
std::optional<std::vector<unsigned>> equivalent(const ExponentTuple& A, const ExponentTuple& B,
                                                long shift_bound = 1024);

// Per-level weak-equivalence certificates: for each m <= m_max, whether some
// permutation achieves |p^m <(A_i - B_{sigma(i)})/p^m>| <= c*m for all i.
// A finite-level certificate, not a decision of the exists-c-forall-m
// statement.
struct WeakEquivalenceReport {
    std::vector<bool> feasible;  // index m-1
    bool all_feasible() const {
        for (bool b : feasible)
            if (!b) return false;
        return true;
    }
};
WeakEquivalenceReport weakly_equivalent_up_to(const ExponentTuple& A, const ExponentTuple& B,
                                              unsigned m_max, const Rat& c);

// Exponent recovery via the S_{m,A} determinant recursion. Columns are built
// from the averaged Taylor operators P_{m,a} = sum_s gamma_{m,a,s} (t^s/s!) D^s
// with integer weights gamma_{m,a,s} = sum_{j = a mod p^m} C(s,j)(-1)^{s-j};
// column refinement gamma_{m,a} = sum_{a' = a mod p^m} gamma_{m+1,a'} makes
// det(S_{m,A}) = sum_B det(S_{m+1,B}) hold exactly by multilinearity, which is
// asserted at every level. Candidate cosets are ranked by the valuation of
// the constant term of det(S_{m,A}); degenerate levels trigger bounded
// backtracking.
struct RecoveredExponent {
    ExponentTuple tuple;        // residues mod p^m
    std::vector<Rat> signals;   // constant-term valuations per level
    unsigned series_cap = 0;    // Taylor truncation used
    bool identity_verified = false;
};
RecoveredExponent recover_exponent(const DiffModule& M, const LogRadius& j_lo,
                                   const LogRadius& j_hi, unsigned m, unsigned budget = 256);

enum class BridgeVerdict { equivalent, not_equivalent, undecided };
std::string bridge_verdict_str(BridgeVerdict v);

struct BridgeResult {
    BridgeVerdict verdict;
    std::optional<std::vector<unsigned>> matching;
    std::string reason;
};

// Tuple-level bridge: with A exact and certified non-Liouville (rational
// entries are non-Liouville by construction) and B weakly equivalent to A at
// the working levels, weak equivalence upgrades to equivalence. Uncertified
// inputs are refused as undecided.
BridgeResult bridge_extend(const ExponentTuple& A, const ExponentTuple& B,
                           bool non_liouville_certified, unsigned m_levels = 6,
                           long shift_bound = 1024);

}  // namespace padic
