#pragma once

#include <functional>
#include <random>

#include "padic/laurent.hpp"

namespace padic {

// Annulus in log-radius coordinates: r in [r_min, r_max], r = -log_p(rho).
// r_min = 0 with open_at_boundary=true is the germ side rho -> 1^-.
struct Annulus {
    LogRadius r_min{0};
    LogRadius r_max{1};
    bool open_at_boundary = true;

    bool contains(const LogRadius& r, bool strict_inside = false) const {
        if (r > r_max || r < r_min) return false;
        if (strict_inside && (r == r_max || r == r_min)) return false;
        if (open_at_boundary && r == r_min) return false;
        return true;
    }
    Annulus scaled(const Rat& c) const { return {r_min * c, r_max * c, open_at_boundary}; }
};

// Dense matrix over Laurent elements (row-major).
class LMat {
public:
    LMat() : rows_(0), cols_(0) {}
    LMat(unsigned rows, unsigned cols, unsigned p, unsigned nparams = 0)
        : rows_(rows), cols_(cols), e_(size_t(rows) * cols, Laurent(p, nparams)), p_(p),
          nparams_(nparams) {}
    static LMat identity(unsigned n, unsigned p, unsigned nparams = 0);

    unsigned rows() const { return rows_; }
    unsigned cols() const { return cols_; }
    unsigned prime() const { return p_; }
    unsigned nparams() const { return nparams_; }
    Laurent& at(unsigned i, unsigned j) { return e_[size_t(i) * cols_ + j]; }
    const Laurent& at(unsigned i, unsigned j) const { return e_[size_t(i) * cols_ + j]; }

    LMat operator+(const LMat& o) const;
    LMat operator-(const LMat& o) const;
    LMat operator*(const LMat& o) const;  // OpenMP over output entries when large
    LMat operator-() const;
    bool operator==(const LMat& o) const { return e_ == o.e_; }
    LMat transposed() const;
    LMat derived(Convention conv) const;  // entrywise
    LMat scaled(const Laurent& f) const;
    bool is_zero() const;
    // Minimum Gauss valuation over entries (infinity if zero matrix).
    Val min_valuation(const Radii& at) const;

    // Fraction-free Bareiss determinant (exact).
    Laurent det() const;
    // Rank over the fraction field (via Bareiss elimination).
    unsigned rank_ff() const;
    // One fraction-free elimination computing det(A) and all Cramer
    // numerators N_i = det(A with column i replaced by b), so x_i = N_i/det.
    struct CramerFF {
        Laurent det;
        std::vector<Laurent> num;
    };
    CramerFF cramer_ff(const std::vector<Laurent>& b) const;

private:
    unsigned rows_, cols_;
    std::vector<Laurent> e_;
    unsigned p_ = 0;
    unsigned nparams_ = 0;
};

// Connection matrix presentation of a differential module on an annulus:
// D(e_j) = sum_i N[i][j] e_i for the chosen derivation convention.
// Parameter variables (Gauss-point fibers of families) ride along with fixed
// log-radii recorded in param_radii.
class DiffModule {
public:
    DiffModule() = default;
    DiffModule(unsigned p, unsigned rank, Convention conv, Annulus ann, LMat N,
               std::vector<LogRadius> param_radii = {});

    unsigned prime() const { return p_; }
    unsigned rank() const { return rank_; }
    Convention convention() const { return conv_; }
    const Annulus& annulus() const { return ann_; }
    const LMat& matrix() const { return N_; }
    unsigned nparams() const { return static_cast<unsigned>(param_radii_.size()); }
    const std::vector<LogRadius>& param_radii() const { return param_radii_; }
    Radii radii_at(const LogRadius& r) const { return Radii(r, param_radii_); }

    DiffModule converted(Convention target) const;
    DiffModule dual() const;
    DiffModule tensor(const DiffModule& o) const;
    static DiffModule direct_sum(const DiffModule& a, const DiffModule& b);
    // Basis change by invertible G (columns = new basis): N' = G^-1 (N G + D(G)).
    DiffModule conjugated(const LMat& G, const LMat& G_inv) const;

    bool operator==(const DiffModule& o) const;

private:
    unsigned p_ = 0;
    unsigned rank_ = 0;
    Convention conv_ = Convention::ddt;
    Annulus ann_;
    LMat N_;
    std::vector<LogRadius> param_radii_;
};

// Matrices of D, D^2, ..., D^S on the basis via N_{s+1} = N N_s + D(N_s).
// Exact for polynomial entries. Throws input_error when the support grows
// past max_terms (window overflow guard).
std::vector<LMat> derivation_powers(const DiffModule& M, unsigned S,
                                    size_t max_terms = 2000000);

// Monic twisted polynomial T^n - a_{n-1} T^{n-1} - ... - a_0 over the Laurent
// ring, T acting as D with T.f = f.T + D(f).
struct TwistedPoly {
    unsigned p = 0;
    Convention conv = Convention::ddt;
    std::vector<Laurent> a;  // a[i], i = 0..n-1
    unsigned degree() const { return static_cast<unsigned>(a.size()); }
};

// Cyclic vector search output. The twisted polynomial's coefficients are kept
// as exact Cramer fractions a_i = num_i / wronskian so Newton-polygon data
// stays exact even when plain division would truncate.
struct CyclicData {
    std::vector<Laurent> v;           // coordinates of the cyclic vector
    Laurent wronskian;                // det [v, Dv, .., D^{n-1}v]
    std::vector<Laurent> cramer_num;  // numerator dets, size n
};

// Deterministic ladder search, then seeded random fallback; certified by a
// nonzero Wronskian with finite Gauss valuation at r_probe.
CyclicData cyclic_data(const DiffModule& M, const LogRadius& r_probe,
                       unsigned random_budget = 32, uint64_t seed = 1);

// Spec-facing wrapper: divides the Cramer fractions at r_probe under the
// given guarantee to produce honest LaurentElement coefficients.
std::pair<std::vector<Laurent>, TwistedPoly> cyclic_vector(const DiffModule& M,
                                                           const LogRadius& r_probe,
                                                           const Rat& guarantee = Rat(64));

// Pullback along t = g(u): N~ = g'(u) * (N o g) in d/dt convention, then
// converted to new_conv. The working radius r_u fixes Gauss norms for the
// substitution machinery; annulus bounds are supplied by the caller since g
// rescales radii.
DiffModule pullback(const DiffModule& M, const Laurent& g, Convention new_conv,
                    const Annulus& new_annulus, const LogRadius& r_u_probe,
                    const Rat& guarantee = Rat(64));

// Frobenius pushforward along u = t^p: rank multiplies by p, basis e_i t^j
// (0 <= j < p), d/du = (1/(p t^{p-1})) d/dt; annulus radii multiply by p.
DiffModule frobenius_pushforward(const DiffModule& M);

// Horizontality residual of a Frobenius structure A: phi* M -> M for the
// K-linear lift phi(t) = t^q + u, |u|_rho < 1:
//   d/dt:    D(A) + N A - A phi'(t) N(phi(t))
//   t*d/dt:  D(A) + N A - A (t phi'(t)/phi(t)) N(phi(t))
// (specializes to N A + t d/dt(A) = p A N for phi = t^p, constant N).
// Returns true iff every residual entry has Gauss valuation > tol_valuation
// across the annulus (checked at both ends; valuations are concave in r).
bool verify_frobenius_structure(const DiffModule& M, const Laurent& phi, const LMat& A,
                                const Rat& tol_valuation, std::string* diag = nullptr);

// Checks the Frobenius-lift shape phi = t^q + u with q a power of p and
// |u| < 1 near the boundary; returns q or throws input_error.
unsigned frobenius_lift_exponent(const Laurent& phi, const Annulus& ann);

// Random unimodular gauge (product of elementary shears, diagonal t-power
// rescalings and permutations) together with its exact inverse.
std::pair<LMat, LMat> random_gauge(unsigned p, unsigned n, std::mt19937_64& rng,
                                   unsigned nparams = 0);

// True iff M admits a full basis of horizontal sections with Laurent
// polynomial coordinates supported in [-window, window]: a basis-invariant
// certificate that every radius is exactly 1 (all f_i = 0).
bool has_polynomial_horizontal_basis(const DiffModule& M, int window);

}  // namespace padic
