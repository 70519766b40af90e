#pragma once

#include "padic/radii.hpp"

namespace padic {

struct ParamBox {
    LogRadius r_min{0};
    LogRadius r_max{2};
};

// Rank-n module over a polyannulus: polynomial dependence on parameters
// x_1..x_k, O_X-linear connection in the t direction only.
class FamilyModule {
public:
    FamilyModule() = default;
    FamilyModule(unsigned p, unsigned rank, Convention conv, Annulus ann, LMat N,
                 std::vector<ParamBox> boxes);

    unsigned prime() const { return p_; }
    unsigned rank() const { return rank_; }
    Convention convention() const { return conv_; }
    const Annulus& annulus() const { return ann_; }
    const LMat& matrix() const { return N_; }
    unsigned nparams() const { return static_cast<unsigned>(boxes_.size()); }
    const std::vector<ParamBox>& boxes() const { return boxes_; }

private:
    unsigned p_ = 0;
    unsigned rank_ = 0;
    Convention conv_ = Convention::ddt;
    Annulus ann_;
    LMat N_;
    std::vector<ParamBox> boxes_;
};

// Evaluation point for one parameter: a classical scalar or a Gauss point.
struct FiberPoint {
    enum class Kind { classical, gauss } kind;
    Scalar value;   // classical
    LogRadius r;    // gauss
    static FiberPoint classical(Scalar v) { return {Kind::classical, std::move(v), Rat(0)}; }
    static FiberPoint gauss(LogRadius r) {
        return {Kind::gauss, Scalar(), std::move(r)};
    }
    std::string str() const;
};

// Exact fiber at the point; classical values must lie in the parameter box
// (log-radius = valuation), Gauss radii likewise.
DiffModule specialize(const FamilyModule& F, const std::vector<FiberPoint>& point);

struct ScanRow {
    std::vector<FiberPoint> point;
    bool solvable = false;
    std::optional<Rat> value;  // b_1 + .. + b_i
    std::string note;
};

struct ScanResult {
    unsigned level;
    std::vector<ScanRow> rows;
    std::optional<Rat> gauss_value;       // value at the all-Gauss fiber when sampled
    bool gauss_attains_max = false;       // finite-sample shadow of semicontinuity
    bool generic_locus_consistent = true; // classical fibers matching the Gauss radii stay <=
    unsigned distinct_values = 0;
};

// Computes b_1 + .. + b_i per fiber and reports the finite-sample
// consequences of upper semicontinuity; raw data only, no topology claims.
ScanResult semicontinuity_scan(const FamilyModule& F,
                               const std::vector<std::vector<FiberPoint>>& points,
                               unsigned level, std::vector<LogRadius> near_boundary_grid,
                               unsigned max_pushforwards = 3);

struct ConstancyResult {
    bool frobenius_verified = false;
    bool constant = false;
    bool convexity_consistent = false;
    std::vector<std::pair<LogRadius, std::vector<Rat>>> t_breaks;  // per r_x
    std::string note;
};

// Partial-Frobenius constancy check in a one-parameter family: verifies the
// x-direction Frobenius structure (D_t(A) + N A = A N(phi_x(x)); no derivative
// factor since phi acts on x and D on t), refuses the verdict if it fails,
// then compares t-breaks across Gauss fibers r_x and checks bivariate
// convexity of sampled F_i values.
ConstancyResult partial_frobenius_constancy(const FamilyModule& F, const Laurent& phi_x,
                                            const LMat& A_x, std::vector<LogRadius> r_x_grid,
                                            std::vector<LogRadius> t_grid,
                                            const Rat& tol_valuation = Rat(4),
                                            unsigned max_pushforwards = 3);

enum class RegularProbe { regular, not_regular, undecided };
std::string regular_probe_str(RegularProbe r);

std::vector<RegularProbe> regular_locus_probe(const FamilyModule& F,
                                              const std::vector<std::vector<FiberPoint>>& points,
                                              std::vector<LogRadius> near_boundary_grid,
                                              unsigned max_pushforwards = 3);

}  // namespace padic
