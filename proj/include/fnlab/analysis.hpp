#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fnlab/degeneracy.hpp"
#include "fnlab/grid.hpp"
#include "fnlab/operators.hpp"
#include "fnlab/solver.hpp"

namespace fnlab {

/// Masked lattice of values, the common substrate for contact-set operations
/// (works for PDE grids and plain test lattices alike).
struct LatticeView {
    Vec2 origin;
    double h = 1.0;
    int nx = 0, ny = 0;
    std::vector<std::uint8_t> valid;
    std::vector<double> value;

    int index(int i, int j) const { return j * nx + i; }
    Vec2 point(int idx) const { return {origin.x + (idx % nx) * h, origin.y + (idx / nx) * h}; }
    double sup_abs() const;

    static LatticeView from_grid(const GridFunction& u);
    static LatticeView square(Vec2 lo, double h, int n, const std::function<double(Vec2)>& f);
};

/// Nodes admitting a supporting plane from above over the whole node set.
struct ContactSet {
    std::vector<std::uint8_t> flag;  ///< per lattice cell (0 outside valid set)
    std::vector<Vec2> slope;         ///< supporting slope where flagged
    std::vector<double> envelope;    ///< concave envelope values
    int count = 0;
};

/// Concave-envelope route: iterated exact 1D concave majorants along every
/// lattice direction (reach-limited) until a fixed point, then flag nodes with
/// envelope == value within 1e-10*scale. Slopes come from envelope finite
/// differences, repaired by an exact LP slope across envelope kinks. If
/// slope_bound is set, additionally requires |p| <= slope_bound (Gamma^+_R;
/// the LP searches the inf-norm box, the final filter is the 2-norm ball).
ContactSet upper_contact_set(const LatticeView& v, std::optional<double> slope_bound = {},
                             int max_dir_reach = 0 /*0 = full lattice*/);

/// Brute-force oracle: per-node 2D LP feasibility of the supporting-plane
/// constraints (deterministic incremental with a fixed shuffle).
std::vector<std::uint8_t> upper_contact_set_bruteforce(const LatticeView& v,
                                                       std::optional<double> slope_bound = {},
                                                       std::uint64_t seed = 12345);

struct AbpReport {
    double lhs = 0;         ///< sup |u|
    double sup_g = 0;       ///< sup |g| on the boundary
    double f_ln_contact = 0;///< L^n norm of f over the upper contact set of u^+
    double rhs_core = 0;    ///< max{ norm^{1/(1+i)}, norm^{1/(1+s)} }
    double diam = 0;
    double fitted_c = 0;    ///< smallest c making the ABP inequality hold
    int contact_count = 0;
};

AbpReport abp_verify(const GridFunction& u, const BoundaryData& g,
                     const std::function<double(Vec2)>& f, const DegeneracyLaw& law,
                     EllipticityPair e, const Domain& dom, int contact_dir_reach = 8);

struct BarrierWValue {
    double w = 0;
    Vec2 grad{0, 0};
    double pucci_upper_bound = 0;  ///< evaluated bound on P+(D^2 w) over the strip
};

/// Boundary barrier w(y) = (2/delta) d(y)/(1+d(y)^gamma), plus the cubic tail
/// (|y|-r)^3/(1-r)^3 outside B_r(anchor); closed-form gradient and the strip
/// bound on P+(D^2 w). Requires y in the C^2 strip d(y) < delta1.
BarrierWValue barrier_w(const Domain& dom, double delta, double gamma, double r, Vec2 y,
                        EllipticityPair e, double d2d_bound = 0 /*0 = measure*/,
                        double delta1 = 0 /*0 = ball_condition_radius/2*/, Vec2 anchor = {0, 0});

/// Measured sup |D^2 d| over the strip d < delta1 (finite differences of the
/// distance gradient at sampled strip points).
double measure_d2d_bound(const Domain& dom, double delta1, int samples = 256);

struct DistanceCheckReport {
    int checked = 0;
    int violations = 0;
    double worst = 0;  ///< largest excess |u-g| - (6/delta) d/(1+d^gamma)
};

/// Boundary growth check |u(y)-g(proj y)| <= (6/delta)
/// d/(1+d^gamma) on the strip d < delta1 (pass a normalized u).
DistanceCheckReport barrier_distance_check(const GridFunction& u, const BoundaryData& g,
                                           double delta, double gamma,
                                           double delta1 = 0 /*0 = bcr/2*/);

enum class ComparisonMode { SmoothSuper, EpsilonProper };

struct ComparisonReport {
    bool premise_ok = false;
    double premise_margin_sub = 0;    ///< min residual(v)
    double premise_margin_super = 0;  ///< -max residual(w)
    bool band_ordered = false;
    bool ordered = false;
    double worst_violation = 0;  ///< max (v - w) over interior
};

/// Verifies residual(v) >= 0 >= residual(w) (premise; strict gap in
/// SmoothSuper mode), v <= w on the band, then v <= w + tol in the interior.
ComparisonReport comparison_verify(const DiscreteProblem& dp, const GridFunction& v,
                                   const GridFunction& w, ComparisonMode mode, double eps,
                                   double eta = 0, double strict_gap = 0,
                                   double tol = 0 /*0 = 1e-8*scale*/);

struct SmallnessResult {
    double K = 0;
    double r = 0;
    DegeneracyLaw law_bar = DegeneracyLaw::power(0);
    std::function<double(Vec2)> u_bar;  ///< u(x0 + r y)/K, NaN outside the sampled region
    std::function<double(Vec2)> f_bar;  ///< r^2 f(x0 + r y) / (Phi(x0 + r y, K/r) K)
    std::function<double(Vec2)> g_bar;  ///< g(x0 + r y)/K
    double sup_u_bar = 0;
    double sup_f_bar = 0;
    double norm_u = 0, norm_g_c1b = 0, norm_f = 0;
    bool ok = false;  ///< sup|u_bar| <= 1 and sup|f_bar| <= eps0 post hoc
};

/// Smallness rescaling about the boundary point x0:
/// K = 2(1+|u|+|g|_{C^{1,bg}}+[L/nu0 |f|]^{1/(1+i)}), r = eps0^{1/(2+i)}.
SmallnessResult smallness_rescale(const GridFunction& u, const std::function<double(Vec2)>& f,
                                  const BoundaryData& g, const DegeneracyLaw& law, Vec2 x0,
                                  double eps0);

struct RegularityTarget {
    double alpha_bar = 0.99;
    double alpha_max = 0;
    bool attained = false;
};

/// Admissible Hoelder interval sup for the gradient: min over the
/// Krylov-Safonov cap, the structural bound 1/(1+s) (degenerate) or
/// 1/(1+s-i) (singular), and beta_g; attained iff the closed structural
/// bracket is the strict minimum.
RegularityTarget alpha_admissible(const DegeneracyLaw& law, double beta_g, double alpha_bar = 0.99);

struct AffineTracker {
    std::vector<double> radii;    ///< rho^k
    std::vector<double> sup_err;  ///< e_k = sup |u - l_k|
    std::vector<double> a;        ///< fitted constants
    std::vector<Vec2> b;          ///< fitted slopes
    double alpha_fit = 0;
    double c0_fit = 0;  ///< fitted (E2) constant for slope increments
};

/// Least-squares affine fits on B_{rho^k}(center) with sup-norm errors and a
/// log-linear fit of the decay exponent. Requires rho^{k_max} >= 4h.
AffineTracker affine_fit_sequence(const GridFunction& u, Vec2 center, double rho, int k_max,
                                  double alpha_cap = 0.99);

/// Max difference quotient |u(x)-u(y)|/|x-y| over valid node pairs within the
/// given region and below the pair-distance cap.
double lipschitz_estimate(const GridFunction& u, Vec2 region_center, double region_radius,
                          double pair_cap = 0 /*0 = 3h*/);

/// omega(s) = s - omega0 s^{3/2} capped at its maximum s0 = (2/(3 omega0))^2.
double modulus_omega(double s, double omega0);

} // namespace fnlab
