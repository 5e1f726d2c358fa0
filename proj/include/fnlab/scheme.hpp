#pragma once

#include <cstdint>
#include <vector>

#include "fnlab/degeneracy.hpp"
#include "fnlab/grid.hpp"
#include "fnlab/operators.hpp"
#include "fnlab/stencil.hpp"

namespace fnlab {

struct SchemeParams {
    double eta = 1e-8;      ///< gradient regularization floor, > 0
    double epsilon = 0.0;   ///< proper-term coefficient in -eps*u
    Stencil stencil = Stencil::standard(8);
};

/// Directional second difference (u(x+hw) - 2u(x) + u(x-hw)) / (h|w|)^2 along
/// the lattice direction w. Arms landing on exterior nodes are shortened to
/// the ray-boundary intersection and use the Dirichlet value there via the
/// three-point unequal-spacing formula (needs bd). Throws when the direction
/// exits the lattice.
double second_difference(const GridFunction& u, int node, LatticeDir w,
                         const BoundaryData* bd = nullptr, int reach = 1);

/// Centered axis differences; falls back to one-sided second-order stencils
/// when a neighbor is unavailable.
Vec2 discrete_gradient(const GridFunction& u, int node);

/// Monotone discretization of F via eigenvalue-wise weighted second
/// differences over the stencil frames (max for P+, min for P-), or the
/// A-weighted axis differences for (diagonal) linear-trace coefficients.
double discrete_F(const OperatorSpec& spec, const GridFunction& u, int node,
                  const Stencil& stencil, const BoundaryData* bd = nullptr);

/// Residual Phi(x, max(|xi + grad_h u|, eta)) * F_h(u) - f - eps*u at interior
/// nodes; NaN elsewhere. Band values of u are used as-is (impose first).
GridFunction residual(const DegeneracyLaw& law, const OperatorSpec& spec, const GridFunction& u,
                      const GridFunction& f, GradientShift xi, const SchemeParams& params,
                      const BoundaryData* bd = nullptr);

struct MonotonicityReport {
    int trials = 0;
    int violations = 0;
    double worst = 0.0;
};

/// Discrete degenerate-ellipticity check: with the gradient magnitude frozen,
/// raising any off-center stencil value must not decrease the residual, and
/// raising the center must not increase it (strict decrease by eps for
/// eps > 0). Randomized over grid states, nodes and slot choices.
MonotonicityReport monotonicity_check(const DegeneracyLaw& law, const OperatorSpec& spec,
                                      const SchemeParams& params, int trials, std::uint64_t seed);

/// Compiled per-grid residual evaluator for the solver hot path. Arm offsets
/// are uniform on the lattice; boundary-crossing arms are detected and
/// shortened to their ray-boundary intersections once, at build time.
class ResidualOperator {
public:
    ResidualOperator(std::shared_ptr<const Grid> grid, OperatorSpec spec, DegeneracyLaw law,
                     Stencil stencil, std::function<double(Vec2)> f, BoundaryData g,
                     Vec2 xi = {0, 0});

    const Grid& grid() const { return *grid_; }
    int n_interior() const { return static_cast<int>(grid_->interior().size()); }

    /// res[pos] = residual at interior node pos; coeff[pos] = Phi(x)*D(x), the
    /// center-coefficient bound used for the monotone step size.
    void eval(const std::vector<double>& u, double eta, double eps, int threads,
              std::vector<double>& res, std::vector<double>& coeff) const;

    /// Residual of a single interior node (same code path as eval).
    double eval_node(const std::vector<double>& u, int pos, double eta, double eps) const;

    double f_value(int pos) const { return f_vals_[pos]; }
    const BoundaryData& boundary() const { return g_; }
    const OperatorSpec& op() const { return spec_; }
    const DegeneracyLaw& law() const { return law_; }
    const Stencil& stencil() const { return stencil_; }
    Vec2 xi() const { return xi_; }
    double sup_f() const { return sup_f_; }

private:
    struct NodeEval;
    double combine(const std::vector<double>& u, int idx, double eta, double eps, double f_val,
                   double* coeff_out) const;

    std::shared_ptr<const Grid> grid_;
    OperatorSpec spec_;
    DegeneracyLaw law_;
    Stencil stencil_;
    BoundaryData g_;
    Vec2 xi_;
    std::vector<double> f_vals_;
    double sup_f_ = 0.0;

    // lattice geometry shared by all interior nodes
    struct DirInfo {
        int off;          ///< flat index offset of +arm
        double inv_len2;  ///< 1/(h|w|reach)^2
        double len;       ///< h|w|reach
    };
    std::vector<DirInfo> dirs_;       // 2 per frame
    bool use_axis_only_ = false;      // LinearTrace / InfSup path
    std::vector<double> a_diag_;      // per interior node: a11,a22 (LinearTrace)
    std::vector<double> family_diag_; // 2 per family member (InfSup)
    double inv_h2_ = 0.0;
    // shortened arms: key = pos * n_dirslots + slot
    struct CutArm {
        double rho;   ///< physical arm length to the boundary
        double bval;  ///< Dirichlet trace at the intersection
    };
    std::vector<std::pair<std::int64_t, CutArm>> cuts_;  // sorted by key
    std::vector<std::uint32_t> cutmask_;                 // per interior node, bit per slot
    int n_dirslots_ = 0;
    const CutArm* find_cut(std::int64_t key) const;
};

} // namespace fnlab
