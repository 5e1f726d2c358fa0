#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "fnlab/scheme.hpp"

namespace fnlab {

/// Dirichlet problem Phi(x,|xi+Du|) F(D^2 u) = f in Omega, u = g on the boundary.
struct Problem {
    std::shared_ptr<const Domain> dom;
    OperatorSpec op = OperatorSpec::laplacian();
    DegeneracyLaw law = DegeneracyLaw::power(0.0);
    std::function<double(Vec2)> f = [](Vec2) { return 0.0; };
    BoundaryData g{[](Vec2) { return 0.0; }};
    Vec2 xi{0, 0};
};

struct SolveConfig {
    std::vector<double> eps_schedule{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
    double cfl = 0.5;
    bool local_cfl = true;   ///< per-node step 2cfl/(Phi D + 2eps); false = spec's global rule
    double tol_rel = 1e-8;   ///< residual tolerance relative to data scale
    long max_iters = 4000000;
    double eta_final = 0.0;  ///< 0 = auto: 1e-6 h (i<=0), h^{1/(1+i)} (i>0)
    int threads = 1;
    int stencil_m = 8;
    int stencil_reach = 1;
};

struct StageReport {
    double eps = 0;
    double eta = 0;
    long iters = 0;
    double final_residual = 0;
};

struct SolveReport {
    std::vector<StageReport> stages;
    std::vector<double> eps_deltas;  ///< sup |u_eps - u_{eps'}| between stages
    double tol_abs = 0;
    double phi_min = 0, phi_max = 0;  ///< realized Phi range on the final state
    double eta_final = 0;
    double lipschitz = 0;  ///< near-neighbor Lipschitz seminorm of the final state
    bool converged = false;
};

class SolveError : public std::runtime_error {
public:
    SolveError(std::string msg, double eps, long iters, double residual)
        : std::runtime_error(std::move(msg)), eps(eps), iters(iters), residual(residual) {}
    double eps;
    long iters;
    double residual;
};

/// Grid + compiled residual operator + imposed boundary template for a problem.
struct DiscreteProblem {
    Problem prob;
    std::shared_ptr<const Grid> grid;
    std::shared_ptr<const ResidualOperator> rop;
    GridFunction boundary_template;  ///< band values imposed, interior NaN

    DiscreteProblem(Problem p, double h, const SolveConfig& cfg);
    double data_scale() const;
};

double auto_eta_final(const DegeneracyLaw& law, double h);

/// Explicit monotone pseudo-time iteration at fixed eps until the residual
/// sup-norm is below tol. init's band values are overwritten by the imposed
/// boundary template and its interior is clamped to the given bounds.
GridFunction solve_epsilon(const DiscreteProblem& dp, double eps, double eta,
                           const GridFunction& init, const SolveConfig& cfg, StageReport* stage);

/// eps-continuation along the schedule with warm starts; reports stagewise
/// convergence and the sup-norm Cauchy deltas of the continuation tail.
std::pair<GridFunction, SolveReport> solve_dirichlet(const Problem& prob, double h,
                                                     const SolveConfig& cfg,
                                                     const GridFunction* warm_start = nullptr);

struct BarrierResult {
    GridFunction w;
    double K = 0;
    double kappa0 = 0;
    double margin = 0;  ///< worst slack of the discrete barrier inequality
};

/// Power-type supersolution w(x) = inf_{z,delta} g(z)+delta+M_delta v_z(x)
/// with v_z(x) = K(r^{-k0} - |x-x_z|^{-k0}), k0 = (n Lambda + 1)/lambda. K grows
/// (doubling) until Phi F_h(w) - eps w <= -sup|f| at every interior node and
/// w >= imposed g on the band. eta must match the scheme's floor (0 = auto).
BarrierResult build_supersolution(const DiscreteProblem& dp, double eps, double eta = 0.0,
                                  double K_init = 0.0);
/// Mirror image: v(x) = sup_{z,delta} g(z)-delta-M_delta v_z(x), residual >= +sup|f|.
BarrierResult build_subsolution(const DiscreteProblem& dp, double eps, double eta = 0.0,
                                double K_init = 0.0);

/// Bilinear interpolation of a coarse solution onto a finer grid (warm starts);
/// falls back to boundary data outside the coarse valid region.
GridFunction interpolate_to(const GridFunction& coarse, std::shared_ptr<const Grid> fine,
                            const BoundaryData& bd);

} // namespace fnlab
