#include "fnlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fnlab/parallel.hpp"

namespace fnlab {

namespace {

Stencil cfg_stencil(const SolveConfig& cfg) {
    return Stencil::standard(cfg.stencil_m, cfg.stencil_reach);
}

std::shared_ptr<const Grid> make_dp_grid(const Problem& p, double h, const SolveConfig& cfg) {
    // boundary-crossing arms are shortened to the true boundary, so the band
    // only has to feed the centered/one-sided gradient samples
    (void)cfg;
    return build_grid(p.dom, h, 2.25);
}

} // namespace

DiscreteProblem::DiscreteProblem(Problem p, double h, const SolveConfig& cfg)
    : prob(std::move(p)),
      grid(make_dp_grid(prob, h, cfg)),
      rop(std::make_shared<ResidualOperator>(grid, prob.op, prob.law, cfg_stencil(cfg), prob.f,
                                             prob.g, prob.xi)),
      boundary_template(grid) {
    impose_boundary(boundary_template, prob.g);
}

double DiscreteProblem::data_scale() const {
    double gmax = 0.0;
    for (int idx : grid->band()) gmax = std::max(gmax, std::abs(boundary_template[idx]));
    return std::max({1.0, rop->sup_f(), gmax});
}

double auto_eta_final(const DegeneracyLaw& law, double h) {
    if (law.i() > 0.0) return std::pow(h, 1.0 / (1.0 + law.i()));
    return 1e-6 * h;
}

namespace {

/// Crude a-priori bound for clamping initial states (ABP-flavored).
double init_bound(const DiscreteProblem& dp) {
    const auto& law = dp.prob.law;
    double fr = dp.rop->sup_f() * law.L() / law.nu0();
    double d = dp.grid->domain().diameter();
    double b = d * (1.0 + std::pow(fr, 1.0 / (1.0 + law.i())) + std::pow(fr, 1.0 / (1.0 + law.s())));
    return 2.0 * (b + 1.0);
}

} // namespace

GridFunction solve_epsilon(const DiscreteProblem& dp, double eps, double eta,
                           const GridFunction& init, const SolveConfig& cfg, StageReport* stage) {
    if (!(eps > 0.0)) throw std::invalid_argument("solve_epsilon: eps > 0");
    if (!(eta > 0.0)) throw std::invalid_argument("solve_epsilon: eta > 0");
    const Grid& gr = *dp.grid;
    GridFunction u = dp.boundary_template;
    double glo = std::numeric_limits<double>::infinity(), ghi = -glo;
    for (int idx : gr.band()) {
        glo = std::min(glo, u[idx]);
        ghi = std::max(ghi, u[idx]);
    }
    const double bound = init_bound(dp);
    for (int idx : gr.interior())
        u[idx] = std::clamp(init[idx], glo - bound, ghi + bound);

    const auto& interior = gr.interior();
    const int n = static_cast<int>(interior.size());
    std::vector<double> res, coeff;
    const double tol = cfg.tol_rel * dp.data_scale();
    long it = 0;
    double rmax = std::numeric_limits<double>::infinity();
    for (; it < cfg.max_iters; ++it) {
        dp.rop->eval(u.values(), eta, eps, cfg.threads, res, coeff);
        rmax = 0.0;
        for (int p = 0; p < n; ++p) rmax = std::max(rmax, std::abs(res[p]));
        if (rmax < tol) break;
        if (!std::isfinite(rmax) || rmax > 1e14)
            throw SolveError("solve_epsilon: iteration diverged", eps, it, rmax);
        if (cfg.local_cfl) {
            for (int p = 0; p < n; ++p) {
                double tau = 2.0 * cfg.cfl / (coeff[p] + 2.0 * eps);
                u[interior[p]] += tau * res[p];
            }
        } else {
            double cmax = 0.0;
            for (int p = 0; p < n; ++p) cmax = std::max(cmax, coeff[p]);
            double tau = 2.0 * cfg.cfl / (cmax + 2.0 * eps);
            for (int p = 0; p < n; ++p) u[interior[p]] += tau * res[p];
        }
    }
    if (stage) {
        stage->eps = eps;
        stage->eta = eta;
        stage->iters = it;
        stage->final_residual = rmax;
    }
    if (rmax >= tol)
        throw SolveError("solve_epsilon: max iterations exceeded (eps=" + std::to_string(eps) +
                             ", residual=" + std::to_string(rmax) + ")",
                         eps, it, rmax);
    return u;
}

std::pair<GridFunction, SolveReport> solve_dirichlet(const Problem& prob, double h,
                                                     const SolveConfig& cfg,
                                                     const GridFunction* warm_start) {
    if (cfg.eps_schedule.empty()) throw std::invalid_argument("solve_dirichlet: empty schedule");
    for (size_t j = 1; j < cfg.eps_schedule.size(); ++j)
        if (!(cfg.eps_schedule[j] < cfg.eps_schedule[j - 1]) || !(cfg.eps_schedule[j] > 0.0))
            throw std::invalid_argument("solve_dirichlet: schedule must be positive decreasing");

    DiscreteProblem dp(prob, h, cfg);
    SolveReport report;
    report.tol_abs = cfg.tol_rel * dp.data_scale();
    const double eta_final = cfg.eta_final > 0.0 ? cfg.eta_final : auto_eta_final(prob.law, h);
    report.eta_final = eta_final;
    const int J = static_cast<int>(cfg.eps_schedule.size());
    auto stage_eta = [&](int j) {
        if (prob.law.i() >= 0.0 || J == 1) return eta_final;
        // singular laws: drive eta from h down to the final floor
        double t = static_cast<double>(j) / (J - 1);
        return h * std::pow(eta_final / h, t);
    };

    GridFunction u = dp.boundary_template;
    if (warm_start) {
        u = interpolate_to(*warm_start, dp.grid, prob.g);
    } else {
        for (int idx : dp.grid->interior()) u[idx] = prob.g.g(dp.grid->point(idx));
    }

    // a warm start is already an approximate solution of the target equation;
    // the continuation scaffold is only needed from cold data
    const int j_first = warm_start ? J - 1 : 0;
    for (int j = j_first; j < J; ++j) {
        StageReport st;
        GridFunction next = solve_epsilon(dp, cfg.eps_schedule[j], stage_eta(j), u, cfg, &st);
        report.stages.push_back(st);
        if (j > j_first) report.eps_deltas.push_back(next.sup_diff(u));
        u = next;
    }
    report.converged = true;

    // realized Phi range and a near-neighbor Lipschitz seminorm, for the record
    double pmin = std::numeric_limits<double>::infinity(), pmax = 0.0, lip = 0.0;
    for (int idx : dp.grid->interior()) {
        Vec2 g = discrete_gradient(u, idx);
        double q = std::max(norm(g + prob.xi), eta_final);
        double phi = prob.law.eval(dp.grid->point(idx), q);
        pmin = std::min(pmin, phi);
        pmax = std::max(pmax, phi);
        lip = std::max(lip, norm(g));
    }
    report.phi_min = pmin;
    report.phi_max = pmax;
    report.lipschitz = lip;
    return {u, report};
}

// ---------------------------------------------------------------------------
// power-type barriers from exterior tangent balls

namespace {

struct BarrierSetup {
    std::vector<Vec2> z;         // boundary samples
    std::vector<Vec2> xz;        // exterior tangent ball centers
    std::vector<double> gz;      // sigma * g(z)
    std::vector<double> deltas;  // dyadic {1, 1/2, ..., >= h}
    std::vector<double> c_delta; // K-independent part of M_delta
    double r = 0, kappa0 = 0;
};

/// w_z(x) = r^{-k0} - |x - x_z|^{-k0}  (K-independent part of v_z; >= 0 on the
/// closure of the domain, smooth and negative inside the exterior tangent ball).
double wz(const BarrierSetup& s, size_t zi, Vec2 x) {
    double rho = std::max(norm(x - s.xz[zi]), 0.25 * s.r);
    return std::pow(s.r, -s.kappa0) - std::pow(rho, -s.kappa0);
}

/// sigma=+1 prepares the supersolution pieces, sigma=-1 the subsolution's.
BarrierSetup barrier_setup(const DiscreteProblem& dp, double sigma) {
    BarrierSetup s;
    const Domain& dom = dp.grid->domain();
    const double n = 2.0;
    const auto e = dp.prob.op.ellipticity();
    s.kappa0 = (n * e.Lambda + 1.0) / e.lambda;
    s.r = ball_condition_radius(dom);
    const double h = dp.grid->h();
    int nz = std::min(2048, std::max(32, static_cast<int>(4.0 * dom.perimeter_estimate() / h)));
    s.z = dom.sample_boundary(nz);
    s.xz.reserve(s.z.size());
    s.gz.reserve(s.z.size());
    for (Vec2 z : s.z) {
        s.xz.push_back(z + dom.outward_normal(z) * s.r);
        s.gz.push_back(sigma * dp.prob.g.g(z));
    }
    for (double d = 1.0; d >= h && d > 1e-12; d *= 0.5) s.deltas.push_back(d);
    if (s.deltas.empty()) s.deltas.push_back(1.0);
    // c_delta = sup over boundary pairs of (sigma(g(y)-g(z)) - delta)^+ / w_z(y)
    s.c_delta.assign(s.deltas.size(), 0.0);
    for (size_t zi = 0; zi < s.z.size(); ++zi) {
        for (size_t yi = 0; yi < s.z.size(); ++yi) {
            if (yi == zi) continue;
            double gap = s.gz[yi] - s.gz[zi];
            if (gap <= s.deltas.back()) continue;
            double w = wz(s, zi, s.z[yi]);
            if (w <= 1e-14) continue;
            for (size_t di = 0; di < s.deltas.size(); ++di) {
                double num = gap - s.deltas[di];
                if (num > 0.0) s.c_delta[di] = std::max(s.c_delta[di], num / w);
            }
        }
    }
    return s;
}

/// inf over (z,delta) of sigma*g(z) + delta + max(K, c_delta) w_z(x).
double barrier_formula(const BarrierSetup& s, double K, Vec2 x) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t zi = 0; zi < s.z.size(); ++zi) {
        double w = wz(s, zi, x);
        for (size_t di = 0; di < s.deltas.size(); ++di) {
            double v = s.gz[zi] + s.deltas[di] + std::max(K, s.c_delta[di]) * w;
            best = std::min(best, v);
        }
    }
    return best;
}

BarrierResult build_barrier(const DiscreteProblem& dp, double eps, double eta, double K_init,
                            double sigma) {
    const Grid& gr = *dp.grid;
    BarrierSetup setup = barrier_setup(dp, sigma);
    const double R = setup.r + gr.domain().diameter();
    double K = K_init > 0.0 ? K_init
                            : std::max(1.0, std::pow(R, setup.kappa0 + 1.0) / setup.kappa0);
    const double supf = dp.rop->sup_f();
    const double band_tol = 1e-12 * dp.data_scale();
    if (!(eta > 0.0)) eta = auto_eta_final(dp.prob.law, gr.h());

    const auto& interior = gr.interior();
    const auto& band = gr.band();
    for (int attempt = 0; attempt < 60; ++attempt) {
        // the inf formula at true node positions stays smooth across the rim,
        // so discrete inf-stability of the monotone scheme applies
        GridFunction w(dp.boundary_template.grid_ptr());
        parallel_for(static_cast<int>(interior.size()), 1, [&](int p) {
            w[interior[p]] = sigma * barrier_formula(setup, K, gr.point(interior[p]));
        });
        for (int idx : band) w[idx] = sigma * barrier_formula(setup, K, gr.point(idx));
        // constant lift restoring dominance over the imposed band values; a
        // positive shift only strengthens the proper term's slack
        double lift = 0.0;
        for (int idx : band)
            lift = std::max(lift, sigma * (dp.boundary_template[idx] - w[idx]));
        if (lift > 0.0)
            for (int idx = 0; idx < gr.size(); ++idx)
                if (gr.is_valid(idx)) w[idx] += sigma * lift;
        // discrete certificate: sigma*(Phi F_h(w) - eps w) <= -sup|f| in the interior
        std::vector<double> res, coeff;
        dp.rop->eval(w.values(), eta, eps, 1, res, coeff);
        double worst = -std::numeric_limits<double>::infinity();
        for (size_t p = 0; p < interior.size(); ++p) {
            double op_part = res[p] + dp.rop->f_value(static_cast<int>(p));  // Phi F_h - eps w
            worst = std::max(worst, sigma * op_part + supf);
        }
        double band_worst = -std::numeric_limits<double>::infinity();
        for (int idx : band)
            band_worst = std::max(band_worst, sigma * (dp.boundary_template[idx] - w[idx]));
        if (worst <= 0.0 && band_worst <= band_tol) {
            BarrierResult out{std::move(w), K, setup.kappa0, -worst};
            return out;
        }
        K *= 2.0;
        if (K > 1e18)
            throw SolveError("build_barrier: no admissible K (certificate never satisfied)", eps,
                             attempt, worst);
    }
    throw SolveError("build_barrier: no admissible K", eps, 60, 0.0);
}

} // namespace

BarrierResult build_supersolution(const DiscreteProblem& dp, double eps, double eta,
                                  double K_init) {
    return build_barrier(dp, eps, eta, K_init, +1.0);
}

BarrierResult build_subsolution(const DiscreteProblem& dp, double eps, double eta, double K_init) {
    return build_barrier(dp, eps, eta, K_init, -1.0);
}

GridFunction interpolate_to(const GridFunction& coarse, std::shared_ptr<const Grid> fine,
                            const BoundaryData& bd) {
    const Grid& cg = coarse.grid();
    GridFunction out(fine);
    impose_boundary(out, bd);
    const double ch = cg.h();
    Vec2 origin = cg.point(0);
    const int ci0 = static_cast<int>(std::llround(origin.x / ch));
    const int cj0 = static_cast<int>(std::llround(origin.y / ch));
    for (int idx : fine->interior()) {
        Vec2 p = fine->point(idx);
        double fx = p.x / ch, fy = p.y / ch;
        int i = static_cast<int>(std::floor(fx));
        int j = static_cast<int>(std::floor(fy));
        double tx = fx - i, ty = fy - j;
        auto val = [&](int ii, int jj) -> double {
            int ia = ii - ci0, ja = jj - cj0;
            if (!cg.in_lattice(ia, ja)) return std::numeric_limits<double>::quiet_NaN();
            int id = cg.index(ia, ja);
            return cg.is_valid(id) ? coarse[id] : std::numeric_limits<double>::quiet_NaN();
        };
        double v00 = val(i, j), v10 = val(i + 1, j), v01 = val(i, j + 1), v11 = val(i + 1, j + 1);
        double v = (1 - tx) * (1 - ty) * v00 + tx * (1 - ty) * v10 + (1 - tx) * ty * v01 +
                   tx * ty * v11;
        out[idx] = std::isfinite(v) ? v : bd.g(p);
    }
    return out;
}

} // namespace fnlab
