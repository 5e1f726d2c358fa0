#include "fnlab/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fnlab/parallel.hpp"
#include "fnlab/rng.hpp"

namespace fnlab {

namespace {

double fast_pow(double t, double p) {
    if (p == 0.0) return 1.0;
    if (p == 1.0) return t;
    if (p == 2.0) return t * t;
    if (p == 3.0) return t * t * t;
    if (p == 0.5) return std::sqrt(t);
    if (p == -0.5) return 1.0 / std::sqrt(t);
    if (p == -1.0) return 1.0 / t;
    return std::pow(t, p);
}

/// Three-point second difference with (possibly unequal) arms rho_p, rho_m.
/// Exact on quadratics; positive neighbor weights, negative center weight.
double unequal_second_diff(double vp, double vm, double c, double rho_p, double rho_m) {
    return 2.0 * (rho_m * vp + rho_p * vm - (rho_p + rho_m) * c) /
           (rho_p * rho_m * (rho_p + rho_m));
}

double pucci_weight_plus(double d, double lam, double Lam) {
    return d > 0.0 ? Lam * d : lam * d;
}
double pucci_weight_minus(double d, double lam, double Lam) {
    return d > 0.0 ? lam * d : Lam * d;
}

struct ArmSample {
    double value;
    double rho;
};

/// First boundary crossing along the segment [x0, x1]; t in (0,1] or -1 when
/// the segment stays inside. Scanned at a few points, then bisected.
double first_crossing(const Domain& dom, Vec2 x0, Vec2 x1) {
    const int scan = 8;
    double t_out = -1.0;
    for (int k = 1; k <= scan; ++k) {
        double t = static_cast<double>(k) / scan;
        if (dom.signed_distance(x0 + (x1 - x0) * t) >= 0.0) {
            t_out = t;
            break;
        }
    }
    if (t_out < 0.0) return -1.0;
    double lo = t_out - 1.0 / scan, hi = t_out;
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        (dom.signed_distance(x0 + (x1 - x0) * mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Value and physical length of the arm node +/- reach*(a,b). Arms whose
/// segment leaves the domain are shortened to the ray-boundary intersection
/// and take the Dirichlet trace there (three-point unequal-spacing formula).
ArmSample resolve_arm(const GridFunction& u, int node, int a, int b, int reach,
                      const BoundaryData* bd) {
    const Grid& gr = u.grid();
    const Domain& dom = gr.domain();
    const double len = gr.h() * std::hypot(static_cast<double>(a), static_cast<double>(b)) * reach;
    Vec2 x0 = gr.point(node);
    Vec2 x1 = x0 + Vec2{a * reach * gr.h(), b * reach * gr.h()};
    if (dom.signed_distance(x0) >= 0.0)
        throw std::invalid_argument("second_difference: node not interior");
    int tgt = gr.neighbor(node, a * reach, b * reach);
    if (tgt >= 0 && gr.node_class(tgt) == NodeClass::Interior) {
        double t = first_crossing(dom, x0, x1);
        if (t < 0.0) return {u[tgt], len};
        // interior landing but the segment leaves the domain in between
        // (non-convex geometry): fall through to the shortened arm
    } else if (tgt < 0 && dom.signed_distance(x1) < 0.0) {
        throw std::invalid_argument("second_difference: direction exits the lattice");
    }
    if (!bd)
        throw std::invalid_argument("second_difference: shortened arm requires boundary data");
    double t = first_crossing(dom, x0, x1);
    if (t < 0.0) t = 1.0;
    t = std::max(t, 1e-3);  // tiny arms would make the center coefficient overflow
    Vec2 cross = x0 + (x1 - x0) * t;
    return {bd->value_at(dom.project_to_boundary(cross)), t * len};
}

} // namespace

double second_difference(const GridFunction& u, int node, LatticeDir w, const BoundaryData* bd,
                         int reach) {
    ArmSample p = resolve_arm(u, node, w.a, w.b, reach, bd);
    ArmSample m = resolve_arm(u, node, -w.a, -w.b, reach, bd);
    return unequal_second_diff(p.value, m.value, u[node], p.rho, m.rho);
}

Vec2 discrete_gradient(const GridFunction& u, int node) {
    const Grid& gr = u.grid();
    const double h = gr.h();
    auto axis = [&](int di, int dj) -> double {
        int p = gr.neighbor(node, di, dj);
        int m = gr.neighbor(node, -di, -dj);
        bool pv = p >= 0 && gr.is_valid(p);
        bool mv = m >= 0 && gr.is_valid(m);
        if (pv && mv) return (u[p] - u[m]) / (2.0 * h);
        // one-sided second order
        int s1 = pv ? p : m;
        int s2 = gr.neighbor(node, pv ? 2 * di : -2 * di, pv ? 2 * dj : -2 * dj);
        if (s1 < 0 || s2 < 0 || !gr.is_valid(s1) || !gr.is_valid(s2))
            throw std::invalid_argument("discrete_gradient: no usable neighbors");
        double sgn = pv ? 1.0 : -1.0;
        return sgn * (-3.0 * u[node] + 4.0 * u[s1] - u[s2]) / (2.0 * h);
    };
    return {axis(1, 0), axis(0, 1)};
}

namespace {

double frame_sum(const OperatorSpec& spec, const GridFunction& u, int node, const Frame& f,
                 const BoundaryData* bd, int reach, bool plus) {
    const double lam = spec.ellipticity().lambda;
    const double Lam = spec.ellipticity().Lambda;
    double s = 0.0;
    for (const LatticeDir* d : {&f.d1, &f.d2}) {
        double sd = second_difference(u, node, *d, bd, reach);
        s += plus ? pucci_weight_plus(sd, lam, Lam) : pucci_weight_minus(sd, lam, Lam);
    }
    return s;
}

void require_diagonal(const SymMatrix& a) {
    if (a.n() != 2 || !a.is_diagonal(0.0))
        throw std::invalid_argument(
            "scheme: linear-trace coefficients must be 2x2 diagonal for the monotone stencil");
}

} // namespace

double discrete_F(const OperatorSpec& spec, const GridFunction& u, int node,
                  const Stencil& stencil, const BoundaryData* bd) {
    switch (spec.kind()) {
        case OperatorKind::PucciPlus: {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& f : stencil.frames())
                best = std::max(best, frame_sum(spec, u, node, f, bd, stencil.reach(), true));
            return best;
        }
        case OperatorKind::PucciMinus: {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& f : stencil.frames())
                best = std::min(best, frame_sum(spec, u, node, f, bd, stencil.reach(), false));
            return best;
        }
        case OperatorKind::LinearTrace: {
            SymMatrix a = spec.coefficient(u.grid().point(node));
            require_diagonal(a);
            return a(0, 0) * second_difference(u, node, {1, 0}, bd, stencil.reach()) +
                   a(1, 1) * second_difference(u, node, {0, 1}, bd, stencil.reach());
        }
        case OperatorKind::InfSupOfLinear: {
            double dx = second_difference(u, node, {1, 0}, bd, stencil.reach());
            double dy = second_difference(u, node, {0, 1}, bd, stencil.reach());
            double best = spec.sup_mode() ? -std::numeric_limits<double>::infinity()
                                          : std::numeric_limits<double>::infinity();
            for (const auto& a : spec.family()) {
                require_diagonal(a);
                double v = a(0, 0) * dx + a(1, 1) * dy;
                best = spec.sup_mode() ? std::max(best, v) : std::min(best, v);
            }
            return best;
        }
    }
    return 0.0;
}

GridFunction residual(const DegeneracyLaw& law, const OperatorSpec& spec, const GridFunction& u,
                      const GridFunction& f, GradientShift xi, const SchemeParams& params,
                      const BoundaryData* bd) {
    if (!(params.eta > 0.0)) throw std::invalid_argument("residual: eta > 0");
    if (params.epsilon < 0.0) throw std::invalid_argument("residual: epsilon >= 0");
    GridFunction r(u.grid_ptr());
    for (int idx : u.grid().interior()) {
        Vec2 g = discrete_gradient(u, idx);
        double q = std::max(norm(g + xi.xi), params.eta);
        double phi = law.eval(u.grid().point(idx), q);
        double fh = discrete_F(spec, u, idx, params.stencil, bd);
        r[idx] = phi * fh - f[idx] - params.epsilon * u[idx];
    }
    return r;
}

MonotonicityReport monotonicity_check(const DegeneracyLaw& law, const OperatorSpec& spec,
                                      const SchemeParams& params, int trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("monotonicity_check: trials >= 1");
    Rng rng(seed);
    auto dom = std::make_shared<Domain>(Domain::ball({0, 0}, 1.0));
    auto grid = std::make_shared<Grid>(dom, 0.125, params.stencil.max_abs_offset() + 1.5);
    GridFunction u(grid);

    MonotonicityReport rep;
    rep.trials = trials;
    // nodes whose stencil never reaches the boundary (arm values are lattice
    // unknowns there; shortened-arm samples are fixed data, not inputs)
    std::vector<int> interior;
    const double safe = (params.stencil.max_arm_in_h() + 0.5) * grid->h();
    for (int idx : grid->interior())
        if (grid->signed_dist(idx) < -safe) interior.push_back(idx);
    for (int trial = 0; trial < trials; ++trial) {
        // fresh random state: smooth part plus node noise
        double ax = rng.uniform(-1, 1), ay = rng.uniform(-1, 1), axy = rng.uniform(-1, 1);
        double bx = rng.uniform(-2, 2), by = rng.uniform(-2, 2);
        double amp = rng.uniform(0.0, 0.5);
        u.fill([&](Vec2 p) {
            return ax * p.x * p.x + ay * p.y * p.y + axy * p.x * p.y + bx * p.x + by * p.y;
        });
        for (int idx : interior) u[idx] += amp * rng.uniform(-1.0, 1.0);

        int node = interior[rng.uniform_int(static_cast<int>(interior.size()))];
        Vec2 x = grid->point(node);
        // freeze the gradient magnitude
        Vec2 g = discrete_gradient(u, node);
        double q = std::max(norm(g), params.eta);
        double phi = law.eval(x, q);
        auto value = [&](const GridFunction& w) {
            return phi * discrete_F(spec, w, node, params.stencil) - params.epsilon * w[node];
        };
        double r0 = value(u);
        double s = rng.uniform(1e-3, 1.0);
        double tol = 1e-12 * (1.0 + std::abs(r0));
        if (rng.uniform() < 0.5) {
            // raise one off-center stencil node
            const auto& fr = params.stencil.frames();
            const Frame& f = fr[rng.uniform_int(static_cast<int>(fr.size()))];
            LatticeDir d = rng.uniform() < 0.5 ? f.d1 : f.d2;
            int sgn = rng.uniform() < 0.5 ? 1 : -1;
            int tgt = grid->neighbor(node, sgn * d.a * params.stencil.reach(),
                                     sgn * d.b * params.stencil.reach());
            if (tgt < 0 || !grid->is_valid(tgt)) continue;
            double saved = u[tgt];
            u[tgt] = saved + s;
            double r1 = value(u);
            u[tgt] = saved;
            if (r1 < r0 - tol) {
                ++rep.violations;
                rep.worst = std::max(rep.worst, r0 - r1);
            }
        } else {
            double saved = u[node];
            u[node] = saved + s;
            double r1 = value(u);
            u[node] = saved;
            double required_drop = params.epsilon > 0.0 ? params.epsilon * s * (1.0 - 1e-9) : 0.0;
            if (r1 > r0 - required_drop + tol) {
                ++rep.violations;
                rep.worst = std::max(rep.worst, r1 - (r0 - required_drop));
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// ResidualOperator

ResidualOperator::ResidualOperator(std::shared_ptr<const Grid> grid, OperatorSpec spec,
                                   DegeneracyLaw law, Stencil stencil,
                                   std::function<double(Vec2)> f, BoundaryData g, Vec2 xi)
    : grid_(std::move(grid)),
      spec_(std::move(spec)),
      law_(std::move(law)),
      stencil_(std::move(stencil)),
      g_(std::move(g)),
      xi_(xi) {
    const Grid& gr = *grid_;
    const double h = gr.h();
    inv_h2_ = 1.0 / (h * h);
    const int reach = stencil_.reach();
    use_axis_only_ = spec_.kind() == OperatorKind::LinearTrace ||
                     spec_.kind() == OperatorKind::InfSupOfLinear;
    std::vector<LatticeDir> dlist;
    if (use_axis_only_) {
        dlist = {{1, 0}, {0, 1}};
    } else {
        for (const auto& fr : stencil_.frames()) {
            dlist.push_back(fr.d1);
            dlist.push_back(fr.d2);
        }
    }
    for (const auto& d : dlist) {
        DirInfo di;
        di.off = (d.b * gr.nx() + d.a) * reach;
        di.len = h * d.len() * reach;
        di.inv_len2 = 1.0 / (di.len * di.len);
        dirs_.push_back(di);
    }
    n_dirslots_ = static_cast<int>(dirs_.size()) * 2;

    const auto& interior = gr.interior();
    const int n = static_cast<int>(interior.size());
    f_vals_.resize(n);
    for (int p = 0; p < n; ++p) {
        f_vals_[p] = f(gr.point(interior[p]));
        sup_f_ = std::max(sup_f_, std::abs(f_vals_[p]));
    }
    if (spec_.kind() == OperatorKind::LinearTrace) {
        a_diag_.resize(2 * n);
        for (int p = 0; p < n; ++p) {
            SymMatrix a = spec_.coefficient(gr.point(interior[p]));
            require_diagonal(a);
            a_diag_[2 * p] = a(0, 0);
            a_diag_[2 * p + 1] = a(1, 1);
        }
    } else if (spec_.kind() == OperatorKind::InfSupOfLinear) {
        for (const auto& a : spec_.family()) {
            require_diagonal(a);
            family_diag_.push_back(a(0, 0));
            family_diag_.push_back(a(1, 1));
        }
    }

    // arms crossing the boundary are shortened to the intersection at build time
    GridFunction probe(grid_);  // values unused by the bisection
    cutmask_.assign(n, 0);
    for (int p = 0; p < n; ++p) {
        int idx = interior[p];
        for (size_t d = 0; d < dlist.size(); ++d) {
            for (int side = 0; side < 2; ++side) {
                int sgn = side == 0 ? 1 : -1;
                int tgt = gr.neighbor(idx, sgn * dlist[d].a * reach, sgn * dlist[d].b * reach);
                if (tgt >= 0 && gr.node_class(tgt) == NodeClass::Interior) {
                    Vec2 x0 = gr.point(idx);
                    Vec2 x1 = x0 + Vec2{sgn * dlist[d].a * reach * gr.h(),
                                        sgn * dlist[d].b * reach * gr.h()};
                    if (first_crossing(gr.domain(), x0, x1) < 0.0) continue;
                }
                ArmSample s = resolve_arm(probe, idx, sgn * dlist[d].a, sgn * dlist[d].b, reach, &g_);
                std::int64_t key = static_cast<std::int64_t>(p) * n_dirslots_ +
                                   static_cast<std::int64_t>(2 * d + side);
                cuts_.emplace_back(key, CutArm{s.rho, s.value});
                cutmask_[p] |= std::uint32_t{1} << (2 * d + side);
            }
        }
    }
    std::sort(cuts_.begin(), cuts_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
}

const ResidualOperator::CutArm* ResidualOperator::find_cut(std::int64_t key) const {
    auto it = std::lower_bound(cuts_.begin(), cuts_.end(), key,
                               [](const auto& a, std::int64_t k) { return a.first < k; });
    return (it != cuts_.end() && it->first == key) ? &it->second : nullptr;
}

double ResidualOperator::combine(const std::vector<double>& u, int pos, double eta, double eps,
                                 double f_val, double* coeff_out) const {
    const Grid& gr = *grid_;
    const int idx = gr.interior()[pos];
    const double c = u[idx];
    const int nx = gr.nx();
    const double inv2h = 0.5 / gr.h();
    const double gx = (u[idx + 1] - u[idx - 1]) * inv2h;
    const double gy = (u[idx + nx] - u[idx - nx]) * inv2h;
    const double q = std::max(std::hypot(gx + xi_.x, gy + xi_.y), eta);
    const double pe = law_.pure_power_exponent();
    const double phi = std::isnan(pe) ? law_.eval(gr.point(idx), q) : fast_pow(q, pe);

    const std::uint32_t mask = cutmask_[pos];
    double dgeo = 0.0;  // sum/max of center coefficient magnitudes
    auto slot_diff = [&](int d, double* center_coef) -> double {
        const DirInfo& di = dirs_[d];
        if ((mask & (std::uint32_t{3} << (2 * d))) == 0) {
            *center_coef = 2.0 * di.inv_len2;
            return (u[idx + di.off] + u[idx - di.off] - 2.0 * c) * di.inv_len2;
        }
        std::int64_t base = static_cast<std::int64_t>(pos) * n_dirslots_ + 2 * d;
        const CutArm* cp = mask & (std::uint32_t{1} << (2 * d)) ? find_cut(base) : nullptr;
        const CutArm* cm = mask & (std::uint32_t{1} << (2 * d + 1)) ? find_cut(base + 1) : nullptr;
        double vp = cp ? cp->bval : u[idx + di.off];
        double rp = cp ? cp->rho : di.len;
        double vm = cm ? cm->bval : u[idx - di.off];
        double rm = cm ? cm->rho : di.len;
        *center_coef = 2.0 / (rp * rm);
        return unequal_second_diff(vp, vm, c, rp, rm);
    };

    double fh = 0.0;
    const double lam = spec_.ellipticity().lambda;
    const double Lam = spec_.ellipticity().Lambda;
    switch (spec_.kind()) {
        case OperatorKind::LinearTrace: {
            double cc0, cc1;
            double dx = slot_diff(0, &cc0);
            double dy = slot_diff(1, &cc1);
            fh = a_diag_[2 * pos] * dx + a_diag_[2 * pos + 1] * dy;
            dgeo = a_diag_[2 * pos] * cc0 + a_diag_[2 * pos + 1] * cc1;
            break;
        }
        case OperatorKind::InfSupOfLinear: {
            double cc0, cc1;
            double dx = slot_diff(0, &cc0);
            double dy = slot_diff(1, &cc1);
            double best = spec_.sup_mode() ? -std::numeric_limits<double>::infinity()
                                           : std::numeric_limits<double>::infinity();
            for (size_t j = 0; j < family_diag_.size(); j += 2) {
                double v = family_diag_[j] * dx + family_diag_[j + 1] * dy;
                best = spec_.sup_mode() ? std::max(best, v) : std::min(best, v);
                dgeo = std::max(dgeo, family_diag_[j] * cc0 + family_diag_[j + 1] * cc1);
            }
            fh = best;
            break;
        }
        case OperatorKind::PucciPlus:
        case OperatorKind::PucciMinus: {
            const bool plus = spec_.kind() == OperatorKind::PucciPlus;
            double best = plus ? -std::numeric_limits<double>::infinity()
                               : std::numeric_limits<double>::infinity();
            const int nframes = static_cast<int>(dirs_.size()) / 2;
            for (int fr = 0; fr < nframes; ++fr) {
                double cc0, cc1;
                double d1 = slot_diff(2 * fr, &cc0);
                double d2 = slot_diff(2 * fr + 1, &cc1);
                double s = plus ? pucci_weight_plus(d1, lam, Lam) + pucci_weight_plus(d2, lam, Lam)
                                : pucci_weight_minus(d1, lam, Lam) + pucci_weight_minus(d2, lam, Lam);
                best = plus ? std::max(best, s) : std::min(best, s);
                dgeo = std::max(dgeo, Lam * (cc0 + cc1));
            }
            fh = best;
            break;
        }
    }
    if (coeff_out) *coeff_out = phi * dgeo;
    return phi * fh - f_val - eps * c;
}

void ResidualOperator::eval(const std::vector<double>& u, double eta, double eps, int threads,
                            std::vector<double>& res, std::vector<double>& coeff) const {
    const int n = n_interior();
    res.resize(n);
    coeff.resize(n);
    parallel_for(n, threads, [&](int p) {
        res[p] = combine(u, p, eta, eps, f_vals_[p], &coeff[p]);
    });
}

double ResidualOperator::eval_node(const std::vector<double>& u, int pos, double eta,
                                   double eps) const {
    return combine(u, pos, eta, eps, f_vals_[pos], nullptr);
}

} // namespace fnlab
