#include "fnlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fnlab/rng.hpp"

namespace fnlab {

double LatticeView::sup_abs() const {
    double m = 0.0;
    for (int k = 0; k < nx * ny; ++k)
        if (valid[k]) m = std::max(m, std::abs(value[k]));
    return m;
}

LatticeView LatticeView::from_grid(const GridFunction& u) {
    const Grid& gr = u.grid();
    LatticeView v;
    v.origin = gr.point(0);
    v.h = gr.h();
    v.nx = gr.nx();
    v.ny = gr.ny();
    v.valid.assign(gr.size(), 0);
    v.value.assign(gr.size(), std::numeric_limits<double>::quiet_NaN());
    for (int idx = 0; idx < gr.size(); ++idx)
        if (gr.is_valid(idx)) {
            v.valid[idx] = 1;
            v.value[idx] = u[idx];
        }
    return v;
}

LatticeView LatticeView::square(Vec2 lo, double h, int n, const std::function<double(Vec2)>& f) {
    LatticeView v;
    v.origin = lo;
    v.h = h;
    v.nx = n;
    v.ny = n;
    v.valid.assign(n * n, 1);
    v.value.resize(n * n);
    for (int k = 0; k < n * n; ++k) v.value[k] = f(v.point(k));
    return v;
}

namespace {

bool support_slope_lp(const LatticeView& v, const std::vector<int>& nodes,
                      const std::vector<int>& order, int x_idx, double slack, double pbig,
                      double scale, Vec2* out);
std::vector<int> shuffled_order(size_t n, std::uint64_t seed);

/// Coprime lattice line directions covering the half-plane (a>0, or a=0,b=1).
std::vector<std::pair<int, int>> line_directions(int reach) {
    std::vector<std::pair<int, int>> dirs;
    dirs.emplace_back(0, 1);
    for (int a = 1; a <= reach; ++a)
        for (int b = -reach; b <= reach; ++b)
            if (std::gcd(a, std::abs(b)) == 1) dirs.emplace_back(a, b);
    return dirs;
}

/// Exact least concave majorant of (s_k, y_k) along one line; writes back
/// raised values. Returns the largest raise applied.
double concave_majorant_1d(std::vector<double>& s, std::vector<double>& y) {
    const int n = static_cast<int>(s.size());
    if (n < 3) return 0.0;
    // upper hull by monotone chain (s is increasing)
    std::vector<int> hull;
    hull.reserve(n);
    for (int k = 0; k < n; ++k) {
        while (hull.size() >= 2) {
            int i = hull[hull.size() - 2], j = hull[hull.size() - 1];
            // keep j only if it lies strictly above segment (i,k)
            double t = (s[j] - s[i]) / (s[k] - s[i]);
            double lin = y[i] + t * (y[k] - y[i]);
            if (y[j] > lin) break;
            hull.pop_back();
        }
        hull.push_back(k);
    }
    double raised = 0.0;
    size_t seg = 0;
    for (int k = 0; k < n; ++k) {
        while (seg + 1 < hull.size() && s[hull[seg + 1]] < s[k]) ++seg;
        int i = hull[seg], j = hull[std::min(seg + 1, hull.size() - 1)];
        double env;
        if (i == j || s[j] == s[i]) {
            env = y[i];
        } else {
            double t = (s[k] - s[i]) / (s[j] - s[i]);
            env = y[i] + t * (y[j] - y[i]);
        }
        if (env > y[k]) {
            raised = std::max(raised, env - y[k]);
            y[k] = env;
        }
    }
    return raised;
}

} // namespace

ContactSet upper_contact_set(const LatticeView& v, std::optional<double> slope_bound,
                             int max_dir_reach) {
    const int n = v.nx * v.ny;
    ContactSet cs;
    cs.flag.assign(n, 0);
    cs.slope.assign(n, Vec2{0, 0});
    cs.envelope = v.value;
    const double scale = std::max(1.0, v.sup_abs());
    const double tol_flag = 1e-10 * scale;
    const double tol_fp = 1e-14 * scale;
    int reach = max_dir_reach > 0 ? max_dir_reach : std::max(v.nx, v.ny) - 1;
    reach = std::min(reach, std::max(v.nx, v.ny) - 1);
    auto dirs = line_directions(reach);

    std::vector<double> ls, ly;
    std::vector<int> lidx;
    auto sweep_dir = [&](int a, int b) {
        double raised = 0.0;
        // enumerate line start nodes: predecessor (i-a, j-b) outside lattice
        for (int j = 0; j < v.ny; ++j) {
            for (int i = 0; i < v.nx; ++i) {
                int pi = i - a, pj = j - b;
                if (pi >= 0 && pi < v.nx && pj >= 0 && pj < v.ny) continue;
                ls.clear();
                ly.clear();
                lidx.clear();
                int ci = i, cj = j, step = 0;
                while (ci >= 0 && ci < v.nx && cj >= 0 && cj < v.ny) {
                    int idx = v.index(ci, cj);
                    if (v.valid[idx]) {
                        ls.push_back(static_cast<double>(step));
                        ly.push_back(cs.envelope[idx]);
                        lidx.push_back(idx);
                    }
                    ci += a;
                    cj += b;
                    ++step;
                }
                if (lidx.size() < 3) continue;
                raised = std::max(raised, concave_majorant_1d(ls, ly));
                for (size_t k = 0; k < lidx.size(); ++k) cs.envelope[lidx[k]] = ly[k];
            }
        }
        return raised;
    };

    for (int sweep = 0; sweep < 500; ++sweep) {
        double raised = 0.0;
        for (auto [a, b] : dirs) raised = std::max(raised, sweep_dir(a, b));
        if (raised <= tol_fp) break;
    }

    // flags and slopes from the envelope
    auto env_at = [&](int i, int j) -> double {
        if (i < 0 || i >= v.nx || j < 0 || j >= v.ny) return std::numeric_limits<double>::quiet_NaN();
        int idx = v.index(i, j);
        return v.valid[idx] ? cs.envelope[idx] : std::numeric_limits<double>::quiet_NaN();
    };
    std::vector<int> nodes;
    for (int k = 0; k < n; ++k)
        if (v.valid[k]) nodes.push_back(k);
    std::vector<int> lp_order;  // built lazily, only if some slope needs repair
    for (int j = 0; j < v.ny; ++j) {
        for (int i = 0; i < v.nx; ++i) {
            int idx = v.index(i, j);
            if (!v.valid[idx]) continue;
            if (cs.envelope[idx] - v.value[idx] > tol_flag) continue;
            // centered slope of the envelope, one-sided fallback
            auto axis_slope = [&](int di, int dj) -> double {
                double ep = env_at(i + di, j + dj), em = env_at(i - di, j - dj);
                double e0 = cs.envelope[idx];
                if (std::isfinite(ep) && std::isfinite(em)) return (ep - em) / (2.0 * v.h);
                if (std::isfinite(ep)) return (ep - e0) / v.h;
                if (std::isfinite(em)) return (e0 - em) / v.h;
                return 0.0;
            };
            Vec2 p{axis_slope(1, 0), axis_slope(0, 1)};
            // the finite-difference slope can fail across envelope kinks;
            // repair those nodes with an exact supporting slope
            Vec2 x = v.point(idx);
            bool supports = true;
            for (int yk : nodes) {
                if (v.value[yk] - v.value[idx] - dot(p, v.point(yk) - x) > tol_flag) {
                    supports = false;
                    break;
                }
            }
            if (!supports) {
                if (lp_order.empty()) lp_order = shuffled_order(nodes.size(), 0x5EEDull);
                if (!support_slope_lp(v, nodes, lp_order, idx, tol_flag,
                                      slope_bound ? *slope_bound : 1e12, scale, &p))
                    continue;  // no admissible slope at this tolerance
            }
            if (slope_bound && norm(p) > *slope_bound * (1.0 + 1e-9) + 1e-12) continue;
            cs.flag[idx] = 1;
            cs.slope[idx] = p;
            ++cs.count;
        }
    }
    return cs;
}

namespace {

/// 2D feasibility of { p : p.(y-x) >= u(y)-u(x)-slack for all valid y } with an
/// |p|_inf box; deterministic incremental LP over a fixed shuffled order.
/// Writes a feasible slope into *out on success.
bool support_slope_lp(const LatticeView& v, const std::vector<int>& nodes,
                      const std::vector<int>& order, int x_idx, double slack, double pbig,
                      double scale, Vec2* out) {
    Vec2 x = v.point(x_idx);
    double ux = v.value[x_idx];
    Vec2 p{0, 0};
    std::vector<std::pair<Vec2, double>> act;
    act.reserve(nodes.size() + 4);
    act.push_back({{1, 0}, -pbig});
    act.push_back({{-1, 0}, -pbig});
    act.push_back({{0, 1}, -pbig});
    act.push_back({{0, -1}, -pbig});
    auto violated = [&](Vec2 q, const std::pair<Vec2, double>& c) {
        return dot(q, c.first) < c.second - 1e-13 * scale;
    };
    for (int oi : order) {
        int y_idx = nodes[oi];
        if (y_idx == x_idx) continue;
        Vec2 d = v.point(y_idx) - x;
        std::pair<Vec2, double> c{d, v.value[y_idx] - ux - slack};
        if (!violated(p, c)) {
            act.push_back(c);
            continue;
        }
        // restrict to the boundary line of c and clip with everything seen so far
        double dn = norm2(c.first);
        Vec2 p0 = c.first * (c.second / dn);
        Vec2 dir{-c.first.y, c.first.x};
        dir = dir / std::sqrt(dn);
        double tlo = -1e18, thi = 1e18;
        for (auto& cc : act) {
            double a = dot(dir, cc.first);
            double b = cc.second - dot(p0, cc.first);
            if (std::abs(a) < 1e-300) {
                if (b > 1e-13 * scale) return false;
                continue;
            }
            double t = b / a;
            if (a > 0)
                tlo = std::max(tlo, t);
            else
                thi = std::min(thi, t);
        }
        if (tlo > thi + 1e-12) return false;
        double t = std::clamp(0.0, tlo, thi);
        p = p0 + dir * t;
        act.push_back(c);
    }
    if (out) *out = p;
    return true;
}

std::vector<int> shuffled_order(size_t n, std::uint64_t seed) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (size_t k = n; k > 1; --k) std::swap(order[k - 1], order[rng.uniform_int(static_cast<int>(k))]);
    return order;
}

} // namespace

std::vector<std::uint8_t> upper_contact_set_bruteforce(const LatticeView& v,
                                                       std::optional<double> slope_bound,
                                                       std::uint64_t seed) {
    const int n = v.nx * v.ny;
    std::vector<std::uint8_t> flag(n, 0);
    const double scale = std::max(1.0, v.sup_abs());
    const double slack = 1e-10 * scale;
    std::vector<int> nodes;
    for (int k = 0; k < n; ++k)
        if (v.valid[k]) nodes.push_back(k);
    auto order = shuffled_order(nodes.size(), seed);
    const double pbig = slope_bound ? *slope_bound : 1e12;
    for (int x_idx : nodes)
        flag[x_idx] =
            support_slope_lp(v, nodes, order, x_idx, slack, pbig, scale, nullptr) ? 1 : 0;
    return flag;
}

AbpReport abp_verify(const GridFunction& u, const BoundaryData& g,
                     const std::function<double(Vec2)>& f, const DegeneracyLaw& law,
                     EllipticityPair e, const Domain& dom, int contact_dir_reach) {
    (void)e;
    AbpReport rep;
    rep.diam = dom.diameter();
    rep.lhs = 0.0;
    for (int idx : u.grid().interior()) rep.lhs = std::max(rep.lhs, std::abs(u[idx]));
    for (Vec2 z : dom.sample_boundary(512)) rep.sup_g = std::max(rep.sup_g, std::abs(g.g(z)));
    // upper contact set of u^+ over the interior (the band extension is not Omega)
    LatticeView v = LatticeView::from_grid(u);
    for (int k = 0; k < v.nx * v.ny; ++k) {
        if (u.grid().node_class(k) != NodeClass::Interior) {
            v.valid[k] = 0;
            v.value[k] = std::numeric_limits<double>::quiet_NaN();
        } else {
            v.value[k] = std::max(v.value[k], 0.0);
        }
    }
    ContactSet cs = upper_contact_set(v, {}, contact_dir_reach);
    rep.contact_count = cs.count;
    double sum = 0.0;
    const double h2 = v.h * v.h;
    for (int k = 0; k < v.nx * v.ny; ++k)
        if (cs.flag[k]) {
            double fv = f(v.point(k));
            sum += fv * fv * h2;
        }
    rep.f_ln_contact = std::sqrt(sum);  // n = 2
    rep.rhs_core = std::max(std::pow(rep.f_ln_contact, 1.0 / (1.0 + law.i())),
                            std::pow(rep.f_ln_contact, 1.0 / (1.0 + law.s())));
    rep.fitted_c = std::max(0.0, rep.lhs - rep.sup_g) / (rep.diam * (rep.rhs_core + 1.0));
    return rep;
}

double measure_d2d_bound(const Domain& dom, double delta1, int samples) {
    double worst = 0.0;
    const double fd = 1e-5 * std::max(1.0, dom.diameter());
    auto grad_d = [&](Vec2 p) -> Vec2 {
        return {(-dom.signed_distance({p.x + fd, p.y}) + dom.signed_distance({p.x - fd, p.y})) /
                    (-2.0 * fd),
                (-dom.signed_distance({p.x, p.y + fd}) + dom.signed_distance({p.x, p.y - fd})) /
                    (-2.0 * fd)};
    };
    bool graph_only = dom.kind() == DomainKind::HalfGraph;
    for (Vec2 z : dom.sample_boundary(samples, graph_only)) {
        Vec2 nu = dom.outward_normal(z);
        for (double t : {0.25, 0.5, 0.75}) {
            Vec2 p = z - nu * (t * delta1);
            Vec2 gx = (grad_d({p.x + fd, p.y}) - grad_d({p.x - fd, p.y})) / (2.0 * fd);
            Vec2 gy = (grad_d({p.x, p.y + fd}) - grad_d({p.x, p.y - fd})) / (2.0 * fd);
            worst = std::max({worst, std::abs(gx.x), std::abs(gx.y), std::abs(gy.x),
                              std::abs(gy.y)});
        }
    }
    return worst;
}

BarrierWValue barrier_w(const Domain& dom, double delta, double gamma, double r, Vec2 y,
                        EllipticityPair e, double d2d_bound, double delta1, Vec2 anchor) {
    if (!(gamma > 0.0) || !(gamma < 1.0)) throw std::invalid_argument("barrier_w: gamma in (0,1)");
    if (!(delta > 0.0)) throw std::invalid_argument("barrier_w: delta > 0");
    if (!(r > 0.0) || !(r < 1.0)) throw std::invalid_argument("barrier_w: r in (0,1)");
    if (delta1 <= 0.0) delta1 = 0.5 * ball_condition_radius(dom);
    const double sd = dom.signed_distance(y);
    const double d = std::max(-sd, 0.0);
    if (!(sd <= 1e-12) || !(d < delta1))
        throw std::invalid_argument("barrier_w: y outside the C^2 strip");
    if (d2d_bound <= 0.0) d2d_bound = measure_d2d_bound(dom, delta1);

    BarrierWValue out;
    const double dg = std::pow(d, gamma);
    out.w = (2.0 / delta) * d / (1.0 + dg);
    Vec2 proj = dom.project_to_boundary(y);
    Vec2 grad_d = norm(y - proj) > 1e-12 ? normalized(y - proj)
                                         : dom.outward_normal(proj) * -1.0;
    out.grad = grad_d * ((2.0 / delta) * (1.0 + (1.0 - gamma) * dg) / ((1.0 + dg) * (1.0 + dg)));
    const double ay = norm(y - anchor);
    if (ay >= r) {
        out.w += std::pow(ay - r, 3.0) / std::pow(1.0 - r, 3.0);
        out.grad += normalized(y - anchor) * (3.0 * (ay - r) * (ay - r) / std::pow(1.0 - r, 3.0));
    }
    const double n = 2.0;
    const double dgam = std::pow(delta, gamma);
    out.pucci_upper_bound = -2.0 * gamma * std::pow(delta, gamma - 2.0) * e.lambda * (1.0 + gamma) /
                                std::pow(1.0 + dgam, 3.0) +
                            (2.0 / delta) * n * d2d_bound * e.Lambda +
                            6.0 * n * e.Lambda / ((1.0 - r) * (1.0 - r));
    return out;
}

DistanceCheckReport barrier_distance_check(const GridFunction& u, const BoundaryData& g,
                                           double delta, double gamma, double delta1) {
    const Grid& gr = u.grid();
    if (delta1 <= 0.0) delta1 = 0.5 * ball_condition_radius(gr.domain());
    DistanceCheckReport rep;
    const double tol = 1e-9 * std::max(1.0, u.sup_norm());
    for (int idx : gr.interior()) {
        double d = -gr.signed_dist(idx);
        if (!(d < delta1)) continue;
        Vec2 p = gr.point(idx);
        Vec2 proj = gr.domain().project_to_boundary(p);
        double lhs = std::abs(u[idx] - g.g(proj));
        double rhs = (6.0 / delta) * d / (1.0 + std::pow(d, gamma));
        ++rep.checked;
        if (lhs > rhs + tol) {
            ++rep.violations;
            rep.worst = std::max(rep.worst, lhs - rhs);
        }
    }
    return rep;
}

ComparisonReport comparison_verify(const DiscreteProblem& dp, const GridFunction& v,
                                   const GridFunction& w, ComparisonMode mode, double eps,
                                   double eta, double strict_gap, double tol) {
    const Grid& gr = *dp.grid;
    if (eta <= 0.0) eta = auto_eta_final(dp.prob.law, gr.h());
    const double scale = dp.data_scale();
    if (tol <= 0.0) tol = 1e-8 * scale;
    // the premise tolerance must absorb the solver's own residual tolerance
    const double ptol = 2.0 * tol;

    ComparisonReport rep;
    std::vector<double> rv, rw, coeff;
    dp.rop->eval(v.values(), eta, eps, 1, rv, coeff);
    dp.rop->eval(w.values(), eta, eps, 1, rw, coeff);
    double minv = std::numeric_limits<double>::infinity();
    double maxw = -minv;
    double gapw = minv;
    for (size_t p = 0; p < rv.size(); ++p) {
        minv = std::min(minv, rv[p]);
        maxw = std::max(maxw, rw[p]);
        gapw = std::min(gapw, rv[p] - rw[p]);
    }
    rep.premise_margin_sub = minv;
    rep.premise_margin_super = -maxw;
    rep.premise_ok = minv >= -ptol && maxw <= ptol;
    if (mode == ComparisonMode::SmoothSuper) rep.premise_ok = rep.premise_ok && gapw >= strict_gap;
    if (mode == ComparisonMode::EpsilonProper) rep.premise_ok = rep.premise_ok && eps > 0.0;

    rep.band_ordered = true;
    for (int idx : gr.band())
        if (v[idx] > w[idx] + tol) rep.band_ordered = false;
    double worst = 0.0;
    for (int idx : gr.interior()) worst = std::max(worst, v[idx] - w[idx]);
    rep.worst_violation = worst;
    rep.ordered = worst <= tol;
    return rep;
}

namespace {

double bilinear_sample(const GridFunction& u, Vec2 p, bool* ok) {
    const Grid& gr = u.grid();
    const double h = gr.h();
    Vec2 origin = gr.point(0);
    double fx = (p.x - origin.x) / h, fy = (p.y - origin.y) / h;
    int i = static_cast<int>(std::floor(fx)), j = static_cast<int>(std::floor(fy));
    double tx = fx - i, ty = fy - j;
    auto val = [&](int ii, int jj) -> double {
        if (!gr.in_lattice(ii, jj)) return std::numeric_limits<double>::quiet_NaN();
        int idx = gr.index(ii, jj);
        return gr.is_valid(idx) ? u[idx] : std::numeric_limits<double>::quiet_NaN();
    };
    double v = (1 - tx) * (1 - ty) * val(i, j) + tx * (1 - ty) * val(i + 1, j) +
               (1 - tx) * ty * val(i, j + 1) + tx * ty * val(i + 1, j + 1);
    *ok = std::isfinite(v);
    return v;
}

} // namespace

SmallnessResult smallness_rescale(const GridFunction& u, const std::function<double(Vec2)>& f,
                                  const BoundaryData& g, const DegeneracyLaw& law, Vec2 x0,
                                  double eps0) {
    if (!(eps0 > 0.0) || !(eps0 < 1.0)) throw std::invalid_argument("smallness_rescale: eps0 in (0,1)");
    const Grid& gr = u.grid();
    SmallnessResult out;
    out.norm_u = u.sup_norm();
    out.norm_g_c1b = c1beta_norm_estimate(g, gr.domain());
    for (int idx : gr.interior()) out.norm_f = std::max(out.norm_f, std::abs(f(gr.point(idx))));
    out.K = 2.0 * (1.0 + out.norm_u + out.norm_g_c1b +
                   std::pow(law.L() / law.nu0() * out.norm_f, 1.0 / (1.0 + law.i())));
    out.r = std::pow(eps0, 1.0 / (2.0 + law.i()));
    out.law_bar = rescale_smallness(law, x0, out.r, out.K);
    {
        const double K = out.K, r = out.r, cr = out.K / out.r;
        GridFunction uc = u;
        out.u_bar = [uc, x0, r, K](Vec2 y) {
            bool ok = false;
            double v = bilinear_sample(uc, x0 + r * y, &ok);
            return ok ? v / K : std::numeric_limits<double>::quiet_NaN();
        };
        out.f_bar = [f, law, x0, r, K, cr](Vec2 y) {
            Vec2 x = x0 + r * y;
            return r * r * f(x) / (law.eval(x, cr) * K);
        };
        auto gf = g.g;
        out.g_bar = [gf, x0, r, K](Vec2 y) { return gf(x0 + r * y) / K; };
    }

    // post hoc sup norms of the rescaled pair over B_1 mapped into the domain
    const double cr = out.K / out.r;
    const int m = 64;
    for (int j = -m; j <= m; ++j)
        for (int i = -m; i <= m; ++i) {
            Vec2 y{static_cast<double>(i) / m, static_cast<double>(j) / m};
            if (norm2(y) > 1.0) continue;
            Vec2 x = x0 + out.r * y;
            if (gr.domain().signed_distance(x) >= 0.0) continue;
            bool ok = false;
            double uv = bilinear_sample(u, x, &ok);
            if (ok) out.sup_u_bar = std::max(out.sup_u_bar, std::abs(uv) / out.K);
            double denom = law.eval(x, cr) * out.K;
            out.sup_f_bar = std::max(out.sup_f_bar, out.r * out.r * std::abs(f(x)) / denom);
        }
    out.ok = out.sup_u_bar <= 1.0 + 1e-12 && out.sup_f_bar <= eps0 * (1.0 + 1e-12);
    return out;
}

RegularityTarget alpha_admissible(const DegeneracyLaw& law, double beta_g, double alpha_bar) {
    if (!(beta_g > 0.0) || !(beta_g < 1.0)) throw std::invalid_argument("alpha_admissible: beta_g in (0,1)");
    if (!(alpha_bar > 0.0) || !(alpha_bar < 1.0))
        throw std::invalid_argument("alpha_admissible: alpha_bar in (0,1)");
    RegularityTarget t;
    t.alpha_bar = alpha_bar;
    const double bound = law.i() >= 0.0 ? 1.0 / (1.0 + law.s()) : 1.0 / (1.0 + law.s() - law.i());
    t.alpha_max = std::min({alpha_bar, bound, beta_g});
    t.attained = bound < alpha_bar && bound < beta_g;
    return t;
}

AffineTracker affine_fit_sequence(const GridFunction& u, Vec2 center, double rho, int k_max,
                                  double alpha_cap) {
    if (!(rho > 0.0) || !(rho < 1.0)) throw std::invalid_argument("affine_fit_sequence: rho in (0,1)");
    if (k_max < 2) throw std::invalid_argument("affine_fit_sequence: k_max >= 2");
    const Grid& gr = u.grid();
    if (std::pow(rho, k_max) < 4.0 * gr.h())
        throw std::invalid_argument("affine_fit_sequence: insufficient resolution (rho^k_max < 4h)");
    AffineTracker tr;
    const double scale = std::max(1.0, u.sup_norm());
    for (int k = 1; k <= k_max; ++k) {
        const double rk = std::pow(rho, k);
        // least-squares affine fit on B_{rho^k}(center)
        double s11 = 0, s1x = 0, s1y = 0, sxx = 0, sxy = 0, syy = 0, b1 = 0, bx = 0, by = 0;
        int count = 0;
        for (int idx : gr.interior()) {
            Vec2 d = gr.point(idx) - center;
            if (norm2(d) > rk * rk) continue;
            ++count;
            s11 += 1;
            s1x += d.x;
            s1y += d.y;
            sxx += d.x * d.x;
            sxy += d.x * d.y;
            syy += d.y * d.y;
            b1 += u[idx];
            bx += u[idx] * d.x;
            by += u[idx] * d.y;
        }
        if (count < 6)
            throw std::invalid_argument("affine_fit_sequence: too few nodes at level " +
                                        std::to_string(k));
        // solve the 3x3 normal equations by Cramer
        double a11 = s11, a12 = s1x, a13 = s1y, a22 = sxx, a23 = sxy, a33 = syy;
        double det = a11 * (a22 * a33 - a23 * a23) - a12 * (a12 * a33 - a23 * a13) +
                     a13 * (a12 * a23 - a22 * a13);
        if (std::abs(det) < 1e-30) throw std::invalid_argument("affine_fit_sequence: singular fit");
        double d1 = b1 * (a22 * a33 - a23 * a23) - a12 * (bx * a33 - a23 * by) +
                    a13 * (bx * a23 - a22 * by);
        double d2 = a11 * (bx * a33 - a23 * by) - b1 * (a12 * a33 - a23 * a13) +
                    a13 * (a12 * by - bx * a13);
        double d3 = a11 * (a22 * by - bx * a23) - a12 * (a12 * by - bx * a13) +
                    b1 * (a12 * a23 - a22 * a13);
        double ca = d1 / det;
        Vec2 cb{d2 / det, d3 / det};
        double e = 0.0;
        for (int idx : gr.interior()) {
            Vec2 d = gr.point(idx) - center;
            if (norm2(d) > rk * rk) continue;
            e = std::max(e, std::abs(u[idx] - ca - dot(cb, d)));
        }
        tr.radii.push_back(rk);
        tr.sup_err.push_back(e);
        tr.a.push_back(ca);
        tr.b.push_back(cb);
    }
    // log-linear regression of e_k against rho^k
    bool tiny = false;
    for (double e : tr.sup_err)
        if (e < 1e-13 * scale) tiny = true;
    if (tiny) {
        tr.alpha_fit = alpha_cap;
    } else {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const int n = static_cast<int>(tr.radii.size());
        for (int k = 0; k < n; ++k) {
            double X = std::log(tr.radii[k]), Y = std::log(tr.sup_err[k]);
            sx += X;
            sy += Y;
            sxx += X * X;
            sxy += X * Y;
        }
        double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        tr.alpha_fit = std::min(slope - 1.0, alpha_cap);
    }
    for (size_t k = 0; k < tr.b.size(); ++k) {
        Vec2 prev = k == 0 ? Vec2{0, 0} : tr.b[k - 1];
        double inc = norm(tr.b[k] - prev);
        double denom = std::pow(rho, static_cast<double>(k) * std::max(tr.alpha_fit, 0.0));
        tr.c0_fit = std::max(tr.c0_fit, inc / denom);
    }
    return tr;
}

double lipschitz_estimate(const GridFunction& u, Vec2 region_center, double region_radius,
                          double pair_cap) {
    const Grid& gr = u.grid();
    if (pair_cap <= 0.0) pair_cap = 3.0 * gr.h();
    const int reach = std::max(1, static_cast<int>(std::ceil(pair_cap / gr.h())));
    double lip = 0.0;
    for (int idx : gr.interior()) {
        Vec2 p = gr.point(idx);
        if (norm(p - region_center) > region_radius) continue;
        for (int dj = 0; dj <= reach; ++dj)
            for (int di = -reach; di <= reach; ++di) {
                if (dj == 0 && di <= 0) continue;
                double dist = gr.h() * std::hypot(static_cast<double>(di), static_cast<double>(dj));
                if (dist > pair_cap) continue;
                int o = gr.neighbor(idx, di, dj);
                if (o < 0 || !gr.is_valid(o)) continue;
                Vec2 q = gr.point(o);
                if (norm(q - region_center) > region_radius) continue;
                lip = std::max(lip, std::abs(u[idx] - u[o]) / dist);
            }
    }
    return lip;
}

double modulus_omega(double s, double omega0) {
    if (!(s >= 0.0)) throw std::invalid_argument("modulus_omega: s >= 0");
    if (!(omega0 > 0.0)) throw std::invalid_argument("modulus_omega: omega0 > 0");
    const double s0 = (2.0 / (3.0 * omega0)) * (2.0 / (3.0 * omega0));
    const double sc = std::min(s, s0);
    return sc - omega0 * sc * std::sqrt(sc);
}

} // namespace fnlab
