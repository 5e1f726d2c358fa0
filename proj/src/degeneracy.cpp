#include "fnlab/degeneracy.hpp"

#include <cmath>
#include <stdexcept>

#include "fnlab/rng.hpp"

namespace fnlab {

namespace {

/// t^p with the conventions of the law family: 0^0 = 1, 0^p = +inf for p < 0.
double power_t(double t, double p) {
    if (p == 0.0) return 1.0;
    if (t == 0.0) return p > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    if (p == 1.0) return t;
    if (p == 2.0) return t * t;
    if (p == 3.0) return t * t * t;
    if (p == 0.5) return std::sqrt(t);
    if (p == -0.5) return 1.0 / std::sqrt(t);
    if (p == -1.0) return 1.0 / t;
    return std::pow(t, p);
}

} // namespace

DegeneracyLaw DegeneracyLaw::power(double p) {
    if (!(p > -1.0)) throw std::invalid_argument("power law: need p > -1");
    DegeneracyLaw law;
    law.eval_ = [p](Vec2, double t) { return power_t(t, p); };
    law.i_ = p;
    law.s_ = p;
    law.L_ = 1.0;
    law.nu0_ = 1.0;
    law.nu1_ = 1.0;
    law.power_exp_ = p;
    law.desc_ = "power(" + std::to_string(p) + ")";
    return law;
}

DegeneracyLaw DegeneracyLaw::double_phase(double p, double q, std::function<double(Vec2)> a,
                                          double a_max_hint) {
    if (!(q >= p) || !(p > -1.0)) throw std::invalid_argument("double_phase: need -1 < p <= q");
    if (!a) throw std::invalid_argument("double_phase: null coefficient");
    DegeneracyLaw law;
    law.eval_ = [p, q, a](Vec2 x, double t) {
        double av = a(x);
        if (av < 0.0) throw std::invalid_argument("double_phase: a(x) must be >= 0");
        return power_t(t, p) + av * power_t(t, q);
    };
    law.i_ = p;
    law.s_ = q;
    law.L_ = 1.0;
    law.nu0_ = 1.0;
    law.nu1_ = 1.0 + a_max_hint;
    law.desc_ = "double_phase(" + std::to_string(p) + "," + std::to_string(q) + ")";
    return law;
}

DegeneracyLaw DegeneracyLaw::variable_exponent(std::function<double(Vec2)> p, const Aabb& box,
                                               int samples_per_axis) {
    if (!p) throw std::invalid_argument("variable_exponent: null exponent field");
    double pmin = std::numeric_limits<double>::infinity();
    double pmax = -pmin;
    for (int i = 0; i <= samples_per_axis; ++i)
        for (int j = 0; j <= samples_per_axis; ++j) {
            Vec2 x{box.lo.x + (box.hi.x - box.lo.x) * i / samples_per_axis,
                   box.lo.y + (box.hi.y - box.lo.y) * j / samples_per_axis};
            double v = p(x);
            pmin = std::min(pmin, v);
            pmax = std::max(pmax, v);
        }
    if (!(pmin > -1.0)) throw std::invalid_argument("variable_exponent: need inf p > -1");
    DegeneracyLaw law;
    law.eval_ = [p](Vec2 x, double t) { return power_t(t, p(x)); };
    law.i_ = pmin;
    law.s_ = pmax;
    law.L_ = 1.0;
    law.nu0_ = 1.0;
    law.nu1_ = 1.0;
    law.desc_ = "variable_exponent";
    return law;
}

DegeneracyLaw DegeneracyLaw::custom(std::function<double(Vec2, double)> eval, double i, double s,
                                    double L, double nu0, double nu1, std::string desc) {
    if (!(i > -1.0) || !(s >= i)) throw std::invalid_argument("custom law: need -1 < i <= s");
    if (!(L >= 1.0) || !(nu0 > 0.0) || !(nu1 >= nu0))
        throw std::invalid_argument("custom law: need L >= 1, 0 < nu0 <= nu1");
    DegeneracyLaw law;
    law.eval_ = std::move(eval);
    law.i_ = i;
    law.s_ = s;
    law.L_ = L;
    law.nu0_ = nu0;
    law.nu1_ = nu1;
    law.desc_ = std::move(desc);
    return law;
}

double DegeneracyLaw::eval(Vec2 x, double t) const {
    if (!(t >= 0.0)) throw std::invalid_argument("DegeneracyLaw: t must be >= 0");
    return eval_(x, t);
}

double phi_eval(const DegeneracyLaw& law, Vec2 x, double t) {
    if (!std::isfinite(x.x) || !std::isfinite(x.y))
        throw std::invalid_argument("phi_eval: non-finite point");
    return law.eval(x, t);
}

A2Report check_a2(const DegeneracyLaw& law, const Aabb& box, int x_samples, int t_pairs,
                  std::uint64_t seed) {
    if (x_samples < 1 || t_pairs < 1) throw std::invalid_argument("check_a2: sample counts >= 1");
    Rng rng(seed);
    A2Report rep;
    rep.x_samples = x_samples;
    rep.t_pairs = t_pairs;
    const double Ltol = law.L() * (1.0 + 1e-10);
    for (int xs = 0; xs < x_samples; ++xs) {
        Vec2 x{rng.uniform(box.lo.x, box.hi.x), rng.uniform(box.lo.y, box.hi.y)};
        const double phi1 = law.eval(x, 1.0);
        if (!(phi1 >= law.nu0() * (1.0 - 1e-12)) || !(phi1 <= law.nu1() * (1.0 + 1e-12)))
            ++rep.normalization_violations;
        for (int tp = 0; tp < t_pairs; ++tp) {
            double t1 = rng.log_uniform(1e-6, 1e6);
            double t2 = rng.log_uniform(1e-6, 1e6);
            if (t1 > t2) std::swap(t1, t2);
            if (t1 == t2) continue;
            const double p1 = law.eval(x, t1);
            const double p2 = law.eval(x, t2);
            // ratios of Phi/t^i and Phi/t^s between t1 and t2
            const double ri = (p2 / p1) * std::pow(t1 / t2, law.i());
            const double rs = (p2 / p1) * std::pow(t1 / t2, law.s());
            bool bad = false;
            if (ri < 1.0 / Ltol) {
                bad = true;
                rep.worst_ratio = std::max(rep.worst_ratio, (1.0 / ri) / law.L());
            }
            if (rs > Ltol) {
                bad = true;
                rep.worst_ratio = std::max(rep.worst_ratio, rs / law.L());
            }
            if (bad) ++rep.monotonicity_violations;
        }
    }
    return rep;
}

SingularTransform transform_singular_to_degenerate(const DegeneracyLaw& law) {
    const double i = law.i();
    SingularTransform out{law, -i};
    if (i == 0.0) return out;  // identity
    if (!std::isnan(law.pure_power_exponent())) {
        out.law = DegeneracyLaw::power(law.pure_power_exponent() - i);
        return out;
    }
    auto base = law;
    out.law = DegeneracyLaw::custom(
        [base, i](Vec2 x, double t) {
            // t=0 evaluated as a limit; the product t^{-i} Phi(x,t) stays in
            // [nu0/L, L nu1] for small t by the almost-monotonicity of the indices
            const double te = std::max(t, 1e-240);
            return power_t(te, -i) * base.eval(x, te);
        },
        0.0, law.s() - i, law.L(), law.nu0(), law.nu1(),
        "desingularized(" + law.description() + ")");
    return out;
}

DegeneracyLaw rescale_smallness(const DegeneracyLaw& law, Vec2 x0, double r, double K) {
    if (!(r > 0.0) || !(r <= 1.0)) throw std::invalid_argument("rescale_smallness: r in (0,1]");
    if (!(K >= 1.0)) throw std::invalid_argument("rescale_smallness: K >= 1");
    if (!std::isnan(law.pure_power_exponent())) return law;  // powers are fixed points
    auto base = law;
    const double c = K / r;
    return DegeneracyLaw::custom(
        [base, x0, r, c](Vec2 y, double t) {
            Vec2 x = x0 + r * y;
            return base.eval(x, c * t) / base.eval(x, c);
        },
        law.i(), law.s(), law.L(), 1.0, 1.0, "smallness(" + law.description() + ")");
}

DegeneracyLaw rescale_iterate(const DegeneracyLaw& law, double rho, int k, double alpha,
                              Vec2 center) {
    if (!(rho > 0.0) || !(rho < 0.5)) throw std::invalid_argument("rescale_iterate: rho in (0,1/2)");
    if (k < 0) throw std::invalid_argument("rescale_iterate: k >= 0");
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw std::invalid_argument("rescale_iterate: alpha in (0,1)");
    if (!std::isnan(law.pure_power_exponent())) return law;  // powers are fixed points
    auto base = law;
    const double rk = std::pow(rho, k);
    const double tk = std::pow(rho, k * alpha);
    return DegeneracyLaw::custom(
        [base, center, rk, tk](Vec2 y, double t) {
            Vec2 x = center + rk * y;
            return base.eval(x, tk * t) / base.eval(x, tk);
        },
        law.i(), law.s(), law.L(), 1.0, 1.0, "iterate(" + law.description() + ")");
}

} // namespace fnlab
