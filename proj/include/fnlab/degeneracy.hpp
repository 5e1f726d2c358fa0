#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>

#include "fnlab/vec2.hpp"

namespace fnlab {

/// Gradient weight Phi(x,t) with its growth indices: t -> Phi(x,t)/t^i almost
/// non-decreasing and t -> Phi(x,t)/t^s almost non-increasing, both with
/// constant L >= 1, and nu0 <= Phi(x,1) <= nu1. Degenerate when i >= 0,
/// singular when -1 < i < 0.
class DegeneracyLaw {
public:
    static DegeneracyLaw power(double p);
    /// Phi(x,t) = t^p + a(x) t^q with 0 <= a(x); declared i=p, s=q.
    static DegeneracyLaw double_phase(double p, double q, std::function<double(Vec2)> a,
                                      double a_max_hint = 1.0);
    /// Phi(x,t) = t^{p(x)}; i = inf p, s = sup p sampled over the given box.
    static DegeneracyLaw variable_exponent(std::function<double(Vec2)> p, const Aabb& box,
                                           int samples_per_axis = 64);
    /// Generic law from a raw evaluator plus declared constants.
    static DegeneracyLaw custom(std::function<double(Vec2, double)> eval, double i, double s,
                                double L, double nu0, double nu1, std::string desc);

    double eval(Vec2 x, double t) const;  ///< Phi(x,t); throws if t < 0
    double i() const { return i_; }
    double s() const { return s_; }
    double L() const { return L_; }
    double nu0() const { return nu0_; }
    double nu1() const { return nu1_; }
    const std::string& description() const { return desc_; }

    /// NaN unless the law is a pure power t^p (fast path for the scheme).
    double pure_power_exponent() const { return power_exp_; }

private:
    std::function<double(Vec2, double)> eval_;
    double i_ = 0, s_ = 0, L_ = 1, nu0_ = 1, nu1_ = 1;
    double power_exp_ = std::numeric_limits<double>::quiet_NaN();
    std::string desc_;
};

struct GradientShift {
    Vec2 xi{0, 0};
};

/// Phi(x,t) with input validation (t >= 0, finite x).
double phi_eval(const DegeneracyLaw& law, Vec2 x, double t);

struct A2Report {
    int x_samples = 0;
    int t_pairs = 0;
    int monotonicity_violations = 0;
    int normalization_violations = 0;
    double worst_ratio = 0.0;  ///< largest factor by which a sampled pair exceeds L
};

/// Sampled verification of the law's almost-monotonicity and normalization:
/// for 0 < t1 < t2,  Phi(x,t2)/t2^i >= (1/L) Phi(x,t1)/t1^i  and
/// Phi(x,t2)/t2^s <= L Phi(x,t1)/t1^s,  plus nu0 <= Phi(x,1) <= nu1.
/// t is drawn log-uniformly from [1e-6, 1e6]; tolerance factor 1+1e-10 on L.
A2Report check_a2(const DegeneracyLaw& law, const Aabb& box, int x_samples, int t_pairs,
                  std::uint64_t seed);

struct SingularTransform {
    DegeneracyLaw law;                 ///< Phi~(x,t) = t^{-i} Phi(x,t), i(Phi~)=0
    double f_gradient_exponent = 0.0;  ///< f~ = |Du|^{exp} f with exp = -i(Phi)
};

/// The de-singularizing transform used to carry degenerate-case results to
/// singular laws: i(Phi~)=0, s(Phi~)=s-i, same L.
SingularTransform transform_singular_to_degenerate(const DegeneracyLaw& law);

/// Phi_bar(y,t) = Phi(r y + x0, (K/r) t) / Phi(r y + x0, K/r); Phi_bar(y,1)=1.
/// Requires r in (0,1], K >= 1.
DegeneracyLaw rescale_smallness(const DegeneracyLaw& law, Vec2 x0, double r, double K);

/// Phi_k(y,t) = Phi(center + rho^k y, rho^{k alpha} t) / Phi(center + rho^k y, rho^{k alpha}).
/// Requires rho in (0,1/2), k >= 0, alpha in (0,1).
DegeneracyLaw rescale_iterate(const DegeneracyLaw& law, double rho, int k, double alpha,
                              Vec2 center);

} // namespace fnlab
