#include "fnlab/operators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fnlab/rng.hpp"

namespace fnlab {

EllipticityPair::EllipticityPair(double lam, double Lam) : lambda(lam), Lambda(Lam) {
    if (!(lam > 0.0) || !(Lam >= lam) || !std::isfinite(Lam))
        throw std::invalid_argument("EllipticityPair: need 0 < lambda <= Lambda");
}

double pucci_plus(const SymMatrix& m, EllipticityPair e) {
    double s = 0.0;
    for (double ev : eig_sym(m)) s += ev > 0.0 ? e.Lambda * ev : e.lambda * ev;
    return s;
}

double pucci_minus(const SymMatrix& m, EllipticityPair e) {
    double s = 0.0;
    for (double ev : eig_sym(m)) s += ev > 0.0 ? e.lambda * ev : e.Lambda * ev;
    return s;
}

OperatorSpec OperatorSpec::pucci_plus_op(EllipticityPair e) {
    OperatorSpec s;
    s.kind_ = OperatorKind::PucciPlus;
    s.ell_ = e;
    return s;
}

OperatorSpec OperatorSpec::pucci_minus_op(EllipticityPair e) {
    OperatorSpec s;
    s.kind_ = OperatorKind::PucciMinus;
    s.ell_ = e;
    return s;
}

OperatorSpec OperatorSpec::linear_trace(EllipticityPair e, std::function<SymMatrix(Vec2)> coeff) {
    if (!coeff) throw std::invalid_argument("linear_trace: null coefficient field");
    OperatorSpec s;
    s.kind_ = OperatorKind::LinearTrace;
    s.ell_ = e;
    s.coeff_ = std::move(coeff);
    return s;
}

OperatorSpec OperatorSpec::laplacian() {
    return linear_trace(EllipticityPair(1.0, 1.0), [](Vec2) { return SymMatrix::identity(2); });
}

OperatorSpec OperatorSpec::inf_sup(EllipticityPair e, std::vector<SymMatrix> family, bool sup_mode) {
    if (family.empty()) throw std::invalid_argument("inf_sup: empty family");
    OperatorSpec s;
    s.kind_ = OperatorKind::InfSupOfLinear;
    s.ell_ = e;
    s.family_ = std::move(family);
    s.sup_mode_ = sup_mode;
    return s;
}

SymMatrix OperatorSpec::coefficient(Vec2 x) const {
    if (kind_ != OperatorKind::LinearTrace)
        throw std::logic_error("coefficient(): not a LinearTrace operator");
    return coeff_(x);
}

namespace {

double trace_product(const SymMatrix& a, const SymMatrix& m) {
    double s = 0.0;
    for (int i = 0; i < m.n(); ++i)
        for (int j = 0; j < m.n(); ++j) s += a(i, j) * m(i, j);
    return s;
}

} // namespace

double apply_operator(const OperatorSpec& spec, const SymMatrix& m, Vec2 x) {
    if (!m.is_finite()) throw std::invalid_argument("apply_operator: non-finite matrix");
    switch (spec.kind()) {
        case OperatorKind::PucciPlus:
            return pucci_plus(m, spec.ellipticity());
        case OperatorKind::PucciMinus:
            return pucci_minus(m, spec.ellipticity());
        case OperatorKind::LinearTrace:
            return trace_product(spec.coefficient(x), m);
        case OperatorKind::InfSupOfLinear: {
            double best = spec.sup_mode() ? -std::numeric_limits<double>::infinity()
                                          : std::numeric_limits<double>::infinity();
            for (const auto& a : spec.family()) {
                double v = trace_product(a, m);
                best = spec.sup_mode() ? std::max(best, v) : std::min(best, v);
            }
            return best;
        }
    }
    return 0.0;
}

EllipticityReport check_uniform_ellipticity(const OperatorSpec& spec, int samples,
                                            std::uint64_t seed, int dim) {
    if (samples < 1) throw std::invalid_argument("check_uniform_ellipticity: samples >= 1");
    Rng rng(seed);
    EllipticityReport rep;
    rep.samples = samples;
    const double lam = spec.ellipticity().lambda;
    const double Lam = spec.ellipticity().Lambda;
    for (int it = 0; it < samples; ++it) {
        SymMatrix m(dim);
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j) m.set(i, j, rng.uniform(-2.0, 2.0));
        // N = Q D Q^T with D >= 0; Q from the eigenframe of a random symmetric matrix
        SymMatrix base(dim);
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j) base.set(i, j, rng.uniform(-1.0, 1.0));
        EigResult frame = eig_sym_full(base);
        std::vector<double> d(dim);
        for (int k = 0; k < dim; ++k) d[k] = it % 17 == 0 ? 0.0 : rng.uniform(0.0, 2.0);
        SymMatrix nmat(dim);
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j) {
                double s = 0.0;
                for (int k = 0; k < dim; ++k)
                    s += frame.vectors[i * dim + k] * d[k] * frame.vectors[j * dim + k];
                nmat.set(i, j, s);
            }
        const double trn = nmat.trace();
        const double df = apply_operator(spec, m + nmat) - apply_operator(spec, m);
        const double tol = 1e-10 * (1.0 + std::abs(df) + Lam * std::abs(trn));
        const double excess = std::max(lam * trn - df, df - Lam * trn);
        if (excess > tol) {
            ++rep.violations;
            rep.worst_excess = std::max(rep.worst_excess, excess);
        }
    }
    return rep;
}

} // namespace fnlab
