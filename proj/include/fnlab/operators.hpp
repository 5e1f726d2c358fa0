#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fnlab/sym_matrix.hpp"
#include "fnlab/vec2.hpp"

namespace fnlab {

/// Uniform ellipticity constants, 0 < lambda <= Lambda.
struct EllipticityPair {
    double lambda = 1.0;
    double Lambda = 1.0;
    EllipticityPair() = default;
    EllipticityPair(double lam, double Lam);
};

/// P+(M) = Lambda * sum of positive eigenvalues + lambda * sum of negative ones.
double pucci_plus(const SymMatrix& m, EllipticityPair e);
/// P-(M) = lambda * sum of positive eigenvalues + Lambda * sum of negative ones.
double pucci_minus(const SymMatrix& m, EllipticityPair e);

enum class OperatorKind { PucciPlus, PucciMinus, LinearTrace, InfSupOfLinear };

/// A uniformly (lambda,Lambda)-elliptic F with F(0)=0. The built-in kinds are
/// the ones the monotone scheme knows how to discretize.
class OperatorSpec {
public:
    static OperatorSpec pucci_plus_op(EllipticityPair e);
    static OperatorSpec pucci_minus_op(EllipticityPair e);
    /// tr(A(x) M); A must map into symmetric matrices with lambda*I <= A <= Lambda*I.
    static OperatorSpec linear_trace(EllipticityPair e, std::function<SymMatrix(Vec2)> coeff);
    static OperatorSpec laplacian();  ///< linear trace with A = I, lambda = Lambda = 1
    /// sup (or inf) over a finite family of tr(A_j M).
    static OperatorSpec inf_sup(EllipticityPair e, std::vector<SymMatrix> family, bool sup_mode);

    OperatorKind kind() const { return kind_; }
    EllipticityPair ellipticity() const { return ell_; }
    SymMatrix coefficient(Vec2 x) const;  ///< LinearTrace only
    const std::vector<SymMatrix>& family() const { return family_; }
    bool sup_mode() const { return sup_mode_; }

private:
    OperatorKind kind_ = OperatorKind::PucciPlus;
    EllipticityPair ell_;
    std::function<SymMatrix(Vec2)> coeff_;
    std::vector<SymMatrix> family_;
    bool sup_mode_ = true;
};

/// Evaluates F(M) at the point x (x matters only for LinearTrace fields).
double apply_operator(const OperatorSpec& spec, const SymMatrix& m, Vec2 x = {});

struct EllipticityReport {
    int samples = 0;
    int violations = 0;
    double worst_excess = 0.0;  ///< largest relative violation of the sandwich
};

/// Samples random (M, N>=0) pairs and checks
/// lambda*tr(N) <= F(M+N)-F(M) <= Lambda*tr(N) to 1e-10 relative tolerance.
EllipticityReport check_uniform_ellipticity(const OperatorSpec& spec, int samples,
                                            std::uint64_t seed, int dim = 2);

} // namespace fnlab
