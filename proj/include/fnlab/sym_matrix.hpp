#pragma once

#include <initializer_list>
#include <span>
#include <vector>

namespace fnlab {

/// Dense n×n real symmetric matrix. Writes go through set() which mirrors the
/// entry, so instances are symmetric by construction.
class SymMatrix {
public:
    explicit SymMatrix(int n);
    static SymMatrix identity(int n);
    static SymMatrix diag(std::initializer_list<double> d);
    static SymMatrix diag(std::span<const double> d);

    int n() const { return n_; }
    double operator()(int i, int j) const { return a_[i * n_ + j]; }
    void set(int i, int j, double v);

    double trace() const;
    double frob_norm() const;
    bool is_finite() const;
    bool is_diagonal(double tol = 0.0) const;

    SymMatrix operator+(const SymMatrix& o) const;
    SymMatrix operator-() const;
    SymMatrix scaled(double s) const;

private:
    int n_;
    std::vector<double> a_;
};

struct EigResult {
    std::vector<double> values;   ///< ascending
    std::vector<double> vectors;  ///< column-major Q, column k pairs with values[k]
};

/// Eigenvalues in ascending order. Closed form for n=2, cyclic Jacobi for n>=3.
/// Throws std::invalid_argument on non-finite entries.
std::vector<double> eig_sym(const SymMatrix& m);
EigResult eig_sym_full(const SymMatrix& m);

} // namespace fnlab
