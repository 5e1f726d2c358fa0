#include "fnlab/sym_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fnlab {

SymMatrix::SymMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * n, 0.0) {
    if (n < 1) throw std::invalid_argument("SymMatrix: n must be >= 1");
}

SymMatrix SymMatrix::identity(int n) {
    SymMatrix m(n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
    return m;
}

SymMatrix SymMatrix::diag(std::initializer_list<double> d) {
    return diag(std::span<const double>(d.begin(), d.size()));
}

SymMatrix SymMatrix::diag(std::span<const double> d) {
    SymMatrix m(static_cast<int>(d.size()));
    for (int i = 0; i < m.n_; ++i) m.set(i, i, d[i]);
    return m;
}

void SymMatrix::set(int i, int j, double v) {
    a_[i * n_ + j] = v;
    a_[j * n_ + i] = v;
}

double SymMatrix::trace() const {
    double t = 0.0;
    for (int i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

double SymMatrix::frob_norm() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
}

bool SymMatrix::is_finite() const {
    return std::all_of(a_.begin(), a_.end(), [](double v) { return std::isfinite(v); });
}

bool SymMatrix::is_diagonal(double tol) const {
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            if (i != j && std::abs((*this)(i, j)) > tol) return false;
    return true;
}

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
    if (o.n_ != n_) throw std::invalid_argument("SymMatrix: dimension mismatch");
    SymMatrix r(n_);
    for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] + o.a_[k];
    return r;
}

SymMatrix SymMatrix::operator-() const { return scaled(-1.0); }

SymMatrix SymMatrix::scaled(double s) const {
    SymMatrix r(n_);
    for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] * s;
    return r;
}

namespace {

EigResult eig2(const SymMatrix& m) {
    const double a = m(0, 0), b = m(0, 1), c = m(1, 1);
    EigResult r;
    r.values.resize(2);
    r.vectors.assign(4, 0.0);
    const double mean = 0.5 * (a + c);
    const double disc = std::hypot(0.5 * (a - c), b);
    r.values[0] = mean - disc;
    r.values[1] = mean + disc;
    if (disc == 0.0) {
        r.vectors = {1, 0, 0, 1};
        return r;
    }
    // eigenvector for the larger eigenvalue; theta = 0.5*atan2(2b, a-c)
    const double th = 0.5 * std::atan2(2.0 * b, a - c);
    const double ct = std::cos(th), st = std::sin(th);
    // column 0 <-> values[0], column 1 <-> values[1]
    r.vectors[0] = -st;
    r.vectors[1] = ct;
    r.vectors[2] = ct;
    r.vectors[3] = st;
    return r;
}

/// Cyclic Jacobi with accumulated rotations.
EigResult eig_jacobi(const SymMatrix& m) {
    const int n = m.n();
    std::vector<double> a(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[i * n + j] = m(i, j);
    std::vector<double> q(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) q[i * n + i] = 1.0;

    auto off = [&] {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += a[i * n + j] * a[i * n + j];
        return s;
    };
    const double scale = std::max(1.0, m.frob_norm());
    for (int sweep = 0; sweep < 64 && off() > 1e-30 * scale * scale; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int qq = p + 1; qq < n; ++qq) {
                const double apq = a[p * n + qq];
                if (std::abs(apq) < 1e-300) continue;
                const double app = a[p * n + p], aqq = a[qq * n + qq];
                const double theta = 0.5 * (aqq - app) / apq;
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a[k * n + p], akq = a[k * n + qq];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + qq] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a[p * n + k], aqk = a[qq * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[qq * n + k] = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double qkp = q[k * n + p], qkq = q[k * n + qq];
                    q[k * n + p] = c * qkp - s * qkq;
                    q[k * n + qq] = s * qkp + c * qkq;
                }
            }
        }
    }
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](int i, int j) { return a[i * n + i] < a[j * n + j]; });
    EigResult r;
    r.values.resize(n);
    r.vectors.resize(static_cast<size_t>(n) * n);
    for (int k = 0; k < n; ++k) {
        r.values[k] = a[perm[k] * n + perm[k]];
        for (int i = 0; i < n; ++i) r.vectors[i * n + k] = q[i * n + perm[k]];
    }
    return r;
}

} // namespace

EigResult eig_sym_full(const SymMatrix& m) {
    if (!m.is_finite()) throw std::invalid_argument("eig_sym: non-finite entries");
    if (m.n() == 1) return {{m(0, 0)}, {1.0}};
    if (m.n() == 2) return eig2(m);
    return eig_jacobi(m);
}

std::vector<double> eig_sym(const SymMatrix& m) { return eig_sym_full(m).values; }

} // namespace fnlab
