#pragma once

// Dense LU factorization with partial pivoting.
//
// The factorization reports structural singularity instead of silently
// dividing by a tiny pivot: switched networks assemble exactly-singular
// matrices for some on/off configurations, and the caller (the consistency
// loop or a regression test) has to see that as a first-class outcome, not
// as NaNs downstream.

#include "elex/types.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace elex {

/// Packed LU factors of a square matrix, row-pivoted so that P*A = L*U.
/// `singular_at` is the 0-based elimination step at which the pivot fell
/// below the singularity threshold, or -1 when the factorization succeeded.
template <typename Scalar>
struct LuFactors {
    MatrixX<Scalar> lu;
    std::vector<int> perm;       // perm[k] = pivot row chosen at step k
    Scalar max_row_norm = 0;     // inf-norm scale of the input matrix
    int singular_at = -1;

    [[nodiscard]] bool ok() const { return singular_at < 0; }
    [[nodiscard]] Eigen::Index dim() const { return lu.rows(); }
};

/// Relative pivot threshold separating structural singularities (exact zero
/// pivots up to roundoff) from ordinary ill-conditioning.
inline constexpr double kSingularPivotRel = 1e-12;

/// Factor a square matrix with partial (row) pivoting. A pivot of magnitude
/// below kSingularPivotRel times the largest row norm of the input marks the
/// factors singular; the caller decides whether that is an error.
/// Throws std::invalid_argument on non-finite input or a non-square matrix.
template <typename Derived>
LuFactors<typename Derived::Scalar> lu_factor(const Eigen::MatrixBase<Derived>& a) {
    using Scalar = typename Derived::Scalar;
    LuFactors<Scalar> f;
    f.lu = a;
    const Eigen::Index n = f.lu.rows();
    if (n != f.lu.cols()) {
        throw std::invalid_argument("lu_factor: matrix must be square");
    }
    if (n == 0) {
        throw std::invalid_argument("lu_factor: empty matrix");
    }
    if (!f.lu.allFinite()) {
        throw std::invalid_argument("lu_factor: non-finite entry in matrix");
    }

    f.max_row_norm = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        f.max_row_norm = std::max(f.max_row_norm, f.lu.row(i).template lpNorm<1>());
    }
    const Scalar threshold = kSingularPivotRel * f.max_row_norm;

    f.perm.resize(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index pivot_row = k;
        Scalar pivot_mag = std::abs(f.lu(k, k));
        for (Eigen::Index i = k + 1; i < n; ++i) {
            const Scalar mag = std::abs(f.lu(i, k));
            if (mag > pivot_mag) {
                pivot_mag = mag;
                pivot_row = i;
            }
        }
        if (!(pivot_mag > threshold)) {
            f.singular_at = static_cast<int>(k);
            return f;
        }
        f.perm[static_cast<std::size_t>(k)] = static_cast<int>(pivot_row);
        if (pivot_row != k) {
            f.lu.row(k).swap(f.lu.row(pivot_row));
        }
        const Scalar inv_pivot = Scalar(1) / f.lu(k, k);
        for (Eigen::Index i = k + 1; i < n; ++i) {
            const Scalar m = f.lu(i, k) * inv_pivot;
            f.lu(i, k) = m;
            if (m != Scalar(0)) {
                f.lu.row(i).tail(n - k - 1) -= m * f.lu.row(k).tail(n - k - 1);
            }
        }
    }
    return f;
}

/// Solve A*x = b from precomputed factors, in place into `x`.
/// Factor once, solve many: this path allocates nothing.
template <typename Scalar>
void lu_solve_into(const LuFactors<Scalar>& f, const VectorX<Scalar>& b, VectorX<Scalar>& x) {
    const Eigen::Index n = f.dim();
    if (!f.ok()) {
        throw std::invalid_argument("lu_solve: factors are singular");
    }
    if (b.size() != n) {
        throw std::invalid_argument("lu_solve: dimension mismatch");
    }
    x = b;
    for (Eigen::Index k = 0; k < n; ++k) {
        const int p = f.perm[static_cast<std::size_t>(k)];
        if (p != k) {
            std::swap(x(k), x(p));
        }
        x.tail(n - k - 1) -= x(k) * f.lu.col(k).tail(n - k - 1);
    }
    for (Eigen::Index k = n - 1; k >= 0; --k) {
        x(k) -= f.lu.row(k).tail(n - k - 1).dot(x.tail(n - k - 1));
        x(k) /= f.lu(k, k);
    }
}

template <typename Scalar>
[[nodiscard]] VectorX<Scalar> lu_solve(const LuFactors<Scalar>& f, const VectorX<Scalar>& b) {
    VectorX<Scalar> x(b.size());
    lu_solve_into(f, b, x);
    return x;
}

}  // namespace elex
