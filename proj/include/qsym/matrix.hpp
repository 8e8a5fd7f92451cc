#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cmath>
#include <stdexcept>

#include "qsym/tolerance.hpp"

namespace qsym {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline bool all_finite(const ComplexMatrix& m) {
    return m.allFinite();
}

inline void require_finite(const ComplexMatrix& m, const char* where) {
    if (!all_finite(m)) throw std::invalid_argument(std::string(where) + ": non-finite entries");
}

/// Operator norm = largest singular value.
inline double operator_norm(const ComplexMatrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    return m.jacobiSvd().singularValues()(0);
}

inline double frobenius_norm(const ComplexMatrix& m) { return m.norm(); }

/// p is a projection iff ||p^2 - p|| <= atol and ||p - p*|| <= atol in
/// operator norm.
inline bool is_projection(const ComplexMatrix& m, const TolerancePolicy& tol = {}) {
    if (m.rows() != m.cols()) throw std::invalid_argument("is_projection: matrix must be square");
    require_finite(m, "is_projection");
    return operator_norm(m * m - m) <= tol.atol && operator_norm(m - m.adjoint()) <= tol.atol;
}

/// Defect version of the projection test: max of the two operator norms.
inline double projection_defect(const ComplexMatrix& m) {
    return std::max(operator_norm(m * m - m), operator_norm(m - m.adjoint()));
}

/// Hilbert-Schmidt inner product tr(S* T) with the trace normalised so
/// that tr(1) = 1.
inline Complex hs_inner(const ComplexMatrix& s, const ComplexMatrix& t) {
    if (s.rows() != s.cols() || t.rows() != t.cols() || s.rows() != t.rows())
        throw std::invalid_argument("hs_inner: matrices must be square of equal dimension");
    return (s.adjoint() * t).trace() / static_cast<double>(s.rows());
}

/// Kronecker product, row-of-left times block-of-right layout.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Row-major vectorization of a matrix, matching the JSON wire layout.
inline ComplexVector vec_row_major(const ComplexMatrix& m) {
    ComplexVector v(m.size());
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) v(k++) = m(i, j);
    return v;
}

inline ComplexMatrix unvec_row_major(const ComplexVector& v, Eigen::Index rows, Eigen::Index cols) {
    if (v.size() != rows * cols) throw std::invalid_argument("unvec_row_major: size mismatch");
    ComplexMatrix m(rows, cols);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = v(k++);
    return m;
}

inline double unitarity_defect(const ComplexMatrix& u) {
    if (u.rows() != u.cols()) return 1.0;
    return operator_norm(u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols()));
}

} // namespace qsym
