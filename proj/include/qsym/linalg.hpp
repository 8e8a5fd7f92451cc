#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "qsym/matrix.hpp"
#include "qsym/tolerance.hpp"

namespace qsym {

/// Deterministic seeded RNG used everywhere randomness is needed.
/// Gaussians via Box-Muller on top of the raw 64-bit stream, so the byte
/// stream does not depend on the standard library's distribution choices.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() {
        // 53-bit mantissa uniform in [0,1)
        return (engine_() >> 11) * 0x1.0p-53;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do { u1 = uniform(); } while (u1 <= 0.0);
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Complex complex_gaussian() {
        double re = gaussian();
        double im = gaussian();
        return Complex(re, im) / std::sqrt(2.0);
    }

    std::uint64_t raw() { return engine_(); }

    /// Uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        // modulo bias is irrelevant at the scales used here (n <= 2^32)
        return engine_() % n;
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

struct Eigendecomposition {
    RealVector eigenvalues;   // ascending
    ComplexMatrix eigenvectors; // columns, orthonormal
};

/// Eigendecomposition of a self-adjoint matrix. Input must be self-adjoint
/// within atol; the computation symmetrizes before factoring so the output
/// satisfies ||M - V diag V*|| <= 1e-8 * dim.
inline Eigendecomposition hermitian_eigendecomposition(const ComplexMatrix& m,
                                                       const TolerancePolicy& tol = {}) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("hermitian_eigendecomposition: matrix must be square");
    require_finite(m, "hermitian_eigendecomposition");
    if (operator_norm(m - m.adjoint()) > tol.atol)
        throw std::invalid_argument("hermitian_eigendecomposition: matrix is not self-adjoint");
    ComplexMatrix h = (m + m.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    if (solver.info() != Eigen::Success)
        throw ConvergenceError("hermitian_eigendecomposition: eigensolver failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Orthonormal basis of { v : ||Mv|| <= rank_tol * ||M||_F * ||v|| },
/// obtained by singular-value thresholding.
inline std::vector<ComplexVector> nullspace(const ComplexMatrix& m, const TolerancePolicy& tol = {}) {
    require_finite(m, "nullspace");
    if (m.cols() == 0) return {};
    if (m.rows() == 0) {
        std::vector<ComplexVector> basis;
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            basis.push_back(ComplexVector::Unit(m.cols(), j));
        return basis;
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double scale = frobenius_norm(m);
    double threshold = tol.rank_tol * scale;
    std::vector<ComplexVector> basis;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        double s = j < sv.size() ? sv(j) : 0.0;
        if (s <= threshold) basis.push_back(svd.matrixV().col(j));
    }
    return basis;
}

/// Haar-distributed unitary: QR orthonormalization of a complex Gaussian
/// matrix with the R-diagonal phase correction. Deterministic per seed.
inline ComplexMatrix random_unitary(int dim, std::uint64_t seed) {
    if (dim < 1) throw std::invalid_argument("random_unitary: dim must be >= 1");
    Rng rng(seed);
    ComplexMatrix g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = rng.complex_gaussian();
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
    ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j) {
        Complex d = r(j, j);
        double a = std::abs(d);
        q.col(j) *= (a > 0.0) ? d / a : Complex(1.0, 0.0);
    }
    return q;
}

/// Phases of a unitary matrix in (-pi, pi], together with the unitary
/// diagonalizing basis. Throws BranchCutError when an eigenvalue sits on
/// the cut at -1.
struct UnitaryLog {
    RealVector phases;
    ComplexMatrix basis;
};

inline UnitaryLog unitary_log(const ComplexMatrix& u, double branch_guard = 1e-12) {
    if (u.rows() != u.cols()) throw std::invalid_argument("unitary_log: matrix must be square");
    Eigen::ComplexSchur<ComplexMatrix> schur(u);
    if (schur.info() != Eigen::Success) throw ConvergenceError("unitary_log: Schur decomposition failed");
    // a unitary matrix is normal, so T is diagonal up to rounding
    const Eigen::Index n = u.rows();
    RealVector phases(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Complex lambda = schur.matrixT()(i, i);
        if (std::abs(lambda + Complex(1.0, 0.0)) < branch_guard)
            throw BranchCutError("unitary_log: eigenvalue on the principal branch cut");
        phases(i) = std::arg(lambda);
    }
    return {phases, schur.matrixU()};
}

/// Geodesic U0 exp(t log(U0* U1)) with the principal matrix logarithm.
/// Endpoints are reproduced exactly at t = 0, 1; output is unitary to
/// working precision because it is assembled in the Schur basis.
inline ComplexMatrix unitary_geodesic(const ComplexMatrix& u0, const ComplexMatrix& u1, double t) {
    if (u0.rows() != u0.cols() || u1.rows() != u1.cols() || u0.rows() != u1.rows())
        throw std::invalid_argument("unitary_geodesic: endpoints must be square of equal dimension");
    if (unitarity_defect(u0) > 1e-8 || unitarity_defect(u1) > 1e-8)
        throw std::invalid_argument("unitary_geodesic: endpoints must be unitary");
    if (t == 0.0) return u0;
    if (t == 1.0) return u1;
    UnitaryLog lg = unitary_log(u0.adjoint() * u1);
    const Eigen::Index n = u0.rows();
    ComplexVector diag(n);
    for (Eigen::Index i = 0; i < n; ++i) diag(i) = std::polar(1.0, t * lg.phases(i));
    return u0 * (lg.basis * diag.asDiagonal() * lg.basis.adjoint());
}

/// Small seeded unitary perturbation exp(eps * skew); used by callers of
/// unitary_geodesic when the branch cut is hit.
inline ComplexMatrix perturbation_unitary(int dim, std::uint64_t seed, double eps = 1e-6) {
    Rng rng(seed);
    ComplexMatrix a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = rng.complex_gaussian();
    ComplexMatrix skew = (a - a.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(Complex(0, -1) * skew);
    ComplexVector diag(dim);
    for (int i = 0; i < dim; ++i) diag(i) = std::polar(1.0, eps * es.eigenvalues()(i));
    return es.eigenvectors() * diag.asDiagonal() * es.eigenvectors().adjoint();
}

} // namespace qsym
