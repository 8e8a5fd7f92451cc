#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "qsym/linalg.hpp"
#include "qsym/matrix.hpp"
#include "qsym/tolerance.hpp"

namespace qsym {

inline constexpr int kMaxPoints = 64;
inline constexpr int kMaxDimension = 64;

using Permutation = std::vector<int>;

inline bool is_permutation(const Permutation& p) {
    std::vector<bool> seen(p.size(), false);
    for (int v : p) {
        if (v < 0 || v >= static_cast<int>(p.size()) || seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

inline Permutation inverse_permutation(const Permutation& p) {
    Permutation inv(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) inv[p[i]] = static_cast<int>(i);
    return inv;
}

/// A quantum permutation of [n]: an n x n array of d x d projections whose
/// rows and columns each sum to the identity (a magic unitary).
struct QuantumPermutation {
    int n = 0;
    int d = 0;
    std::vector<ComplexMatrix> entries; // n*n, row-major

    QuantumPermutation() = default;
    QuantumPermutation(int n_, int d_) : n(n_), d(d_) {
        if (n < 1 || n > kMaxPoints)
            throw std::invalid_argument("QuantumPermutation: point-set size out of range");
        if (d < 1 || d > kMaxDimension)
            throw std::invalid_argument("QuantumPermutation: dimension out of range");
        entries.assign(static_cast<std::size_t>(n) * n, ComplexMatrix::Zero(d, d));
    }

    const ComplexMatrix& at(int x, int y) const { return entries[static_cast<std::size_t>(x) * n + y]; }
    ComplexMatrix& at(int x, int y) { return entries[static_cast<std::size_t>(x) * n + y]; }
};

struct Offender {
    std::string kind; // "projection", "row", "column", "orthogonality"
    int i = -1;
    int j = -1;
};

struct VerificationReport {
    bool valid = false;
    double worst_projection_defect = 0.0;
    double worst_row_defect = 0.0;
    double worst_column_defect = 0.0;
    double worst_orthogonality_defect = 0.0;
    std::vector<Offender> offending_indices;
};

/// Magic-unitary verification: projection condition per entry, row and
/// column sums, and the pairwise row/column orthogonality consequence as a
/// redundant cross-check (judged at 10*atol).
inline VerificationReport verify(const QuantumPermutation& q, const TolerancePolicy& tol = {}) {
    tol.validate();
    if (q.n < 1 || static_cast<int>(q.entries.size()) != q.n * q.n)
        throw std::invalid_argument("verify: ragged or empty entry array");
    for (const auto& e : q.entries) {
        if (e.rows() != q.d || e.cols() != q.d)
            throw std::invalid_argument("verify: entry dimension mismatch");
        require_finite(e, "verify");
    }

    VerificationReport rep;
    for (int x = 0; x < q.n; ++x) {
        for (int y = 0; y < q.n; ++y) {
            double defect = projection_defect(q.at(x, y));
            if (defect > rep.worst_projection_defect) rep.worst_projection_defect = defect;
            if (defect > tol.atol) rep.offending_indices.push_back({"projection", x, y});
        }
    }
    ComplexMatrix id = ComplexMatrix::Identity(q.d, q.d);
    for (int x = 0; x < q.n; ++x) {
        ComplexMatrix row = ComplexMatrix::Zero(q.d, q.d);
        for (int y = 0; y < q.n; ++y) row += q.at(x, y);
        double defect = operator_norm(row - id);
        if (defect > rep.worst_row_defect) rep.worst_row_defect = defect;
        if (defect > tol.atol) rep.offending_indices.push_back({"row", x, -1});
    }
    for (int y = 0; y < q.n; ++y) {
        ComplexMatrix col = ComplexMatrix::Zero(q.d, q.d);
        for (int x = 0; x < q.n; ++x) col += q.at(x, y);
        double defect = operator_norm(col - id);
        if (defect > rep.worst_column_defect) rep.worst_column_defect = defect;
        if (defect > tol.atol) rep.offending_indices.push_back({"column", -1, y});
    }
    for (int x = 0; x < q.n; ++x) {
        for (int y = 0; y < q.n; ++y) {
            for (int z = y + 1; z < q.n; ++z) {
                double row_orth = operator_norm(q.at(x, y) * q.at(x, z));
                double col_orth = operator_norm(q.at(y, x) * q.at(z, x));
                double worst = std::max(row_orth, col_orth);
                if (worst > rep.worst_orthogonality_defect) rep.worst_orthogonality_defect = worst;
                if (worst > 10.0 * tol.atol) rep.offending_indices.push_back({"orthogonality", x, y});
            }
        }
    }
    rep.valid = rep.worst_projection_defect <= tol.atol && rep.worst_row_defect <= tol.atol &&
                rep.worst_column_defect <= tol.atol &&
                rep.worst_orthogonality_defect <= 10.0 * tol.atol;
    return rep;
}

/// Classical permutation sigma as a one-dimensional quantum permutation:
/// entry (x,y) = 1 iff x = sigma(y).
inline QuantumPermutation from_permutation(const Permutation& perm) {
    if (perm.empty() || !is_permutation(perm))
        throw std::invalid_argument("from_permutation: input is not a bijection");
    QuantumPermutation q(static_cast<int>(perm.size()), 1);
    for (int y = 0; y < q.n; ++y) q.at(perm[y], y)(0, 0) = 1.0;
    return q;
}

inline QuantumPermutation direct_sum(const QuantumPermutation& a, const QuantumPermutation& b) {
    if (a.n != b.n) throw std::invalid_argument("direct_sum: point-set size mismatch");
    QuantumPermutation out(a.n, a.d + b.d);
    for (int x = 0; x < a.n; ++x)
        for (int y = 0; y < a.n; ++y) {
            out.at(x, y).topLeftCorner(a.d, a.d) = a.at(x, y);
            out.at(x, y).bottomRightCorner(b.d, b.d) = b.at(x, y);
        }
    return out;
}

/// Tensor product: entry (x,y) = sum_t a(x,t) (x) b(t,y).
inline QuantumPermutation tensor(const QuantumPermutation& a, const QuantumPermutation& b) {
    if (a.n != b.n) throw std::invalid_argument("tensor: point-set size mismatch");
    QuantumPermutation out(a.n, a.d * b.d);
    for (int x = 0; x < a.n; ++x)
        for (int y = 0; y < a.n; ++y) {
            ComplexMatrix acc = ComplexMatrix::Zero(out.d, out.d);
            for (int t = 0; t < a.n; ++t) acc += kron(a.at(x, t), b.at(t, y));
            out.at(x, y) = acc;
        }
    return out;
}

/// Conjugate quantum permutation: entry (x,y) is the entrywise complex
/// conjugate of the entry at (y,x).
inline QuantumPermutation conjugate(const QuantumPermutation& a) {
    QuantumPermutation out(a.n, a.d);
    for (int x = 0; x < a.n; ++x)
        for (int y = 0; y < a.n; ++y) out.at(x, y) = a.at(y, x).conjugate();
    return out;
}

/// Index relabeling: entry (i,j) = a(row_perm(i), col_perm(j)).
inline QuantumPermutation relabel(const QuantumPermutation& a, const Permutation& row_perm,
                                  const Permutation& col_perm) {
    if (static_cast<int>(row_perm.size()) != a.n || static_cast<int>(col_perm.size()) != a.n ||
        !is_permutation(row_perm) || !is_permutation(col_perm))
        throw std::invalid_argument("relabel: permutations must be bijections on the point set");
    QuantumPermutation out(a.n, a.d);
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j < a.n; ++j) out.at(i, j) = a.at(row_perm[i], col_perm[j]);
    return out;
}

/// Classical iff all matrix entries mutually commute within atol.
inline bool is_classical(const QuantumPermutation& q, const TolerancePolicy& tol = {}) {
    double worst = 0.0;
    const int m = q.n * q.n;
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b) {
            const ComplexMatrix& p = q.entries[a];
            const ComplexMatrix& r = q.entries[b];
            worst = std::max(worst, operator_norm(p * r - r * p));
            if (worst > tol.atol) return false;
        }
    return worst <= tol.atol;
}

inline double max_commutator_norm(const QuantumPermutation& q) {
    double worst = 0.0;
    const int m = q.n * q.n;
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b) {
            const ComplexMatrix& p = q.entries[a];
            const ComplexMatrix& r = q.entries[b];
            worst = std::max(worst, operator_norm(p * r - r * p));
        }
    return worst;
}

/// Orthonormal basis of the intertwiner space { T : T a(x,y) = b(x,y) T }.
///
/// Solved through the Gram matrix of the stacked commutation operator:
/// with K_xy = a(x,y)^T (x) I - I (x) b(x,y) acting on column-stacked T,
/// the nullspace of sum K* K equals the joint solution space, and the
/// Kronecker structure keeps the accumulation at O(n^2 d^4).
inline std::vector<ComplexMatrix> intertwiners(const QuantumPermutation& a, const QuantumPermutation& b,
                                               const TolerancePolicy& tol = {}) {
    if (a.n != b.n) throw std::invalid_argument("intertwiners: point-set size mismatch");
    const int da = a.d, db = b.d;
    ComplexMatrix asum = ComplexMatrix::Zero(da, da);
    ComplexMatrix bsum = ComplexMatrix::Zero(db, db);
    ComplexMatrix cross = ComplexMatrix::Zero(da * db, da * db);
    for (int x = 0; x < a.n; ++x)
        for (int y = 0; y < a.n; ++y) {
            const ComplexMatrix& ua = a.at(x, y);
            const ComplexMatrix& ub = b.at(x, y);
            asum += ua.conjugate() * ua.transpose();
            bsum += ub.adjoint() * ub;
            cross += kron(ua.conjugate(), ub);
        }
    ComplexMatrix gram = kron(asum, ComplexMatrix::Identity(db, db)) +
                         kron(ComplexMatrix::Identity(da, da), bsum) - cross - cross.adjoint();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es((gram + gram.adjoint()) / 2.0);
    if (es.info() != Eigen::Success) throw ConvergenceError("intertwiners: eigensolver failed");
    double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    double threshold = tol.rank_tol * tol.rank_tol * scale;
    std::vector<ComplexMatrix> basis;
    for (int k = 0; k < da * db; ++k) {
        if (es.eigenvalues()(k) <= threshold) {
            ComplexVector v = es.eigenvectors().col(k);
            basis.push_back(Eigen::Map<const ComplexMatrix>(v.data(), db, da));
        }
    }
    return basis;
}

inline int commutant_dimension(const QuantumPermutation& q, const TolerancePolicy& tol = {}) {
    return static_cast<int>(intertwiners(q, q, tol).size());
}

inline bool is_irreducible(const QuantumPermutation& q, const TolerancePolicy& tol = {}) {
    return commutant_dimension(q, tol) == 1;
}

/// Equivalence test for two irreducible quantum permutations. Returns the
/// unitary witness obtained from the polar part of the one-dimensional
/// intertwiner space (Schur: T*T is scalar), or nothing when the space is
/// trivial.
inline std::optional<ComplexMatrix> are_equivalent(const QuantumPermutation& a,
                                                   const QuantumPermutation& b,
                                                   const TolerancePolicy& tol = {}) {
    if (!is_irreducible(a, tol) || !is_irreducible(b, tol))
        throw std::invalid_argument("are_equivalent: inputs must be irreducible");
    auto basis = intertwiners(a, b, tol);
    if (basis.empty()) return std::nullopt;
    if (basis.size() > 1)
        throw ConvergenceError("are_equivalent: intertwiner space dimension exceeds 1 for irreducible pair");
    const ComplexMatrix& t = basis.front();
    double c = (t.adjoint() * t).trace().real() / static_cast<double>(t.cols());
    if (c <= tol.rank_tol) return std::nullopt;
    return ComplexMatrix(t / std::sqrt(c));
}

struct DecompositionFactor {
    QuantumPermutation factor; // irreducible representative
    int multiplicity = 0;
    ComplexMatrix isometry; // d x (multiplicity * factor.d), copies in column blocks
};

struct DecompositionReport {
    std::vector<DecompositionFactor> factors;
    double residual = 0.0;
};

namespace detail {

inline void decompose_recurse(const QuantumPermutation& q, const ComplexMatrix& embed, Rng& rng,
                              const TolerancePolicy& tol, int depth, int depth_limit,
                              std::vector<std::pair<QuantumPermutation, ComplexMatrix>>& leaves) {
    if (depth > depth_limit)
        throw ConvergenceError("decompose: failed to converge within dimension-many recursions");
    auto basis = intertwiners(q, q, tol);
    if (basis.size() <= 1) {
        leaves.emplace_back(q, embed);
        return;
    }
    for (int attempt = 0; attempt < 2; ++attempt) {
        ComplexMatrix c = ComplexMatrix::Zero(q.d, q.d);
        for (const auto& t : basis) c += rng.gaussian() * t;
        ComplexMatrix h = (c + c.adjoint()) / 2.0;
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
        if (es.info() != Eigen::Success) throw ConvergenceError("decompose: eigensolver failed");
        // cluster eigenvalues: a gap above rank_tol separates eigenspaces
        std::vector<std::pair<int, int>> clusters;
        int start = 0;
        for (int i = 1; i <= q.d; ++i) {
            if (i == q.d || es.eigenvalues()(i) - es.eigenvalues()(i - 1) > tol.rank_tol) {
                clusters.emplace_back(start, i);
                start = i;
            }
        }
        if (clusters.size() < 2) continue; // degenerate collision: reseed once
        for (auto [lo, hi] : clusters) {
            ComplexMatrix w = es.eigenvectors().middleCols(lo, hi - lo);
            QuantumPermutation sub(q.n, hi - lo);
            for (int x = 0; x < q.n; ++x)
                for (int y = 0; y < q.n; ++y) sub.at(x, y) = w.adjoint() * q.at(x, y) * w;
            decompose_recurse(sub, ComplexMatrix(embed * w), rng, tol, depth + 1, depth_limit, leaves);
        }
        return;
    }
    throw ConvergenceError("decompose: degenerate eigenvalue collision persisted after reseed");
}

} // namespace detail

/// Decomposition into irreducibles: split along eigenspaces of a seeded
/// random self-adjoint commutant element, recurse until the commutant is
/// trivial, then group factors by equivalence. Deterministic per seed.
inline DecompositionReport decompose(const QuantumPermutation& q, std::uint64_t seed,
                                     const TolerancePolicy& tol = {}) {
    Rng rng(seed);
    std::vector<std::pair<QuantumPermutation, ComplexMatrix>> leaves;
    detail::decompose_recurse(q, ComplexMatrix::Identity(q.d, q.d), rng, tol, 0, q.d + 1, leaves);

    DecompositionReport report;
    std::vector<std::vector<ComplexMatrix>> copies; // per factor, embeddings composed with witnesses
    for (auto& [factor, embed] : leaves) {
        bool matched = false;
        for (std::size_t gi = 0; gi < report.factors.size(); ++gi) {
            if (report.factors[gi].factor.d != factor.d) continue;
            auto witness = are_equivalent(report.factors[gi].factor, factor, tol);
            if (witness) {
                // factor = W rep W*, so embed * W carries rep into the original space
                copies[gi].push_back(embed * *witness);
                matched = true;
                break;
            }
        }
        if (!matched) {
            report.factors.push_back({factor, 0, {}});
            copies.push_back({embed});
        }
    }
    for (std::size_t gi = 0; gi < report.factors.size(); ++gi) {
        auto& fac = report.factors[gi];
        fac.multiplicity = static_cast<int>(copies[gi].size());
        fac.isometry.resize(q.d, fac.multiplicity * fac.factor.d);
        for (int c = 0; c < fac.multiplicity; ++c)
            fac.isometry.middleCols(c * fac.factor.d, fac.factor.d) = copies[gi][c];
    }
    // reassembly residual
    double residual = 0.0;
    for (int x = 0; x < q.n; ++x)
        for (int y = 0; y < q.n; ++y) {
            ComplexMatrix rebuilt = ComplexMatrix::Zero(q.d, q.d);
            for (std::size_t gi = 0; gi < report.factors.size(); ++gi) {
                const auto& fac = report.factors[gi];
                for (int c = 0; c < fac.multiplicity; ++c) {
                    ComplexMatrix v = fac.isometry.middleCols(c * fac.factor.d, fac.factor.d);
                    rebuilt += v * fac.factor.at(x, y) * v.adjoint();
                }
            }
            residual = std::max(residual, operator_norm(q.at(x, y) - rebuilt));
        }
    report.residual = residual;
    return report;
}

/// Largest entrywise operator-norm distance; handy for exact-equality style
/// assertions in tests.
inline double max_entry_distance(const QuantumPermutation& a, const QuantumPermutation& b) {
    if (a.n != b.n || a.d != b.d) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (std::size_t i = 0; i < a.entries.size(); ++i)
        worst = std::max(worst, operator_norm(a.entries[i] - b.entries[i]));
    return worst;
}

} // namespace qsym
