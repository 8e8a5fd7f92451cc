#pragma once

#include <stdexcept>
#include <string>

namespace qsym {

/// Shared tolerance policy for all verification and rank decisions.
///
/// atol is an operator-norm scale used for identity checks (projection
/// defects, row/column sums, commutation). rank_tol is the singular-value
/// threshold splitting "zero" from "nonzero" in nullspace and commutant
/// computations; it sits two orders of magnitude above accumulated
/// eigensolver error at dimensions <= 64.
struct TolerancePolicy {
    double atol = 1e-9;
    double rank_tol = 1e-7;

    void validate() const {
        if (!(atol > 0.0)) throw std::invalid_argument("TolerancePolicy: atol must be positive");
        if (!(rank_tol > 0.0)) throw std::invalid_argument("TolerancePolicy: rank_tol must be positive");
        if (rank_tol < atol) throw std::invalid_argument("TolerancePolicy: rank_tol must be >= atol");
    }
};

/// Principal matrix logarithm hit an eigenvalue on the branch cut; the
/// caller is expected to perturb and retry.
struct BranchCutError : std::runtime_error {
    explicit BranchCutError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical procedure failed to converge within its tolerance regime.
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qsym
