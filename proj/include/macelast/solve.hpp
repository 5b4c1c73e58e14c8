#pragma once

#include "macelast/elasticity.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace macelast {

enum class SolverBackend { kAuto, kDirect, kIterative };

SolverBackend parse_backend(const std::string& name);
std::string to_string(SolverBackend b);

struct SolverOptions {
    SolverBackend backend = SolverBackend::kAuto;
    double tol = 1e-10;                  // relative residual target
    int max_iterations = 20000;          // iterative backend only
    std::size_t direct_limit = 400000;   // kAuto: direct up to this many unknowns
};

struct Solution {
    Eigen::VectorXd x;
    double residual = 0.0;  // ||A x - b||_2 / ||b||_2 measured after the solve
    int iterations = 0;     // Krylov iterations or refinement steps
    std::string backend;

    /// Splits the unknown vector into component fields.
    void decode(const UnknownMap& map, StressFields& stress, DisplacementFields& disp) const;
};

/// The matrix (or its stress block) is singular; `row` names the offending unknown.
class SingularMatrixError : public std::runtime_error {
public:
    SingularMatrixError(std::size_t row, const std::string& what) : std::runtime_error(what), row_(row) {}
    std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

/// The Krylov solver stopped without reaching the tolerance. Carries the
/// best iterate seen and its relative residual.
class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, Eigen::VectorXd best, double residual, int iterations)
        : std::runtime_error(what), best_(std::move(best)), residual_(residual), iterations_(iterations)
    {
    }
    const Eigen::VectorXd& best() const { return best_; }
    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

private:
    Eigen::VectorXd best_;
    double residual_;
    int iterations_;
};

/// ||A x - b||_2 / ||b||_2, with 0/0 taken as 0.
double residual(const MacSystem& sys, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Direct solve by static condensation of the stress unknowns: the
/// compliance block is block-diagonal with tiny blocks and is inverted
/// exactly, the displacement Schur complement B A^-1 B^T is factored by a
/// sparse Cholesky. A few steps of iterative refinement on the full system
/// bring the residual below `tol`.
Solution solve_direct(const MacSystem& sys, double tol = 1e-10);

/// Preconditioned MINRES on the full symmetric indefinite system with the
/// block-diagonal preconditioner diag(A^-1, diag(B A^-1 B^T)^-1).
Solution solve_iterative(const MacSystem& sys, double tol = 1e-10, int max_iterations = 20000);

/// Dispatches on options.backend (kAuto: direct up to options.direct_limit unknowns).
Solution solve(const MacSystem& sys, const SolverOptions& options = {});

}  // namespace macelast
