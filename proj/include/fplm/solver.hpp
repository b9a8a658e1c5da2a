#pragma once

// Symmetric positive definite solves for the free block of the Laplacian.
//
// Two routes: a sparse LDL^T factorization with AMD ordering (Eigen), and a
// Jacobi-preconditioned conjugate gradient written here. `Auto` picks the
// factorization for small systems and CG above `auto_threshold` unknowns.

#include "fplm/errors.hpp"
#include "fplm/laplacian.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace fplm {

enum class SolveMethod
{
    Direct,
    Iterative,
    Auto,
};

inline const char* to_string(SolveMethod m)
{
    switch (m) {
    case SolveMethod::Direct: return "direct";
    case SolveMethod::Iterative: return "iterative";
    case SolveMethod::Auto: return "auto";
    }
    return "unknown";
}

inline SolveMethod parse_solve_method(const std::string& name)
{
    if (name == "direct")
        return SolveMethod::Direct;
    if (name == "iterative")
        return SolveMethod::Iterative;
    if (name == "auto")
        return SolveMethod::Auto;
    throw ConfigError("unknown solver method '" + name + "' (expected direct|iterative|auto)");
}

struct SolveConfig
{
    double rel_tol = 1e-10;
    /// Iteration cap for CG; defaults to 10 * unknowns when unset.
    std::optional<long> max_iter;
    SolveMethod method = SolveMethod::Auto;
    long auto_threshold = 20000;
    /// Upper bound on worker threads used across right-hand-side columns.
    int threads = 1;

    void validate() const
    {
        if (!(rel_tol > 0.0 && rel_tol < 1.0))
            throw ConfigError("rel_tol must lie in (0, 1)");
        if (max_iter && *max_iter < 1)
            throw ConfigError("max_iter must be at least 1");
        if (threads < 1)
            throw ConfigError("threads must be at least 1");
    }
};

struct SolveReport
{
    SolveMethod method = SolveMethod::Direct;
    std::vector<long> iterations; ///< per column; empty for the direct route
    double relative_residual = 0.0;
};

class SolverError : public std::runtime_error
{
public:
    enum class Kind
    {
        NotConverged,
        NotPositiveDefinite,
    };

    SolverError(Kind kind, const std::string& what, double residual, long pivot)
        : std::runtime_error(what)
        , kind_(kind)
        , residual_(residual)
        , pivot_(pivot)
    {}

    Kind kind() const noexcept { return kind_; }
    /// Achieved relative residual when the iteration cap was hit.
    double residual() const noexcept { return residual_; }
    /// Row of the offending pivot (original numbering), or -1.
    long pivot() const noexcept { return pivot_; }

private:
    Kind kind_;
    double residual_;
    long pivot_;
};

namespace detail {

inline double relative_residual(const Eigen::SparseMatrix<double>& a, const Eigen::MatrixXd& x,
                                const Eigen::MatrixXd& rhs)
{
    const double bnorm = rhs.norm();
    const double rnorm = (a * x - rhs).norm();
    return bnorm > 0.0 ? rnorm / bnorm : rnorm;
}

inline Eigen::MatrixXd solve_direct(const Eigen::SparseMatrix<double>& a, const Eigen::MatrixXd& rhs,
                                    double rel_tol)
{
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
    ldlt.compute(a);
    const auto pivot_failure = [&]() -> long {
        const Eigen::VectorXd diag = ldlt.vectorD();
        for (Eigen::Index k = 0; k < diag.size(); ++k)
            if (!(diag[k] > 0.0))
                return ldlt.permutationPinv().indices()[k];
        return -1;
    };
    if (ldlt.info() != Eigen::Success) {
        const long pivot = pivot_failure();
        throw SolverError(SolverError::Kind::NotPositiveDefinite,
                          "factorization failed: zero pivot at row " + std::to_string(pivot), 0.0, pivot);
    }
    if (const long pivot = pivot_failure(); pivot >= 0) {
        throw SolverError(SolverError::Kind::NotPositiveDefinite,
                          "matrix is not positive definite: non-positive pivot at row " + std::to_string(pivot),
                          0.0, pivot);
    }
    Eigen::MatrixXd x = ldlt.solve(rhs);
    // A few refinement sweeps recover accuracy lost to roundoff on badly scaled systems.
    for (int sweep = 0; sweep < 3 && relative_residual(a, x, rhs) > rel_tol; ++sweep)
        x += ldlt.solve(rhs - a * x);
    return x;
}

// Jacobi-preconditioned conjugate gradient on one column. Returns iterations used.
inline long pcg_column(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& inv_diag,
                       const Eigen::VectorXd& b, Eigen::VectorXd& x, double rel_tol, long max_iter,
                       double& achieved)
{
    const double bnorm = b.norm();
    x.setZero(b.size());
    if (bnorm == 0.0) {
        achieved = 0.0;
        return 0;
    }
    Eigen::VectorXd r = b;
    Eigen::VectorXd z = inv_diag.cwiseProduct(r);
    Eigen::VectorXd p = z;
    Eigen::VectorXd ap(b.size());
    double rz = r.dot(z);
    const double target = rel_tol * bnorm;
    long it = 0;
    double rnorm = r.norm();
    while (it < max_iter) {
        if (rnorm <= target) {
            // Confirm against the true residual; restart if the recurrence drifted.
            r = b - a * x;
            rnorm = r.norm();
            if (rnorm <= target)
                break;
            z = inv_diag.cwiseProduct(r);
            p = z;
            rz = r.dot(z);
        }
        ap.noalias() = a * p;
        const double pap = p.dot(ap);
        if (!(pap > 0.0))
            throw SolverError(SolverError::Kind::NotPositiveDefinite,
                              "conjugate gradient met a non-positive curvature direction", rnorm / bnorm, -1);
        const double alpha = rz / pap;
        x += alpha * p;
        r -= alpha * ap;
        ++it;
        // Periodic true-residual refresh limits drift on long runs.
        if (it % 500 == 0)
            r = b - a * x;
        rnorm = r.norm();
        z = inv_diag.cwiseProduct(r);
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    achieved = (b - a * x).norm() / bnorm;
    return it;
}

inline Eigen::MatrixXd solve_iterative(const Eigen::SparseMatrix<double>& a, const Eigen::MatrixXd& rhs,
                                       const SolveConfig& config, SolveReport& report)
{
    const long n = a.rows();
    const long max_iter = config.max_iter.value_or(std::max<long>(10 * n, 1));
    Eigen::VectorXd inv_diag(n);
    for (long i = 0; i < n; ++i) {
        const double d = a.coeff(i, i);
        if (!(d > 0.0))
            throw SolverError(SolverError::Kind::NotPositiveDefinite,
                              "non-positive diagonal at row " + std::to_string(i), 0.0, i);
        inv_diag[i] = 1.0 / d;
    }

    const int cols = static_cast<int>(rhs.cols());
    Eigen::MatrixXd x(n, cols);
    std::vector<long> iterations(static_cast<std::size_t>(cols), 0);
    std::vector<double> achieved(static_cast<std::size_t>(cols), 0.0);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(cols));

    auto run_column = [&](int c) {
        try {
            Eigen::VectorXd col;
            iterations[c] = pcg_column(a, inv_diag, rhs.col(c), col, config.rel_tol, max_iter, achieved[c]);
            x.col(c) = col;
        } catch (...) {
            errors[c] = std::current_exception();
        }
    };

    const int workers = std::min(config.threads, cols);
    if (workers <= 1) {
        for (int c = 0; c < cols; ++c)
            run_column(c);
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (int c = w; c < cols; c += workers)
                    run_column(c);
            });
    }
    for (const auto& err : errors)
        if (err)
            std::rethrow_exception(err);

    report.iterations = iterations;
    for (int c = 0; c < cols; ++c) {
        if (achieved[c] > config.rel_tol) {
            throw SolverError(SolverError::Kind::NotConverged,
                              "conjugate gradient did not converge in " + std::to_string(max_iter)
                                  + " iterations (column " + std::to_string(c) + ", relative residual "
                                  + std::to_string(achieved[c]) + ")",
                              achieved[c], -1);
        }
    }
    return x;
}

} // namespace detail

/// Solve A X = rhs for symmetric positive definite A, one column per output dimension.
inline Eigen::MatrixXd solve_spd(const Eigen::SparseMatrix<double>& a, const Eigen::MatrixXd& rhs,
                                 const SolveConfig& config = {}, SolveReport* report = nullptr)
{
    config.validate();
    if (a.rows() != a.cols() || a.rows() != rhs.rows())
        throw ConfigError("solve_spd: dimension mismatch");
    SolveReport local;
    SolveMethod method = config.method;
    if (method == SolveMethod::Auto)
        method = a.rows() < config.auto_threshold ? SolveMethod::Direct : SolveMethod::Iterative;
    local.method = method;

    Eigen::MatrixXd x;
    if (a.rows() == 0) {
        x.resize(0, rhs.cols());
    } else if (method == SolveMethod::Direct) {
        x = detail::solve_direct(a, rhs, config.rel_tol);
    } else {
        x = detail::solve_iterative(a, rhs, config, local);
    }
    local.relative_residual = a.rows() == 0 ? 0.0 : detail::relative_residual(a, x, rhs);
    if (report)
        *report = std::move(local);
    return x;
}

/// Solve L_y Y = rhs on the free block of an assembled system.
inline Eigen::MatrixXd solve_spd(const LaplacianSystem& system, const Eigen::MatrixXd& rhs,
                                 const SolveConfig& config = {}, SolveReport* report = nullptr)
{
    return solve_spd(system.free_block(), rhs, config, report);
}

} // namespace fplm
