#include "mixlab/lp_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mixlab::lp {

namespace {

constexpr std::size_t kDegenerateRunBeforeBland = 50;

struct Phase {
    const Eigen::MatrixXd& M;
    const Eigen::VectorXd& b;
    Eigen::VectorXd cost;
    std::vector<bool> allowed;  // columns that may enter the basis
};

// Runs the revised simplex from `basis`. Returns the terminal status and
// leaves the optimal basis in place.
LpStatus run(const Phase& phase, std::vector<std::size_t>& basis, double tol, std::size_t max_iterations) {
    const auto rows = static_cast<Eigen::Index>(basis.size());
    const auto cols = phase.M.cols();
    std::size_t degenerate_run = 0;
    bool bland = false;

    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
        Eigen::MatrixXd B(rows, rows);
        Eigen::VectorXd cB(rows);
        for (Eigen::Index i = 0; i < rows; ++i) {
            B.col(i) = phase.M.col(static_cast<Eigen::Index>(basis[i]));
            cB(i) = phase.cost(static_cast<Eigen::Index>(basis[i]));
        }
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
        const Eigen::VectorXd xB = lu.solve(phase.b);
        const Eigen::VectorXd y = B.transpose().fullPivLu().solve(cB);
        const Eigen::VectorXd y_abs = y.cwiseAbs();

        Eigen::Index entering = -1;
        double best = 0.0;
        for (Eigen::Index j = 0; j < cols; ++j) {
            if (!phase.allowed[static_cast<std::size_t>(j)]) continue;
            if (std::find(basis.begin(), basis.end(), static_cast<std::size_t>(j)) != basis.end()) continue;
            const double reduced = phase.cost(j) - y.dot(phase.M.col(j));
            const double scale = 1.0 + std::abs(phase.cost(j)) + y_abs.dot(phase.M.col(j).cwiseAbs());
            if (reduced <= tol * scale) continue;
            if (bland) {
                entering = j;
                break;
            }
            if (reduced / scale > best) {
                best = reduced / scale;
                entering = j;
            }
        }
        if (entering < 0) return LpStatus::optimal;

        const Eigen::VectorXd w = lu.solve(phase.M.col(entering));
        Eigen::Index leaving = -1;
        double ratio = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < rows; ++i) {
            if (w(i) <= tol) continue;
            const double r = std::max(xB(i), 0.0) / w(i);
            if (r < ratio || (leaving >= 0 && r == ratio && basis[i] < basis[leaving])) {
                ratio = r;
                leaving = i;
            }
        }
        if (leaving < 0) return LpStatus::unbounded;

        degenerate_run = ratio == 0.0 ? degenerate_run + 1 : 0;
        if (degenerate_run > kDegenerateRunBeforeBland) bland = true;
        basis[leaving] = static_cast<std::size_t>(entering);
    }
    return LpStatus::iteration_limit;
}

Eigen::VectorXd basic_solution(const Eigen::MatrixXd& M, const Eigen::VectorXd& b,
                               const std::vector<std::size_t>& basis) {
    const auto rows = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd B(rows, rows);
    for (Eigen::Index i = 0; i < rows; ++i) B.col(i) = M.col(static_cast<Eigen::Index>(basis[i]));
    Eigen::VectorXd x = Eigen::VectorXd::Zero(M.cols());
    const Eigen::VectorXd xB = B.fullPivLu().solve(b);
    for (Eigen::Index i = 0; i < rows; ++i) x(static_cast<Eigen::Index>(basis[i])) = std::max(xB(i), 0.0);
    return x;
}

}  // namespace

LpResult maximize(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double tol,
                  std::size_t max_iterations) {
    const auto rows = A.rows();
    const auto n = A.cols();
    if (c.size() != n || b.size() != rows) throw std::invalid_argument("lp::maximize: dimension mismatch");

    // Phase 1 on [A | I] with b >= 0.
    Eigen::MatrixXd M(rows, n + rows);
    Eigen::VectorXd rhs = b;
    M.leftCols(n) = A;
    M.rightCols(rows) = Eigen::MatrixXd::Identity(rows, rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (rhs(i) < 0.0) {
            rhs(i) = -rhs(i);
            M.row(i).head(n) *= -1.0;
        }
    }

    std::vector<std::size_t> basis(static_cast<std::size_t>(rows));
    for (Eigen::Index i = 0; i < rows; ++i) basis[static_cast<std::size_t>(i)] = static_cast<std::size_t>(n + i);

    Phase one{M, rhs, Eigen::VectorXd::Zero(n + rows), std::vector<bool>(static_cast<std::size_t>(n + rows), true)};
    one.cost.tail(rows).setConstant(-1.0);
    LpResult result;
    const LpStatus s1 = run(one, basis, tol, max_iterations);
    if (s1 == LpStatus::iteration_limit) {
        result.status = s1;
        return result;
    }
    const Eigen::VectorXd x1 = basic_solution(M, rhs, basis);
    const double infeasibility = x1.tail(rows).sum();
    if (infeasibility > 1e-9 * (1.0 + rhs.cwiseAbs().maxCoeff())) {
        result.status = LpStatus::infeasible;
        return result;
    }

    // Pivot zero-level artificials out of the basis where possible.
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (basis[i] < static_cast<std::size_t>(n)) continue;
        Eigen::MatrixXd B(rows, rows);
        for (Eigen::Index k = 0; k < rows; ++k) B.col(k) = M.col(static_cast<Eigen::Index>(basis[static_cast<std::size_t>(k)]));
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (std::find(basis.begin(), basis.end(), static_cast<std::size_t>(j)) != basis.end()) continue;
            const Eigen::VectorXd w = lu.solve(M.col(j));
            if (std::abs(w(static_cast<Eigen::Index>(i))) > 1e-9) {
                basis[i] = static_cast<std::size_t>(j);
                break;
            }
        }
    }

    Phase two{M, rhs, Eigen::VectorXd::Zero(n + rows), std::vector<bool>(static_cast<std::size_t>(n + rows), false)};
    two.cost.head(n) = c;
    std::fill(two.allowed.begin(), two.allowed.begin() + n, true);
    result.status = run(two, basis, tol, max_iterations);
    if (result.status != LpStatus::optimal) return result;

    const Eigen::VectorXd x = basic_solution(M, rhs, basis);
    result.x = x.head(n);
    result.value = c.dot(result.x);
    result.basis = basis;
    return result;
}

}  // namespace mixlab::lp
