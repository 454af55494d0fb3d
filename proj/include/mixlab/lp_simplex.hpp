#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace mixlab::lp {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    double value = 0.0;
    Eigen::VectorXd x;
    std::vector<std::size_t> basis;
};

/// maximize c^T x  subject to  A x = b,  x >= 0.
///
/// Two-phase revised simplex for few rows and many columns. The basis inverse
/// is refactored from scratch every pivot, which keeps it accurate for the
/// small row counts this is meant for. Dantzig pricing, falling back to
/// Bland's rule after a run of degenerate pivots.
LpResult maximize(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                  double tol = 1e-11, std::size_t max_iterations = 100000);

}  // namespace mixlab::lp
