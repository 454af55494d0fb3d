#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mixlab/problem.hpp"

namespace mixlab {

// Closed-form excess-risk bounds. Each evaluator checks the preconditions of
// the result it implements and throws PreconditionError naming the violation.

/// Finite-class exact oracle inequality: 6 max{V, 1/eta*} (log 1/delta + log N) / n.
/// eta_star may be +inf (hyper-concentrated class).
double finite_class_bound(double V, double eta_star, double N, double delta, double n);

/// Weak (kappa, eta0)-mixability rate: 6 (log 1/delta + log N) / (eta0 n)^{1/(2-kappa)}.
/// Requires n >= V^{(1-kappa)/(2-kappa)} / eta0.
double weak_mix_bound(double kappa, double eta0, double N, double delta, double n, double V);

/// Smallest n admitted by weak_mix_bound.
double weak_mix_min_n(double kappa, double eta0, double V);

struct VcBound {
    double value = 0.0;    // max(branch1, branch2) / n + 1/n
    double branch1 = 0.0;  // 8 max{V, 1/eta*} (C log(Kn) + log 2/delta), before dividing by n
    double branch2 = 0.0;  // 2 V (1080 C log(2Kn) + 90 sqrt(log(2/delta) C log(2Kn)) + log(2e/delta))
    int dominant = 1;      // 1 or 2
};

/// VC-type exact oracle inequality. Note the first branch uses log(Kn) while
/// the second uses log(2Kn); both are evaluated as stated.
VcBound vc_type_bound(double V, double eta_star, double C, double K, double delta, double n);

/// Deviation allowed between f and its projection on a 1/n-net, holding with
/// probability 1 - delta: V/n (1080 C log(2Kn) + 90 sqrt(log(1/delta) C log(2Kn)) + log(e/delta)).
double localization_bound(double C, double K, double delta, double n, double V);

/// The same deviation at failure probability delta/2, as it enters the second
/// branch of vc_type_bound (which equals 2 * this times n, plus 1/n).
double localization_gamma2(double C, double K, double delta, double n, double V);

/// Local analysis: (990 C log(2Kn) + sqrt(2y (1 + 3960 C log(2Kn))) + 2y/3 + 1) / n.
double local_analysis_bound(double C, double K, double y, double n);

/// Expected supremum of the centered empirical process: 990 C V log(2Kn) / n.
double esup_bound(double C, double K, double V, double n);

enum class NetMetric { l2_p, l2_pn };
enum class NetTarget { predictions, losses };

struct EpsilonNet {
    std::vector<std::size_t> centers;             // order of insertion; a subset of the class
    std::vector<std::size_t> projection;          // per hypothesis: nearest center
    std::vector<double> projection_distance;      // per hypothesis
};

/// Proper eps-cover by greedy farthest-point insertion starting from the first
/// hypothesis. Every member lies within eps of its projection.
/// `sample` is required (non-empty) for NetMetric::l2_pn and ignored otherwise.
EpsilonNet epsilon_net(const LearningProblem& problem, double eps, NetMetric metric,
                       std::span<const Observation> sample = {}, NetTarget target = NetTarget::predictions);

/// Pairwise distance matrix used by epsilon_net (row-major, N x N).
std::vector<double> hypothesis_distances(const LearningProblem& problem, NetMetric metric,
                                         std::span<const Observation> sample = {},
                                         NetTarget target = NetTarget::predictions);

}  // namespace mixlab
