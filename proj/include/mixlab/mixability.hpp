#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mixlab/problem.hpp"

namespace mixlab {

/// Risk tolerance used to decide which hypotheses are minimizers.
inline constexpr double kMinimizerTol = 1e-12;
/// Bisection stops once the bracket is this wide (relative above eta = 1).
inline constexpr double kRootTol = 1e-12;

/// log E exp(-eta Z), evaluated with log-sum-exp so large eta stays finite.
double cgf(const ExcessLossRV& rv, double eta);

enum class EtaStatus { root, hyper_concentrated, zero_mean, negative_mean };

std::string_view to_string(EtaStatus status);

/// Outcome of solving E exp(-eta Z) = 1 for the largest eta.
struct EtaResult {
    EtaStatus status = EtaStatus::zero_mean;
    double eta = 0.0;    // root status: the positive root
    double limit = 0.0;  // hyper_concentrated: lim_{eta -> inf} E exp(-eta Z) = P(Z = 0)

    /// Largest eta for which the mixability inequality holds for this variable:
    /// the root, +inf when hyper-concentrated, 0 otherwise.
    double mixability_eta() const noexcept;
};

EtaResult eta_root(const ExcessLossRV& rv);

struct FunctionMixability {
    std::string name;
    std::size_t index = 0;
    EtaResult result;
    bool equivalent_to_f_star = false;  // Z == 0 almost surely
};

struct MixabilityProfile {
    std::size_t f_star = 0;
    std::string f_star_name;
    std::vector<FunctionMixability> per_function;  // class order
    double eta_star = std::numeric_limits<double>::infinity();

    bool mixable() const noexcept { return eta_star > 0.0; }
};

/// eta* of the class relative to a fixed f*, restricted to `members`.
/// Never throws on non-unique minimizers: a zero-mean, non-degenerate
/// excess loss simply drives eta* to 0.
MixabilityProfile mixability_profile(const LearningProblem& problem, std::size_t f_star,
                                     std::span<const std::size_t> members);

/// eta* over the whole class. Throws NonUniqueMinimizerError when two
/// minimizers differ in loss with positive probability.
MixabilityProfile eta_star(const LearningProblem& problem);

struct WeakMixabilityWitness {
    std::size_t hypothesis = 0;
    std::string name;
    double epsilon = 0.0;
    double eta_epsilon = 0.0;
    double cgf_value = 0.0;
};

struct WeakMixabilityResult {
    bool holds = true;
    std::optional<WeakMixabilityWitness> witness;  // first violation, ascending epsilon
    std::vector<double> levels;                    // achieved positive excess-risk levels checked
};

/// (kappa, eta0)-weak stochastic mixability, checked at every achieved excess-risk level.
WeakMixabilityResult check_weak_mixability(const LearningProblem& problem, double kappa, double eta0);

struct BernsteinFit {
    double beta = 1.0;
    double B = 0.0;  // 0 by convention when f* is the only class member up to a.s. equality
    std::optional<std::size_t> argmax;
};

/// Smallest B with P Z_f^2 <= B (P Z_f)^beta over the class.
BernsteinFit bernstein_constant(const LearningProblem& problem, double beta);

struct CouplingEntry {
    double from = 0.0;  // value of Z
    double to = 0.0;    // value of Z' (never above `from`)
    double mass = 0.0;
};

struct HyperPerturbation {
    ExcessLossRV perturbed;
    double eta = 0.0;
    std::vector<CouplingEntry> coupling;
};

/// Mirror a fraction epsilon of the mass on [mu, V] to [-V, -mu], producing a
/// dominated variable Z' <= Z with a finite mixability root.
HyperPerturbation hyper_perturb(const ExcessLossRV& rv, double epsilon, double support_bound);

}  // namespace mixlab
