#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mixlab/problem.hpp"

namespace mixlab {

/// Rule for choosing among hypotheses with exactly equal empirical risk.
enum class Tiebreak {
    first_by_name,  // lexicographically smallest name
    lowest_risk,    // smallest true risk, then name
    worst_risk,     // largest true risk, then name (adversarial selection)
};

std::string_view to_string(Tiebreak rule);
Tiebreak parse_tiebreak(std::string_view name);

/// Empirical risk minimizer from per-atom counts (counts.size() == atom_count()).
std::size_t erm_select_counts(const LearningProblem& problem, std::span<const std::size_t> counts, Tiebreak rule);

/// Empirical risk minimizer for a sample of observations. The sample need not
/// consist of problem atoms; losses are evaluated from hypothesis predictions.
std::size_t erm_select(std::span<const Observation> sample, const LearningProblem& problem, Tiebreak rule);

/// Cramer-Chernoff bound on Pr{P_n l(f) <= P_n l(f*) + t}: exp(eta t + n cgf(eta)), capped at 1.
/// Requires eta > 0 and t < E Z.
double chernoff_tail(const ExcessLossRV& rv, double eta, double t, double n);

struct SimConfig {
    std::vector<std::size_t> n_values;  // strictly increasing
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
    Tiebreak tiebreak = Tiebreak::first_by_name;
    double delta = 0.05;                 // quantile 1 - delta and the default epsilon
    std::optional<double> epsilon;       // fixed epsilon for the epsilon-good rate
    unsigned workers = 1;
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t points = 0;
};

struct SampleSizeStats {
    std::size_t n = 0;
    double mean_excess_risk = 0.0;
    double q50 = 0.0;
    double q90 = 0.0;
    double q_1_minus_delta = 0.0;
    double epsilon = 0.0;            // threshold used for the epsilon-good rate
    double epsilon_good_rate = 0.0;  // fraction of trials with excess risk <= epsilon
    double error_rate = 0.0;         // fraction of trials with positive excess risk
    std::map<double, double> level_histogram;  // excess-risk level -> fraction of trials
};

struct SimReport {
    std::vector<SampleSizeStats> per_n;
    std::optional<RateFit> rate_fit;  // absent when fewer than 3 sizes have positive mean
    double eta_star = 0.0;
    std::size_t f_star = 0;
};

/// Excess risks of `trials` seeded ERM replications at sample size n, in trial order.
std::vector<double> simulate_excess_risks(const LearningProblem& problem, std::size_t n, std::size_t trials,
                                          std::uint64_t seed, Tiebreak rule, unsigned workers = 1);

/// Seeded Monte Carlo of ERM across sample sizes. Throws NonUniqueMinimizerError
/// when the minimizer is not unique.
SimReport simulate(const LearningProblem& problem, const SimConfig& config);

/// Least squares on (log n, log y). Requires at least 3 points with y > 0;
/// non-positive y are skipped.
std::optional<RateFit> fit_rate(std::span<const double> n_values, std::span<const double> values);
std::optional<RateFit> fit_rate(const SimReport& report);

/// Inverse-CDF (lower) empirical quantile of already sorted values.
double empirical_quantile(std::span<const double> sorted, double q);

enum class BoundKind { finite_class, weak_mixability };

std::string_view to_string(BoundKind kind);
BoundKind parse_bound_kind(std::string_view name);

struct ViolationOptions {
    BoundKind kind = BoundKind::finite_class;
    double kappa = 1.0;  // weak_mixability only
    double eta0 = 1.0;   // weak_mixability only
    std::uint64_t seed = 0;
    Tiebreak tiebreak = Tiebreak::first_by_name;
    unsigned workers = 1;
};

struct ViolationReport {
    double bound = 0.0;
    std::size_t violations = 0;
    std::size_t trials = 0;
    double rate = 0.0;
    double sigma = 0.0;  // binomial standard error at rate delta
};

/// Fraction of trials whose ERM excess risk strictly exceeds the chosen bound.
ViolationReport bound_violation_rate(const LearningProblem& problem, std::size_t n, double delta, std::size_t trials,
                                     const ViolationOptions& options);

}  // namespace mixlab
