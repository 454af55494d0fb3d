#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mixlab/rng.hpp"

namespace mixlab {

/// One point (x, y) of a finite joint distribution with its probability.
struct Atom {
    std::string x;
    double y = 0.0;
    double p = 0.0;
};

enum class LossKind { squared, absolute, p_loss, zero_one, log };

std::string_view to_string(LossKind kind);
LossKind parse_loss_kind(std::string_view name);

/// Nonnegative loss l(y, prediction).
///
/// `log` is binary cross-entropy -y log q - (1 - y) log(1 - q) for targets in
/// [0, 1] and predictions q in (0, 1]; terms with a zero coefficient vanish.
struct Loss {
    LossKind kind = LossKind::squared;
    double exponent = 2.0;  // only read for p_loss

    double operator()(double y, double prediction) const;
};

struct Hypothesis {
    std::string name;
    std::map<std::string, double, std::less<>> values;

    /// Prediction at input label `x`; throws ConfigError naming an undefined label.
    double predict(std::string_view x) const;
};

/// (value, probability) pair of a finite random variable.
struct ValueMass {
    double z = 0.0;
    double p = 0.0;

    friend bool operator==(const ValueMass&, const ValueMass&) = default;
};

/// Finite excess-loss random variable Z_f = l(Y, f(X)) - l(Y, f*(X)).
///
/// Atoms are sorted by value, carry positive probability, and equal values are
/// merged by exact comparison (no fuzzy merging).
class ExcessLossRV {
public:
    ExcessLossRV() = default;

    /// Merges, sorts and validates. Zero-probability atoms are dropped.
    /// Throws ConfigError if probabilities do not sum to 1 within 1e-9 or a
    /// value exceeds the support bound.
    static ExcessLossRV from_atoms(std::vector<ValueMass> atoms, double support_bound);

    std::span<const ValueMass> atoms() const noexcept { return atoms_; }
    double support_bound() const noexcept { return support_bound_; }

    double mean() const noexcept;
    double second_moment() const noexcept;
    double min_value() const noexcept { return atoms_.front().z; }
    double max_value() const noexcept { return atoms_.back().z; }
    /// Total probability of the atom at exactly zero.
    double mass_at_zero() const noexcept;
    /// True when Z == 0 almost surely.
    bool is_degenerate_zero() const noexcept { return atoms_.size() == 1 && atoms_.front().z == 0.0; }

    ExcessLossRV scaled(double c) const;

private:
    std::vector<ValueMass> atoms_;
    double support_bound_ = 0.0;
};

/// Finite statistical learning problem (distribution, loss, class, bound V).
///
/// Immutable after construction. The loss matrix and the risks are computed
/// once; every accessor is const and thread-safe.
class LearningProblem {
public:
    /// Validates every invariant and throws ConfigError naming the violation.
    LearningProblem(std::vector<Atom> atoms, Loss loss, std::vector<Hypothesis> hypotheses, double loss_bound);

    std::span<const Atom> atoms() const noexcept { return atoms_; }
    const Loss& loss() const noexcept { return loss_; }
    std::span<const Hypothesis> hypotheses() const noexcept { return hypotheses_; }
    const Hypothesis& hypothesis(std::size_t i) const { return hypotheses_.at(i); }
    double loss_bound() const noexcept { return loss_bound_; }
    std::size_t size() const noexcept { return hypotheses_.size(); }
    std::size_t atom_count() const noexcept { return atoms_.size(); }

    /// l(y_a, f_h(x_a)).
    double loss_at(std::size_t h, std::size_t a) const { return losses_[h * atoms_.size() + a]; }
    std::span<const double> losses(std::size_t h) const {
        return {losses_.data() + h * atoms_.size(), atoms_.size()};
    }

    double risk(std::size_t h) const { return risks_.at(h); }
    /// First hypothesis (input order) attaining the exact minimum risk.
    std::size_t f_star() const noexcept { return f_star_; }
    /// risk(h) - risk(f*); nonnegative by construction.
    double excess_risk(std::size_t h) const { return risks_.at(h) - risks_[f_star_]; }

    std::optional<std::size_t> find(std::string_view name) const;
    std::size_t index_of(std::string_view name) const;

    /// Problem restricted to the listed hypotheses (in the given order).
    LearningProblem subclass(std::span<const std::size_t> members) const;

    /// Probability vector of the atoms, in atom order.
    std::vector<double> probabilities() const;

private:
    std::vector<Atom> atoms_;
    Loss loss_;
    std::vector<Hypothesis> hypotheses_;
    double loss_bound_;
    std::vector<double> losses_;
    std::vector<double> risks_;
    std::size_t f_star_ = 0;
};

/// P l(f) for an arbitrary hypothesis (need not belong to the class).
double risk(const LearningProblem& problem, const Hypothesis& f);

struct MinimizerSet {
    std::vector<std::size_t> indices;  // input order
    bool non_unique = false;           // two members differ in loss on a positive-probability atom
    std::optional<std::pair<std::size_t, std::size_t>> witness;
};

/// All hypotheses with risk <= min risk + tol.
MinimizerSet minimizers(const LearningProblem& problem, double tol = 0.0);

ExcessLossRV excess_loss(const LearningProblem& problem, std::size_t f, std::size_t f_star);
ExcessLossRV excess_loss(const LearningProblem& problem, const Hypothesis& f, const Hypothesis& f_star);

/// F_{>= eps}: hypotheses with excess risk >= eps.
std::vector<std::size_t> subclass_at_least(const LearningProblem& problem, double eps);
/// F_{<= eps}: hypotheses with excess risk <= eps.
std::vector<std::size_t> subclass_at_most(const LearningProblem& problem, double eps);

/// ||f_i - f_j|| in L1 of the input marginal.
double l1_distance(const LearningProblem& problem, std::size_t i, std::size_t j);

/// {f*} together with every hypothesis at L1(P_X) distance >= eps from f*.
std::vector<std::size_t> g_epsilon(const LearningProblem& problem, double eps);

struct Observation {
    std::string x;
    double y = 0.0;
};

/// Cumulative atom distribution used for iid sampling.
class AtomSampler {
public:
    explicit AtomSampler(const LearningProblem& problem);
    std::size_t operator()(Rng& rng) const;

private:
    std::vector<double> cumulative_;
};

/// n iid atom indices.
std::vector<std::size_t> sample_atoms(const LearningProblem& problem, std::size_t n, Rng& rng);

/// n iid observations, deterministic in `seed`.
std::vector<Observation> sample(const LearningProblem& problem, std::size_t n, std::uint64_t seed);

}  // namespace mixlab
