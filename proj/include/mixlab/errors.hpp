#pragma once

#include <stdexcept>
#include <string>

namespace mixlab {

/// Malformed input: bad problem file, undefined input label, loss above its bound.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The learning problem has two risk minimizers whose losses differ on a
/// positive-probability atom.
class NonUniqueMinimizerError : public std::runtime_error {
public:
    NonUniqueMinimizerError(std::string first, std::string second)
        : std::runtime_error("non-unique risk minimizer: '" + first + "' and '" + second +
                             "' attain the minimum risk but their losses differ with positive probability"),
          first_(std::move(first)),
          second_(std::move(second)) {}

    const std::string& first() const noexcept { return first_; }
    const std::string& second() const noexcept { return second_; }

private:
    std::string first_;
    std::string second_;
};

/// Some hypothesis has zero excess risk without being almost surely equal to
/// f*, so no finite Bernstein constant exists.
class UnboundedBernsteinError : public std::runtime_error {
public:
    explicit UnboundedBernsteinError(std::string hypothesis)
        : std::runtime_error("Bernstein constant is unbounded: hypothesis '" + hypothesis +
                             "' has zero excess risk but is not almost surely equal to f*"),
          hypothesis_(std::move(hypothesis)) {}

    const std::string& hypothesis() const noexcept { return hypothesis_; }

private:
    std::string hypothesis_;
};

}  // namespace mixlab
