#pragma once

// Numeric constants of the oracle-inequality formulas, transcribed once and
// shared by the evaluators and their tests.

namespace mixlab::constants {

// Finite-class exact oracle inequality: 6 max{V, 1/eta*} (log 1/delta + log N) / n.
inline constexpr double kFiniteClassFactor = 6.0;

// Weak-mixability intermediate rate: 6 (log 1/delta + log N) / (eta0 n)^{1/(2-kappa)}.
inline constexpr double kWeakMixFactor = 6.0;

// VC-type exact oracle inequality, first branch: 8 max{V, 1/eta*} (C log(K n) + log 2/delta).
inline constexpr double kVcCramerFactor = 8.0;
// Second branch: 2 V (1080 C log(2Kn) + 90 sqrt(log(2/delta) C log(2Kn)) + log(2e/delta)).
inline constexpr double kVcLocalizationFactor = 2.0;

// Localization over a 1/n-net: 1080 C log(2Kn) + 90 sqrt(log(1/delta) C log(2Kn)) + log(e/delta).
inline constexpr double kLocalizationLinear = 1080.0;
inline constexpr double kLocalizationSqrt = 90.0;

// Local analysis: 990 C log(2Kn) + sqrt(2y (1 + 3960 C log(2Kn))) + 2y/3 + 1.
inline constexpr double kLocalAnalysisLinear = 990.0;
inline constexpr double kLocalAnalysisVariance = 3960.0;
inline constexpr double kLocalAnalysisTail = 2.0 / 3.0;

// Expected supremum of the centered empirical process: 990 C V log(2Kn) / n.
inline constexpr double kExpectedSupFactor = 990.0;

// Minimum sample sizes.
inline constexpr double kVcMinN = 5.0;
inline constexpr double kLocalMinN = 4.0;
inline constexpr double kMaxDelta = 0.5;

}  // namespace mixlab::constants
