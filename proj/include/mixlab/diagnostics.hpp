#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mixlab/problem.hpp"

namespace mixlab {

/// One row of the non-convexity diagnostic, for a single distance level eps.
struct DiagnosticRow {
    double eps = 0.0;
    std::size_t g_size = 0;                  // |G_eps|, including f*
    bool mixable = true;                     // eta* > 0 on G_eps
    double eta_star = 0.0;                   // +inf when G_eps is hyper-concentrated or {f*}
    std::size_t minimizer_multiplicity = 1;  // risk minimizers in G_eps, counted up to a.s. equality of losses
    double min_excess_risk_on_far_set = 0.0; // +inf when the far set is empty
};

struct DiagnosticReport {
    std::size_t f_star = 0;
    std::string f_star_name;
    std::vector<DiagnosticRow> rows;  // grid order
    bool all_mixable = true;
    std::string verdict;
};

/// Mixability of G_eps = {f*} plus the members at L1(P_X) distance >= eps from
/// f*, for every eps of the grid. Mixability of every G_eps certifies that no
/// two distinct risk minimizers are separated by any tested eps.
DiagnosticReport diagnose(const LearningProblem& problem, std::span<const double> eps_grid);

}  // namespace mixlab
