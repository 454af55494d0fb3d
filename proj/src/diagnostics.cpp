#include "mixlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mixlab/errors.hpp"
#include "mixlab/mixability.hpp"

namespace mixlab {

namespace {

bool same_losses(const LearningProblem& problem, std::size_t a, std::size_t b) {
    const auto atoms = problem.atoms();
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        if (atoms[k].p > 0.0 && problem.loss_at(a, k) != problem.loss_at(b, k)) return false;
    }
    return true;
}

std::size_t multiplicity(const LearningProblem& problem, std::span<const std::size_t> members) {
    double best = std::numeric_limits<double>::infinity();
    for (auto h : members) best = std::min(best, problem.risk(h));
    std::vector<std::size_t> distinct;
    for (auto h : members) {
        if (problem.risk(h) > best + kMinimizerTol) continue;
        const bool seen = std::any_of(distinct.begin(), distinct.end(),
                                      [&](std::size_t d) { return same_losses(problem, d, h); });
        if (!seen) distinct.push_back(h);
    }
    return distinct.size();
}

}  // namespace

DiagnosticReport diagnose(const LearningProblem& problem, std::span<const double> eps_grid) {
    if (eps_grid.empty()) throw PreconditionError("diagnose requires a non-empty eps grid");
    for (double eps : eps_grid) {
        if (!(eps > 0.0)) throw PreconditionError("diagnose requires every eps > 0");
    }

    DiagnosticReport report;
    report.f_star = problem.f_star();
    report.f_star_name = problem.hypothesis(report.f_star).name;
    std::vector<double> failing;
    for (double eps : eps_grid) {
        const auto g = g_epsilon(problem, eps);
        const auto profile = mixability_profile(problem, report.f_star, g);

        DiagnosticRow row;
        row.eps = eps;
        row.g_size = g.size();
        row.eta_star = profile.eta_star;
        row.mixable = profile.mixable();
        row.minimizer_multiplicity = multiplicity(problem, g);
        row.min_excess_risk_on_far_set = std::numeric_limits<double>::infinity();
        for (auto h : g) {
            if (h != report.f_star) {
                row.min_excess_risk_on_far_set = std::min(row.min_excess_risk_on_far_set, problem.excess_risk(h));
            }
        }
        if (!row.mixable) failing.push_back(eps);
        report.rows.push_back(row);
    }

    report.all_mixable = failing.empty();
    std::ostringstream v;
    if (report.all_mixable) {
        v << "G_eps is stochastically mixable at every tested eps: the risk minimizer is effectively unique on this grid";
    } else {
        v << "G_eps is not stochastically mixable at eps =";
        for (double e : failing) v << ' ' << e;
        v << ": minimization is effectively non-convex there";
    }
    report.verdict = v.str();
    return report;
}

}  // namespace mixlab
