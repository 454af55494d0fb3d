#include "mixlab/mixability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mixlab/errors.hpp"

namespace mixlab {

namespace {

constexpr double kMaxBracket = 1e300;

double mean_tolerance(const ExcessLossRV& rv) {
    return 1e-14 * std::max(std::abs(rv.min_value()), std::abs(rv.max_value()));
}

}  // namespace

double cgf(const ExcessLossRV& rv, double eta) {
    const auto atoms = rv.atoms();
    double shift = -std::numeric_limits<double>::infinity();
    for (const auto& a : atoms) shift = std::max(shift, -eta * a.z);
    double sum = 0.0;
    for (const auto& a : atoms) sum += a.p * std::exp(-eta * a.z - shift);
    return std::log(sum) + shift;
}

std::string_view to_string(EtaStatus status) {
    switch (status) {
        case EtaStatus::root: return "root";
        case EtaStatus::hyper_concentrated: return "hyper_concentrated";
        case EtaStatus::zero_mean: return "zero_mean";
        case EtaStatus::negative_mean: return "negative_mean";
    }
    return "unknown";
}

double EtaResult::mixability_eta() const noexcept {
    switch (status) {
        case EtaStatus::root: return eta;
        case EtaStatus::hyper_concentrated: return std::numeric_limits<double>::infinity();
        default: return 0.0;
    }
}

EtaResult eta_root(const ExcessLossRV& rv) {
    const double mean = rv.mean();
    const double tol = mean_tolerance(rv);
    if (std::abs(mean) <= tol) return {EtaStatus::zero_mean, 0.0, 0.0};
    if (mean < 0.0) return {EtaStatus::negative_mean, 0.0, 0.0};
    if (rv.min_value() >= 0.0) return {EtaStatus::hyper_concentrated, 0.0, rv.mass_at_zero()};

    // cgf is convex, vanishes at 0 and has slope -mean there, so the set where
    // it is <= 0 is exactly [0, root]. Grow the bracket until it turns positive.
    double lo = 0.0;
    double hi = 1.0;
    while (cgf(rv, hi) <= 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > kMaxBracket) throw std::runtime_error("eta_root: failed to bracket the mixability root");
    }
    while (hi - lo > kRootTol * std::max(1.0, lo)) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        if (cgf(rv, mid) > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return {EtaStatus::root, lo + 0.5 * (hi - lo), 0.0};
}

MixabilityProfile mixability_profile(const LearningProblem& problem, std::size_t f_star,
                                     std::span<const std::size_t> members) {
    MixabilityProfile profile;
    profile.f_star = f_star;
    profile.f_star_name = problem.hypothesis(f_star).name;
    profile.per_function.reserve(members.size());
    for (auto h : members) {
        FunctionMixability entry;
        entry.index = h;
        entry.name = problem.hypothesis(h).name;
        const ExcessLossRV z = excess_loss(problem, h, f_star);
        if (z.is_degenerate_zero()) {
            entry.equivalent_to_f_star = true;
            entry.result = {EtaStatus::zero_mean, 0.0, 0.0};
        } else {
            entry.result = eta_root(z);
            profile.eta_star = std::min(profile.eta_star, entry.result.mixability_eta());
        }
        profile.per_function.push_back(std::move(entry));
    }
    return profile;
}

MixabilityProfile eta_star(const LearningProblem& problem) {
    const auto mins = minimizers(problem, kMinimizerTol);
    if (mins.non_unique) {
        throw NonUniqueMinimizerError(problem.hypothesis(mins.witness->first).name,
                                      problem.hypothesis(mins.witness->second).name);
    }
    std::vector<std::size_t> all(problem.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return mixability_profile(problem, problem.f_star(), all);
}

WeakMixabilityResult check_weak_mixability(const LearningProblem& problem, double kappa, double eta0) {
    if (!(kappa >= 0.0 && kappa <= 1.0)) throw PreconditionError("weak mixability requires kappa in [0, 1]");
    if (!(eta0 > 0.0) || !std::isfinite(eta0)) throw PreconditionError("weak mixability requires eta0 > 0");

    const std::size_t star = problem.f_star();
    WeakMixabilityResult out;
    for (std::size_t h = 0; h < problem.size(); ++h) {
        const double e = problem.excess_risk(h);
        if (e > 0.0) out.levels.push_back(e);
    }
    std::sort(out.levels.begin(), out.levels.end());
    out.levels.erase(std::unique(out.levels.begin(), out.levels.end()), out.levels.end());

    // The cgf is convex with cgf(0) = 0, so cgf(eta) <= 0 exactly on [0, root].
    std::vector<ExcessLossRV> zs;
    std::vector<double> limits;
    zs.reserve(problem.size());
    limits.reserve(problem.size());
    for (std::size_t h = 0; h < problem.size(); ++h) {
        zs.push_back(excess_loss(problem, h, star));
        limits.push_back(problem.excess_risk(h) > 0.0 ? eta_root(zs.back()).mixability_eta() : 0.0);
    }

    // F_{>= eps} only changes at achieved levels and eta_eps grows with eps,
    // so each level is the hardest point of the interval it closes.
    for (double eps : out.levels) {
        const double eta_eps = eta0 * std::pow(eps, 1.0 - kappa);
        for (std::size_t h = 0; h < problem.size(); ++h) {
            if (problem.excess_risk(h) < eps) continue;
            if (eta_eps <= limits[h]) continue;
            out.holds = false;
            out.witness = WeakMixabilityWitness{h, problem.hypothesis(h).name, eps, eta_eps, cgf(zs[h], eta_eps)};
            return out;
        }
    }
    return out;
}

BernsteinFit bernstein_constant(const LearningProblem& problem, double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) throw PreconditionError("Bernstein exponent beta must lie in (0, 1]");
    const std::size_t star = problem.f_star();
    BernsteinFit fit;
    fit.beta = beta;
    for (std::size_t h = 0; h < problem.size(); ++h) {
        if (h == star) continue;
        const ExcessLossRV z = excess_loss(problem, h, star);
        if (z.is_degenerate_zero()) continue;
        const double first = z.mean();
        if (first <= kMinimizerTol) throw UnboundedBernsteinError(problem.hypothesis(h).name);
        const double ratio = z.second_moment() / std::pow(first, beta);
        if (!fit.argmax || ratio > fit.B) {
            fit.B = ratio;
            fit.argmax = h;
        }
    }
    return fit;
}

HyperPerturbation hyper_perturb(const ExcessLossRV& rv, double epsilon, double support_bound) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw PreconditionError("perturbation requires 0 < epsilon < 1");
    if (!(support_bound > 0.0)) throw PreconditionError("perturbation requires V > 0");
    const EtaResult status = eta_root(rv);
    if (status.status != EtaStatus::hyper_concentrated) {
        throw PreconditionError("perturbation requires a hyper-concentrated variable (Z >= 0 a.s., positive mean)");
    }
    const double mu = rv.mean();
    HyperPerturbation out;
    std::vector<ValueMass> atoms;
    for (const auto& a : rv.atoms()) {
        if (a.z > support_bound) throw PreconditionError("variable exceeds the support bound V");
        if (a.z >= mu) {
            atoms.push_back({a.z, (1.0 - epsilon) * a.p});
            atoms.push_back({-a.z, epsilon * a.p});
            out.coupling.push_back({a.z, a.z, (1.0 - epsilon) * a.p});
            out.coupling.push_back({a.z, -a.z, epsilon * a.p});
        } else {
            atoms.push_back(a);
            out.coupling.push_back({a.z, a.z, a.p});
        }
    }
    out.perturbed = ExcessLossRV::from_atoms(std::move(atoms), support_bound);
    const EtaResult root = eta_root(out.perturbed);
    if (root.status != EtaStatus::root) {
        throw std::runtime_error("perturbed variable has no finite mixability root");
    }
    out.eta = root.eta;
    return out;
}

}  // namespace mixlab
