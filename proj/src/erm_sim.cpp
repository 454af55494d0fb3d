#include "mixlab/erm_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

#include "mixlab/bounds.hpp"
#include "mixlab/errors.hpp"
#include "mixlab/mixability.hpp"

namespace mixlab {

namespace {

// Precomputed tie-breaking ranks: among equal empirical risks the smallest rank wins.
class ErmSelector {
public:
    ErmSelector(const LearningProblem& problem, Tiebreak rule) : problem_(problem), rank_(problem.size()) {
        std::vector<std::size_t> order(problem.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        auto by_name = [&](std::size_t a, std::size_t b) {
            return problem.hypothesis(a).name < problem.hypothesis(b).name;
        };
        switch (rule) {
            case Tiebreak::first_by_name:
                std::sort(order.begin(), order.end(), by_name);
                break;
            case Tiebreak::lowest_risk:
                std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                    if (problem.risk(a) != problem.risk(b)) return problem.risk(a) < problem.risk(b);
                    return by_name(a, b);
                });
                break;
            case Tiebreak::worst_risk:
                std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                    if (problem.risk(a) != problem.risk(b)) return problem.risk(a) > problem.risk(b);
                    return by_name(a, b);
                });
                break;
        }
        for (std::size_t r = 0; r < order.size(); ++r) rank_[order[r]] = r;
    }

    template <typename EmpiricalRisk>
    std::size_t select(EmpiricalRisk&& empirical) const {
        std::size_t best = 0;
        double best_risk = empirical(0);
        for (std::size_t h = 1; h < problem_.size(); ++h) {
            const double r = empirical(h);
            if (r < best_risk || (r == best_risk && rank_[h] < rank_[best])) {
                best = h;
                best_risk = r;
            }
        }
        return best;
    }

    std::size_t select_counts(std::span<const std::size_t> counts) const {
        return select([&](std::size_t h) {
            const auto losses = problem_.losses(h);
            double s = 0.0;
            for (std::size_t a = 0; a < counts.size(); ++a) {
                if (counts[a] != 0) s += static_cast<double>(counts[a]) * losses[a];
            }
            return s;
        });
    }

private:
    const LearningProblem& problem_;
    std::vector<std::size_t> rank_;
};

void check_config(const SimConfig& config) {
    if (config.n_values.empty()) throw PreconditionError("simulation needs at least one sample size");
    for (std::size_t i = 0; i < config.n_values.size(); ++i) {
        if (config.n_values[i] < 1) throw PreconditionError("sample sizes must be >= 1");
        if (i > 0 && config.n_values[i] <= config.n_values[i - 1]) {
            throw PreconditionError("sample sizes must be strictly increasing");
        }
    }
    if (config.trials < 1) throw PreconditionError("simulation needs trials >= 1");
    if (!(config.delta > 0.0 && config.delta < 1.0)) throw PreconditionError("simulation requires delta in (0, 1)");
    if (config.epsilon && !(*config.epsilon >= 0.0)) throw PreconditionError("epsilon must be >= 0");
}

}  // namespace

std::string_view to_string(Tiebreak rule) {
    switch (rule) {
        case Tiebreak::first_by_name: return "first_by_name";
        case Tiebreak::lowest_risk: return "lowest_risk";
        case Tiebreak::worst_risk: return "worst_risk";
    }
    return "unknown";
}

Tiebreak parse_tiebreak(std::string_view name) {
    if (name == "first_by_name") return Tiebreak::first_by_name;
    if (name == "lowest_risk") return Tiebreak::lowest_risk;
    if (name == "worst_risk") return Tiebreak::worst_risk;
    throw ConfigError("unknown tiebreak rule '" + std::string(name) +
                      "' (expected first_by_name, lowest_risk or worst_risk)");
}

std::size_t erm_select_counts(const LearningProblem& problem, std::span<const std::size_t> counts, Tiebreak rule) {
    if (counts.size() != problem.atom_count()) throw PreconditionError("count vector does not match the atoms");
    if (std::accumulate(counts.begin(), counts.end(), std::size_t{0}) == 0) {
        throw PreconditionError("ERM needs a non-empty sample");
    }
    return ErmSelector(problem, rule).select_counts(counts);
}

std::size_t erm_select(std::span<const Observation> sample, const LearningProblem& problem, Tiebreak rule) {
    if (sample.empty()) throw PreconditionError("ERM needs a non-empty sample");
    const ErmSelector selector(problem, rule);
    return selector.select([&](std::size_t h) {
        const auto& f = problem.hypothesis(h);
        double s = 0.0;
        for (const auto& o : sample) s += problem.loss()(o.y, f.predict(o.x));
        return s;
    });
}

double chernoff_tail(const ExcessLossRV& rv, double eta, double t, double n) {
    if (!(eta > 0.0)) throw PreconditionError("Cramer-Chernoff control requires eta > 0");
    if (!(n >= 1.0)) throw PreconditionError("Cramer-Chernoff control requires n >= 1");
    if (!(t < rv.mean())) {
        throw PreconditionError("Cramer-Chernoff control requires the slack t to be below E Z (the bound is trivial otherwise)");
    }
    const double exponent = eta * t + n * cgf(rv, eta);
    return exponent >= 0.0 ? 1.0 : std::exp(exponent);
}

std::vector<double> simulate_excess_risks(const LearningProblem& problem, std::size_t n, std::size_t trials,
                                          std::uint64_t seed, Tiebreak rule, unsigned workers) {
    if (n < 1) throw PreconditionError("sample size n must be >= 1");
    const ErmSelector selector(problem, rule);
    const AtomSampler draw(problem);
    std::vector<double> out(trials);

    auto run_range = [&](std::size_t begin, std::size_t end) {
        std::vector<std::size_t> counts(problem.atom_count());
        for (std::size_t t = begin; t < end; ++t) {
            Rng rng = make_rng(seed, n, t);
            std::fill(counts.begin(), counts.end(), std::size_t{0});
            for (std::size_t i = 0; i < n; ++i) ++counts[draw(rng)];
            out[t] = problem.excess_risk(selector.select_counts(counts));
        }
    };

    const std::size_t w = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(trials, 1));
    if (w == 1) {
        run_range(0, trials);
        return out;
    }
    std::vector<std::jthread> pool;
    const std::size_t chunk = (trials + w - 1) / w;
    for (std::size_t k = 0; k < w; ++k) {
        const std::size_t begin = k * chunk;
        const std::size_t end = std::min(trials, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(run_range, begin, end);
    }
    return out;  // jthreads join on destruction before `out` is returned
}

double empirical_quantile(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw PreconditionError("quantile of an empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw PreconditionError("quantile level must lie in [0, 1]");
    const double pos = std::ceil(q * static_cast<double>(sorted.size()));
    const std::size_t k = pos < 1.0 ? 0 : static_cast<std::size_t>(pos) - 1;
    return sorted[std::min(k, sorted.size() - 1)];
}

std::optional<RateFit> fit_rate(std::span<const double> n_values, std::span<const double> values) {
    if (n_values.size() != values.size()) throw PreconditionError("fit_rate: size mismatch");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] > 0.0 && n_values[i] > 0.0) {
            xs.push_back(std::log(n_values[i]));
            ys.push_back(std::log(values[i]));
        }
    }
    if (xs.size() < 3) return std::nullopt;
    const double k = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / k;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / k;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0) return std::nullopt;
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss_res += r * r;
    }
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    fit.points = xs.size();
    return fit;
}

std::optional<RateFit> fit_rate(const SimReport& report) {
    std::vector<double> ns, means;
    for (const auto& s : report.per_n) {
        ns.push_back(static_cast<double>(s.n));
        means.push_back(s.mean_excess_risk);
    }
    return fit_rate(ns, means);
}

SimReport simulate(const LearningProblem& problem, const SimConfig& config) {
    check_config(config);
    const MixabilityProfile profile = eta_star(problem);

    SimReport report;
    report.eta_star = profile.eta_star;
    report.f_star = profile.f_star;
    for (std::size_t n : config.n_values) {
        std::vector<double> risks =
            simulate_excess_risks(problem, n, config.trials, config.seed, config.tiebreak, config.workers);

        SampleSizeStats s;
        s.n = n;
        const double trials = static_cast<double>(risks.size());
        s.mean_excess_risk = std::accumulate(risks.begin(), risks.end(), 0.0) / trials;
        s.epsilon = config.epsilon ? *config.epsilon
                                   : finite_class_bound(problem.loss_bound(), profile.eta_star,
                                                        static_cast<double>(problem.size()), config.delta,
                                                        static_cast<double>(n));
        std::size_t good = 0, errors = 0;
        for (double r : risks) {
            if (r <= s.epsilon) ++good;
            if (r > 0.0) ++errors;
            s.level_histogram[r] += 1.0 / trials;
        }
        s.epsilon_good_rate = static_cast<double>(good) / trials;
        s.error_rate = static_cast<double>(errors) / trials;

        std::sort(risks.begin(), risks.end());
        s.q50 = empirical_quantile(risks, 0.5);
        s.q90 = empirical_quantile(risks, 0.9);
        s.q_1_minus_delta = empirical_quantile(risks, 1.0 - config.delta);
        report.per_n.push_back(std::move(s));
    }
    report.rate_fit = fit_rate(report);
    return report;
}

std::string_view to_string(BoundKind kind) {
    return kind == BoundKind::finite_class ? "finite_class" : "weak_mixability";
}

BoundKind parse_bound_kind(std::string_view name) {
    if (name == "finite_class") return BoundKind::finite_class;
    if (name == "weak_mixability") return BoundKind::weak_mixability;
    throw ConfigError("unknown bound kind '" + std::string(name) + "' (expected finite_class or weak_mixability)");
}

ViolationReport bound_violation_rate(const LearningProblem& problem, std::size_t n, double delta, std::size_t trials,
                                     const ViolationOptions& options) {
    if (trials < 1) throw PreconditionError("violation rate needs trials >= 1");
    const MixabilityProfile profile = eta_star(problem);
    const double N = static_cast<double>(problem.size());
    const double V = problem.loss_bound();

    ViolationReport report;
    if (options.kind == BoundKind::finite_class) {
        if (!profile.mixable()) {
            throw PreconditionError("finite-class oracle inequality requires stochastic mixability, but eta* = 0");
        }
        report.bound = finite_class_bound(V, profile.eta_star, N, delta, static_cast<double>(n));
    } else {
        const auto weak = check_weak_mixability(problem, options.kappa, options.eta0);
        if (!weak.holds) {
            throw PreconditionError("weak-mixability rate requires (kappa, eta0)-weak stochastic mixability; violated by '" +
                                    weak.witness->name + "' at excess-risk level " +
                                    std::to_string(weak.witness->epsilon));
        }
        report.bound = weak_mix_bound(options.kappa, options.eta0, N, delta, static_cast<double>(n), V);
    }

    const auto risks = simulate_excess_risks(problem, n, trials, options.seed, options.tiebreak, options.workers);
    report.trials = trials;
    report.violations = static_cast<std::size_t>(
        std::count_if(risks.begin(), risks.end(), [&](double r) { return r > report.bound; }));
    report.rate = static_cast<double>(report.violations) / static_cast<double>(trials);
    report.sigma = std::sqrt(std::min(delta, 1.0) * (1.0 - std::min(delta, 1.0)) / static_cast<double>(trials));
    return report;
}

}  // namespace mixlab
