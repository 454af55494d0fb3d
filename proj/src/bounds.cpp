#include "mixlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mixlab/bound_constants.hpp"
#include "mixlab/errors.hpp"

namespace mixlab {

namespace c = constants;

namespace {

void require(bool condition, const std::string& message) {
    if (!condition) throw PreconditionError(message);
}

double inverse_or_zero(double eta_star) {
    return std::isinf(eta_star) ? 0.0 : 1.0 / eta_star;
}

void check_delta(double delta, double max_delta, const char* result) {
    require(delta > 0.0 && delta <= max_delta,
            std::string(result) + " requires 0 < delta <= " + std::to_string(max_delta));
}

void check_covering(double C, double K, const char* result) {
    require(C > 0.0 && std::isfinite(C), std::string(result) + " requires a covering exponent C > 0");
    require(K >= 1.0 && std::isfinite(K), std::string(result) + " requires a covering constant K >= 1");
}

double localization_terms(double C, double K, double log_inv_delta, double n) {
    const double entropy = C * std::log(2.0 * K * n);
    return c::kLocalizationLinear * entropy + c::kLocalizationSqrt * std::sqrt(log_inv_delta * entropy) +
           (1.0 + log_inv_delta);
}

}  // namespace

double finite_class_bound(double V, double eta_star, double N, double delta, double n) {
    const char* name = "finite-class oracle inequality";
    require(V > 0.0 && std::isfinite(V), std::string(name) + " requires a loss bound V > 0");
    require(eta_star > 0.0, std::string(name) + " requires stochastic mixability (eta* > 0)");
    require(N >= 1.0, std::string(name) + " requires a class of size N >= 1");
    check_delta(delta, 1.0, name);
    require(n >= 1.0, std::string(name) + " requires n >= 1");
    const double scale = std::max(V, inverse_or_zero(eta_star));
    return c::kFiniteClassFactor * scale * (std::log(1.0 / delta) + std::log(N)) / n;
}

double weak_mix_min_n(double kappa, double eta0, double V) {
    return std::pow(V, (1.0 - kappa) / (2.0 - kappa)) / eta0;
}

double weak_mix_bound(double kappa, double eta0, double N, double delta, double n, double V) {
    const char* name = "weak-mixability rate";
    require(kappa >= 0.0 && kappa <= 1.0, std::string(name) + " requires kappa in [0, 1]");
    require(eta0 > 0.0 && std::isfinite(eta0), std::string(name) + " requires eta0 > 0");
    require(V > 0.0, std::string(name) + " requires a loss bound V > 0");
    require(N >= 1.0, std::string(name) + " requires a class of size N >= 1");
    check_delta(delta, 1.0, name);
    const double min_n = weak_mix_min_n(kappa, eta0, V);
    require(n >= min_n, std::string(name) + " requires n >= V^((1-kappa)/(2-kappa)) / eta0 = " + std::to_string(min_n));
    return c::kWeakMixFactor * (std::log(1.0 / delta) + std::log(N)) / std::pow(eta0 * n, 1.0 / (2.0 - kappa));
}

VcBound vc_type_bound(double V, double eta_star, double C, double K, double delta, double n) {
    const char* name = "VC-type oracle inequality";
    require(V >= 1.0, std::string(name) + " requires V >= 1");
    require(eta_star > 0.0, std::string(name) + " requires stochastic mixability (eta* > 0)");
    check_covering(C, K, name);
    check_delta(delta, c::kMaxDelta, name);
    require(n >= c::kVcMinN, std::string(name) + " requires n >= 5");

    VcBound out;
    const double log2d = std::log(2.0 / delta);
    out.branch1 = c::kVcCramerFactor * std::max(V, inverse_or_zero(eta_star)) * (C * std::log(K * n) + log2d);
    out.branch2 = c::kVcLocalizationFactor * V * localization_terms(C, K, log2d, n);
    out.dominant = out.branch2 > out.branch1 ? 2 : 1;
    out.value = std::max(out.branch1, out.branch2) / n + 1.0 / n;
    return out;
}

double localization_bound(double C, double K, double delta, double n, double V) {
    const char* name = "localization bound";
    check_covering(C, K, name);
    check_delta(delta, c::kMaxDelta, name);
    require(n >= c::kLocalMinN, std::string(name) + " requires n >= 4");
    require(V > 0.0, std::string(name) + " requires V > 0");
    return V / n * localization_terms(C, K, std::log(1.0 / delta), n);
}

double localization_gamma2(double C, double K, double delta, double n, double V) {
    check_delta(delta, c::kMaxDelta, "localization bound");
    return localization_bound(C, K, 0.5 * delta, n, V);
}

double local_analysis_bound(double C, double K, double y, double n) {
    const char* name = "local analysis bound";
    require(C >= 1.0, std::string(name) + " requires C >= 1");
    check_covering(C, K, name);
    require(y > 0.0, std::string(name) + " requires y > 0");
    require(n >= c::kLocalMinN, std::string(name) + " requires n >= 4");
    const double entropy = C * std::log(2.0 * K * n);
    return (c::kLocalAnalysisLinear * entropy + std::sqrt(2.0 * y * (1.0 + c::kLocalAnalysisVariance * entropy)) +
            c::kLocalAnalysisTail * y + 1.0) /
           n;
}

double esup_bound(double C, double K, double V, double n) {
    const char* name = "expected supremum bound";
    check_covering(C, K, name);
    require(V >= 1.0, std::string(name) + " requires V >= 1");
    require(n >= c::kLocalMinN, std::string(name) + " requires n >= 4");
    return c::kExpectedSupFactor * C * V * std::log(2.0 * K * n) / n;
}

// ---------------------------------------------------------------------------

std::vector<double> hypothesis_distances(const LearningProblem& problem, NetMetric metric,
                                         std::span<const Observation> sample, NetTarget target) {
    std::vector<double> weights;
    std::vector<std::pair<std::string_view, double>> points;
    if (metric == NetMetric::l2_p) {
        for (const auto& a : problem.atoms()) {
            weights.push_back(a.p);
            points.emplace_back(a.x, a.y);
        }
    } else {
        require(!sample.empty(), "empirical L2 metric requires a non-empty sample");
        const double w = 1.0 / static_cast<double>(sample.size());
        for (const auto& o : sample) {
            weights.push_back(w);
            points.emplace_back(o.x, o.y);
        }
    }

    const std::size_t N = problem.size();
    std::vector<std::vector<double>> coords(N, std::vector<double>(points.size()));
    for (std::size_t h = 0; h < N; ++h) {
        const auto& f = problem.hypothesis(h);
        for (std::size_t k = 0; k < points.size(); ++k) {
            const double pred = f.predict(points[k].first);
            coords[h][k] = target == NetTarget::predictions ? pred : problem.loss()(points[k].second, pred);
        }
    }
    std::vector<double> d(N * N, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = i + 1; j < N; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < points.size(); ++k) {
                const double diff = coords[i][k] - coords[j][k];
                s += weights[k] * diff * diff;
            }
            d[i * N + j] = d[j * N + i] = std::sqrt(s);
        }
    }
    return d;
}

EpsilonNet epsilon_net(const LearningProblem& problem, double eps, NetMetric metric,
                       std::span<const Observation> sample, NetTarget target) {
    require(eps > 0.0, "epsilon net requires eps > 0");
    const std::size_t N = problem.size();
    const auto d = hypothesis_distances(problem, metric, sample, target);

    EpsilonNet net;
    net.projection.assign(N, 0);
    net.projection_distance.assign(N, 0.0);
    net.centers.push_back(0);
    for (std::size_t h = 0; h < N; ++h) net.projection_distance[h] = d[h];

    while (true) {
        std::size_t far = 0;
        double far_dist = -1.0;
        for (std::size_t h = 0; h < N; ++h) {
            if (net.projection_distance[h] > far_dist) {
                far_dist = net.projection_distance[h];
                far = h;
            }
        }
        if (far_dist <= eps) break;
        net.centers.push_back(far);
        for (std::size_t h = 0; h < N; ++h) {
            const double dist = d[h * N + far];
            // Strict comparison keeps the earliest center on ties.
            if (dist < net.projection_distance[h]) {
                net.projection_distance[h] = dist;
                net.projection[h] = far;
            }
        }
    }
    return net;
}

}  // namespace mixlab
