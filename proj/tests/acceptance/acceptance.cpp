// One PASS/FAIL line per acceptance criterion. Exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mixlab/bounds.hpp"
#include "mixlab/diagnostics.hpp"
#include "mixlab/erm_sim.hpp"
#include "mixlab/errors.hpp"
#include "mixlab/io.hpp"
#include "mixlab/mixability.hpp"
#include "mixlab/moment_problem.hpp"
#include "support/generators.hpp"

using namespace mixlab;
using testing::Gen;
using testing::rv;

namespace {

namespace tol {
constexpr double kRoot = 1e-9;
constexpr double kBoundaryMean = 1e-12;
constexpr double kBoundaryValue = 1e-9;
constexpr double kBoundaryMass = 1e-9;
constexpr double kCertificateFloor = -1e-9;
constexpr double kU1Expected = 0.011190;
constexpr double kU1 = 1e-5;
constexpr double kScaling = 1e-2;
constexpr double kErrorRateExpected = 0.15625;
constexpr double kErrorRate = 0.005;
constexpr double kViolationRate = 0.05;
constexpr double kSlope = -0.85;
constexpr double kEnumVsSimplex = 1e-8;
constexpr double kWeakDuality = 1e-9;
constexpr double kEtaStarBracket = 1e-6;
}  // namespace tol

namespace budget {
constexpr double kExactness = 1.0;
constexpr double kCertificates = 10.0;
constexpr double kSoundness = 120.0;
constexpr double kFastRate = 600.0;
}  // namespace budget

constexpr std::size_t kGrid = 2001;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail << "first failure: " << what << "; ";
        pass = pass && ok;
    }
};

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

LearningProblem load(const char* name) { return io::load_problem(std::string(MIXLAB_DATA_DIR) + "/" + name); }

// Instances strictly inside the feasible region with a/n <= 0.9 of the boundary, shared by
// the soundness and primal-dual checks.
std::vector<MomentInstance> interior_instances(std::size_t count) {
    Gen g(20240601);
    std::vector<MomentInstance> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double eta = g.log_uniform(1e-3, 1e3);
        const double a = g.uniform(0.01, 0.9) * feasible_mean_bound(eta);
        out.push_back({eta, -a, 1.0});
    }
    return out;
}

void exactness(Outcome& o) {
    const auto r = eta_root(rv({{-1.0, 0.25}, {1.0, 0.75}}));
    o.require(r.status == EtaStatus::root && std::abs(r.eta - std::log(3.0)) <= tol::kRoot,
              "eta_root = " + fmt(r.eta) + " vs ln 3");
    const auto h = hyper_perturb(rv({{0.0, 0.5}, {1.0, 0.5}}), 0.01, 1.0);
    o.require(std::abs(h.eta - std::log(99.0)) <= tol::kRoot, "hyper_perturb eta = " + fmt(h.eta) + " vs ln 99");
    o.detail << "eta_root - ln3 = " << fmt(r.eta - std::log(3.0)) << ", perturbed - ln99 = " << fmt(h.eta - std::log(99.0))
             << "; ";
}

void boundary(Outcome& o) {
    const double ln3 = std::log(3.0);
    const double bound = feasible_mean_bound(ln3);
    o.require(std::abs(bound - 0.5) <= tol::kBoundaryMean, "feasible_mean_bound(ln 3) = " + fmt(bound));
    const auto sol = grid_lp_solve({ln3, -0.5, 1.0}, kGrid, MomentSense::max_mgf);
    o.require(sol.status == GridStatus::optimal, "boundary instance not optimal");
    o.require(std::abs(sol.value - std::sqrt(3.0) / 2.0) <= tol::kBoundaryValue, "value = " + fmt(sol.value));
    bool support_ok = sol.support.size() == 2;
    if (support_ok) {
        support_ok = sol.support[0].x == -1.0 && std::abs(sol.support[0].p - 0.75) <= tol::kBoundaryMass &&
                     sol.support[1].x == 1.0 && std::abs(sol.support[1].p - 0.25) <= tol::kBoundaryMass;
    }
    o.require(support_ok, "support differs from {(-1,.75),(1,.25)}");
    o.detail << "value - sqrt(3)/2 = " << fmt(sol.value - std::sqrt(3.0) / 2.0) << "; ";
}

void certificates(Outcome& o) {
    double worst_min = std::numeric_limits<double>::infinity();
    double worst_u1 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 200; ++i) {
        const double eta = std::pow(10.0, -3.0 + 6.0 * i / 199.0);
        const auto check = verify_certificate(dual_certificate(eta), eta, 10000);
        worst_min = std::min(worst_min, check.min_value);
        worst_u1 = std::min(worst_u1, check.u_at_minus_1);
        o.require(check.min_value >= tol::kCertificateFloor, "min u < floor at eta = " + fmt(eta));
        o.require(check.u_at_minus_1 >= tol::kCertificateFloor, "u(-1) < floor at eta = " + fmt(eta));
    }
    const double u1 = verify_certificate(dual_certificate(1.0), 1.0, 10000).u_at_minus_1;
    o.require(std::abs(u1 - tol::kU1Expected) <= tol::kU1, "u_1(-1) = " + fmt(u1));
    o.detail << "worst min u = " << fmt(worst_min) << ", worst u(-1) = " << fmt(worst_u1) << ", u_1(-1) = " << fmt(u1)
             << "; ";
}

void soundness(Outcome& o) {
    double worst_gap = -std::numeric_limits<double>::infinity();
    for (const auto& inst : interior_instances(1000)) {
        const auto sol = grid_lp_solve(inst, kGrid, MomentSense::max_mgf);
        o.require(sol.status == GridStatus::optimal, "interior instance infeasible at eta = " + fmt(inst.eta));
        const double bound = certificate_bound(inst.eta, -inst.mean).combined + 2.0 / static_cast<double>(kGrid);
        worst_gap = std::max(worst_gap, sol.value - bound);
        o.require(sol.value <= bound, "value exceeds bound at eta = " + fmt(inst.eta) + ", a = " + fmt(-inst.mean));
    }
    o.detail << "max(value - bound - 2/m) = " << fmt(worst_gap) << "; ";
}

void scaling(Outcome& o) {
    Gen g(5150);
    const double supports[] = {0.5, 2.0, 5.0};
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double V = supports[g.index(3)];
        const double eta = g.log_uniform(1e-2, 1e2) / V;
        const double mean = -g.uniform(0.01, 0.9) * V * feasible_mean_bound(eta * V);
        const MomentInstance inst{eta, mean, V};
        const auto original = grid_lp_solve(inst, kGrid, MomentSense::max_mgf);
        const auto unit = grid_lp_solve(scale_instance(inst), kGrid, MomentSense::max_mgf);
        o.require(original.status == GridStatus::optimal && unit.status == GridStatus::optimal, "scaled instance infeasible");
        const double diff = std::abs(original.value - unit.value);
        worst = std::max(worst, diff);
        o.require(diff <= tol::kScaling, "scaling gap " + fmt(diff) + " at V = " + fmt(V));
    }
    o.detail << "max |value - scaled value| = " << fmt(worst) << "; ";
}

void erm_oracle(Outcome& o) {
    const auto problem = load("bern75_squared.json");
    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    const auto risks = simulate_excess_risks(problem, 3, 100000, 1, Tiebreak::first_by_name, workers);
    std::size_t errors = 0;
    for (double r : risks) errors += r > 0.0 ? 1 : 0;
    const double rate = static_cast<double>(errors) / static_cast<double>(risks.size());
    o.require(std::abs(rate - tol::kErrorRateExpected) <= tol::kErrorRate, "error rate = " + fmt(rate));

    ViolationOptions opts;
    opts.seed = 2;
    opts.workers = workers;
    const auto v = bound_violation_rate(problem, 1000, 0.05, 10000, opts);
    o.require(v.rate <= tol::kViolationRate, "violation rate = " + fmt(v.rate));
    o.detail << "error rate = " << fmt(rate) << " (exact 0.15625), violation rate = " << fmt(v.rate) << " at bound "
             << fmt(v.bound) << "; ";
}

void fast_rate(Outcome& o) {
    const auto problem = load("mixable10.json");
    o.require(problem.size() == 10, "problem does not have 10 hypotheses");
    SimConfig cfg;
    for (std::size_t k = 5; k <= 14; ++k) cfg.n_values.push_back(std::size_t{1} << k);
    cfg.trials = 10000;
    cfg.seed = 3;
    cfg.delta = 0.5;
    cfg.workers = std::max(1u, std::thread::hardware_concurrency());
    const auto report = simulate(problem, cfg);
    o.require(report.rate_fit.has_value(), "no rate fit");
    if (report.rate_fit) {
        o.require(report.rate_fit->slope <= tol::kSlope, "slope = " + fmt(report.rate_fit->slope));
        o.detail << "slope = " << fmt(report.rate_fit->slope) << ", r2 = " << fmt(report.rate_fit->r2) << "; ";
    }
    double worst_ratio = 0.0;
    for (const auto& s : report.per_n) {
        const double curve = finite_class_bound(problem.loss_bound(), report.eta_star, static_cast<double>(problem.size()),
                                                0.5, static_cast<double>(s.n));
        worst_ratio = std::max(worst_ratio, s.mean_excess_risk / curve);
        o.require(s.mean_excess_risk <= curve, "mean exceeds the finite-class curve at n = " + std::to_string(s.n));
    }
    o.detail << "max mean / curve = " << fmt(worst_ratio) << "; ";
}

void weak_mixability(Outcome& o) {
    const double Ns[] = {2.0, 10.0, 1000.0};
    const double deltas[] = {0.01, 0.05, 0.5};
    const double kappas[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    const double eta0s[] = {0.1, 1.0, 5.0};
    const double Vs[] = {1.0, 4.0};
    std::size_t evaluated = 0;
    for (double N : Ns)
        for (double delta : deltas)
            for (double eta0 : eta0s)
                for (double V : Vs) {
                    double previous_kappa_value = std::numeric_limits<double>::infinity();
                    for (double kappa : kappas) {
                        const double min_n = weak_mix_min_n(kappa, eta0, V);
                        bool threw = false;
                        try {
                            (void)weak_mix_bound(kappa, eta0, N, delta, 0.5 * min_n, V);
                        } catch (const PreconditionError&) {
                            threw = true;
                        }
                        o.require(threw, "no precondition error below the minimum n");
                        const double n_kappa = std::max(std::ceil(min_n), std::ceil(2.0 / eta0));
                        double previous = std::numeric_limits<double>::infinity();
                        for (double n = std::ceil(min_n); n <= 1e6; n *= 3.0) {
                            const double value = weak_mix_bound(kappa, eta0, N, delta, n, V);
                            ++evaluated;
                            o.require(value < previous, "not decreasing in n");
                            previous = value;
                        }
                        // For eta0 n > 1 the rate exponent 1/(2-kappa) makes the bound decrease in kappa.
                        const double at = weak_mix_bound(kappa, eta0, N, delta, std::max(n_kappa, weak_mix_min_n(1.0, eta0, V)), V);
                        o.require(at <= previous_kappa_value, "not decreasing in kappa");
                        previous_kappa_value = at;
                    }
                }
    for (double bad_kappa : {-0.1, 1.1}) {
        bool threw = false;
        try {
            (void)weak_mix_bound(bad_kappa, 1.0, 10.0, 0.05, 100.0, 1.0);
        } catch (const PreconditionError&) {
            threw = true;
        }
        o.require(threw, "kappa outside [0, 1] accepted");
    }

    Gen g(99);
    std::size_t agreed = 0, problems = 0, attempts = 0;
    while (problems < 100 && attempts < 10000) {
        ++attempts;
        const auto problem = testing::random_problem(g);
        MixabilityProfile profile;
        try {
            profile = eta_star(problem);
        } catch (const NonUniqueMinimizerError&) {
            continue;
        }
        ++problems;
        bool ok = true;
        const double eta = profile.eta_star;
        if (std::isinf(eta)) {
            ok = check_weak_mixability(problem, 1.0, 1e6).holds;
        } else if (eta == 0.0) {
            ok = !check_weak_mixability(problem, 1.0, 1e-6).holds;
        } else {
            ok = check_weak_mixability(problem, 1.0, eta * (1.0 - tol::kEtaStarBracket)).holds &&
                 !check_weak_mixability(problem, 1.0, eta * (1.0 + tol::kEtaStarBracket)).holds;
        }
        agreed += ok ? 1 : 0;
    }
    o.require(problems == 100, "could not draw 100 problems with a unique minimizer");
    o.require(agreed == problems, std::to_string(problems - agreed) + " problems disagree with eta*");
    o.detail << evaluated << " bound evaluations, weak check agrees with eta* on " << agreed << "/" << problems << "; ";
}

void diagnostic(Outcome& o) {
    const double eps[] = {0.5};
    const auto abs = diagnose(load("bern50_absolute.json"), eps);
    o.require(!abs.rows[0].mixable && abs.rows[0].minimizer_multiplicity == 2,
              "absolute loss: mixable = " + std::to_string(abs.rows[0].mixable) +
                  ", multiplicity = " + std::to_string(abs.rows[0].minimizer_multiplicity));
    const auto sq = diagnose(load("bern75_squared.json"), eps);
    o.require(sq.rows[0].mixable && sq.rows[0].minimizer_multiplicity == 1,
              "squared loss: mixable = " + std::to_string(sq.rows[0].mixable) +
                  ", multiplicity = " + std::to_string(sq.rows[0].minimizer_multiplicity));
    o.detail << "absolute: eta* = " << fmt(abs.rows[0].eta_star) << ", multiplicity "
             << abs.rows[0].minimizer_multiplicity << "; squared: eta* = " << fmt(sq.rows[0].eta_star)
             << ", multiplicity " << sq.rows[0].minimizer_multiplicity << "; ";
}

void primal_dual(Outcome& o) {
    double worst_diff = 0.0;
    double worst_dual_gap = -std::numeric_limits<double>::infinity();
    std::size_t compared = 0;
    for (const auto& inst : interior_instances(1000)) {
        const auto e = grid_lp_solve(inst, kGrid, MomentSense::max_mgf);
        const auto s = grid_lp_solve_simplex(inst, kGrid, MomentSense::max_mgf);
        o.require(e.status == s.status, "status mismatch at eta = " + fmt(inst.eta));
        if (e.status != GridStatus::optimal || s.status != GridStatus::optimal) continue;
        ++compared;
        const double diff = std::abs(e.value - s.value);
        worst_diff = std::max(worst_diff, diff);
        o.require(diff <= tol::kEnumVsSimplex, "enum vs simplex gap " + fmt(diff) + " at eta = " + fmt(inst.eta));
        const double dual = dual_certificate(inst.eta).objective_bound(inst.eta, -inst.mean);
        const double gap = std::max(e.value, s.value) - dual;
        worst_dual_gap = std::max(worst_dual_gap, gap);
        o.require(gap <= tol::kWeakDuality, "weak duality violated at eta = " + fmt(inst.eta));
    }
    o.detail << compared << " instances, max |enum - simplex| = " << fmt(worst_diff)
             << ", max(primal - dual) = " << fmt(worst_dual_gap) << "; ";
}

struct Criterion {
    int id;
    const char* name;
    std::function<void(Outcome&)> run;
    double budget_seconds;
};

}  // namespace

int main() {
    const Criterion criteria[] = {
        {1, "mixability exponent exactness", exactness, budget::kExactness},
        {2, "moment problem boundary instance", boundary, 0.0},
        {3, "dual certificate validity", certificates, budget::kCertificates},
        {4, "concentration bound soundness", soundness, budget::kSoundness},
        {5, "support-bound scaling", scaling, 0.0},
        {6, "ERM exact oracle and finite-class violation rate", erm_oracle, 0.0},
        {7, "fast-rate reproduction", fast_rate, budget::kFastRate},
        {8, "weak-mixability bound and checker", weak_mixability, 0.0},
        {9, "non-convexity diagnostic", diagnostic, 0.0},
        {10, "primal-dual consistency", primal_dual, 0.0},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_seconds > 0.0) {
            o.require(seconds < c.budget_seconds, "runtime " + fmt(seconds) + " s over budget " + fmt(c.budget_seconds) + " s");
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s criterion %d (%s): %s[%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.str().c_str(),
                    seconds);
        std::fflush(stdout);
    }
    std::printf("%d/10 criteria passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}
