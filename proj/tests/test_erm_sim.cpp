#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "mixlab/erm_sim.hpp"
#include "mixlab/errors.hpp"
#include "mixlab/mixability.hpp"
#include "support/generators.hpp"

using namespace mixlab;
using testing::bernoulli_problem;

namespace {

LearningProblem bern75() { return bernoulli_problem(LossKind::squared, 0.75, {{"one", 1.0}, {"zero", 0.0}}); }

// Exact ERM error probability for the two-point Bernoulli problem: ERM picks
// "zero" when ones are strictly fewer than zeros (ties go to "one" by name).
double exact_error(std::size_t n, double p) {
    double total = 0.0;
    for (std::size_t k = 0; 2 * k < n; ++k) {
        total += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) * std::pow(p, k) *
                 std::pow(1 - p, n - k);
    }
    return total;
}

}  // namespace

TEST_CASE("ERM selection and tie-breaking") {
    const auto single = bernoulli_problem(LossKind::squared, 0.5, {{"only", 0.2}});
    CHECK(erm_select(std::vector<Observation>{{"x", 1.0}}, single, Tiebreak::first_by_name) == 0);

    const auto b = bern75();
    const std::vector<Observation> ones = {{"x", 1.0}, {"x", 1.0}, {"x", 1.0}};
    CHECK(erm_select(ones, b, Tiebreak::first_by_name) == 0);
    CHECK(erm_select_counts(b, std::vector<std::size_t>{3, 0}, Tiebreak::first_by_name) == 1);

    // Equal empirical risk on {0, 1}: "b" (true risk 0.75) and "a" (true risk 0.25).
    const auto tie = bernoulli_problem(LossKind::squared, 0.75, {{"b", 0.0}, {"a", 1.0}});
    const std::vector<Observation> balanced = {{"x", 0.0}, {"x", 1.0}};
    CHECK(erm_select(balanced, tie, Tiebreak::first_by_name) == 1);
    CHECK(erm_select(balanced, tie, Tiebreak::lowest_risk) == 1);
    CHECK(erm_select(balanced, tie, Tiebreak::worst_risk) == 0);

    CHECK_THROWS_AS(erm_select(std::vector<Observation>{}, b, Tiebreak::first_by_name), PreconditionError);
    CHECK(parse_tiebreak("worst_risk") == Tiebreak::worst_risk);
    CHECK_THROWS_AS(parse_tiebreak("random"), ConfigError);
}

TEST_CASE("Cramer-Chernoff tail") {
    const auto z = testing::rv({{-1.0, 0.25}, {1.0, 0.75}});
    const double eta = std::log(3.0) / 2.0;
    CHECK(cgf(z, eta) == doctest::Approx(std::log(std::sqrt(3.0) / 2.0)).epsilon(1e-14));
    CHECK(chernoff_tail(z, eta, 0.0, 10) == doctest::Approx(std::pow(std::sqrt(3.0) / 2.0, 10)).epsilon(1e-12));
    CHECK(chernoff_tail(z, eta, 0.0, 10) == doctest::Approx(0.23735).epsilon(1e-4));
    CHECK(chernoff_tail(z, eta, 0.0, 20) == doctest::Approx(std::pow(chernoff_tail(z, eta, 0.0, 10), 2)).epsilon(1e-12));
    CHECK(chernoff_tail(z, eta, 0.0, 7) == doctest::Approx(std::exp(7 * cgf(z, eta))).epsilon(1e-14));
    CHECK(chernoff_tail(z, eta, 0.49, 1) <= 1.0);
    double prev = 1.0;
    for (double n = 1; n < 100; n += 3) {
        CHECK(chernoff_tail(z, eta, 0.0, n) <= prev);
        prev = chernoff_tail(z, eta, 0.0, n);
    }
    CHECK_THROWS_AS(chernoff_tail(z, eta, 0.5, 10), PreconditionError);
    CHECK_THROWS_AS(chernoff_tail(z, 0.0, 0.0, 10), PreconditionError);
}

TEST_CASE("empirical quantiles and rate fits") {
    const std::vector<double> v = {1, 2, 3, 4};
    CHECK(empirical_quantile(v, 0.5) == 2);
    CHECK(empirical_quantile(v, 0.51) == 3);
    CHECK(empirical_quantile(v, 0.0) == 1);
    CHECK(empirical_quantile(v, 1.0) == 4);

    std::vector<double> ns, inv, root;
    for (double n = 16; n <= 4096; n *= 2) {
        ns.push_back(n);
        inv.push_back(3.0 / n);
        root.push_back(2.0 / std::sqrt(n));
    }
    const auto f1 = fit_rate(ns, inv);
    REQUIRE(f1);
    CHECK(f1->slope == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(f1->r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f1->intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(fit_rate(ns, root)->slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK_FALSE(fit_rate(std::vector<double>{1, 2}, std::vector<double>{1, 2}));
    CHECK_FALSE(fit_rate(std::vector<double>{1, 2, 3}, std::vector<double>{1, 0, 2}));
}

TEST_CASE("simulation of a singleton class") {
    const auto single = bernoulli_problem(LossKind::squared, 0.75, {{"one", 1.0}});
    SimConfig cfg;
    cfg.n_values = {4, 8, 16};
    cfg.trials = 50;
    const auto r = simulate(single, cfg);
    for (const auto& s : r.per_n) {
        CHECK(s.mean_excess_risk == 0.0);
        CHECK(s.error_rate == 0.0);
    }
    CHECK_FALSE(r.rate_fit);
    CHECK(std::isinf(r.eta_star));
}

TEST_CASE("ERM error probability matches the binomial oracle") {
    CHECK(exact_error(3, 0.75) == doctest::Approx(0.15625).epsilon(1e-14));
    const auto b = bern75();
    SimConfig cfg;
    cfg.n_values = {3, 5, 9};
    cfg.trials = 20000;
    cfg.seed = 17;
    const auto r = simulate(b, cfg);
    for (const auto& s : r.per_n) {
        const double p = exact_error(s.n, 0.75);
        CHECK(std::abs(s.error_rate - p) <= 4.0 * std::sqrt(p * (1 - p) / cfg.trials));
        CHECK(s.mean_excess_risk == doctest::Approx(0.5 * s.error_rate).epsilon(1e-12));
    }
}

TEST_CASE("exponential decay of the two-point problem beats any polynomial rate") {
    SimConfig cfg;
    for (std::size_t n = 8; n <= 1024; n *= 2) cfg.n_values.push_back(n);
    cfg.trials = 4000;
    cfg.seed = 5;
    const auto r = simulate(bern75(), cfg);
    REQUIRE(r.rate_fit);
    CHECK(r.rate_fit->slope < -1.0);
}

TEST_CASE("simulation is deterministic and independent of the worker count") {
    testing::Gen g(55);
    const auto problem = testing::random_problem(g, {3, 8, false});
    SimConfig cfg;
    cfg.n_values = {5, 20, 80};
    cfg.trials = 500;
    cfg.seed = 99;
    const auto a = simulate(problem, cfg);
    const auto b = simulate(problem, cfg);
    cfg.workers = 4;
    const auto c = simulate(problem, cfg);
    for (std::size_t i = 0; i < a.per_n.size(); ++i) {
        CHECK(a.per_n[i].mean_excess_risk == b.per_n[i].mean_excess_risk);
        CHECK(a.per_n[i].mean_excess_risk == c.per_n[i].mean_excess_risk);
        CHECK(a.per_n[i].q90 == c.per_n[i].q90);
        CHECK(a.per_n[i].level_histogram == c.per_n[i].level_histogram);
    }
    CHECK(simulate_excess_risks(problem, 30, 200, 1, Tiebreak::first_by_name, 1) ==
          simulate_excess_risks(problem, 30, 200, 1, Tiebreak::first_by_name, 3));
}

TEST_CASE("simulation validates its configuration") {
    SimConfig cfg;
    cfg.n_values = {10, 5};
    CHECK_THROWS_AS(simulate(bern75(), cfg), PreconditionError);
    cfg.n_values = {};
    CHECK_THROWS_AS(simulate(bern75(), cfg), PreconditionError);
    cfg.n_values = {0, 5};
    CHECK_THROWS_AS(simulate(bern75(), cfg), PreconditionError);
    cfg.n_values = {5};
    cfg.trials = 0;
    CHECK_THROWS_AS(simulate(bern75(), cfg), PreconditionError);
    cfg.trials = 10;
    const auto abs = bernoulli_problem(LossKind::absolute, 0.5, {{"zero", 0.0}, {"one", 1.0}});
    CHECK_THROWS_AS(simulate(abs, cfg), NonUniqueMinimizerError);
}

TEST_CASE("property: excess risks land on achieved levels, histograms sum to one") {
    testing::Gen g(8080);
    for (int iter = 0; iter < 30; ++iter) {
        const auto problem = testing::random_problem(g, {3, 6, false});
        std::set<double> levels;
        for (std::size_t h = 0; h < problem.size(); ++h) levels.insert(problem.excess_risk(h));
        SimConfig cfg;
        cfg.n_values = {3, 30, 300};
        cfg.trials = 200;
        cfg.seed = static_cast<std::uint64_t>(iter);
        cfg.tiebreak = static_cast<Tiebreak>(iter % 3);
        const auto r = simulate(problem, cfg);
        for (const auto& s : r.per_n) {
            double total = 0.0;
            for (const auto& [level, frac] : s.level_histogram) {
                CHECK(levels.count(level) == 1);
                total += frac;
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(s.q50 <= s.q90);
            CHECK(s.q90 <= s.q_1_minus_delta);
            CHECK(s.mean_excess_risk >= 0.0);
            CHECK(s.mean_excess_risk <= problem.loss_bound());
        }
        // Aggregate monotonicity across the range, up to one Monte Carlo sigma.
        const double sigma = problem.loss_bound() / std::sqrt(static_cast<double>(cfg.trials));
        CHECK(r.per_n.back().mean_excess_risk <= r.per_n.front().mean_excess_risk + sigma);
    }
}

TEST_CASE("bound violation rates") {
    const auto b = bern75();
    ViolationOptions opt;
    opt.seed = 3;
    const auto small = bound_violation_rate(b, 5, 0.05, 2000, opt);
    CHECK(small.bound >= 1.0);
    CHECK(small.violations == 0);

    const auto r = bound_violation_rate(b, 1000, 0.05, 2000, opt);
    CHECK(r.rate <= 0.05 + 3 * r.sigma);
    CHECK(r.sigma == doctest::Approx(std::sqrt(0.05 * 0.95 / 2000)));
    CHECK(bound_violation_rate(b, 10, 1.0, 500, opt).rate <= 1.0);

    opt.kind = BoundKind::weak_mixability;
    opt.kappa = 1.0;
    opt.eta0 = 1.0;
    CHECK(bound_violation_rate(b, 1000, 0.05, 500, opt).rate <= 0.05 + 3 * std::sqrt(0.05 * 0.95 / 500));
    opt.eta0 = 5.0;
    CHECK_THROWS_AS(bound_violation_rate(b, 1000, 0.05, 500, opt), PreconditionError);

    const auto abs = bernoulli_problem(LossKind::absolute, 0.5, {{"zero", 0.0}, {"one", 1.0}});
    CHECK_THROWS_AS(bound_violation_rate(abs, 100, 0.05, 10, ViolationOptions{}), NonUniqueMinimizerError);
}

TEST_CASE("property: the finite-class bound holds end to end on random mixable problems") {
    testing::Gen g(1234);
    for (int iter = 0; iter < 20; ++iter) {
        const auto problem = testing::random_problem(g, {3, 8, false});
        ViolationOptions opt;
        opt.seed = static_cast<std::uint64_t>(iter);
        opt.tiebreak = Tiebreak::worst_risk;
        const auto r = bound_violation_rate(problem, 200, 0.1, 500, opt);
        CHECK(r.rate <= 0.1 + 3 * r.sigma);
    }
}
