#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "mixlab/bounds.hpp"
#include "mixlab/diagnostics.hpp"
#include "mixlab/erm_sim.hpp"
#include "mixlab/errors.hpp"
#include "mixlab/io.hpp"
#include "mixlab/mixability.hpp"
#include "mixlab/moment_problem.hpp"

namespace mixlab::cli {

namespace {

using io::Cell;
using io::Table;

struct Result {
    Table table;
    int code = kExitOk;
    std::vector<std::string> notes;  // written to the error stream
};

struct Params {
    std::string out_file;
    std::string format = "csv";

    std::string problem;
    double kappa = 1.0;
    double eta0 = 1.0;
    double beta = 1.0;

    double eta = 1.0;
    double mean = 0.0;
    double support = 1.0;
    std::size_t grid = 2001;
    std::size_t certify_grid = 10000;
    std::string sense = "max";
    std::string method = "enum";
    std::optional<double> a_over_n;

    std::vector<std::size_t> n_list;
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
    std::string tiebreak = "first_by_name";
    double delta = 0.05;
    std::optional<double> epsilon;
    unsigned workers = 1;
    bool histogram = false;

    std::string bound = "finite_class";
    double n = 0.0;

    double V = 1.0;
    std::string eta_star = "1";
    double N = 1.0;
    double C = 1.0;
    double K = 1.0;
    std::optional<double> y;

    std::vector<double> eps_list;
};

Cell num(double v) { return v; }
Cell integer(std::size_t v) { return static_cast<std::int64_t>(v); }
Cell text(std::string_view v) { return std::string(v); }
Cell blank() { return std::string(); }

double parse_real(const std::string& s, const char* flag) {
    if (s == "inf" || s == "+inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string(flag) + " expects a number, got '" + s + "'");
}

std::uint64_t default_seed() {
    const char* env = std::getenv("MIXLAB_SEED");
    if (env == nullptr || *env == '\0') return 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0') throw ConfigError(std::string("MIXLAB_SEED must be a non-negative integer, got '") + env + "'");
    return v;
}

MomentSense parse_sense(const std::string& s) {
    if (s == "max" || s == "max_mgf") return MomentSense::max_mgf;
    if (s == "min" || s == "min_h") return MomentSense::min_h;
    throw ConfigError("--sense expects max (max_mgf) or min (min_h), got '" + s + "'");
}

// --- mix ---------------------------------------------------------------------

Result mix_eta(const Params& p) {
    const LearningProblem problem = io::load_problem(p.problem);
    const MixabilityProfile profile = eta_star(problem);
    Result r;
    r.table.columns = {"scope", "hypothesis", "excess_risk", "status", "eta", "limit"};
    for (const auto& f : profile.per_function) {
        const std::string status = f.equivalent_to_f_star ? "equivalent_to_f_star" : std::string(to_string(f.result.status));
        r.table.add_row({text("function"), text(f.name), num(problem.excess_risk(f.index)), text(status),
                         num(f.equivalent_to_f_star ? std::numeric_limits<double>::infinity() : f.result.mixability_eta()),
                         num(f.result.limit)});
    }
    r.table.add_row({text("class"), text(profile.f_star_name), num(0.0),
                     text(profile.mixable() ? "mixable" : "not_mixable"), num(profile.eta_star), blank()});
    return r;
}

Result mix_weak(const Params& p) {
    const LearningProblem problem = io::load_problem(p.problem);
    const auto weak = check_weak_mixability(problem, p.kappa, p.eta0);
    Result r;
    r.table.columns = {"kappa", "eta0", "holds", "levels_checked", "witness", "epsilon", "eta_epsilon", "cgf"};
    if (weak.witness) {
        const auto& w = *weak.witness;
        r.table.add_row({num(p.kappa), num(p.eta0), Cell(false), integer(weak.levels.size()), text(w.name),
                         num(w.epsilon), num(w.eta_epsilon), num(w.cgf_value)});
        r.code = kExitNegative;
        r.notes.push_back("weak stochastic mixability fails for '" + w.name + "' at excess-risk level " +
                          io::format_double(w.epsilon));
    } else {
        r.table.add_row({num(p.kappa), num(p.eta0), Cell(true), integer(weak.levels.size()), blank(), blank(),
                         blank(), blank()});
    }
    return r;
}

Result mix_bernstein(const Params& p) {
    const LearningProblem problem = io::load_problem(p.problem);
    const auto fit = bernstein_constant(problem, p.beta);
    Result r;
    r.table.columns = {"beta", "B", "argmax"};
    r.table.add_row({num(fit.beta), num(fit.B), fit.argmax ? text(problem.hypothesis(*fit.argmax).name) : blank()});
    return r;
}

// --- moment ------------------------------------------------------------------

Result moment_solve(const Params& p) {
    const MomentInstance instance{p.eta, p.mean, p.support};
    const MomentSense sense = parse_sense(p.sense);
    GridSolution sol;
    if (p.method == "enum") {
        sol = grid_lp_solve(instance, p.grid, sense);
    } else if (p.method == "simplex") {
        sol = grid_lp_solve_simplex(instance, p.grid, sense);
    } else if (p.method == "bruteforce") {
        sol = grid_lp_solve_bruteforce(instance, p.grid, sense);
    } else {
        throw ConfigError("--method expects enum, simplex or bruteforce, got '" + p.method + "'");
    }
    Result r;
    r.table.columns = {"eta", "mean", "support", "grid", "sense", "status", "value", "x", "p"};
    auto prefix = [&] {
        return std::vector<Cell>{num(p.eta), num(p.mean), num(p.support), integer(p.grid), text(to_string(sense)),
                                 text(to_string(sol.status))};
    };
    if (sol.status != GridStatus::optimal) {
        auto row = prefix();
        row.insert(row.end(), {blank(), blank(), blank()});
        r.table.add_row(std::move(row));
        r.code = kExitNegative;
        r.notes.push_back("the moment constraints are infeasible on this grid");
        return r;
    }
    for (const auto& s : sol.support) {
        auto row = prefix();
        row.insert(row.end(), {num(sol.value), num(s.x), num(s.p)});
        r.table.add_row(std::move(row));
    }
    return r;
}

Result moment_certify(const Params& p) {
    const DualCertificate cert = dual_certificate(p.eta);
    const CertificateCheck check = verify_certificate(cert, p.eta, p.certify_grid);
    Result r;
    r.table.columns = {"eta", "c0", "c1", "c2", "u_minus_1", "min_u", "argmin", "valid", "a_over_n",
                       "objective_bound", "combined_bound"};
    std::vector<Cell> row = {num(p.eta),          num(cert.c0),        num(cert.c1),   num(cert.c2),
                             num(check.u_at_minus_1), num(check.min_value), num(check.argmin), Cell(check.valid)};
    if (p.a_over_n) {
        row.push_back(num(*p.a_over_n));
        row.push_back(num(cert.objective_bound(p.eta, *p.a_over_n)));
        row.push_back(num(certificate_bound(p.eta, *p.a_over_n).combined));
    } else {
        row.insert(row.end(), {blank(), blank(), blank()});
    }
    r.table.add_row(std::move(row));
    if (!check.valid) {
        r.code = kExitNegative;
        r.notes.push_back("certificate function is negative somewhere on [-1, 1]");
    }
    return r;
}

// --- erm ---------------------------------------------------------------------

Result erm_simulate(const Params& p) {
    const LearningProblem problem = io::load_problem(p.problem);
    SimConfig config;
    config.n_values = p.n_list;
    config.trials = p.trials;
    config.seed = p.seed;
    config.tiebreak = parse_tiebreak(p.tiebreak);
    config.delta = p.delta;
    config.epsilon = p.epsilon;
    config.workers = p.workers;
    const SimReport report = simulate(problem, config);

    Result r;
    if (p.histogram) {
        r.table.columns = {"n", "excess_risk", "fraction"};
        for (const auto& s : report.per_n) {
            for (const auto& [level, frac] : s.level_histogram) r.table.add_row({integer(s.n), num(level), num(frac)});
        }
    } else {
        r.table.columns = {"n",       "mean_excess_risk",  "q50",        "q90",       "q_1_minus_delta",
                           "epsilon", "epsilon_good_rate", "error_rate", "fit_slope", "fit_intercept",
                           "fit_r2"};
        for (const auto& s : report.per_n) {
            std::vector<Cell> row = {integer(s.n), num(s.mean_excess_risk), num(s.q50), num(s.q90),
                                     num(s.q_1_minus_delta), num(s.epsilon), num(s.epsilon_good_rate),
                                     num(s.error_rate)};
            if (report.rate_fit) {
                row.insert(row.end(), {num(report.rate_fit->slope), num(report.rate_fit->intercept),
                                       num(report.rate_fit->r2)});
            } else {
                row.insert(row.end(), {blank(), blank(), blank()});
            }
            r.table.add_row(std::move(row));
        }
    }
    r.notes.push_back("f* = " + problem.hypothesis(report.f_star).name + ", eta* = " + io::format_double(report.eta_star));
    return r;
}

Result erm_violations(const Params& p) {
    const LearningProblem problem = io::load_problem(p.problem);
    if (!(p.n >= 1.0) || p.n != std::floor(p.n)) throw ConfigError("--n must be a positive integer");
    ViolationOptions options;
    options.kind = parse_bound_kind(p.bound);
    options.kappa = p.kappa;
    options.eta0 = p.eta0;
    options.seed = p.seed;
    options.tiebreak = parse_tiebreak(p.tiebreak);
    options.workers = p.workers;
    const auto n = static_cast<std::size_t>(p.n);
    const ViolationReport v = bound_violation_rate(problem, n, p.delta, p.trials, options);

    Result r;
    r.table.columns = {"bound_kind", "n", "delta", "trials", "bound", "violations", "rate", "sigma"};
    r.table.add_row({text(p.bound), integer(n), num(p.delta), integer(v.trials), num(v.bound), integer(v.violations),
                     num(v.rate), num(v.sigma)});
    return r;
}

// --- bounds ------------------------------------------------------------------

Result bounds_finite(const Params& p) {
    const double es = parse_real(p.eta_star, "--eta-star");
    const double value = finite_class_bound(p.V, es, p.N, p.delta, p.n);
    const double inv = std::isinf(es) ? 0.0 : 1.0 / es;
    Result r;
    r.table.columns = {"V", "eta_star", "N", "delta", "n", "value", "dominant"};
    r.table.add_row({num(p.V), num(es), num(p.N), num(p.delta), num(p.n), num(value), text(p.V >= inv ? "V" : "1/eta_star")});
    return r;
}

Result bounds_weak(const Params& p) {
    const double value = weak_mix_bound(p.kappa, p.eta0, p.N, p.delta, p.n, p.V);
    Result r;
    r.table.columns = {"kappa", "eta0", "N", "delta", "n", "V", "min_n", "value"};
    r.table.add_row({num(p.kappa), num(p.eta0), num(p.N), num(p.delta), num(p.n), num(p.V),
                     num(weak_mix_min_n(p.kappa, p.eta0, p.V)), num(value)});
    return r;
}

Result bounds_vc(const Params& p) {
    const double es = parse_real(p.eta_star, "--eta-star");
    const VcBound b = vc_type_bound(p.V, es, p.C, p.K, p.delta, p.n);
    Result r;
    r.table.columns = {"V", "eta_star", "C", "K", "delta", "n", "value", "branch1", "branch2", "dominant"};
    r.table.add_row({num(p.V), num(es), num(p.C), num(p.K), num(p.delta), num(p.n), num(b.value), num(b.branch1),
                     num(b.branch2), text(b.dominant == 1 ? "branch1" : "branch2")});
    return r;
}

Result bounds_local(const Params& p) {
    Result r;
    r.table.columns = {"result", "C", "K", "n", "delta", "y", "V", "value"};
    auto opt = [](const std::optional<double>& v) { return v ? num(*v) : blank(); };
    // Local analysis needs y; the expected supremum needs V >= 1.
    r.table.add_row({text("localization"), num(p.C), num(p.K), num(p.n), num(p.delta), blank(), num(p.V),
                     num(localization_bound(p.C, p.K, p.delta, p.n, p.V))});
    r.table.add_row({text("localization_half_delta"), num(p.C), num(p.K), num(p.n), num(p.delta), blank(), num(p.V),
                     num(localization_gamma2(p.C, p.K, p.delta, p.n, p.V))});
    if (p.y) {
        r.table.add_row({text("local_analysis"), num(p.C), num(p.K), num(p.n), blank(), opt(p.y), blank(),
                         num(local_analysis_bound(p.C, p.K, *p.y, p.n))});
    }
    if (p.V >= 1.0) {
        r.table.add_row({text("expected_supremum"), num(p.C), num(p.K), num(p.n), blank(), blank(), num(p.V),
                         num(esup_bound(p.C, p.K, p.V, p.n))});
    }
    return r;
}

// --- diagnose ----------------------------------------------------------------

Result diagnose_cmd(const Params& p) {
    const LearningProblem problem = io::load_problem(p.problem);
    const DiagnosticReport report = diagnose(problem, p.eps_list);
    Result r;
    r.table.columns = {"eps", "g_size", "mixable", "eta_star", "minimizer_multiplicity", "min_excess_risk_on_far_set"};
    for (const auto& row : report.rows) {
        r.table.add_row({num(row.eps), integer(row.g_size), Cell(row.mixable), num(row.eta_star),
                         integer(row.minimizer_multiplicity), num(row.min_excess_risk_on_far_set)});
    }
    r.notes.push_back("f* = " + report.f_star_name + "; " + report.verdict);
    if (!report.all_mixable) r.code = kExitNegative;
    return r;
}

// -----------------------------------------------------------------------------

class Cli {
public:
    Cli() : app_("Stochastic mixability toolkit: mixability constants, moment LP, ERM simulation and bounds", "mixlab") {
        app_.require_subcommand(1);
        p_.seed = 0;

        auto* mix = group("mix", "Stochastic mixability of a learning problem");
        leaf(mix, "eta", "eta* of the class and the mixability root of every member", mix_eta, [&](CLI::App* s) {
            problem(s);
        });
        leaf(mix, "weak", "(kappa, eta0)-weak stochastic mixability check", mix_weak, [&](CLI::App* s) {
            problem(s);
            s->add_option("--kappa", p_.kappa, "Exponent kappa in [0, 1]")->required();
            s->add_option("--eta0", p_.eta0, "Base learning rate eta0 > 0")->required();
        });
        leaf(mix, "bernstein", "Smallest Bernstein constant B for exponent beta", mix_bernstein, [&](CLI::App* s) {
            problem(s);
            s->add_option("--beta", p_.beta, "Bernstein exponent in (0, 1]")->capture_default_str();
        });

        auto* moment = group("moment", "Moment problem on bounded support");
        leaf(moment, "solve", "Solve the discretized moment LP", moment_solve, [&](CLI::App* s) {
            s->add_option("--eta", p_.eta, "Learning rate eta > 0")->required();
            s->add_option("--mean", p_.mean, "Target mean -a/n")->required();
            s->add_option("--support", p_.support, "Support bound V")->capture_default_str();
            s->add_option("--grid", p_.grid, "Number of grid points m")->capture_default_str();
            s->add_option("--sense", p_.sense, "max (max_mgf) or min (min_h)")->capture_default_str();
            s->add_option("--method", p_.method, "enum, simplex or bruteforce")->capture_default_str();
        });
        leaf(moment, "certify", "Dual certificate coefficients and their verification", moment_certify,
             [&](CLI::App* s) {
                 s->add_option("--eta", p_.eta, "Learning rate eta > 0")->required();
                 s->add_option("--grid", p_.certify_grid, "Verification grid size")->capture_default_str();
                 s->add_option("--a-over-n", p_.a_over_n, "Evaluate the bounds at mean -a/n");
             });

        auto* erm = group("erm", "Monte Carlo simulation of empirical risk minimization");
        leaf(erm, "simulate", "Excess-risk statistics per sample size", erm_simulate, [&](CLI::App* s) {
            problem(s);
            s->add_option("--n-list", p_.n_list, "Sample sizes, comma separated")->required()->delimiter(',');
            sim_options(s);
            s->add_option("--delta", p_.delta, "Quantile level 1 - delta and default epsilon")->capture_default_str();
            s->add_option("--epsilon", p_.epsilon, "Fixed threshold for the epsilon-good rate");
            s->add_flag("--histogram", p_.histogram, "Print the excess-risk level histogram instead");
        });
        leaf(erm, "violations", "Rate at which ERM exceeds a high-probability bound", erm_violations,
             [&](CLI::App* s) {
                 problem(s);
                 s->add_option("--bound", p_.bound, "finite_class or weak_mixability")->capture_default_str();
                 s->add_option("--n", p_.n, "Sample size")->required();
                 s->add_option("--delta", p_.delta, "Failure probability")->capture_default_str();
                 s->add_option("--kappa", p_.kappa, "weak_mixability: exponent kappa")->capture_default_str();
                 s->add_option("--eta0", p_.eta0, "weak_mixability: base learning rate")->capture_default_str();
                 sim_options(s);
             });

        auto* bounds = group("bounds", "Closed-form excess-risk bounds");
        leaf(bounds, "finite", "Finite-class oracle inequality", bounds_finite, [&](CLI::App* s) {
            s->add_option("--V", p_.V, "Loss bound V")->required();
            s->add_option("--eta-star", p_.eta_star, "eta* (may be inf)")->required();
            s->add_option("--N", p_.N, "Class size")->required();
            s->add_option("--delta", p_.delta, "Failure probability")->required();
            s->add_option("--n", p_.n, "Sample size")->required();
        });
        leaf(bounds, "weak", "Weak-mixability rate", bounds_weak, [&](CLI::App* s) {
            s->add_option("--kappa", p_.kappa, "Exponent kappa in [0, 1]")->required();
            s->add_option("--eta0", p_.eta0, "Base learning rate eta0")->required();
            s->add_option("--N", p_.N, "Class size")->required();
            s->add_option("--delta", p_.delta, "Failure probability")->required();
            s->add_option("--n", p_.n, "Sample size")->required();
            s->add_option("--V", p_.V, "Loss bound V")->capture_default_str();
        });
        leaf(bounds, "vc", "VC-type oracle inequality", bounds_vc, [&](CLI::App* s) {
            s->add_option("--V", p_.V, "Loss bound V >= 1")->required();
            s->add_option("--eta-star", p_.eta_star, "eta* (may be inf)")->required();
            s->add_option("--C", p_.C, "Covering exponent C")->required();
            s->add_option("--K", p_.K, "Covering constant K")->required();
            s->add_option("--delta", p_.delta, "Failure probability, at most 1/2")->required();
            s->add_option("--n", p_.n, "Sample size")->required();
        });
        leaf(bounds, "local", "Localization, local analysis and expected supremum bounds", bounds_local,
             [&](CLI::App* s) {
                 s->add_option("--C", p_.C, "Covering exponent C")->required();
                 s->add_option("--K", p_.K, "Covering constant K")->required();
                 s->add_option("--n", p_.n, "Sample size")->required();
                 s->add_option("--delta", p_.delta, "Failure probability, at most 1/2")->capture_default_str();
                 s->add_option("--y", p_.y, "Tail parameter of the local analysis");
                 s->add_option("--V", p_.V, "Loss bound V")->capture_default_str();
             });

        leaf(nullptr, "diagnose", "Mixability of G_eps over a grid of eps (non-convexity diagnostic)", diagnose_cmd,
             [&](CLI::App* s) {
                 problem(s);
                 s->add_option("--eps-list", p_.eps_list, "Distance levels, comma separated")
                     ->required()
                     ->delimiter(',');
             });
    }

    int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
        try {
            p_.seed = default_seed();
        } catch (const ConfigError& e) {
            err << "error: " << e.what() << '\n';
            return kExitValidation;
        }
        std::reverse(args.begin(), args.end());
        try {
            app_.parse(args);
        } catch (const CLI::CallForHelp&) {
            out << deepest()->help();
            return kExitOk;
        } catch (const CLI::CallForAllHelp&) {
            out << app_.help("", CLI::AppFormatMode::All);
            return kExitOk;
        } catch (const CLI::ParseError& e) {
            err << "error: " << e.what() << "\n\n" << deepest()->help();
            return kExitValidation;
        }

        for (auto& [sub, handler] : handlers_) {
            if (!sub->parsed()) continue;
            try {
                if (p_.format != "csv" && p_.format != "json") {
                    throw ConfigError("--format expects csv or json, got '" + p_.format + "'");
                }
                Result r = handler(p_);
                if (!emit(r.table, out, err)) return kExitValidation;
                for (const auto& note : r.notes) err << note << '\n';
                return r.code;
            } catch (const NonUniqueMinimizerError& e) {
                err << "error: " << e.what() << '\n';
                return kExitNegative;
            } catch (const UnboundedBernsteinError& e) {
                err << "error: " << e.what() << '\n';
                return kExitNegative;
            } catch (const std::exception& e) {
                err << "error: " << e.what() << '\n';
                return kExitValidation;
            }
        }
        err << app_.help();
        return kExitValidation;
    }

private:
    using Handler = std::function<Result(const Params&)>;

    CLI::App* group(const std::string& name, const std::string& description) {
        auto* g = app_.add_subcommand(name, description);
        g->require_subcommand(1);
        commands_.push_back(g);
        return g;
    }

    template <typename Setup>
    void leaf(CLI::App* parent, const std::string& name, const std::string& description, Handler handler,
              Setup&& setup) {
        CLI::App* s = parent ? parent->add_subcommand(name, description) : app_.add_subcommand(name, description);
        setup(s);
        s->add_option("--out", p_.out_file, "Write the report to FILE instead of stdout");
        s->add_option("--format", p_.format, "csv or json")->capture_default_str();
        commands_.push_back(s);
        handlers_.emplace_back(s, std::move(handler));
    }

    void problem(CLI::App* s) { s->add_option("--problem", p_.problem, "Problem JSON file")->required(); }

    void sim_options(CLI::App* s) {
        s->add_option("--trials", p_.trials, "Replications per sample size")->capture_default_str();
        s->add_option("--seed", p_.seed, "Master seed (default: $MIXLAB_SEED or 0)");
        s->add_option("--tiebreak", p_.tiebreak, "first_by_name, lowest_risk or worst_risk")->capture_default_str();
        s->add_option("--workers", p_.workers, "Worker threads; results do not depend on it")->capture_default_str();
    }

    CLI::App* deepest() {
        for (auto it = commands_.rbegin(); it != commands_.rend(); ++it) {
            if ((*it)->parsed() && (*it)->get_subcommands().empty()) return *it;
        }
        for (auto it = commands_.rbegin(); it != commands_.rend(); ++it) {
            if ((*it)->parsed()) return *it;
        }
        return &app_;
    }

    bool emit(const Table& table, std::ostream& out, std::ostream& err) const {
        std::ofstream file;
        std::ostream* os = &out;
        if (!p_.out_file.empty()) {
            file.open(p_.out_file);
            if (!file) {
                err << "error: cannot write to '" << p_.out_file << "'\n";
                return false;
            }
            os = &file;
        }
        if (p_.format == "json") {
            io::write_json(*os, table);
        } else {
            io::write_csv(*os, table);
        }
        return true;
    }

    CLI::App app_;
    Params p_;
    std::vector<CLI::App*> commands_;
    std::vector<std::pair<CLI::App*, Handler>> handlers_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Cli cli;
    return cli.run(args, out, err);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

}  // namespace mixlab::cli
