#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <utility>
#include <vector>

#include "mixlab/bounds.hpp"
#include "mixlab/diagnostics.hpp"
#include "mixlab/erm_sim.hpp"
#include "mixlab/errors.hpp"
#include "mixlab/io.hpp"
#include "mixlab/mixability.hpp"
#include "mixlab/moment_problem.hpp"

namespace py = pybind11;
using namespace mixlab;

namespace {

ExcessLossRV make_rv(const std::vector<std::pair<double, double>>& atoms, double support_bound) {
    std::vector<ValueMass> vm;
    vm.reserve(atoms.size());
    for (const auto& [z, p] : atoms) vm.push_back({z, p});
    return ExcessLossRV::from_atoms(std::move(vm), support_bound);
}

std::vector<std::pair<double, double>> atom_pairs(const ExcessLossRV& rv) {
    std::vector<std::pair<double, double>> out;
    for (const auto& a : rv.atoms()) out.emplace_back(a.z, a.p);
    return out;
}

MomentSense parse_sense(const std::string& s) {
    if (s == "max") return MomentSense::max_mgf;
    if (s == "min") return MomentSense::min_h;
    throw ConfigError("sense must be 'max' or 'min'");
}

}  // namespace

PYBIND11_MODULE(_mixlab, m) {
    m.doc() = "Stochastic mixability toolkit: exponents, moment LPs, ERM simulation and rate bounds";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<NonUniqueMinimizerError>(m, "NonUniqueMinimizerError", PyExc_RuntimeError);
    py::register_exception<UnboundedBernsteinError>(m, "UnboundedBernsteinError", PyExc_RuntimeError);

    py::class_<LearningProblem>(m, "LearningProblem")
        .def_property_readonly("size", &LearningProblem::size)
        .def_property_readonly("loss_bound", &LearningProblem::loss_bound)
        .def_property_readonly("f_star", &LearningProblem::f_star)
        .def_property_readonly("names",
                               [](const LearningProblem& p) {
                                   std::vector<std::string> out;
                                   for (const auto& h : p.hypotheses()) out.push_back(h.name);
                                   return out;
                               })
        .def("risk", &LearningProblem::risk, py::arg("h"))
        .def("excess_risk", &LearningProblem::excess_risk, py::arg("h"))
        .def("index_of", &LearningProblem::index_of, py::arg("name"))
        .def("to_json", [](const LearningProblem& p) { return io::problem_to_json(p); });

    m.def("load_problem", &io::load_problem, py::arg("path"));
    m.def("parse_problem", [](const std::string& text) { return io::parse_problem(text); }, py::arg("text"));

    m.def("cgf", [](const std::vector<std::pair<double, double>>& atoms, double eta, double V) {
        return cgf(make_rv(atoms, V), eta);
    }, py::arg("atoms"), py::arg("eta"), py::arg("V") = 1.0);

    py::class_<EtaResult>(m, "EtaResult")
        .def_property_readonly("status", [](const EtaResult& r) { return std::string(to_string(r.status)); })
        .def_readonly("eta", &EtaResult::eta)
        .def_readonly("limit", &EtaResult::limit)
        .def("mixability_eta", &EtaResult::mixability_eta);

    m.def("eta_root", [](const std::vector<std::pair<double, double>>& atoms, double V) {
        return eta_root(make_rv(atoms, V));
    }, py::arg("atoms"), py::arg("V") = 1.0);

    py::class_<FunctionMixability>(m, "FunctionMixability")
        .def_readonly("name", &FunctionMixability::name)
        .def_readonly("index", &FunctionMixability::index)
        .def_readonly("result", &FunctionMixability::result)
        .def_readonly("equivalent_to_f_star", &FunctionMixability::equivalent_to_f_star);

    py::class_<MixabilityProfile>(m, "MixabilityProfile")
        .def_readonly("f_star", &MixabilityProfile::f_star)
        .def_readonly("f_star_name", &MixabilityProfile::f_star_name)
        .def_readonly("per_function", &MixabilityProfile::per_function)
        .def_readonly("eta_star", &MixabilityProfile::eta_star)
        .def_property_readonly("mixable", &MixabilityProfile::mixable);

    m.def("eta_star", &eta_star, py::arg("problem"));

    py::class_<WeakMixabilityWitness>(m, "WeakMixabilityWitness")
        .def_readonly("hypothesis", &WeakMixabilityWitness::hypothesis)
        .def_readonly("name", &WeakMixabilityWitness::name)
        .def_readonly("epsilon", &WeakMixabilityWitness::epsilon)
        .def_readonly("eta_epsilon", &WeakMixabilityWitness::eta_epsilon)
        .def_readonly("cgf_value", &WeakMixabilityWitness::cgf_value);

    py::class_<WeakMixabilityResult>(m, "WeakMixabilityResult")
        .def_readonly("holds", &WeakMixabilityResult::holds)
        .def_readonly("witness", &WeakMixabilityResult::witness)
        .def_readonly("levels", &WeakMixabilityResult::levels);

    m.def("check_weak_mixability", &check_weak_mixability, py::arg("problem"), py::arg("kappa"), py::arg("eta0"));

    py::class_<BernsteinFit>(m, "BernsteinFit")
        .def_readonly("beta", &BernsteinFit::beta)
        .def_readonly("B", &BernsteinFit::B)
        .def_readonly("argmax", &BernsteinFit::argmax);

    m.def("bernstein_constant", &bernstein_constant, py::arg("problem"), py::arg("beta") = 1.0);

    m.def("hyper_perturb", [](const std::vector<std::pair<double, double>>& atoms, double epsilon, double V) {
        const auto h = hyper_perturb(make_rv(atoms, V), epsilon, V);
        return py::make_tuple(atom_pairs(h.perturbed), h.eta);
    }, py::arg("atoms"), py::arg("epsilon"), py::arg("V") = 1.0);

    m.def("feasible_mean_bound", &feasible_mean_bound, py::arg("eta"));

    py::class_<GridSolution>(m, "GridSolution")
        .def_property_readonly("status", [](const GridSolution& s) { return std::string(to_string(s.status)); })
        .def_readonly("value", &GridSolution::value)
        .def_property_readonly("support",
                               [](const GridSolution& s) {
                                   std::vector<std::pair<double, double>> out;
                                   for (const auto& p : s.support) out.emplace_back(p.x, p.p);
                                   return out;
                               })
        .def_readonly("grid_size", &GridSolution::grid_size);

    m.def("grid_lp_solve", [](double eta, double mean, double V, std::size_t m_grid, const std::string& sense,
                              const std::string& method) {
        const MomentInstance inst{eta, mean, V};
        const auto s = parse_sense(sense);
        if (method == "enum") return grid_lp_solve(inst, m_grid, s);
        if (method == "simplex") return grid_lp_solve_simplex(inst, m_grid, s);
        if (method == "bruteforce") return grid_lp_solve_bruteforce(inst, m_grid, s);
        throw ConfigError("method must be 'enum', 'simplex' or 'bruteforce'");
    }, py::arg("eta"), py::arg("mean"), py::arg("V") = 1.0, py::arg("m") = 2001, py::arg("sense") = "max",
       py::arg("method") = "enum");

    py::class_<DualCertificate>(m, "DualCertificate")
        .def_readonly("c0", &DualCertificate::c0)
        .def_readonly("c1", &DualCertificate::c1)
        .def_readonly("c2", &DualCertificate::c2)
        .def("objective_bound", &DualCertificate::objective_bound, py::arg("eta"), py::arg("a_over_n"));

    m.def("dual_certificate", &dual_certificate, py::arg("eta"));
    m.def("certificate_u", &certificate_u, py::arg("cert"), py::arg("eta"), py::arg("x"));

    py::class_<CertificateCheck>(m, "CertificateCheck")
        .def_readonly("min_value", &CertificateCheck::min_value)
        .def_readonly("argmin", &CertificateCheck::argmin)
        .def_readonly("u_at_minus_1", &CertificateCheck::u_at_minus_1)
        .def_readonly("valid", &CertificateCheck::valid);

    m.def("verify_certificate", &verify_certificate, py::arg("cert"), py::arg("eta"), py::arg("m") = 10000);

    py::class_<CertificateBound>(m, "CertificateBound")
        .def_readonly("combined", &CertificateBound::combined)
        .def_readonly("large_eta", &CertificateBound::large_eta);

    m.def("certificate_bound", &certificate_bound, py::arg("eta"), py::arg("a_over_n"));

    py::class_<RateFit>(m, "RateFit")
        .def_readonly("slope", &RateFit::slope)
        .def_readonly("intercept", &RateFit::intercept)
        .def_readonly("r2", &RateFit::r2)
        .def_readonly("points", &RateFit::points);

    py::class_<SampleSizeStats>(m, "SampleSizeStats")
        .def_readonly("n", &SampleSizeStats::n)
        .def_readonly("mean_excess_risk", &SampleSizeStats::mean_excess_risk)
        .def_readonly("q50", &SampleSizeStats::q50)
        .def_readonly("q90", &SampleSizeStats::q90)
        .def_readonly("q_1_minus_delta", &SampleSizeStats::q_1_minus_delta)
        .def_readonly("epsilon", &SampleSizeStats::epsilon)
        .def_readonly("epsilon_good_rate", &SampleSizeStats::epsilon_good_rate)
        .def_readonly("error_rate", &SampleSizeStats::error_rate)
        .def_readonly("level_histogram", &SampleSizeStats::level_histogram);

    py::class_<SimReport>(m, "SimReport")
        .def_readonly("per_n", &SimReport::per_n)
        .def_readonly("rate_fit", &SimReport::rate_fit)
        .def_readonly("eta_star", &SimReport::eta_star)
        .def_readonly("f_star", &SimReport::f_star);

    m.def("simulate", [](const LearningProblem& problem, std::vector<std::size_t> n_values, std::size_t trials,
                         std::uint64_t seed, const std::string& tiebreak, double delta, std::optional<double> epsilon,
                         unsigned workers) {
        SimConfig cfg;
        cfg.n_values = std::move(n_values);
        cfg.trials = trials;
        cfg.seed = seed;
        cfg.tiebreak = parse_tiebreak(tiebreak);
        cfg.delta = delta;
        cfg.epsilon = epsilon;
        cfg.workers = workers;
        py::gil_scoped_release release;
        return simulate(problem, cfg);
    }, py::arg("problem"), py::arg("n_values"), py::arg("trials") = 1000, py::arg("seed") = 0,
       py::arg("tiebreak") = "first_by_name", py::arg("delta") = 0.05, py::arg("epsilon") = py::none(),
       py::arg("workers") = 1);

    py::class_<ViolationReport>(m, "ViolationReport")
        .def_readonly("bound", &ViolationReport::bound)
        .def_readonly("violations", &ViolationReport::violations)
        .def_readonly("trials", &ViolationReport::trials)
        .def_readonly("rate", &ViolationReport::rate)
        .def_readonly("sigma", &ViolationReport::sigma);

    m.def("bound_violation_rate", [](const LearningProblem& problem, std::size_t n, double delta, std::size_t trials,
                                     const std::string& bound, double kappa, double eta0, std::uint64_t seed,
                                     unsigned workers) {
        ViolationOptions opts;
        opts.kind = parse_bound_kind(bound);
        opts.kappa = kappa;
        opts.eta0 = eta0;
        opts.seed = seed;
        opts.workers = workers;
        py::gil_scoped_release release;
        return bound_violation_rate(problem, n, delta, trials, opts);
    }, py::arg("problem"), py::arg("n"), py::arg("delta"), py::arg("trials"), py::arg("bound") = "finite_class",
       py::arg("kappa") = 1.0, py::arg("eta0") = 1.0, py::arg("seed") = 0, py::arg("workers") = 1);

    m.def("finite_class_bound", &finite_class_bound, py::arg("V"), py::arg("eta_star"), py::arg("N"), py::arg("delta"),
          py::arg("n"));
    m.def("weak_mix_bound", &weak_mix_bound, py::arg("kappa"), py::arg("eta0"), py::arg("N"), py::arg("delta"),
          py::arg("n"), py::arg("V") = 1.0);
    m.def("vc_type_bound", [](double V, double eta_star, double C, double K, double delta, double n) {
        return vc_type_bound(V, eta_star, C, K, delta, n).value;
    }, py::arg("V"), py::arg("eta_star"), py::arg("C"), py::arg("K"), py::arg("delta"), py::arg("n"));
    m.def("localization_bound", &localization_bound, py::arg("C"), py::arg("K"), py::arg("delta"), py::arg("n"),
          py::arg("V"));
    m.def("local_analysis_bound", &local_analysis_bound, py::arg("C"), py::arg("K"), py::arg("y"), py::arg("n"));
    m.def("esup_bound", &esup_bound, py::arg("C"), py::arg("K"), py::arg("V"), py::arg("n"));

    py::class_<DiagnosticRow>(m, "DiagnosticRow")
        .def_readonly("eps", &DiagnosticRow::eps)
        .def_readonly("g_size", &DiagnosticRow::g_size)
        .def_readonly("mixable", &DiagnosticRow::mixable)
        .def_readonly("eta_star", &DiagnosticRow::eta_star)
        .def_readonly("minimizer_multiplicity", &DiagnosticRow::minimizer_multiplicity)
        .def_readonly("min_excess_risk_on_far_set", &DiagnosticRow::min_excess_risk_on_far_set);

    py::class_<DiagnosticReport>(m, "DiagnosticReport")
        .def_readonly("f_star", &DiagnosticReport::f_star)
        .def_readonly("f_star_name", &DiagnosticReport::f_star_name)
        .def_readonly("rows", &DiagnosticReport::rows)
        .def_readonly("all_mixable", &DiagnosticReport::all_mixable)
        .def_readonly("verdict", &DiagnosticReport::verdict);

    m.def("diagnose", [](const LearningProblem& problem, const std::vector<double>& eps) {
        return diagnose(problem, eps);
    }, py::arg("problem"), py::arg("eps_grid"));
}
