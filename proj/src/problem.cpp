#include "mixlab/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "mixlab/errors.hpp"

namespace mixlab {

namespace {

constexpr double kProbabilitySumTol = 1e-9;

std::string describe(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

std::string_view to_string(LossKind kind) {
    switch (kind) {
        case LossKind::squared: return "squared";
        case LossKind::absolute: return "absolute";
        case LossKind::p_loss: return "p_loss";
        case LossKind::zero_one: return "zero_one";
        case LossKind::log: return "log";
    }
    return "unknown";
}

LossKind parse_loss_kind(std::string_view name) {
    if (name == "squared") return LossKind::squared;
    if (name == "absolute") return LossKind::absolute;
    if (name == "p_loss") return LossKind::p_loss;
    if (name == "zero_one") return LossKind::zero_one;
    if (name == "log") return LossKind::log;
    throw ConfigError("unknown loss kind '" + std::string(name) +
                      "' (expected squared, absolute, p_loss, zero_one or log)");
}

double Loss::operator()(double y, double prediction) const {
    switch (kind) {
        case LossKind::squared: return (y - prediction) * (y - prediction);
        case LossKind::absolute: return std::abs(y - prediction);
        case LossKind::p_loss: return std::pow(std::abs(y - prediction), exponent);
        case LossKind::zero_one: return y == prediction ? 0.0 : 1.0;
        case LossKind::log: {
            double value = 0.0;
            if (y != 0.0) value -= y * std::log(prediction);
            if (y != 1.0) value -= (1.0 - y) * std::log1p(-prediction);
            return value;
        }
    }
    return 0.0;
}

double Hypothesis::predict(std::string_view x) const {
    auto it = values.find(x);
    if (it == values.end()) {
        throw ConfigError("hypothesis '" + name + "' is undefined at input label '" + std::string(x) + "'");
    }
    return it->second;
}

// ---------------------------------------------------------------------------

ExcessLossRV ExcessLossRV::from_atoms(std::vector<ValueMass> atoms, double support_bound) {
    if (!(support_bound > 0.0)) throw ConfigError("support bound V must be positive");
    double total = 0.0;
    for (const auto& a : atoms) {
        if (!(a.p >= 0.0) || !std::isfinite(a.z)) throw ConfigError("invalid atom in random variable");
        if (std::abs(a.z) > support_bound) {
            throw ConfigError("atom value " + describe(a.z) + " exceeds support bound " + describe(support_bound));
        }
        total += a.p;
    }
    if (std::abs(total - 1.0) > kProbabilitySumTol) {
        throw ConfigError("random variable probabilities sum to " + describe(total) + ", expected 1");
    }
    std::erase_if(atoms, [](const ValueMass& a) { return a.p == 0.0; });
    std::stable_sort(atoms.begin(), atoms.end(), [](const ValueMass& a, const ValueMass& b) { return a.z < b.z; });

    ExcessLossRV rv;
    rv.support_bound_ = support_bound;
    for (const auto& a : atoms) {
        if (!rv.atoms_.empty() && rv.atoms_.back().z == a.z) {
            rv.atoms_.back().p += a.p;
        } else {
            rv.atoms_.push_back(a);
        }
    }
    return rv;
}

double ExcessLossRV::mean() const noexcept {
    double m = 0.0;
    for (const auto& a : atoms_) m += a.p * a.z;
    return m;
}

double ExcessLossRV::second_moment() const noexcept {
    double m = 0.0;
    for (const auto& a : atoms_) m += a.p * a.z * a.z;
    return m;
}

double ExcessLossRV::mass_at_zero() const noexcept {
    double m = 0.0;
    for (const auto& a : atoms_) {
        if (a.z == 0.0) m += a.p;
    }
    return m;
}

ExcessLossRV ExcessLossRV::scaled(double c) const {
    if (!(c > 0.0)) throw PreconditionError("scale factor must be positive");
    ExcessLossRV out = *this;
    for (auto& a : out.atoms_) a.z *= c;
    out.support_bound_ *= c;
    return out;
}

// ---------------------------------------------------------------------------

LearningProblem::LearningProblem(std::vector<Atom> atoms, Loss loss, std::vector<Hypothesis> hypotheses,
                                 double loss_bound)
    : atoms_(std::move(atoms)), loss_(loss), hypotheses_(std::move(hypotheses)), loss_bound_(loss_bound) {
    if (atoms_.empty()) throw ConfigError("distribution has no atoms");
    if (hypotheses_.empty()) throw ConfigError("function class is empty (N >= 1 required)");
    if (!(loss_bound_ > 0.0) || !std::isfinite(loss_bound_)) throw ConfigError("loss bound V must be a positive finite number");
    if (loss_.kind == LossKind::p_loss && !(loss_.exponent >= 1.0)) {
        throw ConfigError("p_loss exponent must be >= 1");
    }

    double total = 0.0;
    for (const auto& a : atoms_) {
        if (!(a.p >= 0.0 && a.p <= 1.0)) {
            throw ConfigError("atom (" + a.x + ", " + describe(a.y) + ") has probability outside [0, 1]");
        }
        if (!std::isfinite(a.y)) throw ConfigError("atom at input '" + a.x + "' has a non-finite output");
        total += a.p;
    }
    if (std::abs(total - 1.0) > kProbabilitySumTol) {
        throw ConfigError("atom probabilities sum to " + describe(total) + ", expected 1 within 1e-9");
    }

    std::set<std::string, std::less<>> names;
    for (const auto& h : hypotheses_) {
        if (!names.insert(h.name).second) throw ConfigError("duplicate hypothesis name '" + h.name + "'");
    }

    const std::size_t n_atoms = atoms_.size();
    losses_.resize(hypotheses_.size() * n_atoms);
    risks_.resize(hypotheses_.size());
    for (std::size_t h = 0; h < hypotheses_.size(); ++h) {
        double r = 0.0;
        for (std::size_t a = 0; a < n_atoms; ++a) {
            const double pred = hypotheses_[h].predict(atoms_[a].x);
            if (loss_.kind == LossKind::log && !(pred > 0.0 && pred <= 1.0)) {
                throw ConfigError("log loss requires predictions in (0, 1]; hypothesis '" + hypotheses_[h].name +
                                  "' predicts " + describe(pred) + " at '" + atoms_[a].x + "'");
            }
            const double l = loss_(atoms_[a].y, pred);
            if (!(l >= 0.0) || !std::isfinite(l)) {
                throw ConfigError("loss of hypothesis '" + hypotheses_[h].name + "' at (" + atoms_[a].x + ", " +
                                  describe(atoms_[a].y) + ") is not a finite nonnegative number");
            }
            if (l > loss_bound_) {
                throw ConfigError("loss " + describe(l) + " of hypothesis '" + hypotheses_[h].name + "' at (" +
                                  atoms_[a].x + ", " + describe(atoms_[a].y) + ") exceeds the loss bound V = " +
                                  describe(loss_bound_));
            }
            losses_[h * n_atoms + a] = l;
            r += atoms_[a].p * l;
        }
        risks_[h] = r;
    }
    f_star_ = static_cast<std::size_t>(std::min_element(risks_.begin(), risks_.end()) - risks_.begin());
}

std::optional<std::size_t> LearningProblem::find(std::string_view name) const {
    for (std::size_t i = 0; i < hypotheses_.size(); ++i) {
        if (hypotheses_[i].name == name) return i;
    }
    return std::nullopt;
}

std::size_t LearningProblem::index_of(std::string_view name) const {
    if (auto i = find(name)) return *i;
    throw ConfigError("unknown hypothesis '" + std::string(name) + "'");
}

LearningProblem LearningProblem::subclass(std::span<const std::size_t> members) const {
    std::vector<Hypothesis> hs;
    hs.reserve(members.size());
    for (auto i : members) hs.push_back(hypotheses_.at(i));
    return LearningProblem(atoms_, loss_, std::move(hs), loss_bound_);
}

std::vector<double> LearningProblem::probabilities() const {
    std::vector<double> p(atoms_.size());
    std::transform(atoms_.begin(), atoms_.end(), p.begin(), [](const Atom& a) { return a.p; });
    return p;
}

// ---------------------------------------------------------------------------

double risk(const LearningProblem& problem, const Hypothesis& f) {
    double r = 0.0;
    for (const auto& a : problem.atoms()) r += a.p * problem.loss()(a.y, f.predict(a.x));
    return r;
}

MinimizerSet minimizers(const LearningProblem& problem, double tol) {
    if (!(tol >= 0.0)) throw PreconditionError("minimizer tolerance must be >= 0");
    const double best = problem.risk(problem.f_star());
    MinimizerSet out;
    for (std::size_t h = 0; h < problem.size(); ++h) {
        if (problem.risk(h) <= best + tol) out.indices.push_back(h);
    }
    const auto atoms = problem.atoms();
    for (std::size_t i = 0; i < out.indices.size() && !out.non_unique; ++i) {
        for (std::size_t j = i + 1; j < out.indices.size() && !out.non_unique; ++j) {
            for (std::size_t a = 0; a < atoms.size(); ++a) {
                if (atoms[a].p > 0.0 && problem.loss_at(out.indices[i], a) != problem.loss_at(out.indices[j], a)) {
                    out.non_unique = true;
                    out.witness = std::make_pair(out.indices[i], out.indices[j]);
                    break;
                }
            }
        }
    }
    return out;
}

ExcessLossRV excess_loss(const LearningProblem& problem, std::size_t f, std::size_t f_star) {
    const auto atoms = problem.atoms();
    std::vector<ValueMass> zs;
    zs.reserve(atoms.size());
    for (std::size_t a = 0; a < atoms.size(); ++a) {
        zs.push_back({problem.loss_at(f, a) - problem.loss_at(f_star, a), atoms[a].p});
    }
    return ExcessLossRV::from_atoms(std::move(zs), problem.loss_bound());
}

ExcessLossRV excess_loss(const LearningProblem& problem, const Hypothesis& f, const Hypothesis& f_star) {
    std::vector<ValueMass> zs;
    for (const auto& a : problem.atoms()) {
        zs.push_back({problem.loss()(a.y, f.predict(a.x)) - problem.loss()(a.y, f_star.predict(a.x)), a.p});
    }
    return ExcessLossRV::from_atoms(std::move(zs), problem.loss_bound());
}

std::vector<std::size_t> subclass_at_least(const LearningProblem& problem, double eps) {
    if (!(eps >= 0.0)) throw PreconditionError("eps must be >= 0");
    std::vector<std::size_t> out;
    for (std::size_t h = 0; h < problem.size(); ++h) {
        if (problem.excess_risk(h) >= eps) out.push_back(h);
    }
    return out;
}

std::vector<std::size_t> subclass_at_most(const LearningProblem& problem, double eps) {
    if (!(eps >= 0.0)) throw PreconditionError("eps must be >= 0");
    std::vector<std::size_t> out;
    for (std::size_t h = 0; h < problem.size(); ++h) {
        if (problem.excess_risk(h) <= eps) out.push_back(h);
    }
    return out;
}

double l1_distance(const LearningProblem& problem, std::size_t i, std::size_t j) {
    const auto& fi = problem.hypothesis(i);
    const auto& fj = problem.hypothesis(j);
    double d = 0.0;
    for (const auto& a : problem.atoms()) d += a.p * std::abs(fi.predict(a.x) - fj.predict(a.x));
    return d;
}

std::vector<std::size_t> g_epsilon(const LearningProblem& problem, double eps) {
    if (!(eps > 0.0)) throw PreconditionError("G_eps requires eps > 0");
    const std::size_t star = problem.f_star();
    std::vector<std::size_t> out;
    for (std::size_t h = 0; h < problem.size(); ++h) {
        if (h == star || l1_distance(problem, h, star) >= eps) out.push_back(h);
    }
    return out;
}

// ---------------------------------------------------------------------------

AtomSampler::AtomSampler(const LearningProblem& problem) {
    cumulative_.reserve(problem.atom_count());
    double c = 0.0;
    for (const auto& a : problem.atoms()) {
        c += a.p;
        cumulative_.push_back(c);
    }
}

std::size_t AtomSampler::operator()(Rng& rng) const {
    // Scale by the realized total so rounding in the cumulative sum cannot
    // leave a gap at the top of the unit interval.
    const double u = uniform01(rng) * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<std::size_t>(it - cumulative_.begin());
}

std::vector<std::size_t> sample_atoms(const LearningProblem& problem, std::size_t n, Rng& rng) {
    AtomSampler draw(problem);
    std::vector<std::size_t> out(n);
    for (auto& i : out) i = draw(rng);
    return out;
}

std::vector<Observation> sample(const LearningProblem& problem, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw PreconditionError("sample size n must be >= 1");
    Rng rng{splitmix64(seed)};
    std::vector<Observation> out;
    out.reserve(n);
    for (auto i : sample_atoms(problem, n, rng)) {
        const auto& a = problem.atoms()[i];
        out.push_back({a.x, a.y});
    }
    return out;
}

}  // namespace mixlab
