#include "mixlab/moment_problem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>

#include <Eigen/Dense>

#include "mixlab/errors.hpp"
#include "mixlab/lp_simplex.hpp"

namespace mixlab {

namespace {

constexpr double kNegativeMassTol = 1e-12;
constexpr double kConstraintTol = 1e-9;
constexpr double kBoundaryTol = 1e-12;
constexpr double kCertificateTol = 1e-9;

// Certificate constants from the dual construction.
constexpr double kSmallEtaC2 = 0.32;
constexpr double kSmallEtaRate = 0.18;
constexpr double kLargeEtaRate = 0.21;

double large_eta_alpha() {
    const double r = std::sqrt(std::exp(1.0)) - 1.0;
    return 0.5 * r * r;
}

void check_instance(const MomentInstance& inst, std::size_t m) {
    if (!(inst.eta > 0.0) || !std::isfinite(inst.eta)) throw PreconditionError("moment problem requires eta > 0");
    if (!(inst.support_bound > 0.0)) throw PreconditionError("moment problem requires support bound V > 0");
    if (!(std::abs(inst.mean) <= inst.support_bound)) throw PreconditionError("moment problem requires |mean| <= V");
    if (m < 3) throw PreconditionError("moment grid needs at least 3 points");
}

// Candidate basic solution bookkeeping shared by the enumerators.
class BestSupport {
public:
    BestSupport(const MomentInstance& inst, std::span<const double> grid) : inst_(inst), grid_(grid) {
        expo_.resize(grid.size());
        half_.resize(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) {
            expo_[k] = std::exp(inst.eta * grid[k]);
            half_[k] = std::exp(0.5 * inst.eta * grid[k]);
        }
    }

    void offer(std::initializer_list<std::size_t> support) {
        std::array<std::size_t, 3> idx{};
        std::size_t count = 0;
        for (auto k : support) idx[count++] = k;
        std::sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count));
        for (std::size_t i = 1; i < count; ++i) {
            if (idx[i] == idx[i - 1]) return;
        }
        std::array<double, 3> p{};
        if (!solve(idx, count, p)) return;
        consider(idx, count, p);
    }

    bool found() const { return found_; }

    GridSolution result(MomentSense sense, std::size_t m) const {
        GridSolution out;
        out.grid_size = m;
        if (!found_) return out;
        out.status = GridStatus::optimal;
        out.value = sense == MomentSense::max_mgf ? best_value_ : -best_value_;
        for (std::size_t i = 0; i < best_count_; ++i) {
            if (best_p_[i] <= 0.0) continue;
            out.support.push_back({grid_[best_idx_[i]], best_p_[i]});
            out.grid_indices.push_back(best_idx_[i]);
        }
        return out;
    }

private:
    bool solve(const std::array<std::size_t, 3>& idx, std::size_t count, std::array<double, 3>& p) const {
        const double mean = inst_.mean;
        if (count == 1) {
            const std::size_t k = idx[0];
            if (std::abs(grid_[k] - mean) > kConstraintTol || std::abs(expo_[k] - 1.0) > kConstraintTol) return false;
            p[0] = 1.0;
            return true;
        }
        if (count == 2) {
            const double xa = grid_[idx[0]];
            const double xb = grid_[idx[1]];
            p[1] = (mean - xa) / (xb - xa);
            p[0] = 1.0 - p[1];
        } else {
            Eigen::Matrix3d A;
            for (int c = 0; c < 3; ++c) {
                const std::size_t k = idx[static_cast<std::size_t>(c)];
                A(0, c) = 1.0;
                A(1, c) = grid_[k];
                A(2, c) = expo_[k];
            }
            const Eigen::FullPivLU<Eigen::Matrix3d> lu(A);
            if (!lu.isInvertible()) return false;
            const Eigen::Vector3d sol = lu.solve(Eigen::Vector3d(1.0, mean, 1.0));
            for (int c = 0; c < 3; ++c) p[static_cast<std::size_t>(c)] = sol(c);
        }
        for (std::size_t i = 0; i < count; ++i) {
            if (!(p[i] >= -kNegativeMassTol)) return false;
            p[i] = std::max(p[i], 0.0);
        }
        double mass = 0.0, first = 0.0, expo = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            mass += p[i];
            first += p[i] * grid_[idx[i]];
            expo += p[i] * expo_[idx[i]];
        }
        return std::abs(mass - 1.0) <= kConstraintTol && std::abs(first - mean) <= kConstraintTol &&
               std::abs(expo - 1.0) <= kConstraintTol;
    }

    void consider(const std::array<std::size_t, 3>& idx, std::size_t count, const std::array<double, 3>& p) {
        double value = 0.0;
        for (std::size_t i = 0; i < count; ++i) value += p[i] * half_[idx[i]];
        // Ties go to the lexicographically smallest support.
        bool better = !found_ || value > best_value_;
        if (found_ && value == best_value_) {
            better = std::lexicographical_compare(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count),
                                                  best_idx_.begin(),
                                                  best_idx_.begin() + static_cast<std::ptrdiff_t>(best_count_));
        }
        if (!better) return;
        found_ = true;
        best_value_ = value;
        best_idx_ = idx;
        best_p_ = p;
        best_count_ = count;
    }

    const MomentInstance& inst_;
    std::span<const double> grid_;
    std::vector<double> expo_;
    std::vector<double> half_;
    bool found_ = false;
    double best_value_ = 0.0;
    std::array<std::size_t, 3> best_idx_{};
    std::array<double, 3> best_p_{};
    std::size_t best_count_ = 0;
};

std::optional<GridSolution> boundary_solution(const MomentInstance& inst, std::size_t m, MomentSense sense) {
    const double V = inst.support_bound;
    const double a_over_n = -inst.mean / V;
    if (!(a_over_n > 0.0)) return std::nullopt;
    if (std::abs(a_over_n - feasible_mean_bound(inst.eta * V)) > kBoundaryTol) return std::nullopt;
    // On the boundary of the moment hull the only feasible measure sits on +/-V.
    GridSolution out;
    out.status = GridStatus::optimal;
    out.grid_size = m;
    const double p_hi = (V + inst.mean) / (2.0 * V);
    const double p_lo = 1.0 - p_hi;
    const double value = p_lo * std::exp(-0.5 * inst.eta * V) + p_hi * std::exp(0.5 * inst.eta * V);
    out.value = sense == MomentSense::max_mgf ? value : -value;
    if (p_lo > 0.0) {
        out.support.push_back({-V, p_lo});
        out.grid_indices.push_back(0);
    }
    if (p_hi > 0.0) {
        out.support.push_back({V, p_hi});
        out.grid_indices.push_back(m - 1);
    }
    return out;
}

}  // namespace

double feasible_mean_bound(double eta) {
    if (!(eta > 0.0)) throw PreconditionError("feasible mean bound requires eta > 0");
    return std::tanh(0.5 * eta);
}

std::string_view to_string(MomentSense sense) {
    return sense == MomentSense::max_mgf ? "max_mgf" : "min_h";
}

std::string_view to_string(GridStatus status) {
    return status == GridStatus::optimal ? "optimal" : "infeasible";
}

std::vector<double> moment_grid(double support_bound, std::size_t m) {
    if (m < 2) throw PreconditionError("grid needs at least 2 points");
    std::vector<double> grid(m);
    const double denom = static_cast<double>(m - 1);
    for (std::size_t k = 0; k < m; ++k) {
        grid[k] = support_bound * ((2.0 * static_cast<double>(k) - denom) / denom);
    }
    return grid;
}

GridSolution grid_lp_solve(const MomentInstance& instance, std::size_t m, MomentSense sense) {
    check_instance(instance, m);
    if (auto boundary = boundary_solution(instance, m, sense)) return *boundary;

    const auto grid = moment_grid(instance.support_bound, m);
    BestSupport best(instance, grid);
    const std::size_t last = m - 1;
    best.offer({0});
    best.offer({last});
    best.offer({0, last});
    for (std::size_t j = 1; j < last; ++j) {
        best.offer({j});
        best.offer({0, j});
        best.offer({j, last});
        best.offer({j, j + 1});
        best.offer({0, j, last});
        best.offer({0, j, j + 1});
        if (j + 1 < last) best.offer({j, j + 1, last});
    }
    return best.result(sense, m);
}

GridSolution grid_lp_solve_bruteforce(const MomentInstance& instance, std::size_t m, MomentSense sense) {
    check_instance(instance, m);
    const auto grid = moment_grid(instance.support_bound, m);
    BestSupport best(instance, grid);
    for (std::size_t i = 0; i < m; ++i) {
        best.offer({i});
        for (std::size_t j = i + 1; j < m; ++j) {
            best.offer({i, j});
            for (std::size_t k = j + 1; k < m; ++k) best.offer({i, j, k});
        }
    }
    return best.result(sense, m);
}

GridSolution grid_lp_solve_simplex(const MomentInstance& instance, std::size_t m, MomentSense sense) {
    check_instance(instance, m);
    const auto grid = moment_grid(instance.support_bound, m);
    const auto cols = static_cast<Eigen::Index>(m);
    // Columns are scaled by 1 / max(1, e^{eta x}) so every entry lies in [-V, 1]; the
    // variables become q_k = p_k max(1, e^{eta x_k}).
    Eigen::MatrixXd A(3, cols);
    Eigen::VectorXd c(cols);
    Eigen::VectorXd scale(cols);
    for (Eigen::Index k = 0; k < cols; ++k) {
        const double x = grid[static_cast<std::size_t>(k)];
        const double ex = instance.eta * x;
        const double inv = ex > 0.0 ? std::exp(-ex) : 1.0;
        scale(k) = inv;
        A(0, k) = inv;
        A(1, k) = x * inv;
        A(2, k) = ex > 0.0 ? 1.0 : std::exp(ex);
        c(k) = ex > 0.0 ? std::exp(-0.5 * ex) : std::exp(0.5 * ex);
    }
    const auto lp_result = lp::maximize(c, A, Eigen::Vector3d(1.0, instance.mean, 1.0));
    GridSolution out;
    out.grid_size = m;
    if (lp_result.status != lp::LpStatus::optimal) return out;
    out.status = GridStatus::optimal;
    out.value = sense == MomentSense::max_mgf ? lp_result.value : -lp_result.value;
    for (Eigen::Index k = 0; k < cols; ++k) {
        if (lp_result.x(k) > 0.0) {
            out.support.push_back({grid[static_cast<std::size_t>(k)], lp_result.x(k) * scale(k)});
            out.grid_indices.push_back(static_cast<std::size_t>(k));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

double DualCertificate::objective_bound(double eta, double a_over_n) const {
    return c0 + c2 - eta * c1 * a_over_n;
}

DualCertificate dual_certificate(double eta) {
    if (!(eta > 0.0)) throw PreconditionError("dual certificate requires eta > 0");
    DualCertificate cert;
    if (eta <= 1.0) {
        cert.c2 = kSmallEtaC2;
        cert.c1 = 0.5 - cert.c2;
    } else {
        const double alpha = large_eta_alpha();
        cert.c1 = alpha / eta;
        cert.c2 = 0.5 - cert.c1;
    }
    cert.c0 = 1.0 - cert.c2;
    return cert;
}

double certificate_u(const DualCertificate& cert, double eta, double x) {
    const double ex = eta * x;
    if (ex > 700.0) {
        // u = e^{eta x} (c2 - e^{-eta x/2} + (c0 + eta c1 x) e^{-eta x}); only the sign survives.
        const double bracket = cert.c2 - std::exp(-0.5 * ex) + (cert.c0 + eta * cert.c1 * x) * std::exp(-ex);
        if (bracket > 0.0) return std::numeric_limits<double>::infinity();
        if (bracket < 0.0) return -std::numeric_limits<double>::infinity();
        return 0.0;
    }
    return (cert.c0 + cert.c2 - 1.0) + cert.c2 * std::expm1(ex) - std::expm1(0.5 * ex) + eta * cert.c1 * x;
}

CertificateCheck verify_certificate(const DualCertificate& cert, double eta, std::size_t grid_m) {
    if (!(eta > 0.0)) throw PreconditionError("certificate check requires eta > 0");
    if (grid_m < 1000) throw PreconditionError("certificate check requires a grid of at least 1000 points");
    CertificateCheck out;
    const auto grid = moment_grid(1.0, grid_m);
    out.min_value = std::numeric_limits<double>::infinity();
    for (double x : grid) {
        const double u = certificate_u(cert, eta, x);
        if (u < out.min_value) {
            out.min_value = u;
            out.argmin = x;
        }
    }
    out.u_at_minus_1 = certificate_u(cert, eta, -1.0);
    out.u_at_0 = certificate_u(cert, eta, 0.0);
    out.du_at_0 = eta * (cert.c2 - 0.5 + cert.c1);
    out.d2u_at_0 = eta * eta * (cert.c2 - 0.25);
    out.valid = out.min_value >= -kCertificateTol;
    return out;
}

CertificateBound certificate_bound(double eta, double a_over_n) {
    if (!(eta > 0.0)) throw PreconditionError("concentration bound requires eta > 0");
    if (!(a_over_n > 0.0)) throw PreconditionError("concentration bound requires a/n > 0");
    const double limit = feasible_mean_bound(eta);
    if (!(a_over_n < limit)) {
        throw PreconditionError("concentration bound requires the strict interior condition a/n < (cosh eta - 1)/sinh eta = " +
                                std::to_string(limit) + "; boundary and infeasible means are excluded");
    }
    CertificateBound out;
    out.combined = 1.0 - kSmallEtaRate * std::min(eta, 1.0) * a_over_n;
    if (eta > 1.0) out.large_eta = 1.0 - kLargeEtaRate * a_over_n;
    return out;
}

MomentInstance scale_instance(const MomentInstance& instance) {
    if (!(instance.support_bound > 0.0)) throw PreconditionError("scaling requires V > 0");
    const double V = instance.support_bound;
    return {instance.eta * V, instance.mean / V, 1.0};
}

MomentInstance unscale_instance(const MomentInstance& unit, double support_bound) {
    if (!(support_bound > 0.0)) throw PreconditionError("scaling requires V > 0");
    return {unit.eta / support_bound, unit.mean * support_bound, support_bound};
}

}  // namespace mixlab
