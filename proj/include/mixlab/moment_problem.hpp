#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace mixlab {

/// Moment problem over probability measures on [-V, V]:
///   E X = mean,  E exp(eta X) = 1,  extremize E exp(eta X / 2).
struct MomentInstance {
    double eta = 1.0;
    double mean = 0.0;  // -a/n
    double support_bound = 1.0;
};

/// Largest a/n for which (-a/n, 1) lies in the moment hull, at V = 1:
/// (cosh eta - 1) / sinh eta, which equals tanh(eta / 2).
double feasible_mean_bound(double eta);

/// `max_mgf` maximizes E exp(eta X / 2); `min_h` minimizes E[-exp(eta X / 2)].
/// Both share the optimal measure and differ only in the sign of the value.
enum class MomentSense { min_h, max_mgf };

enum class GridStatus { optimal, infeasible };

std::string_view to_string(MomentSense sense);
std::string_view to_string(GridStatus status);

struct SupportPoint {
    double x = 0.0;
    double p = 0.0;
};

struct GridSolution {
    GridStatus status = GridStatus::infeasible;
    double value = 0.0;                 // objective of the requested sense
    std::vector<SupportPoint> support;  // at most three atoms, ascending x
    std::vector<std::size_t> grid_indices;
    std::size_t grid_size = 0;
};

/// Uniform grid of m points on [-V, V] including both endpoints.
std::vector<double> moment_grid(double support_bound, std::size_t m);

/// Grid LP via enumeration of the basic solutions that can be optimal. The
/// reduced cost e^{eta x/2} - d0 - d1 x - d2 e^{eta x} has a derivative that is
/// quadratic in e^{eta x/2}, so an optimal basis touches at most the two
/// endpoints and one adjacent pair of interior grid points; all such supports
/// (and their pairs/singletons) are solved exactly. O(m).
GridSolution grid_lp_solve(const MomentInstance& instance, std::size_t m, MomentSense sense);

/// Reference enumeration of every grid triple, pair and singleton. O(m^3).
GridSolution grid_lp_solve_bruteforce(const MomentInstance& instance, std::size_t m, MomentSense sense);

/// Same grid LP solved by the dense revised simplex (cross-check path).
GridSolution grid_lp_solve_simplex(const MomentInstance& instance, std::size_t m, MomentSense sense);

/// Coefficients of u(x) = c0 + c2 e^{eta x} + eta c1 x - e^{eta x / 2} >= 0 on [-1, 1].
struct DualCertificate {
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;

    /// Multipliers (d0, d1, d2) = (-c0, -eta c1, -c2) of the dual program.
    struct Multipliers {
        double d0, d1, d2;
    };
    Multipliers multipliers(double eta) const { return {-c0, -eta * c1, -c2}; }

    /// Upper bound on sup E exp(eta X / 2) implied by weak duality at mean -a_over_n:
    /// -(d0 - a/n d1 + d2) = c0 + c2 - eta c1 a/n.
    double objective_bound(double eta, double a_over_n) const;
};

/// c2 = 0.32 for eta <= 1; c2 = 1/2 - alpha/eta with alpha = (sqrt(e) - 1)^2 / 2 above.
DualCertificate dual_certificate(double eta);

/// u(x) evaluated without overflow for large eta * x (returns +/-inf when the
/// true value exceeds the double range).
double certificate_u(const DualCertificate& cert, double eta, double x);

struct CertificateCheck {
    double min_value = 0.0;     // minimum of u over the grid on [-1, 1]
    double argmin = 0.0;
    double u_at_minus_1 = 0.0;  // the binding point of the construction
    double u_at_0 = 0.0;
    double du_at_0 = 0.0;
    double d2u_at_0 = 0.0;
    bool valid = false;         // min_value >= -1e-9
};

CertificateCheck verify_certificate(const DualCertificate& cert, double eta, std::size_t grid_m);

struct CertificateBound {
    double combined = 0.0;               // 1 - 0.18 min(eta, 1) a/n
    std::optional<double> large_eta;     // 1 - 0.21 a/n, only for eta > 1
};

/// Concentration bound on E exp(eta/2 (-Z)) for a strictly interior mean.
/// Throws PreconditionError on the boundary or outside the feasible region.
CertificateBound certificate_bound(double eta, double a_over_n);

/// Rescale to support [-1, 1]: (V eta, mean / V, 1).
MomentInstance scale_instance(const MomentInstance& instance);
/// Inverse of scale_instance for a target support bound V.
MomentInstance unscale_instance(const MomentInstance& unit, double support_bound);

}  // namespace mixlab
