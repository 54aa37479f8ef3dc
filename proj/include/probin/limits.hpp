#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "probin/domain.hpp"
#include "probin/eigensolver.hpp"
#include "probin/robin_field.hpp"

namespace probin {

/// A scan over one parameter (p or ε) with its observable and extra columns.
struct LimitScanResult {
    std::string parameter_name;
    std::vector<double> parameter;
    std::string observable_name;
    std::vector<double> observable;
    std::vector<std::pair<std::string, std::vector<double>>> auxiliary;
    /// Least-squares log–log slope, when the scan fits one.
    std::optional<double> rate;
    /// Number of points that entered the rate fit.
    int rate_points = 0;
    /// Largest |observable[i+1] − observable[i]|; empty for a single point.
    std::optional<double> max_jump;
    /// Largest ratio of an adjacent jump to the jump predicted from its
    /// neighbouring intervals; empty when no interval has two neighbours' data.
    std::optional<double> max_jump_ratio;

    const std::vector<double>& column(const std::string& name) const;
};

/// Face-wise h = ρ^{-(p-1)}.
RobinField effective_h(const ThicknessProfile& rho, double p);

struct CoatingSweepSettings {
    int layer_cells = 8;
    /// Gaps below this multiple of the solver tolerance are left out of the rate fit.
    double tolerance_factor = 10.0;
    int threads = 1;
    EigenSolveSettings solver;
};

/// Λ₁(ε) of the coated problem for each ε (strictly decreasing, positive) and
/// μ₁ of the Robin problem with h = effective_h(ρ, p). Columns: Lambda1,
/// coating_mass, mu1, abs_gap; rate is the slope of log|Λ₁ − μ₁| vs log ε.
LimitScanResult coating_sweep(const DiscreteDomain& base, const ThicknessProfile& rho, double p,
                              const std::vector<double>& epsilons, const CoatingSweepSettings& settings = {});

/// sup_ρ |ρ^{-(p-1)} − 1| for each p of a grid in (1, 2] decreasing to 1.
LimitScanResult p_limit_scan_one(const std::vector<double>& rho_values, const std::vector<double>& p_grid);

enum class InfinityLimit { Neumann, Unit, Dirichlet };
std::string to_string(InfinityLimit kind);

/// Trend of ρ^{-(p-1)} along an increasing grid: → 0, ≡ 1 or → ∞.
InfinityLimit p_limit_classify_inf(double rho_value, const std::vector<double>& p_grid);

/// λ₁(p) over a strictly monotone grid with jump diagnostics. A jump counts
/// as anomalous when it exceeds 5 times the jump predicted from the slopes of
/// the neighbouring intervals.
LimitScanResult p_continuity_scan(const DiscreteDomain& domain, const RobinField& h, const std::vector<double>& p_grid,
                                  const EigenSolveSettings& settings = {}, int threads = 1);
constexpr double kJumpAnomalyFactor = 5.0;

/// max{‖∇u‖_∞, ‖u‖_{L∞(γ)}} after rescaling u to sup norm 1.
double linf_rayleigh_eval(const DiscreteDomain& domain, const Vector& u);

/// Brute force over piecewise-linear profiles on the unit interval with
/// Γ_D = {0}, γ = {1}: u rises linearly to `height` at `knee` and then
/// linearly to its value at 1. Returns (value, knee, height) of the minimum.
struct KneeScan {
    double value = 0.0;
    double knee = 0.0;
    double height = 0.0;
    double end_value = 0.0;
};
KneeScan linf_knee_scan(const DiscreteDomain& interval, const std::vector<double>& knees,
                        const std::vector<double>& heights);

/// A 1D profile on [breaks.front(), breaks.back()] that is linear on each
/// segment, from left_values[i] to right_values[i], with jumps allowed at the
/// breakpoints.
struct BVProfile {
    std::vector<double> breaks;
    std::vector<double> left_values;
    std::vector<double> right_values;

    static BVProfile step(double a);
    static BVProfile linear(double slope);
};

/// (|Du|(0,1) + Σ_γ |u|) / ∫|u| on the unit interval. Each end is either
/// Dirichlet (the jump to the zero trace counts in |Du|) or Robin with h = 1
/// (the trace counts); both add |u(end)|, so the split need not be given.
double bv_quotient_eval(const BVProfile& candidate);

/// Minimum of bv_quotient_eval over step candidates 1_{(a,1]} for a in the grid.
std::pair<double, double> bv_step_minimum(const std::vector<double>& a_grid);

}  // namespace probin
