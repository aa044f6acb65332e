#pragma once

#include "romfsm/grom.hpp"
#include "romfsm/observations.hpp"
#include "romfsm/types.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace romfsm {

/// Exact Jacobians of one RK4 step: d_a = dM/da (R x R), d_nu = dM/dnu_e (R x p).
struct DiscreteMapJacobians {
    Mat d_a;
    Mat d_nu;
};

struct SensitivityState {
    Mat v;                   // R x p, da^k/dnu_e
    std::optional<Mat> u;    // R x R, da^k/da^0 when tracked

    static SensitivityState initial(int r, int p, bool track_initial_condition);
};

struct AssimilationConfig {
    double window = 0.0;  // T_w
    Vec obs_times;
    int max_iter = 50;
    double tol = 1e-6;
    EddyViscosity::Mode mode = EddyViscosity::Mode::global;
    bool include_initial_condition = false;

    void validate() const;
};

struct AssimilationResult {
    EddyViscosity nu_e;
    int iterations = 0;
    std::vector<double> delta_history;         // ||delta nu||_inf per iteration
    std::vector<double> forecast_error_norms;  // ||stacked e_F||_2 per iteration
    bool converged = false;
    Vec a0;  // initial coefficients (corrected when the IC is in the control)
    std::vector<std::string> notes;
};

/// Jacobians of the continuous right-hand side:
///   df_k/da_j   = l(j,k) + nu_k l_hat(j,k) + sum_i (n3(i,j,k) + n3(j,i,k)) a_i
///   df_k/dnu_k  = b_hat_k + sum_i l_hat(i,k) a_i    (one column per mode in
///                 per-mode form; zero across modes)
std::pair<Mat, Mat> continuous_jacobians(const GromModel& model, const Vec& a,
                                         const EddyViscosity& nu_e);

/// One RK4 step a^{k+1} = M(a^k, nu_e) together with the exact Jacobians of
/// the discrete map, via the staged chain rule.
std::pair<Vec, DiscreteMapJacobians> rk4_step_with_jacobians(const GromModel& model,
                                                             const Vec& a,
                                                             const EddyViscosity& nu_e,
                                                             double dt);

/// V <- d_a V + d_nu; U <- d_a U (when tracked).
void propagate_sensitivities(SensitivityState& state, const DiscreteMapJacobians& jac);

/// Stacks the per-observation blocks and solves H delta = e in the weighted
/// least-squares sense with R = sigma^2 I (overdetermined: normal-equations
/// solution; underdetermined: minimum-norm solution). sigma <= 0 means
/// unweighted. Throws NumericalError when the stacked system is rank
/// deficient (unidentifiable parameter).
Vec assemble_and_solve(const std::vector<Mat>& h_blocks, const std::vector<Vec>& e_blocks,
                       double sigma);

/// Outer iteration: integrate with the current nu_e while propagating V,
/// collect forecast errors and H2 = D(h) V at the observation times, solve
/// for delta nu_e, update, and stop once ||delta||_inf <= tol. A trajectory
/// that goes non-finite marks the iteration failed; the previous update is
/// halved and retried once before the result is flagged non-converged.
AssimilationResult estimate_eddy_viscosity(const GromModel& model, const Vec& a0,
                                           const ObservationSet& obs,
                                           const ObservationOperator& op,
                                           const AssimilationConfig& cfg,
                                           const EddyViscosity& nu0, double dt);

void write_assimilation_report(const AssimilationResult& result, const std::string& txt_path,
                               const std::string& csv_path);

}  // namespace romfsm
