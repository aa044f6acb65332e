#pragma once

#include "romfsm/pod.hpp"
#include "romfsm/types.hpp"

#include <vector>

namespace romfsm {

/// Scalar (global) or per-mode eddy viscosity.
struct EddyViscosity {
    enum class Mode { global, per_mode };
    Mode mode = Mode::global;
    Vec values;  // length 1 (global) or R (per_mode)

    static EddyViscosity global_value(double v);
    static EddyViscosity per_mode_values(Vec v);
    static EddyViscosity zero(Mode mode, int r);

    double at(int k) const { return mode == Mode::global ? values(0) : values(k); }
    int dim() const { return static_cast<int>(values.size()); }
    void validate(int r) const;
};

/// Precomputed Galerkin tensors. The eddy-viscosity-multiplied operators
/// (b_hat, l_hat) are stored separately so the closure parameter can change
/// between assimilation iterations without rebuilding.
struct GromModel {
    Vec b;                // constant term, length R
    Mat l;                // l(i, k): coefficient of a_i in da_k/dt
    std::vector<Mat> n3;  // n3[k](i, j): coefficient of a_i a_j in da_k/dt
    Vec b_hat;
    Mat l_hat;            // l_hat(i, k)
    double nu = 0.0;      // physical viscosity 1/Re
    int r = 0;
    std::uint64_t basis_hash = 0;
    std::uint64_t grid_hash = 0;

    void validate() const;
};

struct RomTrajectory {
    Mat coefficients;  // (steps+1) x R, row 0 = initial coefficients
    Vec times;
    double dt = 0.0;
    bool blew_up = false;
    long blowup_step = -1;  // first step whose result was non-finite
};

/// Galerkin tensors for the Burgers basis, evaluated with the same compact
/// derivative operators used by the full-order solver.
GromModel build_grom_burgers(const PodBasis& basis, const Grid1D& grid, double re);

struct VorticityOperatorOptions {
    int arakawa_order = 4;       // 2 or 4
    bool spectral_laplacian = true;
};

/// Galerkin tensors for the vorticity basis (requires streamfunction
/// companions), via the Arakawa Jacobian and the chosen Laplacian.
GromModel build_grom_vorticity(const PodBasis& basis, const Grid2D& grid, double re,
                               VorticityOperatorOptions opts = {});

/// f_k = b_k + nu_k b_hat_k + sum_i (l_{i,k} + nu_k l_hat_{i,k}) a_i
///       + sum_{i,j} n3_{i,j,k} a_i a_j.
Vec grom_rhs(const GromModel& model, const Vec& a, const EddyViscosity& nu_e);

/// RK4 trajectory from a0. A non-finite state is not an error: the
/// trajectory is flagged (blew_up, blowup_step) and integration stops there.
RomTrajectory integrate_grom(const GromModel& model, const Vec& a0,
                             const EddyViscosity& nu_e, double dt, long steps,
                             double t0 = 0.0);

}  // namespace romfsm
