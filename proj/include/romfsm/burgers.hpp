#pragma once

#include "romfsm/compact_fd.hpp"
#include "romfsm/types.hpp"

namespace romfsm {

struct BurgersConfig {
    double re = 0.0;
    double dt = 0.0;
    double t_final = 0.0;
    int snapshot_stride = 1;

    long total_steps() const;
    void validate() const;
};

/// Term toggles used by tests (heat-part decay checks and the like).
struct BurgersTerms {
    bool advection = true;
    bool viscous = true;
};

/// Square wave: u = 1 on (0, L/2], u = 0 elsewhere (both endpoints Dirichlet 0).
Field1D initial_square_wave(const Grid1D& grid);

/// Skew-symmetric Burgers right-hand side,
///   -1/2 (u u_x + (u^2/2)_x) + (1/Re) u_xx,
/// with the Dirichlet boundary rows zeroed.
Vec burgers_rhs(const Field1D& f, const BurgersConfig& cfg, const Grid1D& grid,
                const CompactDerivatives& d, BurgersTerms terms = {});
Vec burgers_rhs(const Field1D& f, const BurgersConfig& cfg, const Grid1D& grid);

/// RK4 integration from the square wave, re-imposing the Dirichlet values
/// after every stage. Stores a snapshot every snapshot_stride steps; the
/// initial state is kept outside the snapshot matrix.
/// Throws NumericalError (with the step index) if the field blows up.
SnapshotSet run_fom_burgers(const BurgersConfig& cfg, const Grid1D& grid);

}  // namespace romfsm
