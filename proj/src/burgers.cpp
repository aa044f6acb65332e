#include "romfsm/burgers.hpp"

#include <cmath>
#include <string>

namespace romfsm {

long BurgersConfig::total_steps() const { return std::llround(t_final / dt); }

void BurgersConfig::validate() const {
    if (!(re > 0.0)) throw ConfigError("BurgersConfig: re must be positive");
    if (!(dt > 0.0)) throw ConfigError("BurgersConfig: dt must be positive");
    if (!(t_final > 0.0)) throw ConfigError("BurgersConfig: t_final must be positive");
    if (snapshot_stride < 1) throw ConfigError("BurgersConfig: snapshot_stride must be >= 1");
    const long steps = total_steps();
    if (std::abs(steps * dt - t_final) > dt * (1.0 + 1e-9))
        throw ConfigError("BurgersConfig: dt does not reproduce t_final within one step");
    if (steps % snapshot_stride != 0)
        throw ConfigError("BurgersConfig: snapshot_stride must divide the total step count");
}

Field1D initial_square_wave(const Grid1D& grid) {
    Field1D f;
    f.values = Vec::Zero(grid.n);
    f.time = 0.0;
    const double half = 0.5 * grid.length;
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.x(i);
        if (x > 0.0 && x <= half) f.values(i) = 1.0;
    }
    f.values(0) = 0.0;
    f.values(grid.n - 1) = 0.0;
    return f;
}

Vec burgers_rhs(const Field1D& f, const BurgersConfig& cfg, const Grid1D& grid,
                const CompactDerivatives& d, BurgersTerms terms) {
    if (f.values.size() != grid.n) throw ConfigError("burgers_rhs: field length mismatch");
    Vec rhs = Vec::Zero(grid.n);
    if (terms.advection) {
        const Vec ux = d.first(f.values);
        const Vec half_sq = 0.5 * f.values.array().square().matrix();
        const Vec flux_x = d.first(half_sq);
        rhs -= 0.5 * (f.values.cwiseProduct(ux) + flux_x);
    }
    if (terms.viscous) rhs += (1.0 / cfg.re) * d.second(f.values);
    rhs(0) = 0.0;
    rhs(grid.n - 1) = 0.0;
    return rhs;
}

Vec burgers_rhs(const Field1D& f, const BurgersConfig& cfg, const Grid1D& grid) {
    CompactDerivatives d(grid);
    return burgers_rhs(f, cfg, grid, d);
}

namespace {
inline void clamp_dirichlet(Vec& u, int n) {
    u(0) = 0.0;
    u(n - 1) = 0.0;
}
}  // namespace

SnapshotSet run_fom_burgers(const BurgersConfig& cfg, const Grid1D& grid) {
    cfg.validate();
    CompactDerivatives d(grid);

    Field1D state = initial_square_wave(grid);
    const long steps = cfg.total_steps();
    const long stored = steps / cfg.snapshot_stride;

    SnapshotSet out;
    out.grid = grid;
    out.initial = state.values;
    out.initial_time = 0.0;
    out.snap_dt = cfg.snapshot_stride * cfg.dt;
    out.data.resize(grid.n, stored);
    out.times.resize(stored);

    Vec u = state.values;
    Field1D work;
    long col = 0;
    for (long step = 0; step < steps; ++step) {
        work.values = u;
        const Vec k1 = burgers_rhs(work, cfg, grid, d);
        work.values = u + 0.5 * cfg.dt * k1;
        clamp_dirichlet(work.values, grid.n);
        const Vec k2 = burgers_rhs(work, cfg, grid, d);
        work.values = u + 0.5 * cfg.dt * k2;
        clamp_dirichlet(work.values, grid.n);
        const Vec k3 = burgers_rhs(work, cfg, grid, d);
        work.values = u + cfg.dt * k3;
        clamp_dirichlet(work.values, grid.n);
        const Vec k4 = burgers_rhs(work, cfg, grid, d);
        u += (cfg.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        clamp_dirichlet(u, grid.n);

        if ((step + 1) % cfg.snapshot_stride == 0) {
            if (!u.allFinite())
                throw NumericalError("burgers FOM blew up at step " + std::to_string(step + 1),
                                     step + 1);
            out.data.col(col) = u;
            out.times(col) = (step + 1) * cfg.dt;
            ++col;
        }
    }
    out.validate();
    return out;
}

}  // namespace romfsm
