#include "romfsm/grom.hpp"

#include "romfsm/arakawa.hpp"
#include "romfsm/compact_fd.hpp"
#include "romfsm/hashing.hpp"
#include "romfsm/spectral.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace romfsm {

EddyViscosity EddyViscosity::global_value(double v) {
    EddyViscosity e;
    e.mode = Mode::global;
    e.values = Vec::Constant(1, v);
    return e;
}

EddyViscosity EddyViscosity::per_mode_values(Vec v) {
    EddyViscosity e;
    e.mode = Mode::per_mode;
    e.values = std::move(v);
    return e;
}

EddyViscosity EddyViscosity::zero(Mode mode, int r) {
    return mode == Mode::global ? global_value(0.0) : per_mode_values(Vec::Zero(r));
}

void EddyViscosity::validate(int r) const {
    const int expected = mode == Mode::global ? 1 : r;
    if (values.size() != expected)
        throw ConfigError("EddyViscosity: expected " + std::to_string(expected) +
                          " values, got " + std::to_string(values.size()));
    if (!values.allFinite()) throw ConfigError("EddyViscosity: non-finite value");
}

void GromModel::validate() const {
    if (r < 1) throw ConfigError("GromModel: empty model");
    if (b.size() != r || b_hat.size() != r || l.rows() != r || l.cols() != r ||
        l_hat.rows() != r || l_hat.cols() != r || static_cast<int>(n3.size()) != r)
        throw ConfigError("GromModel: inconsistent tensor dimensions");
    for (const auto& nk : n3)
        if (nk.rows() != r || nk.cols() != r)
            throw ConfigError("GromModel: inconsistent quadratic tensor");
}

namespace {

std::uint64_t basis_content_hash(const PodBasis& basis) {
    Fnv1a h;
    h.add("basis").add(basis.mean).add(basis.modes).add(basis.r);
    return h.value();
}

}  // namespace

GromModel build_grom_burgers(const PodBasis& basis, const Grid1D& grid, double re) {
    if (basis.mean.size() != grid.n)
        throw ConfigError("build_grom_burgers: basis/grid dimension mismatch");
    if (!(re > 0.0)) throw ConfigError("build_grom_burgers: re must be positive");

    const int r = basis.r;
    const Mat& phi = basis.modes;
    const CompactDerivatives d(grid);
    const double nu = 1.0 / re;

    const Vec ubar_x = d.first(basis.mean);
    const Vec ubar_xx = d.second(basis.mean);
    Mat phi_x(grid.n, r), phi_xx(grid.n, r);
    for (int i = 0; i < r; ++i) {
        phi_x.col(i) = d.first(phi.col(i));
        phi_xx.col(i) = d.second(phi.col(i));
    }

    GromModel m;
    m.r = r;
    m.nu = nu;
    m.basis_hash = basis_content_hash(basis);
    m.grid_hash = grid_hash(GridMeta{grid});

    m.b = phi.transpose() *
          (-basis.mean.cwiseProduct(ubar_x) + nu * ubar_xx).eval();
    m.b_hat = phi.transpose() * ubar_xx;

    m.l.resize(r, r);
    for (int i = 0; i < r; ++i) {
        const Vec integrand = -basis.mean.cwiseProduct(phi_x.col(i)) -
                              phi.col(i).cwiseProduct(ubar_x) + nu * phi_xx.col(i);
        m.l.row(i) = (phi.transpose() * integrand).transpose();
    }
    m.l_hat = (phi.transpose() * phi_xx).transpose();

    m.n3.assign(r, Mat(r, r));
    Mat scaled(grid.n, r);
    for (int i = 0; i < r; ++i) {
        scaled = -(phi_x.array().colwise() * phi.col(i).array()).matrix();
        const Mat block = phi.transpose() * scaled;  // (k, j)
        for (int k = 0; k < r; ++k) m.n3[k].row(i) = block.row(k);
    }
    m.validate();
    return m;
}

GromModel build_grom_vorticity(const PodBasis& basis, const Grid2D& grid, double re,
                               VorticityOperatorOptions opts) {
    if (!basis.has_companions())
        throw ConfigError("build_grom_vorticity: streamfunction companions missing");
    if (basis.mean.size() != grid.size())
        throw ConfigError("build_grom_vorticity: basis/grid dimension mismatch");
    if (!(re > 0.0)) throw ConfigError("build_grom_vorticity: re must be positive");

    const int r = basis.r;
    const Mat& phi = basis.modes;
    const Mat& theta = *basis.companion_modes;
    const double nu = 1.0 / re;
    const Fft2D fft(grid);
    const ArakawaOrder order = opts.arakawa_order == 2 ? ArakawaOrder::second : ArakawaOrder::fourth;

    auto as_field = [&](const Vec& flat) {
        Field2D f;
        f.values = Eigen::Map<const RowMat>(flat.data(), grid.nx, grid.ny);
        return f;
    };
    auto flat = [&](const Field2D& f) {
        return Vec(Eigen::Map<const Vec>(f.values.data(), grid.size()));
    };
    auto lap = [&](const Vec& v) {
        const Field2D f = as_field(v);
        return flat(opts.spectral_laplacian ? laplacian_spectral(f, grid, fft)
                                            : laplacian_fd5(f, grid));
    };
    auto jac = [&](const Vec& a, const Vec& b) {
        return flat(arakawa_jacobian(as_field(a), as_field(b), grid, order));
    };

    const Vec& wbar = basis.mean;
    const Vec& psibar = *basis.companion_mean;
    const Vec lap_wbar = lap(wbar);
    Mat lap_phi(grid.size(), r);
    for (int i = 0; i < r; ++i) lap_phi.col(i) = lap(phi.col(i));

    GromModel m;
    m.r = r;
    m.nu = nu;
    m.basis_hash = basis_content_hash(basis);
    m.grid_hash = grid_hash(GridMeta{grid});

    m.b = phi.transpose() * (-jac(wbar, psibar) + nu * lap_wbar).eval();
    m.b_hat = phi.transpose() * lap_wbar;

    m.l.resize(r, r);
    for (int i = 0; i < r; ++i) {
        const Vec integrand =
            -jac(wbar, theta.col(i)) - jac(phi.col(i), psibar) + nu * lap_phi.col(i);
        m.l.row(i) = (phi.transpose() * integrand).transpose();
    }
    m.l_hat = (phi.transpose() * lap_phi).transpose();

    m.n3.assign(r, Mat(r, r));
    Mat stacked(grid.size(), r);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) stacked.col(j) = -jac(phi.col(i), theta.col(j));
        const Mat block = phi.transpose() * stacked;  // (k, j)
        for (int k = 0; k < r; ++k) m.n3[k].row(i) = block.row(k);
    }
    m.validate();
    return m;
}

Vec grom_rhs(const GromModel& model, const Vec& a, const EddyViscosity& nu_e) {
    if (a.size() != model.r) throw ConfigError("grom_rhs: coefficient length mismatch");
    nu_e.validate(model.r);

    Vec f = model.b + model.l.transpose() * a;
    const Vec closure = model.b_hat + model.l_hat.transpose() * a;
    if (nu_e.mode == EddyViscosity::Mode::global)
        f += nu_e.values(0) * closure;
    else
        f += nu_e.values.cwiseProduct(closure);
    for (int k = 0; k < model.r; ++k) f(k) += a.dot(model.n3[k] * a);
    return f;
}

RomTrajectory integrate_grom(const GromModel& model, const Vec& a0, const EddyViscosity& nu_e,
                             double dt, long steps, double t0) {
    if (!(dt > 0.0)) throw ConfigError("integrate_grom: dt must be positive");
    if (steps < 0) throw ConfigError("integrate_grom: negative step count");
    if (a0.size() != model.r) throw ConfigError("integrate_grom: initial coefficient mismatch");

    RomTrajectory traj;
    traj.dt = dt;
    traj.coefficients = Mat::Constant(steps + 1, model.r,
                                      std::numeric_limits<double>::quiet_NaN());
    traj.times.resize(steps + 1);
    for (long k = 0; k <= steps; ++k) traj.times(k) = t0 + k * dt;
    traj.coefficients.row(0) = a0.transpose();

    Vec a = a0;
    for (long k = 0; k < steps; ++k) {
        const Vec g1 = grom_rhs(model, a, nu_e);
        const Vec g2 = grom_rhs(model, a + 0.5 * dt * g1, nu_e);
        const Vec g3 = grom_rhs(model, a + 0.5 * dt * g2, nu_e);
        const Vec g4 = grom_rhs(model, a + dt * g3, nu_e);
        a += (dt / 6.0) * (g1 + 2.0 * g2 + 2.0 * g3 + g4);
        if (!a.allFinite()) {
            // Expected for unclosed stiff models; surfaced as a flag, not an error.
            traj.blew_up = true;
            traj.blowup_step = k + 1;
            break;
        }
        traj.coefficients.row(k + 1) = a.transpose();
    }
    return traj;
}

}  // namespace romfsm
