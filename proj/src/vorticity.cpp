#include "romfsm/vorticity.hpp"

#include "romfsm/rng.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace romfsm {

long VorticityConfig::total_steps() const { return std::llround(t_final / dt); }

void VorticityConfig::validate(const Grid2D& grid) const {
    if (!(re > 0.0)) throw ConfigError("VorticityConfig: re must be positive");
    if (!(dt > 0.0)) throw ConfigError("VorticityConfig: dt must be positive");
    if (!(t_final > 0.0)) throw ConfigError("VorticityConfig: t_final must be positive");
    if (snapshot_stride < 1) throw ConfigError("VorticityConfig: snapshot_stride must be >= 1");
    if (!(kp > 0.0)) throw ConfigError("VorticityConfig: kp must be positive");
    if (!(kp < 0.5 * std::min(grid.nx, grid.ny)))
        throw ConfigError("VorticityConfig: kp must stay below the Nyquist wavenumber");
    const long steps = total_steps();
    if (std::abs(steps * dt - t_final) > dt * (1.0 + 1e-9))
        throw ConfigError("VorticityConfig: dt does not reproduce t_final within one step");
    if (steps % snapshot_stride != 0)
        throw ConfigError("VorticityConfig: snapshot_stride must divide the total step count");
}

double initial_energy_spectrum(double k, double kp) {
    const double ratio = k / kp;
    return (4.0 * std::pow(k, 4)) / (3.0 * std::sqrt(kPi) * std::pow(kp, 5)) *
           std::exp(-ratio * ratio);
}

Field2D initial_spectrum_vorticity(const Grid2D& grid, const VorticityConfig& cfg) {
    const Fft2D fft(grid);
    const int nx = grid.nx, ny = grid.ny, sc = fft.spec_cols();
    std::vector<std::complex<double>> spec(static_cast<std::size_t>(nx) * sc);

    Rng rng(cfg.seed);
    auto mode_magnitude = [&](int i, int j) {
        const double k = std::hypot(fft.kx(i), fft.ky(j));
        if (k <= 0.0) return 0.0;
        return std::sqrt(k * initial_energy_spectrum(k, cfg.kp) / kPi);
    };

    // One phase draw per stored half-spectrum entry, row-major, so the field
    // is reproducible bit for bit under the seed.
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < sc; ++j) {
            const double phase = rng.uniform(0.0, kTwoPi);
            const double mag = mode_magnitude(i, j);
            spec[static_cast<std::size_t>(i) * sc + j] =
                std::polar(mag, phase);
        }
    }

    // Hermitian symmetry on the ky = 0 and ky = Nyquist columns, which the
    // half-spectrum storage does not enforce by itself.
    for (int j : {0, ny / 2}) {
        for (int i = nx / 2 + 1; i < nx; ++i)
            spec[static_cast<std::size_t>(i) * sc + j] =
                std::conj(spec[static_cast<std::size_t>(nx - i) * sc + j]);
        for (int i : {0, nx / 2}) {
            auto& v = spec[static_cast<std::size_t>(i) * sc + j];
            v = {(v.real() >= 0.0 ? 1.0 : -1.0) * std::abs(v), 0.0};
        }
    }
    spec[0] = {0.0, 0.0};

    Field2D w;
    w.time = 0.0;
    fft.backward(spec, w.values);
    w.values.array() -= w.values.mean();  // strips FFT round-off from the DC mode
    return w;
}

namespace {

// Shared-spectrum right-hand side: one forward transform serves both the
// Poisson inverse and the spectral Laplacian.
Field2D rhs_impl(const Field2D& w, const VorticityConfig& cfg, const Grid2D& grid,
                 const Fft2D& fft, VorticityTerms terms) {
    std::vector<std::complex<double>> spec;
    fft.forward(w.values, spec);
    const double scale = 1.0 / (static_cast<double>(grid.nx) * grid.ny);
    if (std::abs(spec[0]) * scale > 1e-8)
        throw NumericalError("vorticity_rhs: nonzero-mean vorticity");

    const int sc = fft.spec_cols();
    std::vector<std::complex<double>> psi_spec(spec.size());
    for (int i = 0; i < grid.nx; ++i) {
        for (int j = 0; j < sc; ++j) {
            const std::size_t idx = static_cast<std::size_t>(i) * sc + j;
            const double k2 = fft.kx(i) * fft.kx(i) + fft.ky(j) * fft.ky(j);
            psi_spec[idx] = (k2 > 0.0) ? spec[idx] * (scale / k2) : std::complex<double>(0.0, 0.0);
        }
    }

    Field2D rhs;
    rhs.time = w.time;
    rhs.values = RowMat::Zero(grid.nx, grid.ny);

    if (terms.jacobian) {
        Field2D psi;
        fft.backward(psi_spec, psi.values);
        const Field2D jac = arakawa_jacobian(w, psi, grid, cfg.arakawa);
        rhs.values -= jac.values;
    }
    if (terms.viscous) {
        const double inv_re = 1.0 / cfg.re;
        if (cfg.laplacian == LaplacianKind::spectral) {
            for (int i = 0; i < grid.nx; ++i) {
                for (int j = 0; j < sc; ++j) {
                    const std::size_t idx = static_cast<std::size_t>(i) * sc + j;
                    const double k2 = fft.kx(i) * fft.kx(i) + fft.ky(j) * fft.ky(j);
                    spec[idx] *= -k2 * scale;
                }
            }
            Field2D lap;
            fft.backward(spec, lap.values);
            rhs.values += inv_re * lap.values;
        } else {
            rhs.values += inv_re * laplacian_fd5(w, grid).values;
        }
    }
    return rhs;
}

}  // namespace

Field2D vorticity_rhs(const Field2D& w, const VorticityConfig& cfg, const Grid2D& grid,
                      const Fft2D& fft, VorticityTerms terms) {
    return rhs_impl(w, cfg, grid, fft, terms);
}

Field2D vorticity_rhs(const Field2D& w, const VorticityConfig& cfg, const Grid2D& grid) {
    Fft2D fft(grid);
    return rhs_impl(w, cfg, grid, fft, {});
}

double kinetic_energy(const Field2D& w, const Grid2D& grid, const Fft2D& fft) {
    const Field2D psi = poisson_solve_periodic(w, grid, fft);
    Eigen::Map<const Vec> wf(w.values.data(), grid.size());
    Eigen::Map<const Vec> pf(psi.values.data(), grid.size());
    return 0.5 * wf.dot(pf);
}

SnapshotSet run_fom_vorticity(const VorticityConfig& cfg, const Grid2D& grid) {
    cfg.validate(grid);
    const Fft2D fft(grid);

    Field2D w = initial_spectrum_vorticity(grid, cfg);
    const long steps = cfg.total_steps();
    const long stored = steps / cfg.snapshot_stride;

    SnapshotSet out;
    out.grid = grid;
    out.initial = Eigen::Map<const Vec>(w.values.data(), grid.size());
    out.initial_time = 0.0;
    out.snap_dt = cfg.snapshot_stride * cfg.dt;
    out.data.resize(grid.size(), stored);
    out.times.resize(stored);

    Field2D stage;
    stage.values.resize(grid.nx, grid.ny);
    long col = 0;
    for (long step = 0; step < steps; ++step) {
        const Field2D k1 = rhs_impl(w, cfg, grid, fft, {});
        stage.values = w.values + 0.5 * cfg.dt * k1.values;
        const Field2D k2 = rhs_impl(stage, cfg, grid, fft, {});
        stage.values = w.values + 0.5 * cfg.dt * k2.values;
        const Field2D k3 = rhs_impl(stage, cfg, grid, fft, {});
        stage.values = w.values + cfg.dt * k3.values;
        const Field2D k4 = rhs_impl(stage, cfg, grid, fft, {});
        w.values += (cfg.dt / 6.0) * (k1.values + 2.0 * k2.values + 2.0 * k3.values + k4.values);
        w.time = (step + 1) * cfg.dt;

        if ((step + 1) % cfg.snapshot_stride == 0) {
            if (!w.values.allFinite())
                throw NumericalError("vorticity FOM blew up at step " + std::to_string(step + 1),
                                     step + 1);
            out.data.col(col) = Eigen::Map<const Vec>(w.values.data(), grid.size());
            out.times(col) = (step + 1) * cfg.dt;
            ++col;
        }
    }
    out.validate();
    return out;
}

}  // namespace romfsm
