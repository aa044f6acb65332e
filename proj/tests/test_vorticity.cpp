#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "romfsm/vorticity.hpp"

#include <cmath>
#include <complex>
#include <vector>

using namespace romfsm;

namespace {

VorticityConfig desk_cfg() {
    VorticityConfig cfg;
    cfg.re = 1000.0;
    cfg.dt = 1e-3;
    cfg.t_final = 0.2;
    cfg.snapshot_stride = 20;
    cfg.kp = 10.0;
    cfg.seed = 42;
    return cfg;
}

}  // namespace

TEST_CASE("energy spectrum: k^4 prefactor kills k = 0, argmax at sqrt(2) kp") {
    const double kp = 10.0;
    CHECK(initial_energy_spectrum(0.0, kp) == 0.0);
    double best_k = 0.0, best = -1.0;
    for (double k = 0.5; k < 40.0; k += 0.01) {
        const double e = initial_energy_spectrum(k, kp);
        if (e > best) {
            best = e;
            best_k = k;
        }
    }
    // d/dk of k^4 exp(-(k/kp)^2) vanishes at k = sqrt(2) kp
    CHECK(best_k == doctest::Approx(std::sqrt(2.0) * kp).epsilon(0.01));
    CHECK(initial_energy_spectrum(kp, kp) > 0.5 * best);
}

TEST_CASE("seeded field: zero mean, magnitude law, shell-energy oracle") {
    const Grid2D g = Grid2D::periodic(128, 128);
    VorticityConfig cfg = desk_cfg();
    const Field2D w = initial_spectrum_vorticity(g, cfg);

    CHECK(std::abs(w.values.mean()) < 1e-12);

    // reproducible under the seed
    const Field2D w2 = initial_spectrum_vorticity(g, cfg);
    CHECK((w.values - w2.values).cwiseAbs().maxCoeff() == 0.0);

    // lattice kinetic energy vs the quadrature of E(k): the shell sum over
    // the full lattice with |u_hat| = |w_hat|/k should reproduce the integral
    const Fft2D fft(g);
    std::vector<std::complex<double>> spec;
    fft.forward(w.values, spec);
    const double scale = 1.0 / (static_cast<double>(g.nx) * g.ny);
    double lattice_energy = 0.0;
    const int sc = fft.spec_cols();
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < sc; ++j) {
            const double k2 = fft.kx(i) * fft.kx(i) + fft.ky(j) * fft.ky(j);
            if (k2 <= 0.0) continue;
            // interior ky columns stand for a conjugate pair
            const double mult = (j == 0 || j == g.ny / 2) ? 1.0 : 2.0;
            const double mag = std::abs(spec[static_cast<std::size_t>(i) * sc + j]) * scale;
            lattice_energy += 0.5 * mult * mag * mag / k2;
        }
    }
    // trapezoid quadrature of E(k) (analytically 1/2)
    double quad = 0.0;
    const double dk = 1e-3;
    for (double k = 0.0; k < 64.0; k += dk)
        quad += 0.5 * dk *
                (initial_energy_spectrum(k, cfg.kp) + initial_energy_spectrum(k + dk, cfg.kp));
    CHECK(std::abs(lattice_energy - quad) / quad < 0.05);
}

TEST_CASE("rhs: trivial and eigenfunction cases") {
    const Grid2D g = Grid2D::periodic(64, 64);
    const Fft2D fft(g);
    VorticityConfig cfg = desk_cfg();
    cfg.re = 50.0;

    Field2D zero;
    zero.values = RowMat::Zero(g.nx, g.ny);
    CHECK(vorticity_rhs(zero, cfg, g, fft).values.cwiseAbs().maxCoeff() == 0.0);

    Field2D w;
    w.values.resize(g.nx, g.ny);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            w.values(i, j) = std::sin(i * g.dx) * std::sin(j * g.dy);
    // psi = w/2 is parallel to w, so the Jacobian term drops out
    const Field2D rhs = vorticity_rhs(w, cfg, g, fft);
    CHECK((rhs.values + (2.0 / cfg.re) * w.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("rhs: Jacobian part is enstrophy neutral") {
    const Grid2D g = Grid2D::periodic(64, 64);
    const Fft2D fft(g);
    VorticityConfig cfg = desk_cfg();
    const Field2D w = initial_spectrum_vorticity(g, cfg);

    VorticityTerms only_jac;
    only_jac.viscous = false;
    const Field2D jac_part = vorticity_rhs(w, cfg, g, fft, only_jac);
    const double inner = (jac_part.values.array() * w.values.array()).sum();
    CHECK(std::abs(inner) / (jac_part.values.norm() * w.values.norm()) < 1e-10);
}

TEST_CASE("one step with both terms disabled leaves the field unchanged") {
    const Grid2D g = Grid2D::periodic(32, 32);
    const Fft2D fft(g);
    VorticityConfig cfg = desk_cfg();
    const Field2D w = initial_spectrum_vorticity(g, cfg);

    VorticityTerms off;
    off.jacobian = false;
    off.viscous = false;
    const Field2D rhs = vorticity_rhs(w, cfg, g, fft, off);
    CHECK(rhs.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fom run: snapshot count, zero mean, energy decay") {
    const Grid2D g = Grid2D::periodic(64, 64);
    const VorticityConfig cfg = desk_cfg();
    const SnapshotSet snaps = run_fom_vorticity(cfg, g);
    CHECK(snaps.count() == 10);
    CHECK(snaps.times(9) == doctest::Approx(0.2));

    const Fft2D fft(g);
    auto energy = [&](const Vec& flat) {
        Field2D w;
        w.values = Eigen::Map<const RowMat>(flat.data(), g.nx, g.ny);
        return kinetic_energy(w, g, fft);
    };
    double prev = energy(snaps.initial);
    for (long k = 0; k < snaps.count(); ++k) {
        CHECK(std::abs(snaps.data.col(k).mean()) < 1e-10);
        const double cur = energy(snaps.data.col(k));
        CHECK(cur <= prev * (1.0 + 1e-12));
        prev = cur;
    }
}

TEST_CASE("fom blow-up throws with a step index") {
    const Grid2D g = Grid2D::periodic(64, 64);
    VorticityConfig cfg = desk_cfg();
    cfg.dt = 1.0;  // hopelessly unstable for the viscous spectrum
    cfg.t_final = 10.0;
    cfg.snapshot_stride = 1;
    cfg.re = 1.0;
    CHECK_THROWS_AS(run_fom_vorticity(cfg, g), NumericalError);
}

TEST_CASE("config validation enforces kp below Nyquist") {
    const Grid2D g = Grid2D::periodic(32, 32);
    VorticityConfig cfg = desk_cfg();
    cfg.kp = 20.0;  // >= 16
    CHECK_THROWS_AS(cfg.validate(g), ConfigError);
}
