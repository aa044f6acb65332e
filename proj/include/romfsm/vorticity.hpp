#pragma once

#include "romfsm/arakawa.hpp"
#include "romfsm/spectral.hpp"
#include "romfsm/types.hpp"

#include <cstdint>

namespace romfsm {

enum class LaplacianKind { spectral, fd5 };

struct VorticityConfig {
    double re = 0.0;
    double dt = 0.0;
    double t_final = 0.0;
    int snapshot_stride = 1;
    double kp = 0.0;        // peak wavenumber of the initial spectrum
    std::uint64_t seed = 0; // phase draw seed
    ArakawaOrder arakawa = ArakawaOrder::fourth;
    LaplacianKind laplacian = LaplacianKind::spectral;

    long total_steps() const;
    void validate(const Grid2D& grid) const;
};

struct VorticityTerms {
    bool jacobian = true;
    bool viscous = true;
};

/// Kraichnan-type initial energy spectrum E(k) = 4k^4/(3 sqrt(pi) kp^5) exp(-(k/kp)^2).
double initial_energy_spectrum(double k, double kp);

/// Builds the physical-space vorticity whose Fourier magnitudes satisfy
/// |w_hat(k)| = sqrt(k E(k) / pi), with uniformly random phases on the
/// half-spectrum and Hermitian symmetry enforced explicitly. Zero mean.
Field2D initial_spectrum_vorticity(const Grid2D& grid, const VorticityConfig& cfg);

/// -J(w, psi) + (1/Re) lap(w), with psi from the periodic Poisson solve.
Field2D vorticity_rhs(const Field2D& w, const VorticityConfig& cfg, const Grid2D& grid,
                      const Fft2D& fft, VorticityTerms terms = {});
Field2D vorticity_rhs(const Field2D& w, const VorticityConfig& cfg, const Grid2D& grid);

/// RK4 integration from the spectrum-seeded field, storing vorticity
/// snapshots every snapshot_stride steps (initial state kept separate).
/// Throws NumericalError on NaN/Inf blow-up.
SnapshotSet run_fom_vorticity(const VorticityConfig& cfg, const Grid2D& grid);

/// Kinetic energy 0.5 <psi, w> (grid inner product), used by decay checks.
double kinetic_energy(const Field2D& w, const Grid2D& grid, const Fft2D& fft);

}  // namespace romfsm
