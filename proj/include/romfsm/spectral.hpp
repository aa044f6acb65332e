#pragma once

#include "romfsm/types.hpp"

#include <complex>
#include <vector>

struct fftw_plan_s;

namespace romfsm {

/// Real <-> half-complex FFT pair on a fixed periodic grid. Plans are created
/// once (FFTW_ESTIMATE, deterministic) and reused; instances own their scratch
/// buffers, so share one per thread, not across threads.
///
/// Conventions: forward() returns raw DFT sums (coefficient of mode k is
/// spec/(nx*ny)); backward() evaluates sum_k spec_k exp(i k.x) without any
/// normalization, i.e. backward(forward(f)) == (nx*ny) * f.
class Fft2D {
public:
    explicit Fft2D(const Grid2D& grid);
    ~Fft2D();
    Fft2D(const Fft2D&) = delete;
    Fft2D& operator=(const Fft2D&) = delete;

    void forward(const RowMat& field, std::vector<std::complex<double>>& spec) const;
    void backward(const std::vector<std::complex<double>>& spec, RowMat& field) const;

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int spec_cols() const { return ny_ / 2 + 1; }
    long spec_size() const { return static_cast<long>(nx_) * spec_cols(); }

    /// Physical wavenumbers of the stored half-spectrum entry (i, j).
    double kx(int i) const { return kx_[i]; }
    double ky(int j) const { return ky_[j]; }

private:
    int nx_, ny_;
    std::vector<double> kx_, ky_;
    fftw_plan_s* fwd_ = nullptr;
    fftw_plan_s* bwd_ = nullptr;
    double* real_buf_ = nullptr;
    std::complex<double>* spec_buf_ = nullptr;
};

/// Solves lap(psi) = -w on the periodic grid via the spectral inverse,
/// psi_hat = w_hat / |k|^2, psi_hat(0) = 0.
/// Throws if |mean(w)| exceeds 1e-8 (ill-posed right-hand side).
Field2D poisson_solve_periodic(const Field2D& w, const Grid2D& grid, const Fft2D& fft);
Field2D poisson_solve_periodic(const Field2D& w, const Grid2D& grid);

Field2D laplacian_spectral(const Field2D& f, const Grid2D& grid, const Fft2D& fft);
/// Second-order 5-point periodic Laplacian (optional alternative).
Field2D laplacian_fd5(const Field2D& f, const Grid2D& grid);

double field_mean(const Field2D& f);

}  // namespace romfsm
