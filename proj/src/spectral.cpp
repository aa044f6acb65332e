#include "romfsm/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>

namespace romfsm {

Fft2D::Fft2D(const Grid2D& grid) : nx_(grid.nx), ny_(grid.ny) {
    real_buf_ = fftw_alloc_real(static_cast<std::size_t>(nx_) * ny_);
    spec_buf_ = reinterpret_cast<std::complex<double>*>(
        fftw_alloc_complex(static_cast<std::size_t>(nx_) * spec_cols()));
    // FFTW_ESTIMATE keeps planning deterministic run to run.
    fwd_ = fftw_plan_dft_r2c_2d(nx_, ny_, real_buf_,
                                reinterpret_cast<fftw_complex*>(spec_buf_), FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_2d(nx_, ny_, reinterpret_cast<fftw_complex*>(spec_buf_),
                                real_buf_, FFTW_ESTIMATE);
    if (!fwd_ || !bwd_) throw NumericalError("Fft2D: plan creation failed");

    kx_.resize(nx_);
    for (int i = 0; i < nx_; ++i) {
        const int m = (i <= nx_ / 2) ? i : i - nx_;
        kx_[i] = kTwoPi * m / grid.lx;
    }
    ky_.resize(spec_cols());
    for (int j = 0; j < spec_cols(); ++j) ky_[j] = kTwoPi * j / grid.ly;
}

Fft2D::~Fft2D() {
    if (fwd_) fftw_destroy_plan(fwd_);
    if (bwd_) fftw_destroy_plan(bwd_);
    fftw_free(real_buf_);
    fftw_free(spec_buf_);
}

void Fft2D::forward(const RowMat& field, std::vector<std::complex<double>>& spec) const {
    if (field.rows() != nx_ || field.cols() != ny_)
        throw ConfigError("Fft2D::forward: field shape mismatch");
    std::memcpy(real_buf_, field.data(), sizeof(double) * nx_ * ny_);
    fftw_execute(fwd_);
    spec.assign(spec_buf_, spec_buf_ + spec_size());
}

void Fft2D::backward(const std::vector<std::complex<double>>& spec, RowMat& field) const {
    if (static_cast<long>(spec.size()) != spec_size())
        throw ConfigError("Fft2D::backward: spectrum size mismatch");
    std::memcpy(spec_buf_, spec.data(), sizeof(std::complex<double>) * spec.size());
    fftw_execute(bwd_);
    field.resize(nx_, ny_);
    std::memcpy(field.data(), real_buf_, sizeof(double) * nx_ * ny_);
}

double field_mean(const Field2D& f) { return f.values.mean(); }

Field2D poisson_solve_periodic(const Field2D& w, const Grid2D& grid, const Fft2D& fft) {
    const double mean = field_mean(w);
    if (std::abs(mean) > 1e-8)
        throw NumericalError("poisson_solve_periodic: nonzero-mean right-hand side (mean = " +
                             std::to_string(mean) + ")");

    std::vector<std::complex<double>> spec;
    fft.forward(w.values, spec);
    const double scale = 1.0 / (static_cast<double>(grid.nx) * grid.ny);
    const int sc = fft.spec_cols();
    for (int i = 0; i < grid.nx; ++i) {
        for (int j = 0; j < sc; ++j) {
            const double k2 = fft.kx(i) * fft.kx(i) + fft.ky(j) * fft.ky(j);
            auto& v = spec[static_cast<std::size_t>(i) * sc + j];
            v = (k2 > 0.0) ? v * (scale / k2) : std::complex<double>(0.0, 0.0);
        }
    }
    Field2D psi;
    psi.time = w.time;
    fft.backward(spec, psi.values);
    return psi;
}

Field2D poisson_solve_periodic(const Field2D& w, const Grid2D& grid) {
    Fft2D fft(grid);
    return poisson_solve_periodic(w, grid, fft);
}

Field2D laplacian_spectral(const Field2D& f, const Grid2D& grid, const Fft2D& fft) {
    std::vector<std::complex<double>> spec;
    fft.forward(f.values, spec);
    const double scale = 1.0 / (static_cast<double>(grid.nx) * grid.ny);
    const int sc = fft.spec_cols();
    for (int i = 0; i < grid.nx; ++i) {
        for (int j = 0; j < sc; ++j) {
            const double k2 = fft.kx(i) * fft.kx(i) + fft.ky(j) * fft.ky(j);
            spec[static_cast<std::size_t>(i) * sc + j] *= -k2 * scale;
        }
    }
    Field2D out;
    out.time = f.time;
    fft.backward(spec, out.values);
    return out;
}

Field2D laplacian_fd5(const Field2D& f, const Grid2D& grid) {
    const int nx = grid.nx, ny = grid.ny;
    const double ax = 1.0 / (grid.dx * grid.dx), ay = 1.0 / (grid.dy * grid.dy);
    Field2D out;
    out.time = f.time;
    out.values.resize(nx, ny);
    const RowMat& v = f.values;
    for (int i = 0; i < nx; ++i) {
        const int im = (i + nx - 1) % nx, ip = (i + 1) % nx;
        for (int j = 0; j < ny; ++j) {
            const int jm = (j + ny - 1) % ny, jp = (j + 1) % ny;
            out.values(i, j) = ax * (v(ip, j) - 2.0 * v(i, j) + v(im, j)) +
                               ay * (v(i, jp) - 2.0 * v(i, j) + v(i, jm));
        }
    }
    return out;
}

}  // namespace romfsm
