#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "romfsm/arakawa.hpp"
#include "romfsm/rng.hpp"
#include "romfsm/spectral.hpp"

#include <cmath>

using namespace romfsm;

namespace {

Field2D sample(const Grid2D& g, double (*f)(double, double)) {
    Field2D out;
    out.values.resize(g.nx, g.ny);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) out.values(i, j) = f(i * g.dx, j * g.dy);
    return out;
}

// smooth periodic field from a handful of random low-wavenumber modes
Field2D random_smooth(const Grid2D& g, std::uint64_t seed) {
    Rng rng(seed);
    Field2D out;
    out.values = RowMat::Zero(g.nx, g.ny);
    for (int m = 0; m < 6; ++m) {
        const int kx = 1 + static_cast<int>(rng.uniform() * 4);
        const int ky = 1 + static_cast<int>(rng.uniform() * 4);
        const double amp = rng.uniform(-1.0, 1.0);
        const double px = rng.uniform(0.0, kTwoPi), py = rng.uniform(0.0, kTwoPi);
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j)
                out.values(i, j) +=
                    amp * std::sin(kx * i * g.dx + px) * std::sin(ky * j * g.dy + py);
    }
    out.values.array() -= out.values.mean();
    return out;
}

double dot(const Field2D& a, const Field2D& b) {
    return (a.values.array() * b.values.array()).sum();
}

}  // namespace

TEST_CASE("poisson: eigenfunction and zero input") {
    const Grid2D g = Grid2D::periodic(64, 64);
    const Field2D w = sample(g, [](double x, double y) { return std::sin(x) * std::sin(y); });
    const Field2D psi = poisson_solve_periodic(w, g);
    CHECK((psi.values - 0.5 * w.values).cwiseAbs().maxCoeff() < 1e-12);

    Field2D zero;
    zero.values = RowMat::Zero(g.nx, g.ny);
    CHECK(poisson_solve_periodic(zero, g).values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("poisson: residual below 1e-10 on random zero-mean input") {
    const Grid2D g = Grid2D::periodic(128, 128);
    const Fft2D fft(g);
    Rng rng(7);
    Field2D w;
    w.values.resize(g.nx, g.ny);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) w.values(i, j) = rng.uniform(-1.0, 1.0);
    w.values.array() -= w.values.mean();

    const Field2D psi = poisson_solve_periodic(w, g, fft);
    const Field2D lap = laplacian_spectral(psi, g, fft);
    CHECK((lap.values + w.values).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("poisson: rejects nonzero-mean input") {
    const Grid2D g = Grid2D::periodic(32, 32);
    Field2D w;
    w.values = RowMat::Constant(g.nx, g.ny, 0.1);
    CHECK_THROWS_AS(poisson_solve_periodic(w, g), NumericalError);
}

TEST_CASE("fd5 laplacian annihilates constants and approximates eigenvalues") {
    const Grid2D g = Grid2D::periodic(128, 128);
    Field2D c;
    c.values = RowMat::Constant(g.nx, g.ny, 2.5);
    CHECK(laplacian_fd5(c, g).values.cwiseAbs().maxCoeff() < 1e-12);

    const Field2D w = sample(g, [](double x, double y) { return std::sin(x) * std::sin(y); });
    const Field2D lap = laplacian_fd5(w, g);
    // second-order accuracy: eigenvalue error ~ k^4 h^2 / 12
    const double h2 = g.dx * g.dx;
    CHECK((lap.values + 2.0 * w.values).cwiseAbs().maxCoeff() < 0.5 * h2);
}

TEST_CASE("arakawa: trivial kernels") {
    const Grid2D g = Grid2D::periodic(64, 64);
    const Field2D w = random_smooth(g, 3);
    Field2D c;
    c.values = RowMat::Constant(g.nx, g.ny, 1.3);
    for (ArakawaOrder order : {ArakawaOrder::second, ArakawaOrder::fourth}) {
        CHECK(arakawa_jacobian(w, c, g, order).values.cwiseAbs().maxCoeff() < 1e-13);
        CHECK(arakawa_jacobian(w, w, g, order).values.cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("arakawa: analytic refinement oracle") {
    auto err = [](int n, ArakawaOrder order) {
        const Grid2D g = Grid2D::periodic(n, n);
        const Field2D w = sample(g, [](double x, double y) { return std::sin(x) * std::sin(y); });
        const Field2D s = sample(g, [](double x, double y) { return std::cos(x) + std::cos(y); });
        const Field2D jac = arakawa_jacobian(w, s, g, order);
        double e = 0.0;
        for (int i = 0; i < g.nx; ++i) {
            for (int j = 0; j < g.ny; ++j) {
                const double x = i * g.dx, y = j * g.dy;
                const double exact = -std::cos(x) * std::sin(y) * std::sin(y) +
                                     std::sin(x) * std::sin(x) * std::cos(y);
                e = std::max(e, std::abs(jac.values(i, j) - exact));
            }
        }
        return e;
    };
    const double order2 = std::log2(err(64, ArakawaOrder::second) / err(128, ArakawaOrder::second));
    const double order4 = std::log2(err(64, ArakawaOrder::fourth) / err(128, ArakawaOrder::fourth));
    CHECK(order2 > 1.8);
    CHECK(order2 < 2.5);
    CHECK(order4 > 3.5);
}

TEST_CASE("arakawa: discrete conservation and triple-product antisymmetry") {
    const Grid2D g = Grid2D::periodic(64, 64);
    const Field2D a = random_smooth(g, 11);
    const Field2D b = random_smooth(g, 12);
    const Field2D c = random_smooth(g, 13);

    for (ArakawaOrder order : {ArakawaOrder::second, ArakawaOrder::fourth}) {
        const Field2D jab = arakawa_jacobian(a, b, g, order);
        const double scale = jab.values.norm() * a.values.norm();
        CHECK(std::abs(dot(jab, a)) / scale < 1e-10);   // enstrophy neutrality
        CHECK(std::abs(dot(jab, b)) / (jab.values.norm() * b.values.norm()) < 1e-10);

        const Field2D jcb = arakawa_jacobian(c, b, g, order);
        const double lhs = dot(jab, c);
        const double rhs = -dot(jcb, a);
        CHECK(std::abs(lhs - rhs) / (jab.values.norm() * c.values.norm()) < 1e-10);
    }
}
