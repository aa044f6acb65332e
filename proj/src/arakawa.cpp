#include "romfsm/arakawa.hpp"

namespace romfsm {

namespace {

// (J1 + J2 + J3)/3 with neighbor offset `s` (s=1: unit stencil, s=2: doubled).
// Summed over the grid this form conserves <J,w>, <J,s> and the triple-product
// antisymmetry exactly, which is what the Galerkin tensors rely on.
void arakawa_base(const RowMat& w, const RowMat& s_field, int nx, int ny, double dx, double dy,
                  int s, RowMat& out) {
    const double coef = 1.0 / (12.0 * (s * dx) * (s * dy));
    for (int i = 0; i < nx; ++i) {
        const int im = (i + nx - s) % nx, ip = (i + s) % nx;
        for (int j = 0; j < ny; ++j) {
            const int jm = (j + ny - s) % ny, jp = (j + s) % ny;

            const double j1 = (w(ip, j) - w(im, j)) * (s_field(i, jp) - s_field(i, jm)) -
                              (w(i, jp) - w(i, jm)) * (s_field(ip, j) - s_field(im, j));

            const double j2 = w(ip, j) * (s_field(ip, jp) - s_field(ip, jm)) -
                              w(im, j) * (s_field(im, jp) - s_field(im, jm)) -
                              w(i, jp) * (s_field(ip, jp) - s_field(im, jp)) +
                              w(i, jm) * (s_field(ip, jm) - s_field(im, jm));

            const double j3 = w(ip, jp) * (s_field(i, jp) - s_field(ip, j)) -
                              w(im, jm) * (s_field(im, j) - s_field(i, jm)) -
                              w(im, jp) * (s_field(i, jp) - s_field(im, j)) +
                              w(ip, jm) * (s_field(ip, j) - s_field(i, jm));

            out(i, j) = coef * (j1 + j2 + j3);
        }
    }
}

}  // namespace

Field2D arakawa_jacobian(const Field2D& w, const Field2D& s, const Grid2D& grid,
                         ArakawaOrder order) {
    if (w.values.rows() != grid.nx || w.values.cols() != grid.ny ||
        s.values.rows() != grid.nx || s.values.cols() != grid.ny)
        throw ConfigError("arakawa_jacobian: field shape mismatch");

    Field2D out;
    out.time = w.time;
    out.values.resize(grid.nx, grid.ny);
    arakawa_base(w.values, s.values, grid.nx, grid.ny, grid.dx, grid.dy, 1, out.values);
    if (order == ArakawaOrder::fourth) {
        RowMat coarse(grid.nx, grid.ny);
        arakawa_base(w.values, s.values, grid.nx, grid.ny, grid.dx, grid.dy, 2, coarse);
        out.values = (4.0 * out.values - coarse) / 3.0;
    }
    return out;
}

}  // namespace romfsm
