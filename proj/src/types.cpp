#include "romfsm/types.hpp"

#include "romfsm/hashing.hpp"

#include <cmath>

namespace romfsm {

namespace {
bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }
}  // namespace

Grid1D Grid1D::uniform(int n, double length) {
    if (n < 4) throw ConfigError("Grid1D: need at least 4 nodes, got " + std::to_string(n));
    if (!(length > 0.0)) throw ConfigError("Grid1D: length must be positive");
    Grid1D g;
    g.n = n;
    g.length = length;
    g.dx = length / (n - 1);
    return g;
}

Grid2D Grid2D::periodic(int nx, int ny, double lx, double ly) {
    if (!is_power_of_two(nx) || !is_power_of_two(ny))
        throw ConfigError("Grid2D: nx and ny must be powers of two");
    if (!(lx > 0.0) || !(ly > 0.0)) throw ConfigError("Grid2D: domain lengths must be positive");
    Grid2D g;
    g.nx = nx;
    g.ny = ny;
    g.lx = lx;
    g.ly = ly;
    g.dx = lx / nx;
    g.dy = ly / ny;
    return g;
}

long grid_field_size(const GridMeta& grid) {
    if (const auto* g1 = std::get_if<Grid1D>(&grid)) return g1->n;
    return std::get<Grid2D>(grid).size();
}

std::uint64_t grid_hash(const GridMeta& grid) {
    Fnv1a h;
    if (const auto* g1 = std::get_if<Grid1D>(&grid)) {
        h.add("grid1d").add(g1->n).add(g1->length);
    } else {
        const auto& g2 = std::get<Grid2D>(grid);
        h.add("grid2d").add(g2.nx).add(g2.ny).add(g2.lx).add(g2.ly);
    }
    return h.value();
}

void SnapshotSet::validate() const {
    if (data.cols() < 1) throw ConfigError("SnapshotSet: no snapshots stored");
    if (data.rows() != field_size())
        throw ConfigError("SnapshotSet: column length does not match the grid");
    if (times.size() != data.cols())
        throw ConfigError("SnapshotSet: times/data size mismatch");
    for (long k = 1; k < times.size(); ++k)
        if (!(times(k) > times(k - 1)))
            throw ConfigError("SnapshotSet: times must be strictly increasing");
    if (initial.size() != 0 && initial.size() != data.rows())
        throw ConfigError("SnapshotSet: initial state length mismatch");
}

}  // namespace romfsm
