#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <variant>

namespace romfsm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
// 2D fields are stored row-major (x index = row) so they map directly onto
// FFTW's array layout and onto the row-major flattening used for sensors.
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kPi = 3.1415926535897932384626433832795;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Raised when a time integration or linear solve produces garbage
/// (NaN/Inf fields, singular systems). Carries the offending step when known.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, long step = -1)
        : std::runtime_error(what), step_(step) {}
    long step() const { return step_; }

private:
    long step_;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Uniform 1D node grid on [0, length], node x_i = i*dx, dx = length/(n-1).
struct Grid1D {
    int n = 0;
    double length = 0.0;
    double dx = 0.0;

    static Grid1D uniform(int n, double length);
    double x(int i) const { return i * dx; }
};

/// Doubly periodic 2D grid on [0,lx) x [0,ly); nx, ny must be powers of two.
struct Grid2D {
    int nx = 0, ny = 0;
    double lx = 0.0, ly = 0.0;
    double dx = 0.0, dy = 0.0;

    static Grid2D periodic(int nx, int ny, double lx = kTwoPi, double ly = kTwoPi);
    long size() const { return static_cast<long>(nx) * ny; }
};

struct Field1D {
    Vec values;
    double time = 0.0;
};

struct Field2D {
    RowMat values;  // (nx rows, ny cols)
    double time = 0.0;
};

using GridMeta = std::variant<Grid1D, Grid2D>;

long grid_field_size(const GridMeta& grid);
std::uint64_t grid_hash(const GridMeta& grid);

/// Ordered field snapshots plus grid/time metadata. The initial state is kept
/// outside the snapshot matrix; column k holds the state at
/// initial_time + (k+1)*snap_dt.
struct SnapshotSet {
    Mat data;  // n x N, one flattened snapshot per column (row-major in 2D)
    Vec times;
    GridMeta grid;
    Vec initial;
    double initial_time = 0.0;
    double snap_dt = 0.0;

    int rank() const { return std::holds_alternative<Grid1D>(grid) ? 1 : 2; }
    long field_size() const { return grid_field_size(grid); }
    long count() const { return data.cols(); }
    void validate() const;
};

}  // namespace romfsm
