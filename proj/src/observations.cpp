#include "romfsm/observations.hpp"

#include "romfsm/rng.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

namespace romfsm {

SensorLayout SensorLayout::full_grid(long n) {
    SensorLayout l;
    l.kind = Kind::full;
    l.indices.resize(n);
    for (long i = 0; i < n; ++i) l.indices[i] = static_cast<int>(i);
    return l;
}

SensorLayout SensorLayout::eighths_1d(const Grid1D& grid) {
    SensorLayout l;
    l.kind = Kind::sparse;
    for (int s = 1; s <= 8; ++s)
        l.indices.push_back(static_cast<int>(std::llround(s * (grid.n - 1) / 8.0)));
    l.validate(grid.n);
    return l;
}

SensorLayout SensorLayout::stride_2d(const Grid2D& grid, int stride) {
    if (stride < 1) throw ConfigError("SensorLayout: stride must be >= 1");
    SensorLayout l;
    l.kind = Kind::sparse;
    for (int i = 0; i < grid.nx; i += stride)
        for (int j = 0; j < grid.ny; j += stride)
            l.indices.push_back(i * grid.ny + j);
    l.validate(grid.size());
    return l;
}

void SensorLayout::validate(long n) const {
    if (indices.empty()) throw ConfigError("SensorLayout: no sensors");
    for (std::size_t s = 0; s < indices.size(); ++s) {
        if (indices[s] < 0 || indices[s] >= n)
            throw ConfigError("SensorLayout: sensor index out of bounds");
        if (s > 0 && indices[s] <= indices[s - 1])
            throw ConfigError("SensorLayout: indices must be strictly increasing");
    }
}

int ObservationOperator::obs_dim(int r) const {
    return kind == Kind::identity_on_coefficients ? r : static_cast<int>(c.rows());
}

Mat ObservationOperator::jacobian(int r) const {
    if (kind == Kind::identity_on_coefficients) return Mat::Identity(r, r);
    return c;
}

Vec ObservationOperator::innovation(const Vec& z, const Vec& a) const {
    if (kind == Kind::identity_on_coefficients) {
        if (z.size() != a.size()) throw ConfigError("ObservationOperator: dimension mismatch");
        return z - a;
    }
    if (z.size() != c.rows() || a.size() != c.cols())
        throw ConfigError("ObservationOperator: dimension mismatch");
    return (z - mean_at_sensors) - c * a;
}

ObservationSet synthesize_observations(const SnapshotSet& truth, const SensorLayout& layout,
                                       const Vec& times, double sigma, std::uint64_t seed) {
    layout.validate(truth.field_size());
    if (!(sigma >= 0.0)) throw ConfigError("synthesize_observations: sigma must be >= 0");

    const int m = layout.count();
    ObservationSet obs;
    obs.times = times;
    obs.values.resize(m, times.size());
    obs.sigma = sigma;
    obs.seed = seed;
    obs.space = ObservationSet::Space::field;
    obs.layout = layout;

    auto column_at = [&](double t) -> Vec {
        if (std::abs(t - truth.initial_time) <= 1e-9 && truth.initial.size() > 0)
            return truth.initial;
        for (long k = 0; k < truth.times.size(); ++k)
            if (std::abs(truth.times(k) - t) <= 1e-9 * std::max(1.0, std::abs(t)))
                return truth.data.col(k);
        throw ConfigError("synthesize_observations: requested time " + std::to_string(t) +
                          " has no stored snapshot");
    };

    Rng rng(seed, RngStream::observation_noise);
    for (long j = 0; j < times.size(); ++j) {
        const Vec field = column_at(times(j));
        for (int s = 0; s < m; ++s)
            obs.values(s, j) = field(layout.indices[s]) + sigma * rng.normal();
    }
    return obs;
}

ObservationSet observed_coefficients_full(const ObservationSet& obs, const PodBasis& basis) {
    if (obs.layout.kind != SensorLayout::Kind::full ||
        obs.values.rows() != basis.mean.size())
        throw ConfigError("observed_coefficients_full: layout must cover all grid nodes");

    ObservationSet out;
    out.times = obs.times;
    out.sigma = obs.sigma;  // orthonormal modes keep the noise covariance sigma^2 I
    out.seed = obs.seed;
    out.space = ObservationSet::Space::coefficient;
    out.layout.kind = SensorLayout::Kind::full;
    out.layout.indices.resize(basis.r);
    for (int k = 0; k < basis.r; ++k) out.layout.indices[k] = k;
    out.values = basis.modes.transpose() * (obs.values.colwise() - basis.mean);
    return out;
}

ObservationSet observed_coefficients_sparse_pinv(const ObservationSet& obs,
                                                 const PodBasis& basis,
                                                 const SensorLayout& layout) {
    if (layout.kind != SensorLayout::Kind::sparse)
        throw ConfigError("observed_coefficients_sparse_pinv: layout must be sparse");
    if (obs.values.rows() != layout.count())
        throw ConfigError("observed_coefficients_sparse_pinv: observation/layout mismatch");

    const int m = layout.count();
    Mat c(m, basis.r);
    Vec mean_s(m);
    for (int s = 0; s < m; ++s) {
        c.row(s) = basis.modes.row(layout.indices[s]);
        mean_s(s) = basis.mean(layout.indices[s]);
    }

    Eigen::JacobiSVD<Mat> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec& sv = svd.singularValues();
    const double cutoff = 1e-10 * sv(0);

    ObservationSet out;
    out.times = obs.times;
    out.sigma = obs.sigma;
    out.seed = obs.seed;
    out.space = ObservationSet::Space::coefficient;
    out.layout.kind = SensorLayout::Kind::full;
    out.layout.indices.resize(basis.r);
    for (int k = 0; k < basis.r; ++k) out.layout.indices[k] = k;

    int rank = 0;
    for (long k = 0; k < sv.size(); ++k)
        if (sv(k) > cutoff) ++rank;
    if (rank < std::min<long>(m, basis.r))
        out.flags.push_back("sampled-basis matrix is rank deficient (rank " +
                            std::to_string(rank) + ")");
    const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                                : std::numeric_limits<double>::infinity();
    if (cond > 1e8)
        out.flags.push_back("sampled-basis matrix is ill conditioned (cond ~ " +
                            std::to_string(cond) + ")");

    out.values.resize(basis.r, obs.times.size());
    Vec inv_sv = Vec::Zero(sv.size());
    for (long k = 0; k < sv.size(); ++k)
        if (sv(k) > cutoff) inv_sv(k) = 1.0 / sv(k);
    for (long j = 0; j < obs.times.size(); ++j) {
        const Vec rhs = obs.values.col(j) - mean_s;
        out.values.col(j) =
            svd.matrixV() * inv_sv.asDiagonal() * (svd.matrixU().transpose() * rhs);
    }
    return out;
}

ObservationOperator build_reconstruction_operator(const PodBasis& basis,
                                                  const SensorLayout& layout) {
    layout.validate(basis.mean.size());
    ObservationOperator op;
    op.kind = ObservationOperator::Kind::reconstruction_map;
    const int m = layout.count();
    op.c.resize(m, basis.r);
    op.mean_at_sensors.resize(m);
    for (int s = 0; s < m; ++s) {
        op.c.row(s) = basis.modes.row(layout.indices[s]);
        op.mean_at_sensors(s) = basis.mean(layout.indices[s]);
    }
    return op;
}

ObservationOperator identity_observation_operator() {
    ObservationOperator op;
    op.kind = ObservationOperator::Kind::identity_on_coefficients;
    return op;
}

void write_observations_csv(const ObservationSet& obs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    char buf[96];
    std::snprintf(buf, sizeof buf, "# sigma=%.17g\n", obs.sigma);
    out << buf;
    out << "# seed=" << obs.seed << "\n";
    out << "# layout=" << (obs.layout.kind == SensorLayout::Kind::full ? "full" : "sparse")
        << "\n";
    out << "# space=" << (obs.space == ObservationSet::Space::field ? "field" : "coefficient")
        << "\n";
    out << "time,sensor_index,value\n";
    for (long j = 0; j < obs.times.size(); ++j) {
        for (int s = 0; s < obs.m(); ++s) {
            std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g\n", obs.times(j),
                          obs.layout.indices[s], obs.values(s, j));
            out << buf;
        }
    }
}

}  // namespace romfsm
