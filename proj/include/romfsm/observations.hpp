#pragma once

#include "romfsm/pod.hpp"
#include "romfsm/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace romfsm {

struct SensorLayout {
    enum class Kind { full, sparse };
    std::vector<int> indices;  // strictly increasing grid node indices (row-major in 2D)
    Kind kind = Kind::full;

    static SensorLayout full_grid(long n);
    /// Eight sensors at x = s/8 * L, s = 1..8 (the last one sits on the
    /// boundary node where u = 0).
    static SensorLayout eighths_1d(const Grid1D& grid);
    /// One sensor every `stride` nodes in both directions.
    static SensorLayout stride_2d(const Grid2D& grid, int stride);

    int count() const { return static_cast<int>(indices.size()); }
    void validate(long n) const;
};

struct ObservationSet {
    enum class Space { field, coefficient };
    Vec times;
    Mat values;  // m x n_times, one column per observation instant
    double sigma = 0.0;
    std::uint64_t seed = 0;
    Space space = Space::field;
    SensorLayout layout;
    std::vector<std::string> flags;  // conditioning / degeneracy diagnostics

    int m() const { return static_cast<int>(values.rows()); }
};

/// Map from ROM coefficients to observed quantities: either the identity on
/// coefficient-space observations, or the sampled-basis reconstruction map
/// h(a) = C a compared against (u_obs - mean)|sensors.
struct ObservationOperator {
    enum class Kind { identity_on_coefficients, reconstruction_map };
    Kind kind = Kind::identity_on_coefficients;
    Mat c;                // m x R (reconstruction_map only)
    Vec mean_at_sensors;  // m (reconstruction_map only)

    int obs_dim(int r) const;
    Mat jacobian(int r) const;
    Vec innovation(const Vec& z, const Vec& a) const;  // z - h(a), mean handled
};

/// Samples the truth snapshots at the sensor nodes at the requested times and
/// adds iid N(0, sigma^2) noise. Each requested time must match a stored
/// snapshot time (or the initial time). Deterministic under seed.
ObservationSet synthesize_observations(const SnapshotSet& truth, const SensorLayout& layout,
                                       const Vec& times, double sigma, std::uint64_t seed);

/// Full-field observations projected onto the basis ("observed" modal
/// coefficients); noise covariance stays sigma^2 I because the modes are
/// orthonormal.
ObservationSet observed_coefficients_full(const ObservationSet& obs, const PodBasis& basis);

/// Least-squares coefficients from sparse samples via the SVD pseudo-inverse
/// of the sampled-basis matrix. Ill conditioning (cond > 1e8) and rank
/// deficiency are flagged on the result, not fatal.
ObservationSet observed_coefficients_sparse_pinv(const ObservationSet& obs,
                                                 const PodBasis& basis,
                                                 const SensorLayout& layout);

ObservationOperator build_reconstruction_operator(const PodBasis& basis,
                                                  const SensorLayout& layout);
ObservationOperator identity_observation_operator();

void write_observations_csv(const ObservationSet& obs, const std::string& path);

}  // namespace romfsm
