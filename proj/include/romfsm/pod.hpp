#pragma once

#include "romfsm/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace romfsm {

struct PodDiagnostics {
    bool degenerate = false;             // all singular values ~ 0
    bool used_method_of_snapshots = false;
    std::vector<std::string> notes;
};

/// Mean field, R orthonormal spatial modes and the full singular-value
/// spectrum of the mean-subtracted snapshot matrix. For 2D vorticity bases
/// the companion streamfunction fields (same temporal coefficients, not
/// necessarily orthonormal) can be attached afterwards.
struct PodBasis {
    Vec mean;
    Mat modes;            // n x r
    Vec singular_values;  // length N, descending
    int r = 0;
    std::optional<Mat> companion_modes;
    std::optional<Vec> companion_mean;
    GridMeta grid;
    std::uint64_t source_hash = 0;
    PodDiagnostics diagnostics;

    long field_size() const { return grid_field_size(grid); }
    bool has_companions() const { return companion_modes.has_value(); }
};

struct PodOptions {
    // Direct thin SVD while n*N stays below this; eigendecomposition of the
    // N x N Gram matrix (method of snapshots) above it.
    long direct_svd_budget = 8'000'000;
};

/// Mean subtraction + thin SVD, keeping the first r modes. Each mode is
/// sign-fixed so its largest-magnitude entry is positive (removes the SVD
/// sign ambiguity and makes stored operators reproducible).
/// Requires 2 <= N <= n and r <= N.
PodBasis build_pod(const SnapshotSet& snapshots, int r, PodOptions opts = {});

/// Relative information content sum_{k<=r} s_k^2 / sum_k s_k^2.
/// Returns 1 for an all-zero spectrum (degenerate input).
double ric(const PodBasis& basis, int r);

/// a_i = <field - mean, phi_i>.
Vec project(const PodBasis& basis, const Vec& field);

/// mean + sum_k a_k phi_k.
Vec reconstruct(const PodBasis& basis, const Vec& a);

/// Project every column of a snapshot set (the "true projection" trajectory).
Mat project_snapshots(const PodBasis& basis, const SnapshotSet& snapshots);

/// Attaches the streamfunction companions theta_k and psi_bar obtained from
/// lap(theta_k) = -phi_k, lap(psi_bar) = -mean. Requires a 2D basis with
/// zero-mean modes.
PodBasis companion_streamfunction_basis(PodBasis basis, const Grid2D& grid);

}  // namespace romfsm
