#include "romfsm/pod.hpp"

#include "romfsm/hashing.hpp"
#include "romfsm/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <string>

namespace romfsm {

namespace {

void fix_mode_signs(Mat& modes) {
    for (long k = 0; k < modes.cols(); ++k) {
        long idx = 0;
        modes.col(k).cwiseAbs().maxCoeff(&idx);
        if (modes(idx, k) < 0.0) modes.col(k) = -modes.col(k);
    }
}

}  // namespace

PodBasis build_pod(const SnapshotSet& snapshots, int r, PodOptions opts) {
    snapshots.validate();
    const long n = snapshots.data.rows();
    const long big_n = snapshots.data.cols();
    if (big_n < 2) throw ConfigError("build_pod: need at least 2 snapshots");
    if (r < 1 || r > big_n)
        throw ConfigError("build_pod: r must satisfy 1 <= r <= N (r=" + std::to_string(r) +
                          ", N=" + std::to_string(big_n) + ")");
    if (big_n > n)
        throw ConfigError("build_pod: more snapshots than spatial points is unsupported (N <= n)");

    PodBasis basis;
    basis.grid = snapshots.grid;
    basis.r = r;
    basis.mean = snapshots.data.rowwise().mean();
    Mat centered = snapshots.data.colwise() - basis.mean;

    {
        Fnv1a h;
        h.add("snapshots").add(snapshots.data).add(snapshots.times);
        basis.source_hash = h.value();
    }

    if (n * big_n <= opts.direct_svd_budget) {
        Eigen::BDCSVD<Mat> svd(centered, Eigen::ComputeThinU);
        basis.singular_values = svd.singularValues();
        basis.modes = svd.matrixU().leftCols(r);
    } else {
        // Method of snapshots: eigenpairs of the N x N Gram matrix. The
        // retained leading modes are recovered as A~ v_k / s_k.
        basis.diagnostics.used_method_of_snapshots = true;
        const Mat gram = centered.transpose() * centered;
        Eigen::SelfAdjointEigenSolver<Mat> eig(gram);
        Vec lambda = eig.eigenvalues().reverse();
        Mat v = eig.eigenvectors().rowwise().reverse();
        basis.singular_values.resize(big_n);
        for (long k = 0; k < big_n; ++k)
            basis.singular_values(k) = std::sqrt(std::max(lambda(k), 0.0));
        basis.modes.resize(n, r);
        for (int k = 0; k < r; ++k) {
            const double s = basis.singular_values(k);
            if (s > 0.0)
                basis.modes.col(k) = centered * v.col(k) / s;
            else
                basis.modes.col(k).setZero();
        }
    }

    const double s1 = basis.singular_values.size() ? basis.singular_values(0) : 0.0;
    if (!(s1 > 0.0)) {
        basis.diagnostics.degenerate = true;
        basis.diagnostics.notes.push_back("all singular values are zero (identical snapshots)");
    } else {
        fix_mode_signs(basis.modes);
    }
    return basis;
}

double ric(const PodBasis& basis, int r) {
    if (r < 1 || r > basis.singular_values.size())
        throw ConfigError("ric: r out of range");
    const double total = basis.singular_values.squaredNorm();
    if (!(total > 0.0)) return 1.0;  // degenerate spectrum, flagged at build time
    return basis.singular_values.head(r).squaredNorm() / total;
}

Vec project(const PodBasis& basis, const Vec& field) {
    if (field.size() != basis.mean.size())
        throw ConfigError("project: field length mismatch");
    return basis.modes.transpose() * (field - basis.mean);
}

Vec reconstruct(const PodBasis& basis, const Vec& a) {
    if (a.size() != basis.modes.cols())
        throw ConfigError("reconstruct: coefficient length mismatch");
    return basis.mean + basis.modes * a;
}

Mat project_snapshots(const PodBasis& basis, const SnapshotSet& snapshots) {
    if (snapshots.data.rows() != basis.mean.size())
        throw ConfigError("project_snapshots: field length mismatch");
    return basis.modes.transpose() * (snapshots.data.colwise() - basis.mean);
}

PodBasis companion_streamfunction_basis(PodBasis basis, const Grid2D& grid) {
    if (!std::holds_alternative<Grid2D>(basis.grid))
        throw ConfigError("companion_streamfunction_basis: basis is not 2D");
    if (basis.mean.size() != grid.size())
        throw ConfigError("companion_streamfunction_basis: grid mismatch");

    const Fft2D fft(grid);
    auto solve = [&](const Vec& flat) {
        Field2D w;
        w.values = Eigen::Map<const RowMat>(flat.data(), grid.nx, grid.ny);
        const double mean = w.values.mean();
        if (std::abs(mean) > 1e-8)
            throw NumericalError("companion_streamfunction_basis: mode has nonzero mean (" +
                                 std::to_string(mean) + ")");
        const Field2D psi = poisson_solve_periodic(w, grid, fft);
        return Vec(Eigen::Map<const Vec>(psi.values.data(), grid.size()));
    };

    basis.companion_mean = solve(basis.mean);
    Mat theta(basis.mean.size(), basis.r);
    for (int k = 0; k < basis.r; ++k) theta.col(k) = solve(basis.modes.col(k));
    basis.companion_modes = std::move(theta);
    return basis;
}

}  // namespace romfsm
