#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "romfsm/observations.hpp"
#include "romfsm/pod.hpp"
#include "romfsm/rng.hpp"

#include <cmath>

using namespace romfsm;

namespace {

SnapshotSet smooth_snapshots(const Grid1D& g, long count) {
    SnapshotSet s;
    s.grid = g;
    s.data.resize(g.n, count);
    s.times.resize(count);
    for (long j = 0; j < count; ++j) {
        const double t = 0.1 * (j + 1);
        s.times(j) = t;
        for (int i = 0; i < g.n; ++i)
            s.data(i, j) = std::sin(kTwoPi * g.x(i) + t) + 0.5 * std::cos(2.0 * kTwoPi * g.x(i) - t);
    }
    s.initial = s.data.col(0).cwiseProduct(Vec::Constant(g.n, 0.9));
    s.initial_time = 0.0;
    s.snap_dt = 0.1;
    return s;
}

}  // namespace

TEST_CASE("sensor layouts") {
    const Grid1D g = Grid1D::uniform(4096, 1.0);
    const SensorLayout eighth = SensorLayout::eighths_1d(g);
    CHECK(eighth.count() == 8);
    CHECK(eighth.indices.back() == g.n - 1);  // boundary sensor kept literally
    CHECK(eighth.kind == SensorLayout::Kind::sparse);

    const Grid2D g2 = Grid2D::periodic(128, 128);
    const SensorLayout lattice = SensorLayout::stride_2d(g2, 32);
    CHECK(lattice.count() == 16);
    CHECK(lattice.indices[0] == 0);
    CHECK(lattice.indices[1] == 32);
    CHECK(lattice.indices[4] == 32 * 128);

    const SensorLayout full = SensorLayout::full_grid(100);
    CHECK(full.count() == 100);
    SensorLayout bad = full;
    bad.indices[50] = 49;  // duplicate/ordering violation
    CHECK_THROWS_AS(bad.validate(100), ConfigError);
}

TEST_CASE("synthesis: exactness, determinism, time matching") {
    const Grid1D g = Grid1D::uniform(512, 1.0);
    const SnapshotSet truth = smooth_snapshots(g, 5);
    const SensorLayout layout = SensorLayout::eighths_1d(g);
    Vec times(2);
    times << 0.2, 0.4;

    const ObservationSet clean = synthesize_observations(truth, layout, times, 0.0, 1);
    for (int s = 0; s < 8; ++s) {
        CHECK(clean.values(s, 0) == truth.data(layout.indices[s], 1));
        CHECK(clean.values(s, 1) == truth.data(layout.indices[s], 3));
    }

    const ObservationSet a = synthesize_observations(truth, layout, times, 0.1, 77);
    const ObservationSet b = synthesize_observations(truth, layout, times, 0.1, 77);
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);

    Vec bad_times(1);
    bad_times << 0.25;
    CHECK_THROWS_AS(synthesize_observations(truth, layout, bad_times, 0.1, 1), ConfigError);

    // the initial state is observable at t = 0
    Vec zero_time(1);
    zero_time << 0.0;
    const ObservationSet at0 = synthesize_observations(truth, layout, zero_time, 0.0, 1);
    CHECK(at0.values(0, 0) == truth.initial(layout.indices[0]));
}

TEST_CASE("noise statistics reproduce sigma") {
    const Grid1D g = Grid1D::uniform(4096, 1.0);
    const SnapshotSet truth = smooth_snapshots(g, 25);
    const SensorLayout layout = SensorLayout::full_grid(g.n);
    Vec times(25);
    for (int j = 0; j < 25; ++j) times(j) = 0.1 * (j + 1);
    const double sigma = 0.1;

    const ObservationSet obs = synthesize_observations(truth, layout, times, sigma, 2024);
    // 4096 x 25 ~ 1e5 samples
    double sum = 0.0, sum_sq = 0.0;
    long count = 0;
    for (long j = 0; j < times.size(); ++j) {
        for (int i = 0; i < g.n; ++i) {
            const double d = obs.values(i, j) - truth.data(i, j);
            sum += d;
            sum_sq += d * d;
            ++count;
        }
    }
    const double mean = sum / count;
    const double std_dev = std::sqrt(sum_sq / count - mean * mean);
    CHECK(std::abs(std_dev - sigma) / sigma < 0.02);
    CHECK(std::abs(mean) < 0.01 * sigma * 10);  // zero-mean noise
}

TEST_CASE("full projection: noiseless equivalence and coefficient noise covariance") {
    const Grid1D g = Grid1D::uniform(1024, 1.0);
    const SnapshotSet truth = smooth_snapshots(g, 12);
    const PodBasis basis = build_pod(truth, 4);
    const SensorLayout full = SensorLayout::full_grid(g.n);
    Vec times(1);
    times << 0.5;

    const ObservationSet clean = synthesize_observations(truth, full, times, 0.0, 5);
    const ObservationSet coeffs = observed_coefficients_full(clean, basis);
    const Vec direct = project(basis, truth.data.col(4));
    CHECK((coeffs.values.col(0) - direct).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(coeffs.space == ObservationSet::Space::coefficient);
    CHECK(coeffs.m() == 4);

    // covariance oracle over repeated draws: error ~ N(0, sigma^2 I_R)
    const double sigma = 0.1;
    const int draws = 2000;
    Mat errors(4, draws);
    for (int d = 0; d < draws; ++d) {
        const ObservationSet noisy =
            synthesize_observations(truth, full, times, sigma, 10'000 + d);
        errors.col(d) = observed_coefficients_full(noisy, basis).values.col(0) - direct;
    }
    const Mat cov = errors * errors.transpose() / draws;
    for (int i = 0; i < 4; ++i) {
        CHECK(cov(i, i) == doctest::Approx(sigma * sigma).epsilon(0.15));
        for (int j = 0; j < i; ++j) CHECK(std::abs(cov(i, j)) < 0.1 * sigma * sigma);
    }

    // sparse input is rejected
    const SensorLayout sparse = SensorLayout::eighths_1d(g);
    const ObservationSet sp = synthesize_observations(truth, sparse, times, 0.0, 5);
    CHECK_THROWS_AS(observed_coefficients_full(sp, basis), ConfigError);
}

TEST_CASE("sparse pinv: consistency with full projection and exact recovery") {
    const Grid1D g = Grid1D::uniform(256, 1.0);
    const SnapshotSet truth = smooth_snapshots(g, 10);
    const PodBasis basis = build_pod(truth, 3);
    Vec times(1);
    times << 0.3;

    // all-node "sparse" layout coincides with the orthonormal projection
    SensorLayout everything = SensorLayout::full_grid(g.n);
    everything.kind = SensorLayout::Kind::sparse;
    const ObservationSet clean = synthesize_observations(truth, everything, times, 0.0, 9);
    const ObservationSet via_pinv =
        observed_coefficients_sparse_pinv(clean, basis, everything);
    const Vec direct = project(basis, truth.data.col(2));
    CHECK((via_pinv.values.col(0) - direct).cwiseAbs().maxCoeff() < 1e-8);

    // noiseless sparse samples of a field inside the span recover exactly
    SensorLayout few;
    few.kind = SensorLayout::Kind::sparse;
    few.indices = {10, 40, 77, 120, 200};
    Vec c_true(3);
    c_true << 0.7, -0.4, 0.2;
    const Vec field = reconstruct(basis, c_true);
    SnapshotSet one;
    one.grid = g;
    one.data = field.replicate(1, 1);
    one.times = Vec::Constant(1, 0.1);
    one.snap_dt = 0.1;
    Vec t1(1);
    t1 << 0.1;
    const ObservationSet sampled = synthesize_observations(one, few, t1, 0.0, 3);
    const ObservationSet rec = observed_coefficients_sparse_pinv(sampled, basis, few);
    CHECK((rec.values.col(0) - c_true).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("reconstruction operator: sampled rows, composition, zero row") {
    const Grid1D g = Grid1D::uniform(256, 1.0);
    const SnapshotSet truth = smooth_snapshots(g, 10);
    const PodBasis basis = build_pod(truth, 3);
    SensorLayout few;
    few.kind = SensorLayout::Kind::sparse;
    few.indices = {5, 100, 233};

    const ObservationOperator op = build_reconstruction_operator(basis, few);
    REQUIRE(op.kind == ObservationOperator::Kind::reconstruction_map);
    for (int s = 0; s < 3; ++s)
        for (int k = 0; k < 3; ++k)
            CHECK(op.c(s, k) == basis.modes(few.indices[s], k));  // bit-level copy

    // h(project(f)) equals the rank-R reconstruction sampled at the sensors
    const Vec f = truth.data.col(6);
    const Vec a = project(basis, f);
    const Vec recon = reconstruct(basis, a);
    for (int s = 0; s < 3; ++s) {
        const double via_op = op.c.row(s).dot(a) + op.mean_at_sensors(s);
        CHECK(via_op == doctest::Approx(recon(few.indices[s])).epsilon(1e-12));
    }

    // innovation convention: mean subtraction on both sides, so a field in
    // the span has zero innovation at its own coefficients
    const Vec in_span = reconstruct(basis, a);
    Vec z(3);
    for (int s = 0; s < 3; ++s) z(s) = in_span(few.indices[s]);
    CHECK(op.innovation(z, a).cwiseAbs().maxCoeff() < 1e-12);

    // a sensor where every mode vanishes produces a zero row
    PodBasis pinned = basis;
    pinned.modes.row(42).setZero();
    SensorLayout at_pinned;
    at_pinned.kind = SensorLayout::Kind::sparse;
    at_pinned.indices = {42};
    const ObservationOperator zop = build_reconstruction_operator(pinned, at_pinned);
    CHECK(zop.c.row(0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("identity operator innovation") {
    const ObservationOperator op = identity_observation_operator();
    Vec z(3), a(3);
    z << 1, 2, 3;
    a << 0.5, 2, 2;
    const Vec e = op.innovation(z, a);
    CHECK(e(0) == 0.5);
    CHECK(e(1) == 0.0);
    CHECK(e(2) == 1.0);
    CHECK(op.jacobian(3).isIdentity(0.0));
}
