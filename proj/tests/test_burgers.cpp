#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "romfsm/burgers.hpp"

#include <cmath>

using namespace romfsm;

TEST_CASE("square wave honors the piecewise definition and the boundaries") {
    // exact node semantics on a tiny grid: nodes at 0, .25, .5, .75, 1
    const Grid1D tiny = Grid1D::uniform(5, 1.0);
    const Field1D u_tiny = initial_square_wave(tiny);
    CHECK(u_tiny.values(0) == 0.0);
    CHECK(u_tiny.values(1) == 1.0);
    CHECK(u_tiny.values(2) == 1.0);  // node exactly at L/2 takes the "<=" branch
    CHECK(u_tiny.values(3) == 0.0);
    CHECK(u_tiny.values(4) == 0.0);

    const Grid1D g = Grid1D::uniform(4096, 1.0);
    const Field1D u = initial_square_wave(g);
    CHECK(u.values(static_cast<int>(std::llround(0.25 * (g.n - 1)))) == 1.0);
    CHECK(u.values(static_cast<int>(std::llround(0.75 * (g.n - 1)))) == 0.0);
    CHECK(u.values(g.n - 1) == 0.0);
}

TEST_CASE("rhs trivial fields") {
    const Grid1D g = Grid1D::uniform(256, 1.0);
    const CompactDerivatives d(g);
    BurgersConfig cfg;
    cfg.re = 1e30;
    cfg.dt = 1e-4;
    cfg.t_final = 1e-4;

    Field1D zero;
    zero.values = Vec::Zero(g.n);
    CHECK(burgers_rhs(zero, cfg, g, d).cwiseAbs().maxCoeff() == 0.0);

    Field1D constant;
    constant.values = Vec::Constant(g.n, 0.8);
    CHECK(burgers_rhs(constant, cfg, g, d).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("rhs matches the analytic-derivative oracle on sin(2 pi x)") {
    const Grid1D g = Grid1D::uniform(1024, 1.0);
    const CompactDerivatives d(g);
    BurgersConfig cfg;
    cfg.re = 100.0;
    cfg.dt = 1e-4;
    cfg.t_final = 1e-4;

    Field1D u;
    u.values.resize(g.n);
    Vec expected(g.n);
    for (int i = 0; i < g.n; ++i) {
        const double x = g.x(i);
        const double s = std::sin(kTwoPi * x), c = std::cos(kTwoPi * x);
        u.values(i) = s;
        // -u u_x + (1/Re) u_xx with exact derivatives (the skew-symmetric
        // split is analytically identical)
        expected(i) = -s * kTwoPi * c - (kTwoPi * kTwoPi / cfg.re) * s;
    }
    expected(0) = expected(g.n - 1) = 0.0;

    const Vec rhs = burgers_rhs(u, cfg, g, d);
    const double scale = expected.cwiseAbs().maxCoeff();
    CHECK((rhs - expected).cwiseAbs().maxCoeff() / scale < 1e-6);
}

TEST_CASE("RK4 on the heat part matches the analytic decay factor") {
    // stays inside the RK4 stability region: nu * 6/h^2 * dt ~ 0.06
    const Grid1D g = Grid1D::uniform(1024, 1.0);
    const CompactDerivatives d(g);
    BurgersConfig cfg;
    cfg.re = 1e4;
    cfg.dt = 1e-4;
    cfg.t_final = 1e-4;
    BurgersTerms heat_only;
    heat_only.advection = false;

    const double mode = 3.0;
    Vec u(g.n);
    for (int i = 0; i < g.n; ++i) u(i) = std::sin(mode * kPi * g.x(i));

    const int steps = 1000;
    Field1D work;
    for (int s = 0; s < steps; ++s) {
        work.values = u;
        const Vec k1 = burgers_rhs(work, cfg, g, d, heat_only);
        work.values = u + 0.5 * cfg.dt * k1;
        const Vec k2 = burgers_rhs(work, cfg, g, d, heat_only);
        work.values = u + 0.5 * cfg.dt * k2;
        const Vec k3 = burgers_rhs(work, cfg, g, d, heat_only);
        work.values = u + cfg.dt * k3;
        const Vec k4 = burgers_rhs(work, cfg, g, d, heat_only);
        u += (cfg.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    const double t = steps * cfg.dt;
    const double factor = std::exp(-mode * mode * kPi * kPi * t / cfg.re);
    double err = 0.0;
    for (int i = 0; i < g.n; ++i)
        err = std::max(err, std::abs(u(i) - factor * std::sin(mode * kPi * g.x(i))));
    CHECK(err / factor < 1e-8);
}

TEST_CASE("fom stores the expected snapshots and decays mass") {
    const Grid1D g = Grid1D::uniform(1024, 1.0);
    BurgersConfig cfg;
    cfg.re = 1000.0;
    cfg.dt = 1e-4;
    cfg.t_final = 0.5;
    cfg.snapshot_stride = 500;

    const SnapshotSet snaps = run_fom_burgers(cfg, g);
    CHECK(snaps.count() == 10);
    CHECK(snaps.times(0) == doctest::Approx(0.05));
    CHECK(snaps.times(9) == doctest::Approx(0.5));
    CHECK(snaps.initial.size() == g.n);

    // trapezoidal mass decays monotonically (viscous boundary layer at x=0)
    auto mass = [&](const Vec& u) {
        double m = 0.5 * (u(0) + u(g.n - 1));
        for (int i = 1; i < g.n - 1; ++i) m += u(i);
        return m * g.dx;
    };
    double prev = mass(snaps.initial);
    for (long k = 0; k < snaps.count(); ++k) {
        const double cur = mass(snaps.data.col(k));
        CHECK(cur < prev);
        prev = cur;
    }

    // shock advection without spurious blow-up
    CHECK(snaps.data.minCoeff() > -0.1);
    CHECK(snaps.data.maxCoeff() < 1.1);
}

TEST_CASE("single-step run stores exactly one snapshot") {
    const Grid1D g = Grid1D::uniform(64, 1.0);
    BurgersConfig cfg;
    cfg.re = 100.0;
    cfg.dt = 1e-4;
    cfg.t_final = 1e-4;
    cfg.snapshot_stride = 1;
    const SnapshotSet snaps = run_fom_burgers(cfg, g);
    CHECK(snaps.count() == 1);
    CHECK(snaps.times(0) == doctest::Approx(1e-4));
    CHECK(snaps.initial.size() == g.n);
}

TEST_CASE("blow-up is reported with the step index") {
    const Grid1D g = Grid1D::uniform(512, 1.0);
    BurgersConfig cfg;
    cfg.re = 1e4;
    cfg.dt = 0.05;  // CFL busting on purpose
    cfg.t_final = 1.0;
    cfg.snapshot_stride = 1;
    CHECK_THROWS_AS(run_fom_burgers(cfg, g), NumericalError);
    try {
        run_fom_burgers(cfg, g);
    } catch (const NumericalError& err) {
        CHECK(err.step() >= 1);
    }
}

TEST_CASE("config validation") {
    BurgersConfig cfg;
    cfg.re = 1e4;
    cfg.dt = 1e-4;
    cfg.t_final = 1.0;
    cfg.snapshot_stride = 100;
    CHECK_NOTHROW(cfg.validate());
    cfg.snapshot_stride = 3;  // does not divide 10000
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.snapshot_stride = 100;
    cfg.re = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
