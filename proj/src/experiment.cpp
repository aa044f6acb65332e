#include "romfsm/experiment.hpp"

#include "romfsm/container.hpp"
#include "romfsm/fsm.hpp"
#include "romfsm/hashing.hpp"
#include "romfsm/metrics.hpp"
#include "romfsm/observations.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <vector>

namespace fs = std::filesystem;

namespace romfsm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void log(const ExperimentOptions& opts, const std::string& msg) {
    if (opts.verbose) std::cout << "[romfsm] " << msg << "\n";
}

std::string resolve_cache_dir(const ExperimentConfig& cfg, const ExperimentOptions& opts) {
    if (!opts.cache_dir.empty()) return opts.cache_dir;
    return (fs::path(cfg.output_dir) / "cache").string();
}

void write_trajectory_csv(const std::string& path, const Vec& times, const Mat& coeffs) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "time";
    for (long k = 0; k < coeffs.cols(); ++k) out << ",a" << (k + 1);
    out << "\n";
    char buf[32];
    for (long i = 0; i < times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", times(i));
        out << buf;
        for (long k = 0; k < coeffs.cols(); ++k) {
            std::snprintf(buf, sizeof buf, ",%.17g", coeffs(i, k));
            out << buf;
        }
        out << "\n";
    }
}

struct TruthLookup {
    const SnapshotSet& fom;
    // index of the truth column for time t, -1 for the initial state,
    // -2 when absent
    long find(double t) const {
        if (std::abs(t - fom.initial_time) <= 1e-9 && fom.initial.size() > 0) return -1;
        for (long k = 0; k < fom.times.size(); ++k)
            if (std::abs(fom.times(k) - t) <= 1e-9 * std::max(1.0, std::abs(t))) return k;
        return -2;
    }
    Vec field(long id) const { return id < 0 ? fom.initial : Vec(fom.data.col(id)); }
};

}  // namespace

double MetricsReport::rmse_at(const Vec& series, double t) const {
    for (long i = 0; i < times.size(); ++i)
        if (std::abs(times(i) - t) <= 1e-9 * std::max(1.0, std::abs(t))) return series(i);
    throw ConfigError("MetricsReport: no metric entry at t = " + std::to_string(t));
}

double MetricsReport::time_mean(const Vec& series, double t_begin, double t_end) const {
    double sum = 0.0;
    long count = 0;
    for (long i = 0; i < times.size(); ++i) {
        if (times(i) < t_begin - 1e-12 || times(i) > t_end + 1e-12) continue;
        if (!std::isfinite(series(i))) return kNaN;  // unstable trajectories poison the mean
        sum += series(i);
        ++count;
    }
    return count > 0 ? sum / count : kNaN;
}

std::uint64_t fom_cache_key(const ExperimentConfig& cfg) {
    Fnv1a h;
    h.add("fom-v1");
    if (cfg.problem == Problem::burgers1d) {
        h.add("burgers").add(cfg.grid1d.n).add(cfg.grid1d.length);
        h.add(cfg.burgers.re).add(cfg.burgers.dt).add(cfg.burgers.t_final)
            .add(cfg.burgers.snapshot_stride);
    } else {
        h.add("vorticity").add(cfg.grid2d.nx).add(cfg.grid2d.ny).add(cfg.grid2d.lx)
            .add(cfg.grid2d.ly);
        h.add(cfg.vorticity.re).add(cfg.vorticity.dt).add(cfg.vorticity.t_final)
            .add(cfg.vorticity.snapshot_stride).add(cfg.vorticity.kp)
            .add(cfg.vorticity.seed)
            .add(static_cast<int>(cfg.vorticity.arakawa))
            .add(static_cast<int>(cfg.vorticity.laplacian));
    }
    return h.value();
}

SnapshotSet run_fom_stage(const ExperimentConfig& cfg, const ExperimentOptions& opts) {
    const std::string cache_dir = resolve_cache_dir(cfg, opts);
    fs::create_directories(cache_dir);
    const fs::path cached = fs::path(cache_dir) / ("fom_" + hex64(fom_cache_key(cfg)) + ".snap");

    if (fs::exists(cached)) {
        log(opts, "fom: cache hit " + cached.string());
        return read_snapshots(cached.string());
    }
    log(opts, "fom: running full-order solve");
    SnapshotSet snaps = cfg.problem == Problem::burgers1d
                            ? run_fom_burgers(cfg.burgers, cfg.grid1d)
                            : run_fom_vorticity(cfg.vorticity, cfg.grid2d);
    write_snapshots(snaps, cached.string());
    log(opts, "fom: cached " + cached.string());
    return snaps;
}

PodBasis run_pod_stage(const ExperimentConfig& cfg, const SnapshotSet& snaps,
                       const ExperimentOptions& opts) {
    const std::string cache_dir = resolve_cache_dir(cfg, opts);
    fs::create_directories(cache_dir);
    Fnv1a h;
    h.add("pod-v1").add(fom_cache_key(cfg)).add(cfg.rom.r);
    const fs::path cached = fs::path(cache_dir) / ("pod_" + hex64(h.value()) + ".basis");

    if (fs::exists(cached)) {
        log(opts, "pod: cache hit " + cached.string());
        return read_basis(cached.string());
    }
    log(opts, "pod: building basis (r = " + std::to_string(cfg.rom.r) + ")");
    PodBasis basis = build_pod(snaps, cfg.rom.r);
    if (cfg.problem == Problem::turbulence2d)
        basis = companion_streamfunction_basis(std::move(basis), cfg.grid2d);
    write_basis(basis, cached.string());
    return basis;
}

GromModel run_grom_stage(const ExperimentConfig& cfg, const PodBasis& basis) {
    if (cfg.problem == Problem::burgers1d)
        return build_grom_burgers(basis, cfg.grid1d, cfg.burgers.re);
    VorticityOperatorOptions vopts;
    vopts.arakawa_order = cfg.vorticity.arakawa == ArakawaOrder::second ? 2 : 4;
    vopts.spectral_laplacian = cfg.vorticity.laplacian == LaplacianKind::spectral;
    return build_grom_vorticity(basis, cfg.grid2d, cfg.vorticity.re, vopts);
}

MetricsReport run_experiment(const ExperimentConfig& cfg, const ExperimentOptions& opts) {
    cfg.validate();
    if (cfg.output_dir.empty()) throw ConfigError("run_experiment: no output directory set");
    fs::create_directories(cfg.output_dir);
    const fs::path out_dir(cfg.output_dir);

    const SnapshotSet snaps = run_fom_stage(cfg, opts);
    const PodBasis basis = run_pod_stage(cfg, snaps, opts);
    const GromModel model = run_grom_stage(cfg, basis);

    MetricsReport report;
    report.ric_r = ric(basis, cfg.rom.r);
    log(opts, "pod: RIC(r) = " + std::to_string(report.ric_r));

    // True-projection coefficients at truth times; reduced initial condition.
    const Mat tp_coeffs = project_snapshots(basis, snaps);
    const Vec a0 = project(basis, snaps.initial);

    const long rom_steps = std::llround(cfg.rom.t_final / cfg.rom.dt);
    const EddyViscosity nu_zero = EddyViscosity::zero(cfg.fsm.mode, model.r);

    log(opts, "grom: integrating unclosed model");
    const RomTrajectory traj_grom =
        integrate_grom(model, a0, nu_zero, cfg.rom.dt, rom_steps, snaps.initial_time);
    report.grom_unstable = traj_grom.blew_up;
    if (traj_grom.blew_up)
        log(opts, "grom: unclosed trajectory blew up at step " +
                      std::to_string(traj_grom.blowup_step) + " (flagged)");

    // Observations + assimilation (skipped entirely without observation times).
    AssimilationResult assim;
    RomTrajectory traj_fsm;
    const bool run_fsm = cfg.obs.times.size() > 0;
    if (run_fsm) {
        SensorLayout layout;
        if (cfg.obs.layout == SensorLayout::Kind::full) {
            layout = SensorLayout::full_grid(snaps.field_size());
        } else if (cfg.problem == Problem::burgers1d) {
            layout = SensorLayout::eighths_1d(cfg.grid1d);
        } else {
            layout = SensorLayout::stride_2d(cfg.grid2d, cfg.obs.sensor_stride);
        }
        const ObservationSet raw =
            synthesize_observations(snaps, layout, cfg.obs.times, cfg.obs.sigma, cfg.obs.seed);
        write_observations_csv(raw, (out_dir / "observations.csv").string());
        write_observations(raw, (out_dir / "observations.bin").string());

        ObservationSet assimilated;
        ObservationOperator op;
        switch (cfg.obs.strategy) {
            case ObsStrategy::full_projection:
                assimilated = observed_coefficients_full(raw, basis);
                op = identity_observation_operator();
                break;
            case ObsStrategy::sparse_pinv:
                assimilated = observed_coefficients_sparse_pinv(raw, basis, layout);
                op = identity_observation_operator();
                break;
            case ObsStrategy::sparse_reconstruction:
                assimilated = raw;
                op = build_reconstruction_operator(basis, layout);
                break;
        }
        for (const auto& flag : assimilated.flags) log(opts, "obs: " + flag);

        log(opts, "fsm: estimating eddy viscosity");
        assim = estimate_eddy_viscosity(model, a0, assimilated, op, cfg.fsm,
                                        EddyViscosity::zero(cfg.fsm.mode, model.r), cfg.rom.dt);
        report.fsm_run = true;
        report.fsm_converged = assim.converged;
        report.fsm_iterations = assim.iterations;
        report.final_nu_e = assim.nu_e;
        for (const auto& note : assim.notes) log(opts, "fsm: " + note);
        log(opts, "fsm: " + std::string(assim.converged ? "converged" : "NOT converged") +
                      " after " + std::to_string(assim.iterations) + " iterations");
        if (opts.write_artifacts)
            write_assimilation_report(assim, (out_dir / "assimilation_report.txt").string(),
                                       (out_dir / "assimilation_iterations.csv").string());

        traj_fsm = integrate_grom(model, assim.a0, assim.nu_e, cfg.rom.dt, rom_steps,
                                  snaps.initial_time);
        report.grom_fsm_unstable = traj_fsm.blew_up;
    } else {
        log(opts, "fsm: no observation times configured; skipping assimilation");
        report.final_nu_e = nu_zero;
    }

    // Metric times: ROM grid points with a stored truth field.
    const TruthLookup truth{snaps};
    std::vector<double> mt;
    std::vector<long> truth_id, rom_row;
    for (long k = 0; k <= rom_steps; ++k) {
        const double t = snaps.initial_time + k * cfg.rom.dt;
        const long id = truth.find(t);
        if (id == -2) continue;
        mt.push_back(t);
        truth_id.push_back(id);
        rom_row.push_back(k);
    }

    report.times.resize(static_cast<long>(mt.size()));
    report.rmse_tp.resize(report.times.size());
    report.rmse_grom.resize(report.times.size());
    report.rmse_grom_fsm = run_fsm ? Vec(report.times.size()) : Vec();

    auto rom_rmse = [&](const RomTrajectory& traj, long row, const Vec& truth_field) {
        if (!traj.coefficients.row(row).allFinite()) return kNaN;
        return rmse_single(reconstruct(basis, traj.coefficients.row(row).transpose()),
                           truth_field);
    };

    for (std::size_t i = 0; i < mt.size(); ++i) {
        const long li = static_cast<long>(i);
        report.times(li) = mt[i];
        const Vec truth_field = truth.field(truth_id[i]);
        const Vec a_tp = truth_id[i] < 0 ? a0 : Vec(tp_coeffs.col(truth_id[i]));
        report.rmse_tp(li) = rmse_single(reconstruct(basis, a_tp), truth_field);
        report.rmse_grom(li) = rom_rmse(traj_grom, rom_row[i], truth_field);
        if (run_fsm) report.rmse_grom_fsm(li) = rom_rmse(traj_fsm, rom_row[i], truth_field);
    }

    if (opts.write_artifacts) {
        // TP coefficients on the truth time grid (initial + snapshots).
        Mat tp_full(tp_coeffs.cols() + 1, model.r);
        Vec tp_times(tp_coeffs.cols() + 1);
        tp_full.row(0) = a0.transpose();
        tp_times(0) = snaps.initial_time;
        for (long k = 0; k < tp_coeffs.cols(); ++k) {
            tp_full.row(k + 1) = tp_coeffs.col(k).transpose();
            tp_times(k + 1) = snaps.times(k);
        }
        write_trajectory_csv((out_dir / "trajectory_tp.csv").string(), tp_times, tp_full);
        write_trajectory_csv((out_dir / "trajectory_grom.csv").string(), traj_grom.times,
                             traj_grom.coefficients);
        if (run_fsm)
            write_trajectory_csv((out_dir / "trajectory_grom_fsm.csv").string(), traj_fsm.times,
                                 traj_fsm.coefficients);

        {
            std::ofstream out(out_dir / "rmse.csv");
            out << "time,rmse_tp,rmse_grom" << (run_fsm ? ",rmse_grom_fsm" : "") << "\n";
            char buf[96];
            for (long i = 0; i < report.times.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", report.times(i),
                              report.rmse_tp(i), report.rmse_grom(i));
                out << buf;
                if (run_fsm) {
                    std::snprintf(buf, sizeof buf, ",%.17g", report.rmse_grom_fsm(i));
                    out << buf;
                }
                out << "\n";
            }
        }

        // Final-time reconstructions for side-by-side comparison.
        if (!mt.empty()) {
            const std::size_t last = mt.size() - 1;
            const Vec truth_field = truth.field(truth_id[last]);
            const Vec a_tp = truth_id[last] < 0 ? a0 : Vec(tp_coeffs.col(truth_id[last]));
            const Vec f_tp = reconstruct(basis, a_tp);
            Vec f_grom = Vec::Constant(truth_field.size(), kNaN);
            if (traj_grom.coefficients.row(rom_row[last]).allFinite())
                f_grom = reconstruct(basis, traj_grom.coefficients.row(rom_row[last]).transpose());
            Vec f_fsm = Vec::Constant(truth_field.size(), kNaN);
            if (run_fsm && traj_fsm.coefficients.row(rom_row[last]).allFinite())
                f_fsm = reconstruct(basis, traj_fsm.coefficients.row(rom_row[last]).transpose());

            std::ofstream out(out_dir / "fields_final.csv");
            char buf[160];
            std::snprintf(buf, sizeof buf, "# t=%.17g\n", mt[last]);
            out << buf << "node,fom,tp,grom" << (run_fsm ? ",grom_fsm" : "") << "\n";
            for (long i = 0; i < truth_field.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g", i, truth_field(i),
                              f_tp(i), f_grom(i));
                out << buf;
                if (run_fsm) {
                    std::snprintf(buf, sizeof buf, ",%.17g", f_fsm(i));
                    out << buf;
                }
                out << "\n";
            }
        }

        write_operators(model, (out_dir / "grom_operators.bin").string());

        nlohmann::json manifest;
        for (const auto& entry : fs::directory_iterator(out_dir)) {
            if (!entry.is_regular_file()) continue;
            const std::string name = entry.path().filename().string();
            if (name == "manifest.json") continue;
            manifest["artifacts"][name] = hex64(hash_file(entry.path().string()));
        }
        const std::string cache_dir = resolve_cache_dir(cfg, opts);
        if (fs::exists(cache_dir)) {
            for (const auto& entry : fs::directory_iterator(cache_dir)) {
                if (!entry.is_regular_file()) continue;
                manifest["cache"][entry.path().filename().string()] =
                    hex64(hash_file(entry.path().string()));
            }
        }
        std::ofstream mout(out_dir / "manifest.json");
        mout << manifest.dump(2) << "\n";
    }

    return report;
}

}  // namespace romfsm
