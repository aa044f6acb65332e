#include "romfsm/container.hpp"
#include "romfsm/experiment.hpp"
#include "romfsm/metrics.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace romfsm;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string output_dir;
    std::string cache_dir;
    std::string scale = "paper";
    std::int64_t seed = -1;  // <0: keep the config seed
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment config file")->required();
    cmd->add_option("--output", args.output_dir, "output directory (overrides config)");
    cmd->add_option("--seed", args.seed, "master seed (overrides config)");
    cmd->add_option("--cache", args.cache_dir, "artifact cache directory");
    cmd->add_option("--scale", args.scale, "paper or desk (desk: 512^2 -> 128^2)")
        ->check(CLI::IsMember({"paper", "desk"}));
}

ExperimentConfig load_config(const CommonArgs& args) {
    ExperimentConfig cfg = parse_config_file(args.config_path);
    if (!args.output_dir.empty()) cfg.output_dir = args.output_dir;
    if (cfg.output_dir.empty())
        throw ConfigError("no output directory (set [experiment] output or pass --output)");
    if (args.seed >= 0) cfg.apply_seed(static_cast<std::uint64_t>(args.seed));
    cfg.apply_scale(args.scale == "desk" ? Scale::desk : Scale::paper);
    cfg.validate();
    return cfg;
}

ExperimentOptions make_options(const ExperimentConfig& cfg, const CommonArgs& args) {
    ExperimentOptions opts;
    opts.cache_dir = args.cache_dir;
    (void)cfg;
    return opts;
}

// trajectory_*.csv reader (header "time,a1,...,aR").
std::pair<Vec, Mat> read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty trajectory file " + path);
    std::vector<double> times;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string item;
        std::vector<double> row;
        while (std::getline(ls, item, ',')) row.push_back(std::stod(item));
        if (row.empty()) continue;
        times.push_back(row.front());
        rows.emplace_back(row.begin() + 1, row.end());
    }
    Vec t(static_cast<long>(times.size()));
    Mat a(static_cast<long>(rows.size()), rows.empty() ? 0 : static_cast<long>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        t(static_cast<long>(i)) = times[i];
        for (std::size_t k = 0; k < rows[i].size(); ++k)
            a(static_cast<long>(i), static_cast<long>(k)) = rows[i][k];
    }
    return {t, a};
}

int cmd_fom(const CommonArgs& args, bool csv) {
    const ExperimentConfig cfg = load_config(args);
    const ExperimentOptions opts = make_options(cfg, args);
    const SnapshotSet snaps = run_fom_stage(cfg, opts);
    fs::create_directories(cfg.output_dir);
    write_snapshots(snaps, (fs::path(cfg.output_dir) / "fom_snapshots.bin").string());
    if (csv) write_snapshots_csv(snaps, (fs::path(cfg.output_dir) / "fom_snapshots.csv").string());
    std::cout << "stored " << snaps.count() << " snapshots (dt between snapshots "
              << snaps.snap_dt << ")\n";
    return 0;
}

int cmd_pod(const CommonArgs& args) {
    const ExperimentConfig cfg = load_config(args);
    const ExperimentOptions opts = make_options(cfg, args);
    const SnapshotSet snaps = run_fom_stage(cfg, opts);
    const PodBasis basis = run_pod_stage(cfg, snaps, opts);
    fs::create_directories(cfg.output_dir);
    write_basis(basis, (fs::path(cfg.output_dir) / "pod_basis.bin").string());
    std::ofstream ric_csv(fs::path(cfg.output_dir) / "pod_ric.csv");
    ric_csv << "r,ric\n";
    char buf[48];
    for (int r = 1; r <= static_cast<int>(basis.singular_values.size()); ++r) {
        std::snprintf(buf, sizeof buf, "%d,%.17g\n", r, ric(basis, r));
        ric_csv << buf;
    }
    std::cout << "basis with r = " << basis.r << ", RIC(r) = " << ric(basis, basis.r) << "\n";
    return 0;
}

int cmd_grom(const CommonArgs& args) {
    const ExperimentConfig cfg = load_config(args);
    const ExperimentOptions opts = make_options(cfg, args);
    const SnapshotSet snaps = run_fom_stage(cfg, opts);
    const PodBasis basis = run_pod_stage(cfg, snaps, opts);
    const GromModel model = run_grom_stage(cfg, basis);
    fs::create_directories(cfg.output_dir);
    write_operators(model, (fs::path(cfg.output_dir) / "grom_operators.bin").string());
    std::cout << "built Galerkin operators (R = " << model.r << ", nu = " << model.nu << ")\n";
    return 0;
}

int run_pipeline(const CommonArgs& args) {
    const ExperimentConfig cfg = load_config(args);
    const MetricsReport report = run_experiment(cfg, make_options(cfg, args));
    if (report.fsm_run) {
        std::cout << "fsm iterations: " << report.fsm_iterations
                  << (report.fsm_converged ? " (converged)" : " (NOT converged)") << "\n";
        std::cout << "final nu_e:";
        for (int k = 0; k < report.final_nu_e.dim(); ++k)
            std::cout << ' ' << report.final_nu_e.values(k);
        std::cout << "\n";
    }
    if (report.times.size() > 0) {
        const long last = report.times.size() - 1;
        std::cout << "RMSE at t = " << report.times(last) << ": TP " << report.rmse_tp(last)
                  << ", GROM " << report.rmse_grom(last);
        if (report.fsm_run) std::cout << ", GROM-FSM " << report.rmse_grom_fsm(last);
        std::cout << "\n";
    }
    if (report.fsm_run && !report.fsm_converged) return 4;
    return 0;
}

int cmd_metrics(const CommonArgs& args) {
    const ExperimentConfig cfg = load_config(args);
    const ExperimentOptions opts = make_options(cfg, args);
    const SnapshotSet snaps = run_fom_stage(cfg, opts);
    const PodBasis basis = run_pod_stage(cfg, snaps, opts);

    std::ofstream out(fs::path(cfg.output_dir) / "rmse_recomputed.csv");
    out << "method,time,rmse\n";
    char buf[96];
    for (const char* name : {"trajectory_tp", "trajectory_grom", "trajectory_grom_fsm"}) {
        const fs::path path = fs::path(cfg.output_dir) / (std::string(name) + ".csv");
        if (!fs::exists(path)) continue;
        auto [times, coeffs] = read_trajectory_csv(path.string());
        // keep only rows with a stored truth snapshot and finite coefficients
        std::vector<long> keep;
        for (long i = 0; i < times.size(); ++i) {
            if (!coeffs.row(i).allFinite()) continue;
            const bool is_initial = std::abs(times(i) - snaps.initial_time) <= 1e-9;
            bool has_truth = is_initial && snaps.initial.size() > 0;
            for (long k = 0; !has_truth && k < snaps.times.size(); ++k)
                has_truth = std::abs(snaps.times(k) - times(i)) <=
                            1e-9 * std::max(1.0, std::abs(times(i)));
            if (has_truth) keep.push_back(i);
        }
        Mat fields(snaps.field_size(), static_cast<long>(keep.size()));
        Vec kept_times(static_cast<long>(keep.size()));
        for (std::size_t j = 0; j < keep.size(); ++j) {
            fields.col(static_cast<long>(j)) =
                reconstruct(basis, coeffs.row(keep[j]).transpose());
            kept_times(static_cast<long>(j)) = times(keep[j]);
        }
        for (const auto& [t, value] : compute_rmse(fields, kept_times, snaps)) {
            std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g\n", name, t, value);
            out << buf;
        }
    }
    std::cout << "wrote rmse_recomputed.csv\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Projection-based reduced order models with forward-sensitivity "
                 "eddy-viscosity estimation"};
    app.require_subcommand(1);

    CommonArgs args;
    bool fom_csv = false;

    auto* fom = app.add_subcommand("fom", "run the full-order solver and store snapshots");
    add_common(fom, args);
    fom->add_flag("--csv", fom_csv, "also export snapshots as CSV");
    auto* pod = app.add_subcommand("pod", "build the reduced basis");
    add_common(pod, args);
    auto* grom = app.add_subcommand("grom", "precompute the Galerkin operators");
    add_common(grom, args);
    auto* assimilate =
        app.add_subcommand("assimilate", "run the pipeline through eddy-viscosity estimation");
    add_common(assimilate, args);
    auto* run = app.add_subcommand("run", "full pipeline: fom, pod, grom, observations, fsm, metrics");
    add_common(run, args);
    auto* metrics = app.add_subcommand("metrics", "recompute RMSE series from stored trajectories");
    add_common(metrics, args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (fom->parsed()) return cmd_fom(args, fom_csv);
        if (pod->parsed()) return cmd_pod(args);
        if (grom->parsed()) return cmd_grom(args);
        if (assimilate->parsed() || run->parsed()) return run_pipeline(args);
        if (metrics->parsed()) return cmd_metrics(args);
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 2;
    } catch (const NumericalError& err) {
        std::cerr << "numerical failure: " << err.what() << "\n";
        return 3;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
