#pragma once

#include "romfsm/config.hpp"
#include "romfsm/grom.hpp"
#include "romfsm/metrics.hpp"
#include "romfsm/pod.hpp"

#include <optional>
#include <string>

namespace romfsm {

struct MetricsReport {
    Vec times;
    Vec rmse_tp;
    Vec rmse_grom;
    Vec rmse_grom_fsm;  // empty when the FSM stage was skipped
    bool fsm_run = false;
    bool fsm_converged = false;
    int fsm_iterations = 0;
    EddyViscosity final_nu_e;
    bool grom_unstable = false;
    bool grom_fsm_unstable = false;
    double ric_r = 0.0;  // RIC at the configured r

    double rmse_at(const Vec& series, double t) const;
    double time_mean(const Vec& series, double t_begin, double t_end) const;
};

struct ExperimentOptions {
    std::string cache_dir;  // FOM/POD artifact cache; defaults to output_dir/cache
    bool verbose = true;
    bool write_artifacts = true;
};

/// Full pipeline: FOM -> snapshots -> POD -> GROM -> observations -> FSM ->
/// metrics, with content-hash caching of the FOM and POD stages and CSV/report
/// artifacts under output_dir.
MetricsReport run_experiment(const ExperimentConfig& cfg, const ExperimentOptions& opts = {});

// Stage entry points used by the CLI subcommands.
std::uint64_t fom_cache_key(const ExperimentConfig& cfg);
SnapshotSet run_fom_stage(const ExperimentConfig& cfg, const ExperimentOptions& opts);
PodBasis run_pod_stage(const ExperimentConfig& cfg, const SnapshotSet& snaps,
                       const ExperimentOptions& opts);
GromModel run_grom_stage(const ExperimentConfig& cfg, const PodBasis& basis);

}  // namespace romfsm
