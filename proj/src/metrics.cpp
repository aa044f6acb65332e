#include "romfsm/metrics.hpp"

#include <cmath>

namespace romfsm {

double rmse_single(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw ConfigError("rmse: field length mismatch");
    return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

namespace {

// Index of the truth column matching t, -1 for the stored initial state,
// or throws when nothing matches.
long match_truth(const SnapshotSet& fom, double t) {
    if (std::abs(t - fom.initial_time) <= 1e-9 && fom.initial.size() > 0) return -1;
    for (long k = 0; k < fom.times.size(); ++k)
        if (std::abs(fom.times(k) - t) <= 1e-9 * std::max(1.0, std::abs(t))) return k;
    throw ConfigError("compute_rmse: no matching truth snapshot at t = " + std::to_string(t));
}

}  // namespace

std::vector<std::pair<double, double>> compute_rmse(const Mat& rom_fields, const Vec& rom_times,
                                                    const SnapshotSet& fom) {
    if (rom_fields.cols() != rom_times.size())
        throw ConfigError("compute_rmse: fields/times mismatch");
    if (rom_fields.rows() != fom.field_size())
        throw ConfigError("compute_rmse: grid mismatch");

    std::vector<std::pair<double, double>> series;
    series.reserve(rom_times.size());
    for (long j = 0; j < rom_times.size(); ++j) {
        const long k = match_truth(fom, rom_times(j));
        const Vec truth = (k < 0) ? fom.initial : Vec(fom.data.col(k));
        series.emplace_back(rom_times(j), rmse_single(rom_fields.col(j), truth));
    }
    return series;
}

}  // namespace romfsm
