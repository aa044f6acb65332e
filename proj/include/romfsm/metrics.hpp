#pragma once

#include "romfsm/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace romfsm {

/// RMSE(t) = sqrt( (1/n) sum_i (u_fom(x_i,t) - u_rom(x_i,t))^2 ) at each
/// matching time. rom_fields columns must align with fom snapshot times.
std::vector<std::pair<double, double>> compute_rmse(const Mat& rom_fields,
                                                    const Vec& rom_times,
                                                    const SnapshotSet& fom);

double rmse_single(const Vec& a, const Vec& b);

}  // namespace romfsm
