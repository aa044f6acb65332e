#pragma once

#include "romfsm/grom.hpp"
#include "romfsm/observations.hpp"
#include "romfsm/pod.hpp"
#include "romfsm/types.hpp"

#include <string>

namespace romfsm {

// Binary container shared by all persisted artifacts. Every file starts with
// the magic string "ROMFSM01", a u32 payload kind and a u32 format version,
// followed by a kind-specific fixed header and raw little-endian f64 payload
// sections. See README for the exact layouts.
inline constexpr char kContainerMagic[8] = {'R', 'O', 'M', 'F', 'S', 'M', '0', '1'};

enum class ContainerKind : std::uint32_t {
    snapshots = 1,
    basis = 2,
    operators = 3,
    observations = 4,
};

void write_snapshots(const SnapshotSet& snaps, const std::string& path);
SnapshotSet read_snapshots(const std::string& path);
void write_snapshots_csv(const SnapshotSet& snaps, const std::string& path);

void write_basis(const PodBasis& basis, const std::string& path);
PodBasis read_basis(const std::string& path);

void write_operators(const GromModel& model, const std::string& path);
GromModel read_operators(const std::string& path);

void write_observations(const ObservationSet& obs, const std::string& path);
ObservationSet read_observations(const std::string& path);

}  // namespace romfsm
