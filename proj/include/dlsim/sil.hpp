#pragma once

#include "dlsim/simengine.hpp"

#include <iosfwd>
#include <vector>

namespace dlsim {

// Controller configuration: every `period` seconds the live run is
// snapshotted, the remaining loop is simulated under every candidate on a
// frozen copy of the observed system state, and the live run switches to the
// predicted-best technique for all subsequent claims.
struct SiLConfig {
    double period = 50.0;
    std::vector<Technique> candidates = all_techniques();
    MonitorMode monitor_mode = MonitorMode::GroundTruth;
};

// What-if platform: per-core speeds and network factors held constant at the
// snapshot's observed values.
PlatformModel freeze_platform(const PlatformModel& live, const MonitorSnapshot& snap);

// Fresh state for `kind` over [snap.remaining_start, n); adaptive kinds are
// seeded from the measured per-PE chunk history.
SchedulerState candidate_state(Technique kind, std::int64_t n_total,
                               std::int64_t remaining_start, const WorkloadStats& stats,
                               const PlatformSummary& summary,
                               const std::vector<std::vector<ChunkRecord>>& history);

// Predicted-best technique for the remaining loop. `predicted` (optional)
// receives one makespan per candidate, in candidate order; ties keep the
// earliest candidate.
Technique select_technique(const MonitorSnapshot& snap, const SiLConfig& cfg,
                           const Workload& w, const PlatformModel& live,
                           std::vector<double>* predicted = nullptr);

SimResult run_with_sil(SimConfig base, const SiLConfig& cfg);

// CSV: t,selected,<one predicted-makespan column per candidate name>.
void write_selection_csv(std::ostream& os, const SimResult& r);

// Test/inspection aid: runs `base` under its technique, collecting a snapshot
// every `period` seconds without altering the schedule.
std::vector<MonitorSnapshot> collect_snapshots(SimConfig base, double period,
                                               MonitorMode mode, int max_ticks = -1);

} // namespace dlsim
