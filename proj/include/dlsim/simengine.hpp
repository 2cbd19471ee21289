#pragma once

#include "dlsim/platform.hpp"
#include "dlsim/sched.hpp"
#include "dlsim/workload.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

namespace dlsim {

// Tie priority at equal timestamps: completions, then controller ticks, then
// request arrivals; PE index and a monotone sequence number break the rest.
enum class EventKind {
    ChunkComplete = 0,
    SilTick = 1,
    RequestComplete = 2,
};

struct ChunkLogEntry {
    int pe = 0;
    double t_request = 0.0;
    double t_assign = 0.0;
    std::int64_t start = 0;
    std::int64_t size = 0;
    double t_complete = 0.0;
    Technique technique = Technique::SS;
};

struct PePerf {
    double busy = 0.0;
    double overhead = 0.0; // granted-claim round trips
    double idle = 0.0;
    std::int64_t chunks = 0;
    std::int64_t iterations = 0;
};

struct SelectionEntry {
    double t = 0.0;
    Technique selected = Technique::SS;
    std::vector<double> predicted; // one makespan per candidate
    double wall_seconds = 0.0;     // controller cost, outside the simulated clock
};

struct SimResult {
    double makespan = 0.0;
    std::vector<PePerf> per_pe;
    std::vector<ChunkLogEntry> chunk_log;
    std::vector<std::pair<double, Technique>> technique_timeline;
    std::vector<SelectionEntry> selection_log;
    std::vector<Technique> candidates; // selection-log column order
    std::int64_t total_chunks = 0;
    double total_overhead = 0.0;

    std::int64_t switch_count() const;
};

// Mid-execution state handed to the controller at a tick.
struct MonitorSnapshot {
    double t_now = 0.0;
    std::int64_t n_total = 0;
    std::int64_t remaining_start = 0;       // next unclaimed iteration
    std::vector<double> pe_ready;           // claim-issue instant per PE in a what-if run
    std::vector<double> busy_until;         // in-flight chunk completion per PE
    std::vector<double> observed_speed;     // FLOP/s
    double observed_bw_factor = 1.0;
    double observed_lat_factor = 1.0;
    std::vector<std::vector<ChunkRecord>> history; // completed chunks per PE
    Technique current = Technique::SS;
};

enum class MonitorMode {
    GroundTruth,
    Estimated,
};

const char* to_string(MonitorMode m);
MonitorMode monitor_mode_from_string(const std::string& name);

struct TickDecision {
    Technique selected = Technique::SS;
    std::optional<SchedulerState> install; // used when selected != current kind
    std::vector<double> predicted;
    double wall_seconds = 0.0;
};

using TickController = std::function<TickDecision(const MonitorSnapshot&)>;

struct SilHook {
    double period = 50.0;
    MonitorMode mode = MonitorMode::GroundTruth;
    TickController controller;
};

struct SimConfig {
    const Workload* workload = nullptr;
    const PlatformModel* platform = nullptr;
    Technique technique = Technique::SS;
    std::optional<SilHook> sil;

    std::int64_t start_index = 0; // iterations below it are already claimed
    double t0 = 0.0;
    std::optional<SchedulerState> initial_state;
    std::vector<double> pe_ready; // optional per-PE earliest claim instant

    std::uint64_t seed = 0; // provenance only; the engine draws nothing

    bool log_chunks = true;
    bool record_history = true;
    // Optional precomputed cumulative FLOP sums (size n+1) shared across runs.
    const std::vector<double>* flop_prefix = nullptr;
};

// Deterministic discrete-event simulation of decentralized self-scheduling:
// an idle PE pays a claim round trip, receives a chunk, executes it at
// availability-modulated speed, reports feedback, and claims again.
SimResult simulate(const SimConfig& cfg);

// Smallest t_end with integral of effective_speed over [t_start, t_end]
// equal to flops; exact segment walk over the piecewise-constant trace.
double integrate_flops(const PlatformModel& p, int core, double t_start, double flops);

std::vector<double> flop_prefix_sums(const Workload& w);

// CSV header: pe,t_request,t_assign,start,size,t_complete,technique
void write_chunk_log_csv(std::ostream& os, const SimResult& r);

} // namespace dlsim
