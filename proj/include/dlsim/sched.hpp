#pragma once

#include "dlsim/platform.hpp"
#include "dlsim/workload.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dlsim {

enum class Technique {
    Static = 0,
    SS,
    FSC,
    GSS,
    FAC,
    WF,
    AwfB,
    AwfC,
    AwfD,
    AwfE,
    AF,
};

inline constexpr int kTechniqueCount = 11;

const char* to_string(Technique t); // STATIC, SS, FSC, GSS, FAC, WF, AWF-B..E, AF
Technique technique_from_string(const std::string& name);
const std::vector<Technique>& all_techniques();
bool is_adaptive(Technique t); // AWF-B/C/D/E and AF

// The machine-model inputs the chunk formulas need.
struct PlatformSummary {
    std::vector<double> weights;   // raw per-PE relative speeds
    double reference_speed = 1e9;  // FLOP/s, mean core speed
    double h = 0.0;                // s, scheduling overhead estimate
};

PlatformSummary platform_summary(const PlatformModel& p);

struct Chunk {
    std::int64_t start = 0;
    std::int64_t size = 0;
};

struct Feedback {
    int pe = 0;
    std::int64_t chunk_size = 0;
    double exec_time = 0.0;  // iteration execution only
    double total_time = 0.0; // iterations plus claim overhead
};

struct ChunkRecord {
    int step = 0; // 1-based per-PE record index
    std::int64_t size = 0;
    double exec_time = 0.0;
    double total_time = 0.0;
};

// Mutable per-technique state driven through next_chunk / record_feedback.
// Value-copyable so what-if simulations can fork it. Callers serialize
// access; claims are atomic with respect to `scheduled`.
struct SchedulerState {
    Technique kind = Technique::SS;
    std::int64_t n_total = 0;   // global iteration space size
    std::int64_t scheduled = 0; // next unclaimed iteration index
    std::int64_t base_n = 0;    // iterations owned by this state at init
    int p = 0;

    double h = 0.0;
    double mu_time = 0.0;    // s per iteration at reference speed
    double sigma_time = 0.0; // s per iteration at reference speed

    std::vector<double> static_weights; // sum = p
    std::vector<double> awf_weights;    // sum = p

    std::int64_t static_chunk = 0;
    std::vector<char> static_claimed;
    std::int64_t fsc_chunk = 0;

    // FAC/WF/AWF batching.
    std::int64_t batch_remaining = 0;
    std::int64_t batch_chunk = 0;
    std::int64_t batch_index = -1;
    std::vector<std::int64_t> batch_issued;
    std::vector<std::int64_t> batch_reported;
    std::vector<char> batch_full; // batch fully issued
    std::vector<std::vector<std::int64_t>> outstanding; // per-PE FIFO of batch ids

    // AWF measurement records.
    std::vector<std::vector<ChunkRecord>> awf_records;

    // AF online per-PE estimates of seconds per iteration.
    std::vector<double> af_mean;
    std::vector<double> af_m2;
    std::vector<std::int64_t> af_samples;

    std::int64_t remaining() const { return n_total - scheduled; }
    double af_mu(int pe) const { return af_mean[pe]; }
    double af_sigma(int pe) const;
};

// `scheduled` > 0 starts the technique over the remaining iterations
// [scheduled, n_total), which is how a mid-run technique switch begins.
SchedulerState init_state(Technique kind, std::int64_t n_total, std::int64_t scheduled,
                          const WorkloadStats& stats, const PlatformSummary& ps);
SchedulerState init_state(Technique kind, std::int64_t n_total, const WorkloadStats& stats,
                          const PlatformSummary& ps);

// Claims the next chunk for `pe`. Returns nullopt when there is no work for
// this PE (all iterations claimed, or its one STATIC block already given).
std::optional<Chunk> next_chunk(SchedulerState& s, int pe, double now);

// Adaptive techniques update their estimates; nonadaptive kinds accept and
// ignore the feedback (uniform protocol).
void record_feedback(SchedulerState& s, const Feedback& fb);

// Recomputes AWF weights from the records currently in the state; no-op for
// other kinds. Used after bulk-seeding records from measured history.
void refresh_awf_weights(SchedulerState& s);

} // namespace dlsim
