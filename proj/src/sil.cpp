#include "dlsim/sil.hpp"

#include "dlsim/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>

namespace dlsim {

namespace {

struct EvalContext {
    const Workload* workload = nullptr;
    const PlatformModel* live = nullptr;
    WorkloadStats stats;
    PlatformSummary summary; // technique configuration comes from the nominal machine
    std::vector<double> prefix;
};

EvalContext make_context(const Workload& w, const PlatformModel& live) {
    EvalContext ctx;
    ctx.workload = &w;
    ctx.live = &live;
    ctx.stats = workload_stats(w);
    ctx.summary = platform_summary(live);
    ctx.prefix = flop_prefix_sums(w);
    return ctx;
}

// Runs every candidate on the frozen platform; returns per-candidate
// predicted makespans and the argmin index (earliest candidate wins ties).
std::size_t evaluate_candidates(const EvalContext& ctx, const MonitorSnapshot& snap,
                                const std::vector<Technique>& candidates,
                                std::vector<double>& predicted) {
    const PlatformModel frozen = freeze_platform(*ctx.live, snap);
    double floor_t = snap.t_now;
    for (double b : snap.busy_until) floor_t = std::max(floor_t, b);

    predicted.clear();
    predicted.reserve(candidates.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        SimConfig cc;
        cc.workload = ctx.workload;
        cc.platform = &frozen;
        cc.technique = candidates[i];
        cc.t0 = snap.t_now;
        cc.initial_state = candidate_state(candidates[i], snap.n_total, snap.remaining_start,
                                           ctx.stats, ctx.summary, snap.history);
        cc.pe_ready = snap.pe_ready;
        cc.log_chunks = false;
        cc.record_history = false;
        cc.flop_prefix = &ctx.prefix;
        const SimResult r = simulate(cc);
        const double pred = std::max(r.makespan, floor_t);
        predicted.push_back(pred);
        if (pred < predicted[best]) best = i;
    }
    return best;
}

} // namespace

PlatformModel freeze_platform(const PlatformModel& live, const MonitorSnapshot& snap) {
    PlatformModel frozen = live;
    for (std::size_t i = 0; i < frozen.cores.size(); ++i)
        frozen.cores[i].speed = snap.observed_speed[i];
    TraceSet traces;
    traces.availability =
        std::make_shared<const Trace>(Trace::constant(TraceKind::Availability, 1.0));
    traces.bandwidth = std::make_shared<const Trace>(
        Trace::constant(TraceKind::Bandwidth, snap.observed_bw_factor));
    traces.latency = std::make_shared<const Trace>(
        Trace::constant(TraceKind::LatencyFactor, snap.observed_lat_factor));
    frozen.apply(traces);
    return frozen;
}

SchedulerState candidate_state(Technique kind, std::int64_t n_total,
                               std::int64_t remaining_start, const WorkloadStats& stats,
                               const PlatformSummary& summary,
                               const std::vector<std::vector<ChunkRecord>>& history) {
    SchedulerState st = init_state(kind, n_total, remaining_start, stats, summary);
    if (!is_adaptive(kind)) return st;
    for (std::size_t pe = 0; pe < history.size(); ++pe) {
        for (const ChunkRecord& rec : history[pe]) {
            if (kind == Technique::AF) {
                Feedback fb;
                fb.pe = static_cast<int>(pe);
                fb.chunk_size = rec.size;
                fb.exec_time = rec.exec_time;
                fb.total_time = rec.total_time;
                record_feedback(st, fb);
            } else {
                auto& recs = st.awf_records[pe];
                recs.push_back(ChunkRecord{static_cast<int>(recs.size()) + 1, rec.size,
                                           rec.exec_time, rec.total_time});
            }
        }
    }
    refresh_awf_weights(st);
    return st;
}

Technique select_technique(const MonitorSnapshot& snap, const SiLConfig& cfg, const Workload& w,
                           const PlatformModel& live, std::vector<double>* predicted) {
    if (cfg.candidates.empty()) throw ConfigError("sil.candidates: must be non-empty");
    if (snap.remaining_start >= snap.n_total)
        throw ConfigError("sil: nothing remains to schedule");
    const EvalContext ctx = make_context(w, live);
    std::vector<double> preds;
    const std::size_t best = evaluate_candidates(ctx, snap, cfg.candidates, preds);
    if (predicted != nullptr) *predicted = preds;
    return cfg.candidates[best];
}

SimResult run_with_sil(SimConfig base, const SiLConfig& cfg) {
    if (cfg.candidates.empty()) throw ConfigError("sil.candidates: must be non-empty");
    if (cfg.period <= 0.0) throw ConfigError("sil.period: must be positive");
    if (base.workload == nullptr || base.platform == nullptr)
        throw ConfigError("sim: workload and platform required");

    const EvalContext ctx = make_context(*base.workload, *base.platform);

    SilHook hook;
    hook.period = cfg.period;
    hook.mode = cfg.monitor_mode;
    hook.controller = [&ctx, &cfg](const MonitorSnapshot& snap) -> TickDecision {
        const auto wall0 = std::chrono::steady_clock::now();
        TickDecision d;
        const std::size_t best = evaluate_candidates(ctx, snap, cfg.candidates, d.predicted);
        d.selected = cfg.candidates[best];
        if (d.selected != snap.current) {
            d.install = candidate_state(d.selected, snap.n_total, snap.remaining_start,
                                        ctx.stats, ctx.summary, snap.history);
        }
        d.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
        return d;
    };

    base.sil = hook;
    // Placeholder until the t0 tick selects; built exactly like the
    // controller would build it, so a first selection equal to it installs
    // nothing and stays bit-identical.
    base.technique = cfg.candidates.front();
    if (!base.initial_state) {
        base.initial_state = candidate_state(cfg.candidates.front(), base.workload->n,
                                             base.start_index, ctx.stats, ctx.summary,
                                             std::vector<std::vector<ChunkRecord>>(
                                                 static_cast<std::size_t>(
                                                     base.platform->pe_count())));
    }
    base.flop_prefix = &ctx.prefix;

    SimResult r = simulate(base);
    r.candidates = cfg.candidates;
    return r;
}

void write_selection_csv(std::ostream& os, const SimResult& r) {
    os << "t,selected";
    for (Technique c : r.candidates) os << "," << to_string(c);
    os << "\n";
    char buf[64];
    for (const SelectionEntry& e : r.selection_log) {
        std::snprintf(buf, sizeof(buf), "%.12g", e.t);
        os << buf << "," << to_string(e.selected);
        for (double p : e.predicted) {
            std::snprintf(buf, sizeof(buf), "%.12g", p);
            os << "," << buf;
        }
        os << "\n";
    }
}

std::vector<MonitorSnapshot> collect_snapshots(SimConfig base, double period, MonitorMode mode,
                                               int max_ticks) {
    auto snaps = std::make_shared<std::vector<MonitorSnapshot>>();
    SilHook hook;
    hook.period = period;
    hook.mode = mode;
    hook.controller = [snaps, max_ticks](const MonitorSnapshot& snap) -> TickDecision {
        if (max_ticks < 0 || static_cast<int>(snaps->size()) < max_ticks)
            snaps->push_back(snap);
        TickDecision d;
        d.selected = snap.current; // never switch: pure observation
        return d;
    };
    base.sil = hook;
    simulate(base);
    return *snaps;
}

} // namespace dlsim
