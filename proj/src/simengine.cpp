#include "dlsim/simengine.hpp"

#include "dlsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <vector>

namespace dlsim {

namespace {

struct Event {
    double t = 0.0;
    EventKind kind = EventKind::RequestComplete;
    int pe = -1;
    std::uint64_t seq = 0;
};

// Min-heap order: (time, completion-before-tick-before-request, PE, sequence).
struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.t != b.t) return a.t > b.t;
        if (a.kind != b.kind) return static_cast<int>(a.kind) > static_cast<int>(b.kind);
        if (a.pe != b.pe) return a.pe > b.pe;
        return a.seq > b.seq;
    }
};

enum class PeStatus { Claiming, Executing, Idle };

struct PeRuntime {
    PeStatus status = PeStatus::Idle;
    double issue_t = 0.0;
    double assign_t = 0.0;
    std::int64_t chunk_start = 0;
    std::int64_t chunk_size = 0;
    double chunk_exec = 0.0;
    double complete_t = 0.0;
    std::uint64_t generation = 0;
};

class Engine {
public:
    explicit Engine(const SimConfig& cfg) : cfg_(cfg) {
        if (cfg.workload == nullptr) throw ConfigError("sim.workload: missing");
        if (cfg.platform == nullptr) throw ConfigError("sim.platform: missing");
        w_ = cfg.workload;
        pm_ = cfg.platform;
        n_ = w_->n;
        p_ = pm_->pe_count();
        if (p_ < 1) throw ConfigError("sim.platform: needs at least one core");
        if (static_cast<std::int64_t>(w_->flops.size()) != n_)
            throw ConfigError("sim.workload: flops length must equal n");

        if (cfg.initial_state) {
            if (cfg.initial_state->n_total != n_)
                throw ConfigError("sim.initial_state: iteration space mismatch");
            if (cfg.initial_state->p != p_)
                throw ConfigError("sim.initial_state: PE count mismatch");
            state_ = *cfg.initial_state;
        } else {
            if (cfg.start_index < 0 || cfg.start_index >= n_)
                throw ConfigError("sim.start_index: must lie in [0, n)");
            state_ = init_state(cfg.technique, n_, cfg.start_index, workload_stats(*w_),
                                platform_summary(*pm_));
        }
        if (state_.remaining() <= 0) throw ConfigError("sim: no unclaimed iterations to run");

        if (cfg.flop_prefix != nullptr) {
            if (static_cast<std::int64_t>(cfg.flop_prefix->size()) != n_ + 1)
                throw ConfigError("sim.flop_prefix: must have n+1 entries");
            prefix_ = cfg.flop_prefix;
        } else {
            owned_prefix_ = flop_prefix_sums(*w_);
            prefix_ = &owned_prefix_;
        }

        if (!cfg.pe_ready.empty() && static_cast<int>(cfg.pe_ready.size()) != p_)
            throw ConfigError("sim.pe_ready: must have one entry per PE");
        if (cfg.sil) {
            if (cfg.sil->period <= 0.0) throw ConfigError("sil.period: must be positive");
            if (!cfg.sil->controller) throw ConfigError("sil.controller: missing");
        }

        pes_.assign(static_cast<std::size_t>(p_), PeRuntime{});
        perf_.assign(static_cast<std::size_t>(p_), PePerf{});
        history_.assign(static_cast<std::size_t>(p_), {});
        last_completion_ = cfg.t0;
    }

    SimResult run() {
        if (!cfg_.sil) timeline_.emplace_back(cfg_.t0, state_.kind);
        for (int pe = 0; pe < p_; ++pe) {
            const double ready =
                cfg_.pe_ready.empty() ? cfg_.t0 : cfg_.pe_ready[static_cast<std::size_t>(pe)];
            issue_claim(pe, std::max(cfg_.t0, ready));
        }
        if (cfg_.sil) push(cfg_.t0, EventKind::SilTick, -1);

        while (!queue_.empty()) {
            const Event ev = queue_.top();
            queue_.pop();
            switch (ev.kind) {
            case EventKind::RequestComplete: on_request_complete(ev.pe, ev.t); break;
            case EventKind::ChunkComplete: on_chunk_complete(ev.pe, ev.t); break;
            case EventKind::SilTick: on_tick(ev.t); break;
            }
        }
        return finish();
    }

private:
    void push(double t, EventKind kind, int pe) { queue_.push(Event{t, kind, pe, seq_++}); }

    void issue_claim(int pe, double t) {
        PeRuntime& pr = pes_[static_cast<std::size_t>(pe)];
        if (state_.scheduled >= n_) {
            // Nothing left to claim, ever: no message needed.
            pr.status = PeStatus::Idle;
            return;
        }
        pr.status = PeStatus::Claiming;
        pr.issue_t = t;
        const double rt = pm_->network.claim_trips * pm_->transfer_time(t);
        push(t + rt, EventKind::RequestComplete, pe);
    }

    void on_request_complete(int pe, double t) {
        PeRuntime& pr = pes_[static_cast<std::size_t>(pe)];
        last_rt_ = t - pr.issue_t;
        have_rt_ = true;
        const std::optional<Chunk> c = next_chunk(state_, pe, t);
        if (!c) {
            // The round trip of a claim that found no work counts as idle.
            pr.status = PeStatus::Idle;
            return;
        }
        pr.status = PeStatus::Executing;
        pr.assign_t = t;
        pr.chunk_start = c->start;
        pr.chunk_size = c->size;
        pr.generation = generation_;
        const double work = (*prefix_)[static_cast<std::size_t>(c->start + c->size)] -
                            (*prefix_)[static_cast<std::size_t>(c->start)];
        const double t_end = integrate_flops(*pm_, pe, t, work);
        pr.chunk_exec = t_end - t;
        pr.complete_t = t_end;

        PePerf& pp = perf_[static_cast<std::size_t>(pe)];
        pp.overhead += t - pr.issue_t;
        pp.chunks += 1;
        pp.iterations += c->size;
        if (cfg_.log_chunks)
            chunk_log_.push_back(
                ChunkLogEntry{pe, pr.issue_t, t, c->start, c->size, t_end, state_.kind});
        push(t_end, EventKind::ChunkComplete, pe);
    }

    void on_chunk_complete(int pe, double t) {
        PeRuntime& pr = pes_[static_cast<std::size_t>(pe)];
        perf_[static_cast<std::size_t>(pe)].busy += pr.chunk_exec;
        last_completion_ = std::max(last_completion_, t);

        const Feedback fb{pe, pr.chunk_size, pr.chunk_exec,
                          pr.chunk_exec + (pr.assign_t - pr.issue_t)};
        if (cfg_.record_history) {
            auto& h = history_[static_cast<std::size_t>(pe)];
            h.push_back(ChunkRecord{static_cast<int>(h.size()) + 1, pr.chunk_size, fb.exec_time,
                                    fb.total_time});
        }
        // Chunks issued by a superseded technique report to the monitor
        // history only; the live state was reseeded from that history.
        if (pr.generation == generation_) record_feedback(state_, fb);
        issue_claim(pe, t);
    }

    void on_tick(double t) {
        if (state_.scheduled >= n_) return; // loop fully claimed: stop ticking
        const MonitorSnapshot snap = make_snapshot(t);
        TickDecision d = cfg_.sil->controller(snap);
        selection_log_.push_back(SelectionEntry{t, d.selected, d.predicted, d.wall_seconds});
        timeline_.emplace_back(t, d.selected);
        if (d.selected != state_.kind) {
            if (!d.install)
                throw std::logic_error("sil tick switched technique without an installed state");
            state_ = std::move(*d.install);
            ++generation_;
            for (int pe = 0; pe < p_; ++pe)
                if (pes_[static_cast<std::size_t>(pe)].status == PeStatus::Idle)
                    issue_claim(pe, t);
        }
        push(t + cfg_.sil->period, EventKind::SilTick, -1);
    }

    MonitorSnapshot make_snapshot(double t) {
        MonitorSnapshot snap;
        snap.t_now = t;
        snap.n_total = n_;
        snap.remaining_start = state_.scheduled;
        snap.current = state_.kind;
        snap.pe_ready.resize(static_cast<std::size_t>(p_));
        snap.busy_until.resize(static_cast<std::size_t>(p_));
        snap.observed_speed.resize(static_cast<std::size_t>(p_));
        for (int pe = 0; pe < p_; ++pe) {
            const PeRuntime& pr = pes_[static_cast<std::size_t>(pe)];
            double ready = t;
            double busy = t;
            if (pr.status == PeStatus::Executing) {
                ready = pr.complete_t;
                busy = pr.complete_t;
            } else if (pr.status == PeStatus::Claiming) {
                ready = pr.issue_t; // the pending claim is re-modeled from its issue time
            }
            snap.pe_ready[static_cast<std::size_t>(pe)] = ready;
            snap.busy_until[static_cast<std::size_t>(pe)] = busy;
        }

        if (cfg_.sil->mode == MonitorMode::GroundTruth) {
            for (int pe = 0; pe < p_; ++pe)
                snap.observed_speed[static_cast<std::size_t>(pe)] = pm_->effective_speed(pe, t);
            snap.observed_bw_factor = pm_->bw_trace->at(t);
            snap.observed_lat_factor = pm_->lat_trace->at(t);
        } else {
            const WorkloadStats& st = stats();
            for (int pe = 0; pe < p_; ++pe) {
                const auto& h = history_[static_cast<std::size_t>(pe)];
                snap.observed_speed[static_cast<std::size_t>(pe)] =
                    h.empty() ? pm_->cores[static_cast<std::size_t>(pe)].speed
                              : static_cast<double>(h.back().size) * st.mu_flop /
                                    h.back().exec_time;
            }
            snap.observed_bw_factor = 1.0;
            snap.observed_lat_factor = 1.0;
            if (have_rt_ && pm_->network.latency0 > 0.0) {
                const double one_way = last_rt_ / pm_->network.claim_trips;
                const double nominal =
                    pm_->network.latency0 + pm_->network.msg_bits / pm_->network.bandwidth0;
                const double extra = std::max(0.0, one_way - nominal);
                snap.observed_lat_factor =
                    pm_->network.latency0 / (pm_->network.latency0 + extra);
            }
        }
        snap.history = history_;
        return snap;
    }

    SimResult finish() {
        SimResult r;
        r.makespan = last_completion_;
        r.per_pe = std::move(perf_);
        for (PePerf& pp : r.per_pe) {
            pp.idle = r.makespan - pp.busy - pp.overhead;
            r.total_chunks += pp.chunks;
            r.total_overhead += pp.overhead;
        }
        r.chunk_log = std::move(chunk_log_);
        r.technique_timeline = std::move(timeline_);
        r.selection_log = std::move(selection_log_);
        return r;
    }

    const WorkloadStats& stats() {
        if (!stats_) stats_ = workload_stats(*w_);
        return *stats_;
    }

    const SimConfig& cfg_;
    const Workload* w_ = nullptr;
    const PlatformModel* pm_ = nullptr;
    std::int64_t n_ = 0;
    int p_ = 0;

    SchedulerState state_;
    std::uint64_t generation_ = 0;

    const std::vector<double>* prefix_ = nullptr;
    std::vector<double> owned_prefix_;
    std::optional<WorkloadStats> stats_;

    std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
    std::uint64_t seq_ = 0;

    std::vector<PeRuntime> pes_;
    std::vector<PePerf> perf_;
    std::vector<std::vector<ChunkRecord>> history_;
    std::vector<ChunkLogEntry> chunk_log_;
    std::vector<std::pair<double, Technique>> timeline_;
    std::vector<SelectionEntry> selection_log_;

    double last_completion_ = 0.0;
    double last_rt_ = 0.0;
    bool have_rt_ = false;
};

} // namespace

const char* to_string(MonitorMode m) {
    switch (m) {
    case MonitorMode::GroundTruth: return "ground-truth";
    case MonitorMode::Estimated: return "estimated";
    }
    return "?";
}

MonitorMode monitor_mode_from_string(const std::string& name) {
    if (name == "ground-truth") return MonitorMode::GroundTruth;
    if (name == "estimated") return MonitorMode::Estimated;
    throw ConfigError("monitor: unknown mode '" + name + "'");
}

std::int64_t SimResult::switch_count() const {
    std::int64_t n = 0;
    for (std::size_t i = 1; i < technique_timeline.size(); ++i)
        if (technique_timeline[i].second != technique_timeline[i - 1].second) ++n;
    return n;
}

std::vector<double> flop_prefix_sums(const Workload& w) {
    std::vector<double> prefix(static_cast<std::size_t>(w.n) + 1, 0.0);
    for (std::int64_t i = 0; i < w.n; ++i)
        prefix[static_cast<std::size_t>(i) + 1] =
            prefix[static_cast<std::size_t>(i)] + w.flops[static_cast<std::size_t>(i)];
    return prefix;
}

double integrate_flops(const PlatformModel& p, int core, double t_start, double flops) {
    if (flops <= 0.0) return t_start;
    const Trace& tr = p.avail(core);
    const double speed0 = p.cores[static_cast<std::size_t>(core)].speed;
    double t = t_start;
    double left = flops;
    for (;;) {
        const double speed = speed0 * tr.at(t);
        const double tn = tr.next_change(t);
        if (tn == std::numeric_limits<double>::infinity()) return t + left / speed;
        const double cap = speed * (tn - t);
        if (left <= cap) return t + left / speed;
        left -= cap;
        t = tn;
    }
}

SimResult simulate(const SimConfig& cfg) {
    Engine engine(cfg);
    return engine.run();
}

void write_chunk_log_csv(std::ostream& os, const SimResult& r) {
    os << "pe,t_request,t_assign,start,size,t_complete,technique\n";
    char buf[160];
    for (const ChunkLogEntry& e : r.chunk_log) {
        std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%lld,%lld,%.12g,%s", e.pe, e.t_request,
                      e.t_assign, static_cast<long long>(e.start),
                      static_cast<long long>(e.size), e.t_complete, to_string(e.technique));
        os << buf << "\n";
    }
}

} // namespace dlsim
