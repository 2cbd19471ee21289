#include "dlsim/sched.hpp"

#include "dlsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dlsim {

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

std::int64_t round_half_up(double x) {
    return static_cast<std::int64_t>(std::floor(x + 0.5));
}

bool is_batched(Technique t) {
    switch (t) {
    case Technique::FAC:
    case Technique::WF:
    case Technique::AwfB:
    case Technique::AwfC:
    case Technique::AwfD:
    case Technique::AwfE: return true;
    default: return false;
    }
}

bool batch_gated(Technique t) { return t == Technique::AwfB || t == Technique::AwfD; }

bool total_time_basis(Technique t) { return t == Technique::AwfD || t == Technique::AwfE; }

// Inverse weighted-average-cost weights, normalized to sum P. PEs without
// measurements take the mean raw weight of the measured ones, which lands
// them at exactly 1.0 after normalization.
void recompute_awf_weights(SchedulerState& s) {
    const bool use_total = total_time_basis(s.kind);
    std::vector<double> raw(static_cast<std::size_t>(s.p), 0.0);
    double raw_sum = 0.0;
    int known = 0;
    for (int pe = 0; pe < s.p; ++pe) {
        const auto& recs = s.awf_records[static_cast<std::size_t>(pe)];
        if (recs.empty()) continue;
        double num = 0.0;
        double den = 0.0;
        for (const ChunkRecord& r : recs) {
            const double cost =
                (use_total ? r.total_time : r.exec_time) / static_cast<double>(r.size);
            num += static_cast<double>(r.step) * cost;
            den += static_cast<double>(r.step);
        }
        const double pi = num / den; // weighted average cost per iteration
        raw[static_cast<std::size_t>(pe)] = 1.0 / pi;
        raw_sum += 1.0 / pi;
        ++known;
    }
    if (known == 0) return;
    const double mean_raw = raw_sum / known;
    double denom = 0.0;
    for (int pe = 0; pe < s.p; ++pe) {
        if (raw[static_cast<std::size_t>(pe)] == 0.0) raw[static_cast<std::size_t>(pe)] = mean_raw;
        denom += raw[static_cast<std::size_t>(pe)];
    }
    for (int pe = 0; pe < s.p; ++pe)
        s.awf_weights[static_cast<std::size_t>(pe)] =
            static_cast<double>(s.p) * raw[static_cast<std::size_t>(pe)] / denom;
}

void start_batch(SchedulerState& s) {
    const std::int64_t batch = ceil_div(s.remaining(), 2);
    s.batch_chunk = ceil_div(batch, s.p);
    s.batch_remaining = batch;
    ++s.batch_index;
    s.batch_issued.push_back(0);
    s.batch_reported.push_back(0);
    s.batch_full.push_back(0);
}

} // namespace

const char* to_string(Technique t) {
    switch (t) {
    case Technique::Static: return "STATIC";
    case Technique::SS: return "SS";
    case Technique::FSC: return "FSC";
    case Technique::GSS: return "GSS";
    case Technique::FAC: return "FAC";
    case Technique::WF: return "WF";
    case Technique::AwfB: return "AWF-B";
    case Technique::AwfC: return "AWF-C";
    case Technique::AwfD: return "AWF-D";
    case Technique::AwfE: return "AWF-E";
    case Technique::AF: return "AF";
    }
    return "?";
}

const std::vector<Technique>& all_techniques() {
    static const std::vector<Technique> all = {
        Technique::Static, Technique::SS,   Technique::FSC,  Technique::GSS,
        Technique::FAC,    Technique::WF,   Technique::AwfB, Technique::AwfC,
        Technique::AwfD,   Technique::AwfE, Technique::AF,
    };
    return all;
}

Technique technique_from_string(const std::string& name) {
    for (Technique t : all_techniques())
        if (name == to_string(t)) return t;
    throw ConfigError("technique: unknown technique '" + name + "'");
}

bool is_adaptive(Technique t) {
    switch (t) {
    case Technique::AwfB:
    case Technique::AwfC:
    case Technique::AwfD:
    case Technique::AwfE:
    case Technique::AF: return true;
    default: return false;
    }
}

PlatformSummary platform_summary(const PlatformModel& p) {
    PlatformSummary ps;
    ps.weights.reserve(p.cores.size());
    for (const CoreSpec& c : p.cores) ps.weights.push_back(c.weight);
    ps.reference_speed = p.reference_speed();
    ps.h = p.nominal_round_trip();
    return ps;
}

double SchedulerState::af_sigma(int pe) const {
    const std::int64_t n = af_samples[static_cast<std::size_t>(pe)];
    if (n <= 1) return 0.0;
    return std::sqrt(af_m2[static_cast<std::size_t>(pe)] / static_cast<double>(n - 1));
}

SchedulerState init_state(Technique kind, std::int64_t n_total, std::int64_t scheduled,
                          const WorkloadStats& stats, const PlatformSummary& ps) {
    if (n_total < 1) throw ConfigError("scheduler.n: must be at least 1");
    if (scheduled < 0 || scheduled >= n_total)
        throw ConfigError("scheduler.scheduled: must lie in [0, n)");
    const int p = static_cast<int>(ps.weights.size());
    if (p < 1) throw ConfigError("scheduler.p: must be at least 1");
    if (ps.reference_speed <= 0.0)
        throw ConfigError("scheduler.reference_speed: must be strictly positive");

    SchedulerState s;
    s.kind = kind;
    s.n_total = n_total;
    s.scheduled = scheduled;
    s.base_n = n_total - scheduled;
    s.p = p;
    s.h = ps.h;
    s.mu_time = stats.mu_flop / ps.reference_speed;
    s.sigma_time = stats.sigma_flop / ps.reference_speed;

    double wsum = 0.0;
    for (double w : ps.weights) {
        if (w <= 0.0) throw ConfigError("scheduler.weights: must be strictly positive");
        wsum += w;
    }
    s.static_weights.reserve(ps.weights.size());
    for (double w : ps.weights) s.static_weights.push_back(w * static_cast<double>(p) / wsum);
    s.awf_weights.assign(static_cast<std::size_t>(p), 1.0);

    s.static_chunk = ceil_div(s.base_n, p);
    s.static_claimed.assign(static_cast<std::size_t>(p), 0);

    if (kind == Technique::FSC) {
        if (s.h <= 0.0)
            throw ConfigError("scheduler.h: FSC needs a positive scheduling overhead estimate");
        if (s.sigma_time <= 0.0 || p == 1) {
            s.fsc_chunk = s.static_chunk;
        } else {
            const double num = std::sqrt(2.0) * static_cast<double>(s.base_n) * s.h;
            const double den =
                s.sigma_time * static_cast<double>(p) * std::sqrt(std::log(static_cast<double>(p)));
            const double k = std::pow(num / den, 2.0 / 3.0);
            s.fsc_chunk = std::max<std::int64_t>(
                1, std::min<std::int64_t>(s.base_n, static_cast<std::int64_t>(std::ceil(k))));
        }
    }

    s.outstanding.assign(static_cast<std::size_t>(p), {});
    s.awf_records.assign(static_cast<std::size_t>(p), {});
    s.af_mean.assign(static_cast<std::size_t>(p), 0.0);
    s.af_m2.assign(static_cast<std::size_t>(p), 0.0);
    s.af_samples.assign(static_cast<std::size_t>(p), 0);
    return s;
}

SchedulerState init_state(Technique kind, std::int64_t n_total, const WorkloadStats& stats,
                          const PlatformSummary& ps) {
    return init_state(kind, n_total, 0, stats, ps);
}

std::optional<Chunk> next_chunk(SchedulerState& s, int pe, double) {
    if (pe < 0 || pe >= s.p) throw std::out_of_range("scheduler: pe index out of range");
    const std::int64_t r = s.remaining();
    if (r <= 0) return std::nullopt;

    std::int64_t size = 0;
    switch (s.kind) {
    case Technique::Static:
        if (s.static_claimed[static_cast<std::size_t>(pe)]) return std::nullopt;
        s.static_claimed[static_cast<std::size_t>(pe)] = 1;
        size = s.static_chunk;
        break;
    case Technique::SS:
        size = 1;
        break;
    case Technique::FSC:
        size = s.fsc_chunk;
        break;
    case Technique::GSS:
        size = ceil_div(r, s.p);
        break;
    case Technique::FAC:
    case Technique::WF:
    case Technique::AwfB:
    case Technique::AwfC:
    case Technique::AwfD:
    case Technique::AwfE: {
        if (s.batch_remaining == 0) start_batch(s);
        if (s.kind == Technique::FAC) {
            size = s.batch_chunk;
        } else {
            const auto& w = (s.kind == Technique::WF) ? s.static_weights : s.awf_weights;
            size = round_half_up(w[static_cast<std::size_t>(pe)] *
                                 static_cast<double>(s.batch_chunk));
        }
        size = std::max<std::int64_t>(1, size);
        size = std::min(size, s.batch_remaining);
        s.batch_remaining -= size;
        s.batch_issued[static_cast<std::size_t>(s.batch_index)] += 1;
        if (s.batch_remaining == 0) s.batch_full[static_cast<std::size_t>(s.batch_index)] = 1;
        s.outstanding[static_cast<std::size_t>(pe)].push_back(s.batch_index);
        break;
    }
    case Technique::AF: {
        if (s.af_samples[static_cast<std::size_t>(pe)] == 0) {
            size = ceil_div(r, 2 * static_cast<std::int64_t>(s.p));
        } else {
            double d = 0.0;
            double inv = 0.0;
            for (int j = 0; j < s.p; ++j) {
                if (s.af_samples[static_cast<std::size_t>(j)] == 0) continue;
                const double mu = s.af_mean[static_cast<std::size_t>(j)];
                const double sigma = s.af_sigma(j);
                d += sigma * sigma / mu;
                inv += 1.0 / mu;
            }
            const double t = static_cast<double>(r) / inv;
            const double mu_pe = s.af_mean[static_cast<std::size_t>(pe)];
            const double k =
                (d + 2.0 * t - std::sqrt(d * d + 4.0 * d * t)) / (2.0 * mu_pe);
            size = static_cast<std::int64_t>(std::ceil(k));
        }
        break;
    }
    }

    size = std::max<std::int64_t>(1, std::min(size, r));
    Chunk c{s.scheduled, size};
    s.scheduled += size;
    return c;
}

void refresh_awf_weights(SchedulerState& s) {
    switch (s.kind) {
    case Technique::AwfB:
    case Technique::AwfC:
    case Technique::AwfD:
    case Technique::AwfE: recompute_awf_weights(s); break;
    default: break;
    }
}

void record_feedback(SchedulerState& s, const Feedback& fb) {
    if (fb.pe < 0 || fb.pe >= s.p) throw std::out_of_range("scheduler: pe index out of range");
    if (fb.chunk_size < 1) throw ConfigError("feedback.chunk_size: must be at least 1");
    if (!(fb.exec_time > 0.0)) throw ConfigError("feedback.exec_time: must be positive");
    if (fb.total_time < fb.exec_time)
        throw ConfigError("feedback.total_time: must not be below exec_time");

    const auto pe = static_cast<std::size_t>(fb.pe);
    switch (s.kind) {
    case Technique::AwfB:
    case Technique::AwfC:
    case Technique::AwfD:
    case Technique::AwfE: {
        auto& recs = s.awf_records[pe];
        recs.push_back(ChunkRecord{static_cast<int>(recs.size()) + 1, fb.chunk_size,
                                   fb.exec_time, fb.total_time});
        auto& out = s.outstanding[pe];
        std::int64_t batch = -1;
        if (!out.empty()) {
            batch = out.front();
            out.erase(out.begin());
            s.batch_reported[static_cast<std::size_t>(batch)] += 1;
        }
        if (batch_gated(s.kind)) {
            // -B/-D update only once the whole batch has reported.
            if (batch >= 0 && s.batch_full[static_cast<std::size_t>(batch)] &&
                s.batch_reported[static_cast<std::size_t>(batch)] ==
                    s.batch_issued[static_cast<std::size_t>(batch)]) {
                recompute_awf_weights(s);
            }
        } else {
            recompute_awf_weights(s);
        }
        break;
    }
    case Technique::AF: {
        const double x = fb.exec_time / static_cast<double>(fb.chunk_size);
        std::int64_t& n = s.af_samples[pe];
        ++n;
        const double delta = x - s.af_mean[pe];
        s.af_mean[pe] += delta / static_cast<double>(n);
        s.af_m2[pe] += delta * (x - s.af_mean[pe]);
        break;
    }
    default:
        break; // nonadaptive kinds accept and ignore feedback
    }
}

} // namespace dlsim
