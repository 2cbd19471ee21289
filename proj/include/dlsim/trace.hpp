#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dlsim {

enum class TraceKind {
    Availability,
    Bandwidth,
    LatencyFactor,
};

struct TracePoint {
    double t = 0.0;
    double factor = 1.0;
};

// Right-continuous piecewise-constant multiplicative factor of time, always
// in (0,1]. With `period` set the point pattern covers [0, period) and
// repeats; without it the last point's value holds forever. Before the first
// point the factor is 1 (nominal). `phase` records the start of the first
// perturbed window; it is descriptive metadata, the points already encode it.
struct Trace {
    TraceKind kind = TraceKind::Availability;
    std::vector<TracePoint> points; // sorted strictly by t
    std::optional<double> period;
    double phase = 0.0;

    double at(double t) const;
    // First instant strictly after t at which the factor may change;
    // +infinity when the value holds forever.
    double next_change(double t) const;

    void validate() const;
    static Trace constant(TraceKind kind, double factor);
};

// Text format: optional header "#period <seconds> #phase <seconds>", then
// one "<t_seconds> <factor>" pair per line. Round-trips bit-exactly.
void write_trace(std::ostream& os, const Trace& tr);
Trace read_trace(std::istream& is, TraceKind kind);
void save_trace(const std::string& path, const Trace& tr);
Trace load_trace(const std::string& path, TraceKind kind);

} // namespace dlsim
