#include "dlsim/trace.hpp"

#include "dlsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace dlsim {

namespace {

double pattern_time(const Trace& tr, double t) {
    if (!tr.period) return t;
    double r = std::fmod(t, *tr.period);
    if (r < 0.0) r += *tr.period;
    return r;
}

} // namespace

double Trace::at(double t) const {
    if (points.empty()) return 1.0;
    const double teff = pattern_time(*this, t);
    auto it = std::upper_bound(points.begin(), points.end(), teff,
                               [](double v, const TracePoint& p) { return v < p.t; });
    if (it == points.begin()) return 1.0; // before the first point: nominal
    return std::prev(it)->factor;
}

double Trace::next_change(double t) const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (points.empty()) return inf;
    if (!period) {
        auto it = std::upper_bound(points.begin(), points.end(), t,
                                   [](double v, const TracePoint& p) { return v < p.t; });
        return it == points.end() ? inf : it->t;
    }
    const double base = std::floor(t / *period) * *period;
    const double teff = t - base;
    auto it = std::upper_bound(points.begin(), points.end(), teff,
                               [](double v, const TracePoint& p) { return v < p.t; });
    if (it != points.end()) return base + it->t;
    return base + *period; // pattern wraps
}

void Trace::validate() const {
    if (points.empty()) throw ConfigError("trace.points: must contain at least one point");
    double prev = -1.0;
    for (const TracePoint& p : points) {
        if (p.t < 0.0) throw ConfigError("trace.points: times must be non-negative");
        if (p.t <= prev) throw ConfigError("trace.points: times must be strictly increasing");
        if (!(p.factor > 0.0) || p.factor > 1.0)
            throw ConfigError("trace.points: factors must lie in (0,1]");
        prev = p.t;
    }
    if (period) {
        if (*period <= 0.0) throw ConfigError("trace.period: must be strictly positive");
        if (points.back().t >= *period)
            throw ConfigError("trace.points: periodic pattern must fit inside [0, period)");
    }
    if (phase < 0.0) throw ConfigError("trace.phase: must be non-negative");
}

Trace Trace::constant(TraceKind kind, double factor) {
    Trace tr;
    tr.kind = kind;
    tr.points.push_back(TracePoint{0.0, factor});
    tr.validate();
    return tr;
}

void write_trace(std::ostream& os, const Trace& tr) {
    char buf[80];
    if (tr.period) {
        std::snprintf(buf, sizeof(buf), "#period %.17g #phase %.17g", *tr.period, tr.phase);
        os << buf << "\n";
    } else if (tr.phase != 0.0) {
        std::snprintf(buf, sizeof(buf), "#phase %.17g", tr.phase);
        os << buf << "\n";
    }
    for (const TracePoint& p : tr.points) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g", p.t, p.factor);
        os << buf << "\n";
    }
}

Trace read_trace(std::istream& is, TraceKind kind) {
    Trace tr;
    tr.kind = kind;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line);
            std::string tag;
            while (ls >> tag) {
                if (tag == "#period") {
                    double v = 0.0;
                    if (!(ls >> v)) throw ConfigError("trace file: malformed #period header");
                    tr.period = v;
                } else if (tag == "#phase") {
                    if (!(ls >> tr.phase)) throw ConfigError("trace file: malformed #phase header");
                } else {
                    throw ConfigError("trace file: unknown header tag '" + tag + "'");
                }
            }
            continue;
        }
        std::istringstream ls(line);
        TracePoint p;
        if (!(ls >> p.t >> p.factor))
            throw ConfigError("trace file: expected '<t_seconds> <factor>' per line");
        tr.points.push_back(p);
    }
    tr.validate();
    return tr;
}

void save_trace(const std::string& path, const Trace& tr) {
    std::ofstream os(path);
    if (!os) throw ConfigError("trace file: cannot open '" + path + "' for writing");
    write_trace(os, tr);
}

Trace load_trace(const std::string& path, TraceKind kind) {
    std::ifstream is(path);
    if (!is) throw ConfigError("trace file: cannot open '" + path + "'");
    return read_trace(is, kind);
}

} // namespace dlsim
