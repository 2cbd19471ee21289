#include "dlsim/platform.hpp"

#include "dlsim/errors.hpp"
#include "dlsim/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dlsim {

namespace {

struct ScenarioTraits {
    bool pea = false;
    bool bw = false;
    bool lat = false;
    bool severe = false;
    bool exponential = false;
};

ScenarioTraits decode(Scenario s) {
    ScenarioTraits t;
    switch (s) {
    case Scenario::Np: return t;
    case Scenario::PeaCm: t.pea = true; break;
    case Scenario::PeaCs: t.pea = t.severe = true; break;
    case Scenario::PeaEm: t.pea = t.exponential = true; break;
    case Scenario::PeaEs: t.pea = t.severe = t.exponential = true; break;
    case Scenario::BwCm: t.bw = true; break;
    case Scenario::BwCs: t.bw = t.severe = true; break;
    case Scenario::BwEm: t.bw = t.exponential = true; break;
    case Scenario::BwEs: t.bw = t.severe = t.exponential = true; break;
    case Scenario::LatCm: t.lat = true; break;
    case Scenario::LatCs: t.lat = t.severe = true; break;
    case Scenario::LatEm: t.lat = t.exponential = true; break;
    case Scenario::LatEs: t.lat = t.severe = t.exponential = true; break;
    case Scenario::AllCm: t.pea = t.bw = t.lat = true; break;
    case Scenario::AllCs: t.pea = t.bw = t.lat = t.severe = true; break;
    case Scenario::AllEm: t.pea = t.bw = t.lat = t.exponential = true; break;
    case Scenario::AllEs: t.pea = t.bw = t.lat = t.severe = t.exponential = true; break;
    }
    return t;
}

// Windows are [first, first+50), [first+100, first+150), ... The constant
// variants repeat forever; the exponential variants redraw one factor per
// window out to `horizon` and hold the tail.
Trace make_windows(TraceKind kind, double first, double factor, bool exponential, Rng rng,
                   double horizon) {
    Trace tr;
    tr.kind = kind;
    tr.phase = first;
    if (!exponential) {
        tr.period = kPerturbPeriod;
        if (first == 0.0) {
            tr.points = {{0.0, factor}, {kPerturbWindow, 1.0}};
        } else {
            tr.points = {{0.0, 1.0}, {first, factor}};
        }
    } else {
        if (first > 0.0) tr.points.push_back({0.0, 1.0});
        for (double w = first; w < horizon; w += kPerturbPeriod) {
            const double f = std::min(1.0, rng.exponential(factor));
            tr.points.push_back({w, f});
            tr.points.push_back({w + kPerturbWindow, 1.0});
        }
        if (tr.points.empty()) tr.points.push_back({0.0, 1.0});
    }
    tr.validate();
    return tr;
}

} // namespace

const char* to_string(CoreClass k) {
    switch (k) {
    case CoreClass::Broadwell: return "broadwell";
    case CoreClass::Knl: return "knl";
    case CoreClass::Custom: return "custom";
    }
    return "?";
}

void NetworkSpec::validate() const {
    if (latency0 < 0.0) throw ConfigError("network.latency0: must be non-negative");
    if (bandwidth0 <= 0.0) throw ConfigError("network.bandwidth0: must be strictly positive");
    if (msg_bits < 0.0) throw ConfigError("network.msg_bits: must be non-negative");
    if (claim_trips < 1) throw ConfigError("network.claim_trips: must be at least 1");
}

const char* to_string(Scenario s) {
    switch (s) {
    case Scenario::Np: return "np";
    case Scenario::PeaCm: return "pea-cm";
    case Scenario::PeaCs: return "pea-cs";
    case Scenario::PeaEm: return "pea-em";
    case Scenario::PeaEs: return "pea-es";
    case Scenario::BwCm: return "bw-cm";
    case Scenario::BwCs: return "bw-cs";
    case Scenario::BwEm: return "bw-em";
    case Scenario::BwEs: return "bw-es";
    case Scenario::LatCm: return "lat-cm";
    case Scenario::LatCs: return "lat-cs";
    case Scenario::LatEm: return "lat-em";
    case Scenario::LatEs: return "lat-es";
    case Scenario::AllCm: return "all-cm";
    case Scenario::AllCs: return "all-cs";
    case Scenario::AllEm: return "all-em";
    case Scenario::AllEs: return "all-es";
    }
    return "?";
}

const std::vector<Scenario>& all_scenarios() {
    static const std::vector<Scenario> all = {
        Scenario::Np,
        Scenario::PeaCm, Scenario::PeaCs, Scenario::PeaEm, Scenario::PeaEs,
        Scenario::BwCm,  Scenario::BwCs,  Scenario::BwEm,  Scenario::BwEs,
        Scenario::LatCm, Scenario::LatCs, Scenario::LatEm, Scenario::LatEs,
        Scenario::AllCm, Scenario::AllCs, Scenario::AllEm, Scenario::AllEs,
    };
    return all;
}

Scenario scenario_from_string(const std::string& name) {
    for (Scenario s : all_scenarios())
        if (name == to_string(s)) return s;
    throw ConfigError("scenario: unknown scenario code '" + name + "'");
}

TraceSet generate_traces(const PerturbationSpec& spec, double horizon) {
    if (horizon <= 0.0) throw ConfigError("traces.horizon: must be strictly positive");
    const ScenarioTraits t = decode(spec.scenario);

    TraceSet out;
    out.availability =
        std::make_shared<const Trace>(Trace::constant(TraceKind::Availability, 1.0));
    out.bandwidth = std::make_shared<const Trace>(Trace::constant(TraceKind::Bandwidth, 1.0));
    out.latency = std::make_shared<const Trace>(Trace::constant(TraceKind::LatencyFactor, 1.0));

    const double pea_factor = t.severe ? kPeaSevere : kPeaMild;
    const double net_factor = t.severe ? kNetSevere : kNetMild;

    // One independent draw stream per trace kind so "all-*" equals the
    // pointwise combination of the individual scenarios under the same seed.
    if (t.pea) {
        out.availability = std::make_shared<const Trace>(
            make_windows(TraceKind::Availability, kPeaPhase, pea_factor, t.exponential,
                         Rng::for_stream(spec.seed, RngStream::Availability), horizon));
    }
    if (t.bw) {
        out.bandwidth = std::make_shared<const Trace>(
            make_windows(TraceKind::Bandwidth, 0.0, net_factor, t.exponential,
                         Rng::for_stream(spec.seed, RngStream::Bandwidth), horizon));
    }
    if (t.lat) {
        out.latency = std::make_shared<const Trace>(
            make_windows(TraceKind::LatencyFactor, 0.0, net_factor, t.exponential,
                         Rng::for_stream(spec.seed, RngStream::Latency), horizon));
    }
    return out;
}

double PlatformModel::aggregate_speed() const {
    double s = 0.0;
    for (const CoreSpec& c : cores) s += c.speed;
    return s;
}

double PlatformModel::reference_speed() const {
    return aggregate_speed() / static_cast<double>(cores.size());
}

double PlatformModel::nominal_round_trip() const {
    return network.claim_trips * (network.latency0 + network.msg_bits / network.bandwidth0);
}

const Trace& PlatformModel::avail(int core) const {
    if (core < 0 || core >= pe_count()) throw std::out_of_range("core index out of range");
    return *avail_traces[static_cast<std::size_t>(core)];
}

double PlatformModel::effective_speed(int core, double t) const {
    return cores[static_cast<std::size_t>(core)].speed * avail(core).at(t);
}

double PlatformModel::transfer_time(double t) const {
    const double lat_f = lat_trace->at(t);
    const double bw_f = bw_trace->at(t);
    const double lat =
        network.latency_divides ? network.latency0 / lat_f : network.latency0 * lat_f;
    return lat + network.msg_bits / (network.bandwidth0 * bw_f);
}

void PlatformModel::apply(const TraceSet& traces) {
    avail_traces.assign(cores.size(), traces.availability);
    bw_trace = traces.bandwidth;
    lat_trace = traces.latency;
}

PlatformModel build_platform_custom(const std::vector<std::pair<CoreClass, double>>& cores,
                                    double s0, NetworkSpec net) {
    if (cores.empty()) throw ConfigError("platform.cores: empty core list");
    if (s0 <= 0.0) throw ConfigError("platform.s0: must be strictly positive");
    net.validate();

    PlatformModel p;
    p.network = net;
    p.cores.reserve(cores.size());
    int id = 0;
    for (const auto& [klass, weight] : cores) {
        if (weight <= 0.0) throw ConfigError("platform.cores: core weight must be positive");
        CoreSpec c;
        c.id = id++;
        c.klass = klass;
        c.weight = weight;
        c.speed = weight * s0;
        p.cores.push_back(c);
    }
    p.apply(generate_traces(PerturbationSpec{Scenario::Np, 0}, 1.0));
    return p;
}

PlatformModel build_platform_mix(int broadwell, int knl, double s0, NetworkSpec net) {
    std::vector<std::pair<CoreClass, double>> cores;
    cores.reserve(static_cast<std::size_t>(broadwell + knl));
    for (int i = 0; i < broadwell; ++i) cores.emplace_back(CoreClass::Broadwell, kBroadwellWeight);
    for (int i = 0; i < knl; ++i) cores.emplace_back(CoreClass::Knl, kKnlWeight);
    return build_platform_custom(cores, s0, net);
}

PlatformModel build_platform(const std::string& preset, double s0) {
    if (preset == "p224") return build_platform_mix(112, 112, s0);
    if (preset == "p696") return build_platform_mix(440, 256, s0);
    if (preset == "p8") return build_platform_mix(4, 4, s0);
    if (preset == "p9") return build_platform_mix(5, 4, s0);
    throw ConfigError("platform: unknown preset '" + preset + "'");
}

PlatformModel parse_platform(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("platform file: invalid JSON: ") + e.what());
    }

    const double s0 = j.value("s0", kDefaultUnitSpeed);
    NetworkSpec net;
    net.latency0 = j.value("latency0", net.latency0);
    net.bandwidth0 = j.value("bandwidth0", net.bandwidth0);
    net.msg_bits = j.value("msg_bits", net.msg_bits);
    net.latency_divides = j.value("latency_divides", net.latency_divides);
    net.claim_trips = j.value("claim_trips", net.claim_trips);

    if (j.contains("preset")) {
        PlatformModel p = build_platform(j["preset"].get<std::string>(), s0);
        net.validate();
        p.network = net;
        return p;
    }
    if (!j.contains("cores")) throw ConfigError("platform file: needs 'preset' or 'cores'");

    std::vector<std::pair<CoreClass, double>> cores;
    for (const auto& e : j["cores"]) {
        const std::string cls = e.value("class", "custom");
        CoreClass klass = CoreClass::Custom;
        double weight = 1.0;
        if (cls == "broadwell") {
            klass = CoreClass::Broadwell;
            weight = kBroadwellWeight;
        } else if (cls == "knl") {
            klass = CoreClass::Knl;
            weight = kKnlWeight;
        } else if (cls != "custom") {
            throw ConfigError("platform file: unknown core class '" + cls + "'");
        }
        weight = e.value("weight", weight);
        const int count = e.value("count", 1);
        if (count < 0) throw ConfigError("platform file: core count must be non-negative");
        for (int i = 0; i < count; ++i) cores.emplace_back(klass, weight);
    }
    return build_platform_custom(cores, s0, net);
}

PlatformModel load_platform(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("platform file: cannot open '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_platform(ss.str());
}

} // namespace dlsim
