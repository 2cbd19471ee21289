#pragma once

#include "dlsim/trace.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace dlsim {

enum class CoreClass {
    Broadwell,
    Knl,
    Custom,
};

const char* to_string(CoreClass k);

// Relative core weights of the two machine classes.
inline constexpr double kBroadwellWeight = 1.398;
inline constexpr double kKnlWeight = 0.316;
// FLOP/s delivered by a core of weight 1.0 unless overridden.
inline constexpr double kDefaultUnitSpeed = 1e9;

struct CoreSpec {
    int id = 0;
    CoreClass klass = CoreClass::Custom;
    double weight = 1.0; // dimensionless relative speed
    double speed = 0.0;  // FLOP/s = weight * S0
};

struct NetworkSpec {
    double latency0 = 2e-6;    // s, nominal one-way
    double bandwidth0 = 1e11;  // bit/s, nominal
    double msg_bits = 512.0;   // one scheduling message
    // A latency factor f < 1 degrades latency to latency0 / f by default;
    // set false to scale latency down instead.
    bool latency_divides = true;
    // One-way messages per chunk claim (request + reply).
    int claim_trips = 2;

    void validate() const;
};

enum class Scenario {
    Np,
    PeaCm, PeaCs, PeaEm, PeaEs,
    BwCm, BwCs, BwEm, BwEs,
    LatCm, LatCs, LatEm, LatEs,
    AllCm, AllCs, AllEm, AllEs,
};

const char* to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);
const std::vector<Scenario>& all_scenarios(); // the 17 codes, np first

struct PerturbationSpec {
    Scenario scenario = Scenario::Np;
    std::uint64_t seed = 0; // used by the exponential variants
};

// Perturbation schedule: 100 s period, perturbed half of each period.
// Compute-availability windows open 50 s after the start; network windows
// open with the execution.
inline constexpr double kPerturbPeriod = 100.0;
inline constexpr double kPerturbWindow = 50.0;
inline constexpr double kPeaPhase = 50.0;
inline constexpr double kPeaMild = 0.75;
inline constexpr double kPeaSevere = 0.25;
inline constexpr double kNetMild = 1e-5;
inline constexpr double kNetSevere = 1e-7;

struct TraceSet {
    std::shared_ptr<const Trace> availability; // shared by all cores
    std::shared_ptr<const Trace> bandwidth;
    std::shared_ptr<const Trace> latency;
};

// (availability per core, bandwidth factor, latency factor) for one scenario.
// Exponential variants draw one factor per perturbed window; `horizon` bounds
// the explicit points generated (tail holds beyond it).
TraceSet generate_traces(const PerturbationSpec& spec, double horizon);

struct PlatformModel {
    std::vector<CoreSpec> cores;
    NetworkSpec network;
    std::vector<std::shared_ptr<const Trace>> avail_traces; // one per core
    std::shared_ptr<const Trace> bw_trace;
    std::shared_ptr<const Trace> lat_trace;

    int pe_count() const { return static_cast<int>(cores.size()); }
    double aggregate_speed() const;
    double reference_speed() const; // mean core speed, FLOP/s
    // Claim cost estimate under nominal conditions.
    double nominal_round_trip() const;

    const Trace& avail(int core) const;
    double effective_speed(int core, double t) const; // speed * availability
    double transfer_time(double t) const;             // one-way message time

    void apply(const TraceSet& traces);
};

// Presets: p224 (112 Broadwell + 112 KNL), p696 (440 + 256), and the
// desk-scale p8 (4 + 4) and p9 (5 + 4).
PlatformModel build_platform(const std::string& preset, double s0 = kDefaultUnitSpeed);
PlatformModel build_platform_mix(int broadwell, int knl, double s0 = kDefaultUnitSpeed,
                                 NetworkSpec net = {});
PlatformModel build_platform_custom(const std::vector<std::pair<CoreClass, double>>& cores,
                                    double s0, NetworkSpec net = {});

// Declarative JSON config document (counts, weights, S0, network values).
PlatformModel load_platform(const std::string& path);
PlatformModel parse_platform(const std::string& json_text);

} // namespace dlsim
