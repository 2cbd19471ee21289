#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dlsim {

enum class DistKind {
    PsiaSurrogate,
    Constant,
    Uniform,
    Normal,
    Exponential,
    Gamma,
};

const char* to_string(DistKind k);
DistKind dist_kind_from_string(const std::string& name);

// Per-iteration FLOP cost model. Only the fields relevant to `kind` are read:
//   constant       -> constant_value
//   psia/uniform   -> [lo, hi]
//   normal         -> mean, stddev, rejection bounds [lo, hi]
//   exponential    -> rate (mean = 1/rate), rejection bounds [lo, hi]
//   gamma          -> shape, scale, rejection bounds [lo, hi]
struct DistributionSpec {
    DistKind kind = DistKind::Constant;
    double constant_value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
    double rate = 0.0;
    double shape = 0.0;
    double scale = 0.0;

    // Throws ConfigError naming the offending field.
    void validate() const;

    // Built-in application profiles: psia, constant, uniform, normal,
    // exponential, gamma.
    static DistributionSpec preset(const std::string& app_name);
    static const std::vector<std::string>& preset_names();
};

struct Workload {
    std::int64_t n = 0;
    std::vector<double> flops; // one positive entry per iteration
    std::uint64_t seed = 0;

    double total_flops() const;
};

struct WorkloadStats {
    double mu_flop = 0.0;    // sample mean
    double sigma_flop = 0.0; // population standard deviation (divisor n)
};

// Deterministic: identical (spec, n, seed) gives a bit-identical sequence.
// Bounded kinds redraw until the value lies inside [lo, hi].
Workload generate_workload(const DistributionSpec& spec, std::int64_t n, std::uint64_t seed);

WorkloadStats workload_stats(const Workload& w); // throws ConfigError if n == 0

// Text format: header "n <count> seed <u64>", then one FLOP value per line.
void write_workload(std::ostream& os, const Workload& w);
Workload read_workload(std::istream& is);
void save_workload(const std::string& path, const Workload& w);
Workload load_workload(const std::string& path);

} // namespace dlsim
