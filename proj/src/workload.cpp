#include "dlsim/workload.hpp"

#include "dlsim/errors.hpp"
#include "dlsim/rng.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace dlsim {

namespace {

constexpr int kMaxRejectionTries = 1000000;

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
    throw ConfigError("DistributionSpec." + field + ": " + why);
}

void require_bounds(const DistributionSpec& s, double mean) {
    if (s.lo <= 0.0) bad_field("lo", "must be strictly positive");
    if (s.hi <= s.lo) bad_field("hi", "must exceed lo");
    if (mean < s.lo || mean > s.hi)
        bad_field("lo/hi", "bounds must contain the distribution mean");
}

double fmt_roundtrip(const char* text) {
    return std::strtod(text, nullptr);
}

} // namespace

const char* to_string(DistKind k) {
    switch (k) {
    case DistKind::PsiaSurrogate: return "psia";
    case DistKind::Constant: return "constant";
    case DistKind::Uniform: return "uniform";
    case DistKind::Normal: return "normal";
    case DistKind::Exponential: return "exponential";
    case DistKind::Gamma: return "gamma";
    }
    return "?";
}

DistKind dist_kind_from_string(const std::string& name) {
    for (DistKind k : {DistKind::PsiaSurrogate, DistKind::Constant, DistKind::Uniform,
                       DistKind::Normal, DistKind::Exponential, DistKind::Gamma}) {
        if (name == to_string(k)) return k;
    }
    throw ConfigError("DistributionSpec.kind: unknown kind '" + name + "'");
}

void DistributionSpec::validate() const {
    switch (kind) {
    case DistKind::Constant:
        if (constant_value <= 0.0) bad_field("constant_value", "must be strictly positive");
        break;
    case DistKind::PsiaSurrogate:
    case DistKind::Uniform:
        if (lo <= 0.0) bad_field("lo", "must be strictly positive");
        if (hi <= lo) bad_field("hi", "must exceed lo");
        break;
    case DistKind::Normal:
        if (mean <= 0.0) bad_field("mean", "must be strictly positive");
        if (stddev < 0.0) bad_field("stddev", "must be non-negative");
        require_bounds(*this, mean);
        break;
    case DistKind::Exponential:
        if (rate <= 0.0) bad_field("rate", "must be strictly positive");
        require_bounds(*this, 1.0 / rate);
        break;
    case DistKind::Gamma:
        if (shape <= 0.0) bad_field("shape", "must be strictly positive");
        if (scale <= 0.0) bad_field("scale", "must be strictly positive");
        require_bounds(*this, shape * scale);
        break;
    }
}

DistributionSpec DistributionSpec::preset(const std::string& app_name) {
    DistributionSpec s;
    if (app_name == "psia") {
        s.kind = DistKind::PsiaSurrogate;
        s.lo = 5.9e7;
        s.hi = 6.6e7;
    } else if (app_name == "constant") {
        s.kind = DistKind::Constant;
        s.constant_value = 2.3e8;
    } else if (app_name == "uniform") {
        s.kind = DistKind::Uniform;
        s.lo = 1e3;
        s.hi = 7e8;
    } else if (app_name == "normal") {
        s.kind = DistKind::Normal;
        s.mean = 9.5e8;
        s.stddev = 7e7;
        s.lo = 6e8;
        s.hi = 1.3e9;
    } else if (app_name == "exponential") {
        s.kind = DistKind::Exponential;
        s.rate = 1.0 / 3e8;
        s.lo = 948.0;
        s.hi = 4.5e9;
    } else if (app_name == "gamma") {
        s.kind = DistKind::Gamma;
        s.shape = 2.0;
        s.scale = 1e8;
        s.lo = 4.1e6;
        s.hi = 2.7e9;
    } else {
        throw ConfigError("app: unknown application preset '" + app_name + "'");
    }
    return s;
}

const std::vector<std::string>& DistributionSpec::preset_names() {
    static const std::vector<std::string> names = {"psia",   "constant",    "uniform",
                                                   "normal", "exponential", "gamma"};
    return names;
}

double Workload::total_flops() const {
    double sum = 0.0;
    for (double f : flops) sum += f;
    return sum;
}

namespace {

double draw_bounded(Rng& rng, const DistributionSpec& s) {
    for (int tries = 0; tries < kMaxRejectionTries; ++tries) {
        double x = 0.0;
        switch (s.kind) {
        case DistKind::Normal: x = rng.normal(s.mean, s.stddev); break;
        case DistKind::Exponential: x = rng.exponential(1.0 / s.rate); break;
        case DistKind::Gamma: x = rng.gamma(s.shape, s.scale); break;
        default: return 0.0;
        }
        if (x >= s.lo && x <= s.hi) return x;
    }
    throw ConfigError("DistributionSpec.lo/hi: rejection bounds too tight, draw never lands inside");
}

} // namespace

Workload generate_workload(const DistributionSpec& spec, std::int64_t n, std::uint64_t seed) {
    if (n < 0) throw ConfigError("workload.n: must be non-negative");
    spec.validate();

    Workload w;
    w.n = n;
    w.seed = seed;
    w.flops.reserve(static_cast<std::size_t>(n));
    Rng rng = Rng::for_stream(seed, RngStream::Workload);

    for (std::int64_t i = 0; i < n; ++i) {
        double x = 0.0;
        switch (spec.kind) {
        case DistKind::Constant: x = spec.constant_value; break;
        case DistKind::PsiaSurrogate:
        case DistKind::Uniform: x = rng.uniform(spec.lo, spec.hi); break;
        case DistKind::Normal:
        case DistKind::Exponential:
        case DistKind::Gamma: x = draw_bounded(rng, spec); break;
        }
        w.flops.push_back(x);
    }
    return w;
}

WorkloadStats workload_stats(const Workload& w) {
    if (w.n <= 0) throw ConfigError("workload.n: statistics need at least one iteration");
    const double n = static_cast<double>(w.n);
    double sum = 0.0;
    for (double f : w.flops) sum += f;
    const double mu = sum / n;
    double sq = 0.0;
    for (double f : w.flops) sq += (f - mu) * (f - mu);
    WorkloadStats st;
    st.mu_flop = mu;
    st.sigma_flop = std::sqrt(sq / n);
    return st;
}

void write_workload(std::ostream& os, const Workload& w) {
    os << "n " << w.n << " seed " << w.seed << "\n";
    char buf[64];
    for (double f : w.flops) {
        std::snprintf(buf, sizeof(buf), "%.17g", f);
        os << buf << "\n";
    }
}

Workload read_workload(std::istream& is) {
    Workload w;
    std::string kw1, kw2;
    if (!(is >> kw1 >> w.n >> kw2 >> w.seed) || kw1 != "n" || kw2 != "seed")
        throw ConfigError("workload file: expected header 'n <count> seed <u64>'");
    if (w.n < 0) throw ConfigError("workload file: negative iteration count");
    w.flops.reserve(static_cast<std::size_t>(w.n));
    std::string tok;
    for (std::int64_t i = 0; i < w.n; ++i) {
        if (!(is >> tok))
            throw ConfigError("workload file: fewer FLOP values than the header count");
        const double f = fmt_roundtrip(tok.c_str());
        if (!(f > 0.0)) throw ConfigError("workload file: FLOP values must be positive");
        w.flops.push_back(f);
    }
    return w;
}

void save_workload(const std::string& path, const Workload& w) {
    std::ofstream os(path);
    if (!os) throw ConfigError("workload file: cannot open '" + path + "' for writing");
    write_workload(os, w);
}

Workload load_workload(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("workload file: cannot open '" + path + "'");
    return read_workload(is);
}

} // namespace dlsim
