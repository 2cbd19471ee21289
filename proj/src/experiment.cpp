#include "dlsim/experiment.hpp"

#include "dlsim/chart.hpp"
#include "dlsim/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

namespace fs = std::filesystem;

namespace dlsim {

namespace {

std::string fmt_g(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

DistributionSpec parse_dist_json(const nlohmann::json& j) {
    DistributionSpec s;
    s.kind = dist_kind_from_string(j.value("kind", std::string("constant")));
    s.constant_value = j.value("constant_value", s.constant_value);
    s.lo = j.value("lo", s.lo);
    s.hi = j.value("hi", s.hi);
    s.mean = j.value("mean", s.mean);
    s.stddev = j.value("stddev", s.stddev);
    s.rate = j.value("rate", s.rate);
    s.shape = j.value("shape", s.shape);
    s.scale = j.value("scale", s.scale);
    s.validate();
    return s;
}

std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-') ? c : '_';
    return out;
}

std::string cell_stem(const ResultRow& row) {
    std::ostringstream os;
    os << sanitize(row.app) << "_" << sanitize(row.technique) << "_" << sanitize(row.scenario)
       << "_" << sanitize(row.platform) << "_" << row.seed;
    return os.str();
}

std::string serialize_timeline(const SimResult& res) {
    std::string out;
    for (const auto& [t, kind] : res.technique_timeline) {
        if (!out.empty()) out += ";";
        out += fmt_g(t);
        out += ":";
        out += to_string(kind);
    }
    return out;
}

bool is_preset_platform(const std::string& name) {
    return name == "p224" || name == "p696" || name == "p8" || name == "p9";
}

struct CellKey {
    bool operator()(const ResultRow* a, const ResultRow* b) const {
        return std::tie(a->app, a->technique, a->scenario, a->platform, a->seed) <
               std::tie(b->app, b->technique, b->scenario, b->platform, b->seed);
    }
};

void write_charts(const std::vector<ResultRow>& rows, const std::string& out_dir) {
    // one chart per (app, platform, seed): scenario groups, technique bars
    std::map<std::tuple<std::string, std::string, std::uint64_t>,
             std::vector<const ResultRow*>>
        cells;
    for (const ResultRow& r : rows) {
        if (r.failed) continue;
        cells[{r.app, r.platform, r.seed}].push_back(&r);
    }
    for (const auto& [key, cell_rows] : cells) {
        const auto& [app, platform, seed] = key;

        std::vector<std::string> scenarios;
        std::vector<std::string> techniques;
        for (const ResultRow* r : cell_rows) {
            if (std::find(scenarios.begin(), scenarios.end(), r->scenario) == scenarios.end())
                scenarios.push_back(r->scenario);
            if (std::find(techniques.begin(), techniques.end(), r->technique) ==
                techniques.end())
                techniques.push_back(r->technique);
        }

        BarChart chart;
        chart.title = app + " on " + platform + " (seed " + std::to_string(seed) + ")";
        chart.y_label = "execution time [s]";
        chart.groups = scenarios;
        chart.series = techniques;
        chart.values.assign(scenarios.size(),
                            std::vector<double>(techniques.size(),
                                                std::numeric_limits<double>::quiet_NaN()));
        chart.bands.assign(scenarios.size(), std::nullopt);
        for (const ResultRow* r : cell_rows) {
            const auto gi = static_cast<std::size_t>(
                std::find(scenarios.begin(), scenarios.end(), r->scenario) - scenarios.begin());
            const auto si = static_cast<std::size_t>(
                std::find(techniques.begin(), techniques.end(), r->technique) -
                techniques.begin());
            chart.values[gi][si] = r->makespan_s;
        }
        for (std::size_t gi = 0; gi < scenarios.size(); ++gi) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = 0.0;
            for (std::size_t si = 0; si < techniques.size(); ++si) {
                if (techniques[si] == kSilName) continue;
                const double v = chart.values[gi][si];
                if (std::isnan(v)) continue;
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (hi > 0.0) chart.bands[gi] = BarChart::Band{lo, hi};
        }
        const std::string path = out_dir + "/chart_" + sanitize(app) + "_" +
                                 sanitize(platform) + "_" + std::to_string(seed) + ".svg";
        save_svg(path, chart);
    }
}

} // namespace

AppSpec resolve_app(const std::string& name_or_path) {
    AppSpec app;
    for (const std::string& p : DistributionSpec::preset_names()) {
        if (name_or_path == p) {
            app.name = p;
            app.dist = DistributionSpec::preset(p);
            return app;
        }
    }
    std::ifstream is(name_or_path);
    if (!is) throw ConfigError("app: not a preset and not a readable file: '" + name_or_path + "'");
    app.name = fs::path(name_or_path).stem().string();
    char first = 0;
    is >> first;
    is.seekg(0);
    if (first == '{') {
        std::stringstream ss;
        ss << is.rdbuf();
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(ss.str());
        } catch (const std::exception& e) {
            throw ConfigError(std::string("app file: invalid JSON: ") + e.what());
        }
        app.dist = parse_dist_json(j);
    } else {
        app.fixed = std::make_shared<const Workload>(read_workload(is));
    }
    return app;
}

PlatformModel resolve_platform(const std::string& name_or_path, double s0) {
    if (is_preset_platform(name_or_path)) return build_platform(name_or_path, s0);
    return load_platform(name_or_path);
}

void ExperimentPlan::validate() const {
    if (apps.empty()) throw ConfigError("plan.apps: must be non-empty");
    if (techniques.empty()) throw ConfigError("plan.techniques: must be non-empty");
    if (scenarios.empty()) throw ConfigError("plan.scenarios: must be non-empty");
    if (platforms.empty()) throw ConfigError("plan.platforms: must be non-empty");
    if (n < 1) throw ConfigError("plan.n: must be at least 1");
    if (repetitions < 1) throw ConfigError("plan.repetitions: must be at least 1");
    if (sil_period <= 0.0) throw ConfigError("plan.sil_period: must be positive");
    if (sil_candidates.empty()) throw ConfigError("plan.sil_candidates: must be non-empty");
    for (const std::string& t : techniques)
        if (t != kSilName) technique_from_string(t); // throws on unknown names
}

ExperimentPlan parse_plan(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("plan file: invalid JSON: ") + e.what());
    }

    ExperimentPlan plan;
    if (!j.contains("apps")) throw ConfigError("plan.apps: missing");
    for (const auto& a : j["apps"]) plan.apps.push_back(resolve_app(a.get<std::string>()));

    plan.techniques.clear();
    if (j.contains("techniques") && j["techniques"].is_string() &&
        j["techniques"].get<std::string>() == "all") {
        for (Technique t : all_techniques()) plan.techniques.push_back(to_string(t));
        plan.techniques.push_back(kSilName);
    } else if (j.contains("techniques")) {
        for (const auto& t : j["techniques"]) plan.techniques.push_back(t.get<std::string>());
    } else {
        throw ConfigError("plan.techniques: missing");
    }

    plan.scenarios.clear();
    if (j.contains("scenarios") && j["scenarios"].is_string() &&
        j["scenarios"].get<std::string>() == "all") {
        plan.scenarios = all_scenarios();
    } else if (j.contains("scenarios")) {
        for (const auto& s : j["scenarios"])
            plan.scenarios.push_back(scenario_from_string(s.get<std::string>()));
    } else {
        throw ConfigError("plan.scenarios: missing");
    }

    if (j.contains("platforms"))
        for (const auto& p : j["platforms"]) plan.platforms.push_back(p.get<std::string>());
    else
        plan.platforms.push_back("p696");

    plan.n = j.value("n", plan.n);
    plan.seed = j.value("seed", plan.seed);
    plan.repetitions = j.value("repetitions", plan.repetitions);
    plan.s0 = j.value("s0", plan.s0);
    plan.sil_period = j.value("sil_period", plan.sil_period);
    if (j.contains("sil_candidates")) {
        plan.sil_candidates.clear();
        for (const auto& c : j["sil_candidates"])
            plan.sil_candidates.push_back(technique_from_string(c.get<std::string>()));
    }
    if (j.contains("monitor_mode"))
        plan.monitor_mode = monitor_mode_from_string(j["monitor_mode"].get<std::string>());
    plan.output_dir = j.value("output_dir", plan.output_dir);
    plan.jobs = j.value("jobs", plan.jobs);
    plan.chunk_logs = j.value("chunk_logs", plan.chunk_logs);
    plan.charts = j.value("charts", plan.charts);
    plan.validate();
    return plan;
}

ExperimentPlan load_plan(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("plan file: cannot open '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_plan(ss.str());
}

double estimate_horizon(const Workload& w, const PlatformModel& p) {
    double min_speed = std::numeric_limits<double>::infinity();
    for (const CoreSpec& c : p.cores) min_speed = std::min(min_speed, c.speed);
    const double work = w.total_flops() / (min_speed * kPeaSevere);
    const NetworkSpec& net = p.network;
    const double lat_worst =
        net.latency_divides ? net.latency0 / kNetSevere : net.latency0;
    const double rt_worst =
        net.claim_trips * (lat_worst + net.msg_bits / (net.bandwidth0 * kNetSevere));
    const double comm = static_cast<double>(w.n + p.pe_count()) * rt_worst;
    return work + comm + 2.0 * kPerturbPeriod;
}

RunOutput run_single(const RunRequest& req) {
    RunOutput out;
    const Workload w =
        req.app.fixed ? *req.app.fixed : generate_workload(req.app.dist, req.n, req.seed);
    PlatformModel pm = resolve_platform(req.platform, req.s0);
    pm.apply(generate_traces(PerturbationSpec{req.scenario, req.seed},
                             estimate_horizon(w, pm)));

    SimConfig cfg;
    cfg.workload = &w;
    cfg.platform = &pm;
    cfg.seed = req.seed;
    if (req.technique == kSilName) {
        SiLConfig sc;
        sc.period = req.sil_period;
        sc.candidates = req.sil_candidates;
        sc.monitor_mode = req.monitor_mode;
        out.result = run_with_sil(cfg, sc);
    } else {
        cfg.technique = technique_from_string(req.technique);
        out.result = simulate(cfg);
    }

    out.row.app = req.app.name;
    out.row.technique = req.technique;
    out.row.scenario = to_string(req.scenario);
    out.row.platform = req.platform;
    out.row.seed = req.seed;
    out.row.makespan_s = out.result.makespan;
    out.row.total_overhead_s = out.result.total_overhead;
    out.row.chunk_count = out.result.total_chunks;
    out.row.sil_switch_count = out.result.switch_count();
    if (req.technique == kSilName) out.row.selection_timeline = serialize_timeline(out.result);
    return out;
}

PlanOutcome run_plan(const ExperimentPlan& plan) {
    plan.validate();
    fs::create_directories(plan.output_dir);
    if (plan.chunk_logs) fs::create_directories(plan.output_dir + "/chunks");
    fs::create_directories(plan.output_dir + "/selections");

    std::vector<RunRequest> cells;
    for (const AppSpec& app : plan.apps)
        for (const std::string& tech : plan.techniques)
            for (Scenario sc : plan.scenarios)
                for (const std::string& platform : plan.platforms)
                    for (int rep = 0; rep < plan.repetitions; ++rep) {
                        RunRequest req;
                        req.app = app;
                        req.n = plan.n;
                        req.technique = tech;
                        req.scenario = sc;
                        req.platform = platform;
                        req.seed = plan.seed + static_cast<std::uint64_t>(rep);
                        req.s0 = plan.s0;
                        req.sil_period = plan.sil_period;
                        req.sil_candidates = plan.sil_candidates;
                        req.monitor_mode = plan.monitor_mode;
                        cells.push_back(req);
                    }

    std::vector<ResultRow> rows(cells.size());
    std::atomic<std::size_t> next{0};
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers =
        plan.jobs > 0 ? static_cast<unsigned>(plan.jobs)
                      : std::min<unsigned>(hw, static_cast<unsigned>(cells.size()) + 1);

    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const RunRequest& req = cells[i];
            ResultRow& row = rows[i];
            row.app = req.app.name;
            row.technique = req.technique;
            row.scenario = to_string(req.scenario);
            row.platform = req.platform;
            row.seed = req.seed;
            try {
                RunOutput out = run_single(req);
                row = out.row;
                if (plan.chunk_logs) {
                    std::ofstream os(plan.output_dir + "/chunks/" + cell_stem(row) + ".csv");
                    write_chunk_log_csv(os, out.result);
                }
                if (req.technique == kSilName) {
                    std::ofstream os(plan.output_dir + "/selections/" + cell_stem(row) +
                                     ".csv");
                    write_selection_csv(os, out.result);
                }
            } catch (const std::exception& e) {
                row.failed = true;
                row.error = e.what();
            }
        }
    };

    std::vector<std::thread> pool;
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (std::thread& t : pool) t.join();

    PlanOutcome outcome;
    outcome.rows = std::move(rows);
    std::sort(outcome.rows.begin(), outcome.rows.end(),
              [](const ResultRow& a, const ResultRow& b) {
                  return std::tie(a.app, a.technique, a.scenario, a.platform, a.seed) <
                         std::tie(b.app, b.technique, b.scenario, b.platform, b.seed);
              });
    for (const ResultRow& r : outcome.rows)
        if (r.failed) ++outcome.failures;

    {
        std::ofstream os(plan.output_dir + "/results.csv");
        write_results_csv(os, outcome.rows);
    }
    if (outcome.failures > 0) {
        std::ofstream os(plan.output_dir + "/failures.csv");
        os << "app,technique,scenario,platform,seed,error\n";
        for (const ResultRow& r : outcome.rows) {
            if (!r.failed) continue;
            std::string msg = r.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            os << r.app << "," << r.technique << "," << r.scenario << "," << r.platform << ","
               << r.seed << "," << msg << "\n";
        }
    }
    {
        std::ofstream os(plan.output_dir + "/summary.csv");
        write_summary_csv(os, summarize(outcome.rows));
    }
    if (plan.charts) write_charts(outcome.rows, plan.output_dir);
    return outcome;
}

void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
    os << kResultsCsvHeader << "\n";
    for (const ResultRow& r : rows) {
        if (r.failed) continue;
        os << r.app << "," << r.technique << "," << r.scenario << "," << r.platform << ","
           << r.seed << "," << fmt_g(r.makespan_s) << "," << fmt_g(r.total_overhead_s) << ","
           << r.chunk_count << "," << r.sil_switch_count << "\n";
    }
}

std::vector<ResultRow> read_results_csv(std::istream& is) {
    std::vector<ResultRow> rows;
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("results.csv: empty file");
    if (line.find("app,technique,scenario") != 0)
        throw ConfigError("results.csv: unexpected header");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 9) throw ConfigError("results.csv: expected 9 columns per row");
        ResultRow r;
        r.app = f[0];
        r.technique = f[1];
        r.scenario = f[2];
        r.platform = f[3];
        r.seed = std::stoull(f[4]);
        r.makespan_s = std::strtod(f[5].c_str(), nullptr);
        r.total_overhead_s = std::strtod(f[6].c_str(), nullptr);
        r.chunk_count = std::stoll(f[7]);
        r.sil_switch_count = std::stoll(f[8]);
        rows.push_back(r);
    }
    return rows;
}

std::vector<ResultRow> load_results_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("results.csv: cannot open '" + path + "'");
    return read_results_csv(is);
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
    std::map<std::tuple<std::string, std::string, std::string, std::uint64_t>,
             std::vector<const ResultRow*>>
        cells;
    for (const ResultRow& r : rows) {
        if (r.failed) continue;
        cells[{r.app, r.scenario, r.platform, r.seed}].push_back(&r);
    }

    std::vector<SummaryRow> out;
    for (const auto& [key, cell_rows] : cells) {
        SummaryRow s;
        s.app = std::get<0>(key);
        s.scenario = std::get<1>(key);
        s.platform = std::get<2>(key);
        s.seed = std::get<3>(key);

        const ResultRow* sil = nullptr;
        const ResultRow* best = nullptr;
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (const ResultRow* r : cell_rows) {
            if (r->technique == kSilName) {
                sil = r;
                continue;
            }
            lo = std::min(lo, r->makespan_s);
            hi = std::max(hi, r->makespan_s);
            if (best == nullptr || r->makespan_s < best->makespan_s) best = r;
        }
        if (best == nullptr) continue; // cell holds only SIL rows
        s.best_technique = best->technique;
        s.best_makespan_s = best->makespan_s;
        s.band_lo_s = lo;
        s.band_hi_s = hi;
        if (sil != nullptr) {
            s.has_sil = true;
            s.sil_makespan_s = sil->makespan_s;
            int rank = 1;
            for (const ResultRow* r : cell_rows)
                if (r != sil && r->makespan_s < sil->makespan_s) ++rank;
            s.sil_rank = rank;
            s.sil_vs_best = sil->makespan_s / best->makespan_s;
            if (sil->makespan_s < lo)
                s.sil_band_position = "below";
            else if (sil->makespan_s > hi)
                s.sil_band_position = "above";
            else
                s.sil_band_position = "within";
        }
        out.push_back(s);
    }
    return out;
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
    os << "app,scenario,platform,seed,best_technique,best_makespan_s,band_lo_s,band_hi_s,"
          "sil_makespan_s,sil_rank,sil_vs_best,sil_band_position\n";
    for (const SummaryRow& s : rows) {
        os << s.app << "," << s.scenario << "," << s.platform << "," << s.seed << ","
           << s.best_technique << "," << fmt_g(s.best_makespan_s) << "," << fmt_g(s.band_lo_s)
           << "," << fmt_g(s.band_hi_s) << ",";
        if (s.has_sil)
            os << fmt_g(s.sil_makespan_s) << "," << s.sil_rank << "," << fmt_g(s.sil_vs_best)
               << "," << s.sil_band_position;
        else
            os << ",,,";
        os << "\n";
    }
}

void print_summary(std::ostream& os, const std::vector<SummaryRow>& rows) {
    os << std::left << std::setw(14) << "app" << std::setw(9) << "scenario" << std::setw(7)
       << "plat" << std::setw(9) << "best" << std::setw(14) << "best[s]" << std::setw(14)
       << "sil[s]" << std::setw(6) << "rank" << std::setw(10) << "sil/best"
       << "band\n";
    for (const SummaryRow& s : rows) {
        os << std::left << std::setw(14) << s.app << std::setw(9) << s.scenario << std::setw(7)
           << s.platform << std::setw(9) << s.best_technique << std::setw(14)
           << fmt_g(s.best_makespan_s);
        if (s.has_sil)
            os << std::setw(14) << fmt_g(s.sil_makespan_s) << std::setw(6) << s.sil_rank
               << std::setw(10) << fmt_g(s.sil_vs_best) << s.sil_band_position;
        else
            os << std::setw(14) << "-" << std::setw(6) << "-" << std::setw(10) << "-"
               << "-";
        os << "\n";
    }
}

void report(const std::string& results_csv_path, const std::string& out_dir) {
    const std::vector<ResultRow> rows = load_results_csv(results_csv_path);
    fs::create_directories(out_dir);
    {
        std::ofstream os(out_dir + "/summary.csv");
        write_summary_csv(os, summarize(rows));
    }
    write_charts(rows, out_dir);
}

} // namespace dlsim
