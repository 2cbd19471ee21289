#pragma once

#include "dlsim/sil.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace dlsim {

// Pseudo-technique name selecting the controller instead of a fixed kind.
inline constexpr const char* kSilName = "SIL";

inline constexpr const char* kResultsCsvHeader =
    "app,technique,scenario,platform,seed,makespan_s,total_overhead_s,chunk_count,"
    "sil_switch_count";

struct AppSpec {
    std::string name;
    DistributionSpec dist;
    // Set when the app came from an exported workload file; overrides dist/n.
    std::shared_ptr<const Workload> fixed;
};

// "psia", "constant", ... or a path to a JSON DistributionSpec / exported
// workload file.
AppSpec resolve_app(const std::string& name_or_path);
// "p224", "p696", "p8", "p9" or a path to a platform JSON document.
PlatformModel resolve_platform(const std::string& name_or_path, double s0);

struct ExperimentPlan {
    std::vector<AppSpec> apps;
    std::vector<std::string> techniques; // technique names and/or "SIL"
    std::vector<Scenario> scenarios;
    std::vector<std::string> platforms; // preset names or file paths
    std::int64_t n = 400000;
    std::uint64_t seed = 1;
    int repetitions = 1; // seeds seed, seed+1, ...
    double s0 = kDefaultUnitSpeed;
    double sil_period = 50.0;
    std::vector<Technique> sil_candidates = all_techniques();
    MonitorMode monitor_mode = MonitorMode::GroundTruth;
    std::string output_dir = "out";
    int jobs = 0; // worker threads; 0 = hardware concurrency
    bool chunk_logs = true;
    bool charts = true;

    void validate() const;
};

ExperimentPlan load_plan(const std::string& path);
ExperimentPlan parse_plan(const std::string& json_text);

struct ResultRow {
    std::string app;
    std::string technique;
    std::string scenario;
    std::string platform;
    std::uint64_t seed = 0;
    double makespan_s = 0.0;
    double total_overhead_s = 0.0;
    std::int64_t chunk_count = 0;
    std::int64_t sil_switch_count = 0;
    std::string selection_timeline; // "t:TECH;t:TECH;..."
    bool failed = false;
    std::string error;
};

struct RunRequest {
    AppSpec app;
    std::int64_t n = 400000;
    std::string technique; // technique name or "SIL"
    Scenario scenario = Scenario::Np;
    std::string platform = "p696";
    std::uint64_t seed = 1;
    double s0 = kDefaultUnitSpeed;
    double sil_period = 50.0;
    std::vector<Technique> sil_candidates = all_techniques();
    MonitorMode monitor_mode = MonitorMode::GroundTruth;
};

struct RunOutput {
    ResultRow row;
    SimResult result;
};

RunOutput run_single(const RunRequest& req);

// Upper bound on any run's completion time, used to size perturbation traces.
double estimate_horizon(const Workload& w, const PlatformModel& p);

struct PlanOutcome {
    std::vector<ResultRow> rows; // sorted by (app, technique, scenario, platform, seed)
    int failures = 0;
};

// Executes every cell of the factorial plan on a worker pool; writes
// results.csv, summary.csv, per-run chunk/selection logs, and one grouped bar
// chart per (app, platform) under plan.output_dir.
PlanOutcome run_plan(const ExperimentPlan& plan);

void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(std::istream& is);
std::vector<ResultRow> load_results_csv(const std::string& path);

struct SummaryRow {
    std::string app;
    std::string scenario;
    std::string platform;
    std::uint64_t seed = 0;
    std::string best_technique; // best single technique
    double best_makespan_s = 0.0;
    double band_lo_s = 0.0; // min/max over single techniques
    double band_hi_s = 0.0;
    bool has_sil = false;
    double sil_makespan_s = 0.0;
    int sil_rank = 0;          // 1 = fastest of all rows in the cell
    double sil_vs_best = 0.0;  // sil / best single
    std::string sil_band_position; // below | within | above
};

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);
void print_summary(std::ostream& os, const std::vector<SummaryRow>& rows);

// Re-derives summary.csv and charts from an existing results.csv.
void report(const std::string& results_csv_path, const std::string& out_dir);

} // namespace dlsim
