// Command-line front end: single simulations, factorial experiment plans,
// and report generation from existing results.

#include "dlsim/errors.hpp"
#include "dlsim/experiment.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace fs = std::filesystem;
using namespace dlsim;

namespace {

std::vector<Technique> parse_candidates(const std::string& csv) {
    if (csv.empty() || csv == "all") return all_techniques();
    std::vector<Technique> out;
    std::string cur;
    for (char c : csv + ",") {
        if (c == ',') {
            if (!cur.empty()) out.push_back(technique_from_string(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (out.empty()) throw ConfigError("sil-candidates: empty candidate list");
    return out;
}

int cmd_simulate(const std::string& app_name, std::int64_t n, const std::string& platform,
                 const std::string& technique, const std::string& scenario,
                 std::uint64_t seed, double sil_period, const std::string& candidates,
                 const std::string& monitor, double s0, const std::string& out_dir) {
    RunRequest req;
    req.app = resolve_app(app_name);
    req.n = n;
    req.platform = platform;
    req.technique = technique;
    req.scenario = scenario_from_string(scenario);
    req.seed = seed;
    req.s0 = s0;
    req.sil_period = sil_period;
    req.sil_candidates = parse_candidates(candidates);
    req.monitor_mode = monitor_mode_from_string(monitor);
    if (req.technique != kSilName) technique_from_string(req.technique);

    RunOutput out = run_single(req);
    std::cout << "app " << out.row.app << "  technique " << out.row.technique << "  scenario "
              << out.row.scenario << "  platform " << out.row.platform << "  seed "
              << out.row.seed << "\n";
    std::cout << "makespan_s " << out.row.makespan_s << "\n";
    std::cout << "total_overhead_s " << out.row.total_overhead_s << "\n";
    std::cout << "chunk_count " << out.row.chunk_count << "\n";
    if (req.technique == kSilName) {
        std::cout << "sil_switch_count " << out.row.sil_switch_count << "\n";
        std::cout << "selection_timeline " << out.row.selection_timeline << "\n";
        for (const SelectionEntry& e : out.result.selection_log)
            std::cout << "  t=" << e.t << " selected=" << to_string(e.selected)
                      << " controller_wall_s=" << e.wall_seconds << "\n";
    }
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        {
            std::ofstream os(out_dir + "/chunks.csv");
            write_chunk_log_csv(os, out.result);
        }
        if (req.technique == kSilName) {
            std::ofstream os(out_dir + "/selection.csv");
            write_selection_csv(os, out.result);
        }
        std::cout << "wrote " << out_dir << "/chunks.csv\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App cli{"dlsim: discrete-event simulator of self-scheduled parallel loops on a "
                 "heterogeneous machine under perturbations"};
    cli.require_subcommand(1);

    // simulate
    std::string app_name = "constant";
    std::int64_t n = 400000;
    std::string platform = "p696";
    std::string technique = "SS";
    std::string scenario = "np";
    std::uint64_t seed = 1;
    double sil_period = 50.0;
    std::string candidates = "all";
    std::string monitor = "ground-truth";
    double s0 = kDefaultUnitSpeed;
    std::string out_dir;

    CLI::App* sim = cli.add_subcommand("simulate", "run one simulation");
    sim->add_option("--app", app_name, "application preset or spec/workload file");
    sim->add_option("--n", n, "iteration count");
    sim->add_option("--platform", platform, "p224|p696|p8|p9 or platform JSON file");
    sim->add_option("--technique", technique, "STATIC|SS|FSC|GSS|FAC|WF|AWF-B|AWF-C|AWF-D|AWF-E|AF|SIL");
    sim->add_option("--scenario", scenario, "perturbation scenario code, e.g. np, pea-cm, all-es");
    sim->add_option("--seed", seed, "experiment seed");
    sim->add_option("--sil-period", sil_period, "seconds between controller calls");
    sim->add_option("--sil-candidates", candidates, "comma-separated candidate list or 'all'");
    sim->add_option("--monitor", monitor, "ground-truth|estimated");
    sim->add_option("--s0", s0, "FLOP/s per unit core weight");
    sim->add_option("--out", out_dir, "directory for chunk/selection logs");

    // run-plan
    std::string plan_path;
    std::string plan_out;
    int plan_jobs = -1;
    CLI::App* rp = cli.add_subcommand("run-plan", "run a factorial experiment plan");
    rp->add_option("plan", plan_path, "plan JSON file")->required();
    rp->add_option("--out", plan_out, "override the plan's output directory");
    rp->add_option("--jobs", plan_jobs, "override the plan's worker count");

    // report
    std::string results_path;
    std::string report_out;
    CLI::App* rep = cli.add_subcommand("report", "summary and charts from a results.csv");
    rep->add_option("results", results_path, "results.csv file")->required();
    rep->add_option("--out", report_out, "output directory (default: alongside the csv)");

    CLI11_PARSE(cli, argc, argv);

    try {
        if (sim->parsed()) {
            return cmd_simulate(app_name, n, platform, technique, scenario, seed, sil_period,
                                candidates, monitor, s0, out_dir);
        }
        if (rp->parsed()) {
            ExperimentPlan plan = load_plan(plan_path);
            if (!plan_out.empty()) plan.output_dir = plan_out;
            if (plan_jobs >= 0) plan.jobs = plan_jobs;
            PlanOutcome outcome = run_plan(plan);
            std::cout << "cells " << outcome.rows.size() << "  failures " << outcome.failures
                      << "\n";
            std::cout << "wrote " << plan.output_dir << "/results.csv\n";
            print_summary(std::cout, summarize(outcome.rows));
            return outcome.failures == 0 ? 0 : 1;
        }
        if (rep->parsed()) {
            std::string out =
                report_out.empty() ? fs::path(results_path).parent_path().string() : report_out;
            if (out.empty()) out = ".";
            report(results_path, out);
            print_summary(std::cout, summarize(load_results_csv(results_path)));
            std::cout << "wrote " << out << "/summary.csv\n";
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
