// Command-line front end: simulate writes telemetry, metrics and
// report consume it, verify-bounds runs the Monte-Carlo bound checks.
// Exit codes: 0 success, 1 runtime or verification failure, 2 usage.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cogrel/builtin_corpus.hpp"
#include "cogrel/engine.hpp"
#include "cogrel/error.hpp"
#include "cogrel/metrics.hpp"
#include "cogrel/renewal.hpp"
#include "cogrel/report.hpp"
#include "cogrel/telemetry.hpp"

namespace {

struct SimulateOptions {
    cogrel::SimulationConfig cfg;
    std::string corpus_path;
    std::string queries_path;
    std::string profiles_path;
    std::string out_path = "telemetry.jsonl";
};

int run_simulate(const SimulateOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();

    const cogrel::Corpus corpus =
        opt.corpus_path.empty() ? cogrel::builtin_corpus() : cogrel::load_corpus_file(opt.corpus_path);
    const cogrel::QueryPool pool = opt.queries_path.empty()
                                       ? cogrel::default_query_pool()
                                       : cogrel::load_query_pool_file(opt.queries_path);

    cogrel::SimulationConfig cfg = opt.cfg;
    if (!opt.profiles_path.empty())
        cfg.profiles = cogrel::load_profile_overrides_file(opt.profiles_path, cfg.profiles);

    const cogrel::ExperimentResult result = cogrel::run_experiment(cfg, corpus, pool);
    cogrel::write_telemetry_file(opt.out_path, result.events);

    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;
    std::printf("wrote %s (%zu events)\n", opt.out_path.c_str(), result.events.size());
    std::printf("episodes: %zu\n", result.episodes.size());
    std::vector<std::pair<std::string, std::int64_t>> counts;
    for (const auto& [mode, n] : result.mode_counts)
        counts.emplace_back(std::string(cogrel::to_string(mode)), n);
    std::sort(counts.begin(), counts.end());
    for (const auto& [name, n] : counts)
        std::printf("mode %s: %lld\n", name.c_str(), static_cast<long long>(n));
    if (result.starved_agent_runs > 0)
        std::fprintf(stderr,
                     "warning: %lld agent-runs hit the cycle guard before completing their "
                     "episode quota\n",
                     static_cast<long long>(result.starved_agent_runs));
    std::printf("elapsed_s: %.3f\n", elapsed.count());
    return 0;
}

struct MetricsOptions {
    std::string in_path;
    std::string out_path;
    std::string format = "json";
    double alpha = 0.9;
    double run_start = 0.0;
    bool micro = false;
};

int run_metrics(const MetricsOptions& opt) {
    const std::vector<cogrel::TelemetryEvent> events = cogrel::read_telemetry_file(opt.in_path);
    const cogrel::EpisodeExtraction extraction = cogrel::episodes_from_events(events);
    cogrel::ReliabilityReport report =
        cogrel::build_report(extraction.episodes, opt.run_start, opt.alpha, !opt.micro,
                             extraction.agents_seen);
    report.incomplete_episodes = static_cast<std::int64_t>(extraction.incomplete);
    if (report.skipped_agents > 0)
        std::fprintf(stderr, "warning: %lld agents had telemetry but no completed episodes\n",
                     static_cast<long long>(report.skipped_agents));

    std::string body;
    if (opt.format == "json")
        body = cogrel::to_json(report).dump(2) + "\n";
    else
        body = cogrel::to_csv(report);

    if (opt.out_path.empty()) {
        std::cout << body;
    } else {
        std::ofstream os(opt.out_path);
        if (!os) throw cogrel::IoError("cannot write " + opt.out_path);
        os << body;
    }
    return 0;
}

struct VerifyOptions {
    double cycles = 1e5;
    std::int64_t trials = 100000;
    std::uint64_t seed = 42;
    std::vector<double> alphas = cogrel::default_theorem2_alphas();
    double mu = 6.21;
    double sigma = 2.14;
    double lambda = 1.0 / 6.73;
    std::string out_path;
    bool inject_bound_bug = false;
};

int run_verify(const VerifyOptions& opt) {
    const auto grid = cogrel::default_theorem1_grid();
    const auto t1 = cogrel::check_theorem1(grid, opt.cycles, opt.seed, opt.inject_bound_bug);
    std::size_t t1_ok = 0;
    double worst_gap = 0.0;
    for (const auto& r : t1) {
        if (r.analytic_ok && r.empirical_ok) t1_ok += 1;
        worst_gap = std::max(worst_gap, std::abs(r.empirical - r.pi));
    }
    std::printf("theorem1: %zu/%zu points ok (max |empirical - pi| = %.5f)\n", t1_ok, t1.size(),
                worst_gap);

    std::vector<cogrel::Theorem2Row> t2_all;
    bool t2_pass = true;
    for (const auto& family : cogrel::default_theorem2_families(opt.mu, opt.sigma)) {
        const auto rows = cogrel::check_theorem2(family, opt.lambda, opt.alphas, opt.trials,
                                                 opt.seed, opt.inject_bound_bug);
        std::size_t ok = 0;
        double min_margin = 1.0;
        for (const auto& r : rows) {
            if (r.analytic_ok && r.status != "violation") ok += 1;
            min_margin = std::min(min_margin, r.coverage - r.alpha);
        }
        std::printf("theorem2 %s: %zu/%zu alphas ok (min coverage margin = %+.5f)\n",
                    family.name.c_str(), ok, rows.size(), min_margin);
        t2_pass = t2_pass && cogrel::theorem2_passed(rows);
        t2_all.insert(t2_all.end(), rows.begin(), rows.end());
    }

    if (!opt.out_path.empty()) {
        std::ofstream os(opt.out_path);
        if (!os) throw cogrel::IoError("cannot write " + opt.out_path);
        cogrel::write_verification_csv(t1, t2_all, os);
    }

    const bool pass = cogrel::theorem1_passed(t1) && t2_pass;
    std::printf("verdict: %s\n", pass ? "PASS" : "FAIL");
    return pass ? 0 : 1;
}

struct ReportOptions {
    std::string in_path;
    std::string out_dir = "report";
    int bins = 20;
    int window = 20;
};

int run_report(const ReportOptions& opt) {
    const std::vector<cogrel::TelemetryEvent> events = cogrel::read_telemetry_file(opt.in_path);
    const cogrel::EpisodeExtraction extraction = cogrel::episodes_from_events(events);
    cogrel::write_report_files(extraction.episodes, opt.out_dir, opt.bins, opt.window);
    std::printf("wrote delta_histogram.csv, mode_summary.csv, rolling_mttr.csv, "
                "phase_breakdown.csv to %s\n",
                opt.out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cognitive reliability simulator and metrics toolkit"};
    app.require_subcommand(1);

    SimulateOptions sim;
    auto* sim_cmd = app.add_subcommand("simulate", "run the fault/recovery simulation");
    sim_cmd->add_option("--runs", sim.cfg.runs, "independent runs")->capture_default_str();
    sim_cmd->add_option("--seed", sim.cfg.seed, "root rng seed")->capture_default_str();
    sim_cmd->add_option("--agents", sim.cfg.agents, "agents per run")->capture_default_str();
    sim_cmd->add_option("--cycles-per-run", sim.cfg.episodes_per_run,
                        "recovery episodes each agent collects per run (one reasoning cycle "
                        "yields at most one)")
        ->capture_default_str();
    sim_cmd->add_option("--max-cycles", sim.cfg.max_cycles_per_episode,
                        "fault-free cycles allowed before an agent-run gives up")
        ->capture_default_str();
    sim_cmd->add_option("--tau-drift", sim.cfg.drift.tau_drift, "drift confidence threshold")
        ->capture_default_str();
    sim_cmd->add_option("--perturbation-prob", sim.cfg.drift.perturbation_prob,
                        "per-cycle perturbation probability above the drift threshold")
        ->capture_default_str();
    sim_cmd->add_option("--perturbation-scale", sim.cfg.drift.perturbation_scale,
                        "confidence dent applied by low-confidence perturbations")
        ->capture_default_str();
    sim_cmd->add_option("--perturbation-tool-weight", sim.cfg.drift.perturbation_tool_weight,
                        "share of perturbations that surface as tool errors")
        ->capture_default_str();
    sim_cmd->add_option("--drift-replan-weight", sim.cfg.policy.drift_auto_replan_weight,
                        "probability a drift fault routes to auto-replan (rest rolls back)")
        ->capture_default_str();
    sim_cmd->add_flag("--human-gate,!--no-human-gate", sim.cfg.policy.human_gate_enabled,
                      "route low-confidence faults to a human approver")
        ->capture_default_str();
    sim_cmd->add_option("--stable-mean", sim.cfg.stable_mean,
                        "mean stable interval between faults, seconds")
        ->capture_default_str();
    sim_cmd->add_option("--stable-std", sim.cfg.stable_std, "stable interval spread")
        ->capture_default_str();
    sim_cmd->add_option("--corpus", sim.corpus_path,
                        "reference corpus file, one document per line (builtin when omitted)");
    sim_cmd->add_option("--queries", sim.queries_path,
                        "query pool file, one query per line (builtin when omitted)");
    sim_cmd->add_option("--profiles", sim.profiles_path,
                        "latency profile overrides: <mode> median=<s> std=<s> per line");
    sim_cmd->add_option("--out", sim.out_path, "telemetry output path")->capture_default_str();
    sim_cmd->add_option("--jobs", sim.cfg.jobs, "worker threads (output is order-independent)")
        ->capture_default_str();

    MetricsOptions met;
    auto* met_cmd = app.add_subcommand("metrics", "compute reliability metrics from telemetry");
    met_cmd->add_option("--in", met.in_path, "telemetry jsonl input")->required();
    met_cmd->add_option("--alpha", met.alpha, "confidence level for the tail-aware ratio")
        ->capture_default_str();
    met_cmd->add_option("--format", met.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    met_cmd->add_option("--out", met.out_path, "write to file instead of stdout");
    met_cmd->add_flag("--micro", met.micro,
                      "pool episodes across agents instead of averaging per-agent figures");
    met_cmd->add_option("--run-start", met.run_start,
                        "time each run's clock starts at (for the first operating interval)")
        ->capture_default_str();

    VerifyOptions ver;
    auto* ver_cmd =
        app.add_subcommand("verify-bounds", "Monte-Carlo checks of the reliability bounds");
    ver_cmd->add_option("--cycles", ver.cycles, "renewal cycles per grid point")
        ->capture_default_str();
    ver_cmd->add_option("--trials", ver.trials, "recovery samples per coverage check")
        ->capture_default_str();
    ver_cmd->add_option("--seed", ver.seed, "root rng seed")->capture_default_str();
    ver_cmd->add_option("--alphas", ver.alphas, "confidence levels to check")
        ->capture_default_str();
    ver_cmd->add_option("--mu", ver.mu, "mean recovery time for the tail families")
        ->capture_default_str();
    ver_cmd->add_option("--sigma", ver.sigma, "recovery spread for the tail families")
        ->capture_default_str();
    ver_cmd->add_option("--lambda", ver.lambda, "fault rate used in the ratio bounds")
        ->capture_default_str();
    ver_cmd->add_option("--out", ver.out_path, "write the combined results table as csv");
    ver_cmd->add_flag("--inject-bound-bug", ver.inject_bound_bug)->group("");

    ReportOptions rep;
    auto* rep_cmd = app.add_subcommand("report", "write analysis csv files from telemetry");
    rep_cmd->add_option("--in", rep.in_path, "telemetry jsonl input")->required();
    rep_cmd->add_option("--out-dir", rep.out_dir, "output directory")->capture_default_str();
    rep_cmd->add_option("--bins", rep.bins, "histogram bins")->capture_default_str();
    rep_cmd->add_option("--window", rep.window, "rolling window, in runs")->capture_default_str();

    int rc = 0;
    sim_cmd->callback([&] { rc = run_simulate(sim); });
    met_cmd->callback([&] { rc = run_metrics(met); });
    ver_cmd->callback([&] { rc = run_verify(ver); });
    rep_cmd->callback([&] { rc = run_report(rep); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const cogrel::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const cogrel::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return rc;
}
