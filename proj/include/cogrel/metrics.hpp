#pragma once

// Reliability metrics over recovery episodes: MTTR-A, MedTTR-A, MTBF,
// the normalized recovery ratio NRR = 1 - MTTR/MTBF, and its
// tail-aware variant NRR_alpha = 1 - lambda * (mu + k_alpha * sigma).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cogrel/error.hpp"
#include "cogrel/telemetry.hpp"

namespace cogrel {

// Median with the even-count convention: mean of the two central order
// statistics.
inline double median(std::vector<double> xs) {
    if (xs.empty()) throw UndefinedMetricError("median of empty sample");
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    if (n % 2 == 1) return xs[n / 2];
    return 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

inline double mean(std::span<const double> xs) {
    if (xs.empty()) throw UndefinedMetricError("mean of empty sample");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

// Sample standard deviation (n - 1 denominator); a singleton has zero
// spread by convention.
inline double sample_std(std::span<const double> xs) {
    if (xs.empty()) throw UndefinedMetricError("std of empty sample");
    if (xs.size() == 1) return 0.0;
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

// Nearest-rank percentile: the ceil(q * n)-th order statistic.
inline double percentile_nearest_rank(std::vector<double> xs, double q) {
    if (xs.empty()) throw UndefinedMetricError("percentile of empty sample");
    if (!(q > 0.0) || !(q <= 1.0)) throw DomainError("percentile rank must be in (0, 1]");
    std::sort(xs.begin(), xs.end());
    const auto n = static_cast<double>(xs.size());
    auto rank = static_cast<std::size_t>(std::ceil(q * n));
    if (rank == 0) rank = 1;
    return xs[rank - 1];
}

inline double mttr_mean(std::span<const double> deltas) {
    if (deltas.empty()) throw UndefinedMetricError("MTTR of zero episodes");
    return mean(deltas);
}

inline double medttr(std::vector<double> deltas) {
    if (deltas.empty()) throw UndefinedMetricError("MedTTR of zero episodes");
    return median(std::move(deltas));
}

// Mean operating interval for one agent within one run: time from the
// previous recovery (run start for the first episode) to each fault.
inline double mtbf_agent(std::vector<Episode> episodes, double run_start = 0.0) {
    if (episodes.empty()) throw UndefinedMetricError("MTBF of zero episodes");
    std::sort(episodes.begin(), episodes.end(),
              [](const Episode& a, const Episode& b) { return a.t_fault < b.t_fault; });
    double prev_recovered = run_start;
    double total = 0.0;
    for (const Episode& ep : episodes) {
        total += ep.t_fault - prev_recovered;
        prev_recovered = ep.t_recovered;
    }
    return total / static_cast<double>(episodes.size());
}

inline double nrr(double mttr, double mtbf) {
    if (!(mtbf > 0.0)) throw UndefinedMetricError("NRR undefined for MTBF <= 0");
    return 1.0 - mttr / mtbf;
}

// One-sided concentration factor at confidence alpha.
inline double k_alpha(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw DomainError("alpha must be in (0, 1)");
    return std::sqrt((1.0 - alpha) / alpha);
}

inline double nrr_alpha(double mu, double sigma, double lambda, double alpha) {
    if (!(mu >= 0.0) || !(sigma >= 0.0)) throw DomainError("mu and sigma must be >= 0");
    if (!(lambda > 0.0)) throw DomainError("lambda must be > 0");
    return 1.0 - lambda * (mu + k_alpha(alpha) * sigma);
}

// Long-run availability of the alternating renewal process,
// pi = MTBF / (MTBF + MTTR) = 1 / (1 + lambda * mu).
inline double steady_state_uptime(double lambda, double mu) {
    if (!(lambda >= 0.0) || !(mu >= 0.0)) throw DomainError("lambda and mu must be >= 0");
    return 1.0 / (1.0 + lambda * mu);
}

struct AgentMetrics {
    std::string agent_id;
    std::int64_t episode_count = 0;
    double mttr_mean = 0.0;
    double medttr = 0.0;
    double mtbf = 0.0;
    double nrr = 0.0;
    double std_recovery = 0.0;
    double p90_recovery = 0.0;
};

struct ModeStats {
    ReflexMode mode = ReflexMode::auto_replan;
    std::int64_t count = 0;
    double medttr = 0.0;
    double std_recovery = 0.0;
    double p90_recovery = 0.0;
};

struct SystemMetrics {
    std::int64_t episode_count = 0;
    std::int64_t agent_count = 0;
    double mttr_sys = 0.0;    // aggregated mean recovery time
    double medttr_sys = 0.0;  // pooled median over every episode
    double mtbf_sys = 0.0;
    double nrr_sys = 0.0;     // 1 - mttr_sys / mtbf_sys
    double nrr_med = 0.0;     // 1 - medttr_sys / mtbf_sys, the headline figure
    double lambda_sys = 0.0;  // 1 / mtbf_sys
    double mu = 0.0;          // alias of mttr_sys in the tail bound
    double sigma_sys = 0.0;
    double alpha = 0.9;
    double k_alpha = 0.0;
    double r_alpha = 0.0;     // mu + k_alpha * sigma
    double nrr_alpha = 0.0;
};

struct ReliabilityReport {
    std::vector<AgentMetrics> agents;  // sorted by agent_id
    std::vector<ModeStats> modes;      // sorted by mode name
    SystemMetrics system;
    std::int64_t incomplete_episodes = 0;  // set by the caller from stream extraction
    std::int64_t skipped_agents = 0;       // agents seen in telemetry with zero episodes
};

// Builds the full report. Aggregation across agents is macro by
// default (mean of per-agent figures); micro pools every episode as if
// one agent produced it. MedTTR at system level is always the pooled
// median, and sigma_sys under macro is the mean of per-agent spreads.
inline ReliabilityReport build_report(std::span<const Episode> input, double run_start = 0.0,
                                      double alpha = 0.9, bool macro = true,
                                      const std::set<std::string>& agents_seen = {}) {
    if (input.empty()) throw UndefinedMetricError("report of zero episodes");

    // Canonical order first, so the report is a function of the
    // episode set: accumulation order would otherwise leak into the
    // last bits of the sums.
    std::vector<Episode> episodes(input.begin(), input.end());
    std::sort(episodes.begin(), episodes.end(), [](const Episode& a, const Episode& b) {
        return std::tie(a.agent_id, a.run_id, a.t_fault, a.t_recovered) <
               std::tie(b.agent_id, b.run_id, b.t_fault, b.t_recovered);
    });

    // Group by agent, and within each agent by run for the MTBF
    // intervals (each run restarts the clock).
    std::map<std::string, std::vector<Episode>> by_agent;
    for (const Episode& ep : episodes) by_agent[ep.agent_id].push_back(ep);

    ReliabilityReport report;
    report.system.alpha = alpha;
    report.system.k_alpha = cogrel::k_alpha(alpha);

    std::vector<double> pooled_deltas;
    pooled_deltas.reserve(episodes.size());
    for (const Episode& ep : episodes) pooled_deltas.push_back(ep.delta_t);

    std::vector<double> agent_mttrs, agent_medttrs, agent_mtbfs, agent_stds;
    for (auto& [agent_id, eps] : by_agent) {
        std::vector<double> deltas;
        deltas.reserve(eps.size());
        for (const Episode& ep : eps) deltas.push_back(ep.delta_t);

        std::map<std::int64_t, std::vector<Episode>> by_run;
        for (const Episode& ep : eps) by_run[ep.run_id].push_back(ep);
        // Pool the operating intervals across this agent's runs, then
        // average; equivalent to a per-run MTBF weighted by episode
        // count.
        double interval_total = 0.0;
        std::size_t interval_count = 0;
        for (auto& [run_id, run_eps] : by_run) {
            std::sort(run_eps.begin(), run_eps.end(),
                      [](const Episode& a, const Episode& b) { return a.t_fault < b.t_fault; });
            double prev = run_start;
            for (const Episode& ep : run_eps) {
                interval_total += ep.t_fault - prev;
                prev = ep.t_recovered;
                interval_count += 1;
            }
        }

        AgentMetrics am;
        am.agent_id = agent_id;
        am.episode_count = static_cast<std::int64_t>(eps.size());
        am.mttr_mean = mttr_mean(deltas);
        am.medttr = medttr(deltas);
        am.mtbf = interval_total / static_cast<double>(interval_count);
        am.nrr = nrr(am.mttr_mean, am.mtbf);
        am.std_recovery = sample_std(deltas);
        am.p90_recovery = percentile_nearest_rank(deltas, 0.9);
        report.agents.push_back(am);

        agent_mttrs.push_back(am.mttr_mean);
        agent_medttrs.push_back(am.medttr);
        agent_mtbfs.push_back(am.mtbf);
        agent_stds.push_back(am.std_recovery);
    }

    for (const std::string& agent_id : agents_seen)
        if (!by_agent.count(agent_id)) report.skipped_agents += 1;

    SystemMetrics& sys = report.system;
    sys.episode_count = static_cast<std::int64_t>(episodes.size());
    sys.agent_count = static_cast<std::int64_t>(by_agent.size());
    if (macro) {
        sys.mttr_sys = mean(agent_mttrs);
        sys.mtbf_sys = mean(agent_mtbfs);
        sys.sigma_sys = mean(agent_stds);
    } else {
        sys.mttr_sys = mean(pooled_deltas);
        // Micro MTBF pools the raw intervals across agents.
        double interval_total = 0.0;
        std::size_t interval_count = 0;
        for (const AgentMetrics& am : report.agents) {
            interval_total += am.mtbf * static_cast<double>(am.episode_count);
            interval_count += static_cast<std::size_t>(am.episode_count);
        }
        sys.mtbf_sys = interval_total / static_cast<double>(interval_count);
        sys.sigma_sys = sample_std(pooled_deltas);
    }
    sys.medttr_sys = median(pooled_deltas);
    sys.nrr_sys = nrr(sys.mttr_sys, sys.mtbf_sys);
    sys.nrr_med = nrr(sys.medttr_sys, sys.mtbf_sys);
    sys.lambda_sys = 1.0 / sys.mtbf_sys;
    sys.mu = sys.mttr_sys;
    sys.r_alpha = sys.mu + sys.k_alpha * sys.sigma_sys;
    sys.nrr_alpha = cogrel::nrr_alpha(sys.mu, sys.sigma_sys, sys.lambda_sys, alpha);

    // Per-mode breakdown over the pooled episodes.
    std::map<ReflexMode, std::vector<double>> by_mode;
    for (const Episode& ep : episodes) by_mode[ep.mode].push_back(ep.delta_t);
    for (auto& [mode, deltas] : by_mode) {
        ModeStats ms;
        ms.mode = mode;
        ms.count = static_cast<std::int64_t>(deltas.size());
        ms.medttr = median(deltas);
        ms.std_recovery = sample_std(deltas);
        ms.p90_recovery = percentile_nearest_rank(deltas, 0.9);
        report.modes.push_back(ms);
    }
    std::sort(report.modes.begin(), report.modes.end(),
              [](const ModeStats& a, const ModeStats& b) {
                  return to_string(a.mode) < to_string(b.mode);
              });

    return report;
}

inline nlohmann::json to_json(const ReliabilityReport& report) {
    nlohmann::json j;
    j["system"] = {
        {"episode_count", report.system.episode_count},
        {"agent_count", report.system.agent_count},
        {"mttr_sys", report.system.mttr_sys},
        {"medttr_sys", report.system.medttr_sys},
        {"mtbf_sys", report.system.mtbf_sys},
        {"nrr_sys", report.system.nrr_sys},
        {"nrr_med", report.system.nrr_med},
        {"lambda_sys", report.system.lambda_sys},
        {"mu", report.system.mu},
        {"sigma_sys", report.system.sigma_sys},
        {"alpha", report.system.alpha},
        {"k_alpha", report.system.k_alpha},
        {"r_alpha", report.system.r_alpha},
        {"nrr_alpha", report.system.nrr_alpha},
    };
    j["agents"] = nlohmann::json::array();
    for (const AgentMetrics& am : report.agents) {
        j["agents"].push_back({
            {"agent_id", am.agent_id},
            {"episode_count", am.episode_count},
            {"mttr_mean", am.mttr_mean},
            {"medttr", am.medttr},
            {"mtbf", am.mtbf},
            {"nrr", am.nrr},
            {"std_recovery", am.std_recovery},
            {"p90_recovery", am.p90_recovery},
        });
    }
    j["modes"] = nlohmann::json::array();
    for (const ModeStats& ms : report.modes) {
        j["modes"].push_back({
            {"mode", std::string(to_string(ms.mode))},
            {"count", ms.count},
            {"medttr", ms.medttr},
            {"std_recovery", ms.std_recovery},
            {"p90_recovery", ms.p90_recovery},
        });
    }
    j["incomplete_episodes"] = report.incomplete_episodes;
    j["skipped_agents"] = report.skipped_agents;
    return j;
}

namespace detail {

// Numeric CSV cells reuse the JSON dump so both formats carry
// textually identical values.
inline std::string csv_num(double x) { return nlohmann::json(x).dump(); }
inline std::string csv_num(std::int64_t x) { return nlohmann::json(x).dump(); }

}  // namespace detail

inline void to_csv(const ReliabilityReport& report, std::ostream& os) {
    os << "agent_id,episode_count,mttr_mean,medttr,mtbf,nrr,std_recovery,p90_recovery\n";
    for (const AgentMetrics& am : report.agents) {
        os << am.agent_id << ',' << detail::csv_num(am.episode_count) << ','
           << detail::csv_num(am.mttr_mean) << ',' << detail::csv_num(am.medttr) << ','
           << detail::csv_num(am.mtbf) << ',' << detail::csv_num(am.nrr) << ','
           << detail::csv_num(am.std_recovery) << ',' << detail::csv_num(am.p90_recovery)
           << '\n';
    }
    os << '\n';
    os << "metric,value\n";
    const SystemMetrics& s = report.system;
    os << "episode_count," << detail::csv_num(s.episode_count) << '\n';
    os << "agent_count," << detail::csv_num(s.agent_count) << '\n';
    os << "mttr_sys," << detail::csv_num(s.mttr_sys) << '\n';
    os << "medttr_sys," << detail::csv_num(s.medttr_sys) << '\n';
    os << "mtbf_sys," << detail::csv_num(s.mtbf_sys) << '\n';
    os << "nrr_sys," << detail::csv_num(s.nrr_sys) << '\n';
    os << "nrr_med," << detail::csv_num(s.nrr_med) << '\n';
    os << "lambda_sys," << detail::csv_num(s.lambda_sys) << '\n';
    os << "mu," << detail::csv_num(s.mu) << '\n';
    os << "sigma_sys," << detail::csv_num(s.sigma_sys) << '\n';
    os << "alpha," << detail::csv_num(s.alpha) << '\n';
    os << "k_alpha," << detail::csv_num(s.k_alpha) << '\n';
    os << "r_alpha," << detail::csv_num(s.r_alpha) << '\n';
    os << "nrr_alpha," << detail::csv_num(s.nrr_alpha) << '\n';
    os << "incomplete_episodes," << detail::csv_num(report.incomplete_episodes) << '\n';
    os << "skipped_agents," << detail::csv_num(report.skipped_agents) << '\n';
    os << '\n';
    os << "mode,count,medttr,std_recovery,p90_recovery\n";
    for (const ModeStats& ms : report.modes) {
        os << to_string(ms.mode) << ',' << detail::csv_num(ms.count) << ','
           << detail::csv_num(ms.medttr) << ',' << detail::csv_num(ms.std_recovery) << ','
           << detail::csv_num(ms.p90_recovery) << '\n';
    }
}

inline std::string to_csv(const ReliabilityReport& report) {
    std::ostringstream os;
    to_csv(report, os);
    return os.str();
}

}  // namespace cogrel
