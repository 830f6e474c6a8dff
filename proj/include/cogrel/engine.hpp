#pragma once

// Discrete-event simulator for reasoning -> drift -> recovery cycles.
// Each cycle: a stable operating interval elapses, one retrieval query
// is evaluated against the corpus, and a fault (if any) is routed
// through the reflex policy tree and replayed as four telemetry events.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "cogrel/corpus.hpp"
#include "cogrel/error.hpp"
#include "cogrel/latency.hpp"
#include "cogrel/rng.hpp"
#include "cogrel/telemetry.hpp"

namespace cogrel {

struct PolicyConfig {
    // Drift branch: weighted choice between re-planning and rollback.
    double drift_auto_replan_weight = 0.68;
    double drift_rollback_weight = 0.32;
    // Low-confidence faults go to a human when the gate is enabled,
    // otherwise fall back to auto-replan.
    bool human_gate_enabled = true;

    void validate() const {
        if (!(drift_auto_replan_weight >= 0.0) || !(drift_rollback_weight >= 0.0))
            throw ConfigError("drift branch weights must be >= 0");
        const double sum = drift_auto_replan_weight + drift_rollback_weight;
        if (std::abs(sum - 1.0) > 1e-12)
            throw ConfigError("drift branch weights must sum to 1");
    }
};

// Policy tree:
//   tool-error      -> tool-retry
//   low-confidence  -> human-approve (gate enabled) else auto-replan
//   drift-observed  -> weighted {auto-replan, rollback}
// Randomness is consumed only on the drift branch.
inline ReflexMode select_reflex(TriggerKind trigger, const PolicyConfig& policy,
                                RandomSource& rng) {
    policy.validate();
    switch (trigger) {
        case TriggerKind::tool_error:
            return ReflexMode::tool_retry;
        case TriggerKind::low_confidence:
            return policy.human_gate_enabled ? ReflexMode::human_approve
                                             : ReflexMode::auto_replan;
        case TriggerKind::drift_observed:
            return rng.bernoulli(policy.drift_auto_replan_weight) ? ReflexMode::auto_replan
                                                                  : ReflexMode::rollback;
    }
    throw DomainError("select_reflex: unknown trigger");
}

struct SimulationConfig {
    std::int64_t runs = 200;
    std::uint64_t seed = 42;
    int agents = 1;
    std::int64_t episodes_per_run = 1;        // completed episodes each agent collects per run
    std::int64_t max_cycles_per_episode = 10000;  // guard for fault-free configs
    double stable_mean = 6.73;                // stable interval between faults, seconds
    double stable_std = 2.14;
    int jobs = 1;                             // bounded run-level parallelism
    DriftConfig drift;
    PolicyConfig policy;
    std::map<ReflexMode, LatencyProfile> profiles = default_profiles();

    void validate() const {
        if (runs < 1) throw ConfigError("runs must be >= 1");
        if (agents < 1) throw ConfigError("agents must be >= 1");
        if (episodes_per_run < 1) throw ConfigError("cycles per run must be >= 1");
        if (max_cycles_per_episode < 1) throw ConfigError("cycle guard must be >= 1");
        if (!(stable_mean > 0.0)) throw ConfigError("stable_mean must be > 0");
        if (!(stable_std >= 0.0)) throw ConfigError("stable_std must be >= 0");
        if (jobs < 1) throw ConfigError("jobs must be >= 1");
        drift.validate();
        policy.validate();
        for (const auto& [mode, profile] : profiles) profile.validate();
        for (ReflexMode m : kCalibratedModes)
            if (!profiles.count(m))
                throw ConfigError("missing latency profile for mode " +
                                  std::string(to_string(m)));
    }
};

struct AgentState {
    std::string agent_id;
    double clock = 0.0;              // virtual seconds since run start
    double last_recovered_at = 0.0;  // run start counts as recovered
    std::int64_t next_episode_id = 0;
};

struct OrchestrationState {
    std::int64_t run_id = 0;
    std::vector<AgentState> agents;
    std::int64_t episodes_completed = 0;
};

struct ReflexOutcome {
    ReflexMode mode = ReflexMode::auto_replan;
    Episode episode;
    std::vector<TelemetryEvent> events;  // fault_detected .. recovered, in order
};

// Independent substreams per concern; query selection is unaffected by
// how much randomness the drift or policy paths consume, so config
// sweeps on a fixed seed see identical query sequences.
struct CycleRng {
    RandomSource stable;
    RandomSource query;
    RandomSource drift;
    RandomSource policy;
    RandomSource latency;

    CycleRng(std::uint64_t seed, std::uint64_t run, std::uint64_t agent)
        : stable(derive_seed(seed, run, agent, 0)),
          query(derive_seed(seed, run, agent, 1)),
          drift(derive_seed(seed, run, agent, 2)),
          policy(derive_seed(seed, run, agent, 3)),
          latency(derive_seed(seed, run, agent, 4)) {}
};

// One reasoning cycle for one agent. Advances the clock by a stable
// interval, evaluates a sampled query, and on a fault replays the full
// detect -> decide -> execute timeline. Returns nothing for healthy
// cycles.
inline std::optional<ReflexOutcome> run_cycle(OrchestrationState& state, std::size_t agent_index,
                                              const Corpus& corpus, const QueryPool& pool,
                                              const SimulationConfig& cfg, CycleRng& rng) {
    AgentState& ag = state.agents.at(agent_index);

    ag.clock += rng.stable.truncated_normal(cfg.stable_mean, cfg.stable_std);

    const std::string& query = pool.queries[rng.query.pick(pool.queries.size())];
    const ConfidenceResult conf = confidence(vectorize(query, corpus), corpus);
    const auto trigger = check_drift(conf.value, cfg.drift, rng.drift);
    if (!trigger) return std::nullopt;

    const ReflexMode mode = select_reflex(*trigger, cfg.policy, rng.policy);
    const LatencySample lat = sample_latency(cfg.profiles.at(mode), rng.latency);

    const double t_fault = ag.clock;
    const double t_policy = t_fault + lat.detect;
    const double t_start = t_policy + lat.decide;
    const double t_recovered = t_start + lat.execute;

    std::optional<double> logged_confidence;
    if (*trigger == TriggerKind::drift_observed) {
        logged_confidence = conf.value;
    } else if (*trigger == TriggerKind::low_confidence) {
        // The perturbation dents the recorded signal; the decision used
        // the raw cosine.
        const double dent = cfg.drift.perturbation_scale * rng.drift.uniform01();
        logged_confidence = std::clamp(conf.value - dent, 0.0, 1.0);
    }

    ReflexOutcome out;
    out.mode = mode;
    const std::int64_t eid = ag.next_episode_id;
    out.events = {
        TelemetryEvent{state.run_id, ag.agent_id, eid, EventType::fault_detected, t_fault,
                       std::nullopt, std::nullopt, *trigger, logged_confidence},
        TelemetryEvent{state.run_id, ag.agent_id, eid, EventType::policy_selected, t_policy,
                       std::nullopt, mode, std::nullopt, std::nullopt},
        TelemetryEvent{state.run_id, ag.agent_id, eid, EventType::reflex_started, t_start,
                       std::nullopt, mode, std::nullopt, std::nullopt},
        TelemetryEvent{state.run_id, ag.agent_id, eid, EventType::recovered, t_recovered,
                       std::nullopt, mode, std::nullopt, std::nullopt},
    };

    // Build the episode exactly the way episodes_from_events would, so
    // stream segmentation reproduces it field for field.
    Episode& ep = out.episode;
    ep.run_id = state.run_id;
    ep.agent_id = ag.agent_id;
    ep.t_fault = t_fault;
    ep.t_recovered = t_recovered;
    ep.delta_t = t_recovered - t_fault;
    ep.t_decide = t_start - t_policy;
    ep.t_execute = t_recovered - t_start;
    ep.t_detect = std::max(ep.delta_t - ep.t_decide - ep.t_execute, 0.0);
    ep.mode = mode;
    ep.trigger = *trigger;

    ag.clock = t_recovered;
    ag.last_recovered_at = t_recovered;
    ag.next_episode_id += 1;
    state.episodes_completed += 1;
    return out;
}

struct ExperimentResult {
    std::vector<TelemetryEvent> events;        // grouped by run, then agent
    std::vector<Episode> episodes;             // same order
    std::map<ReflexMode, std::int64_t> mode_counts;
    std::int64_t starved_agent_runs = 0;       // (run, agent) pairs that hit the cycle guard
};

namespace detail {

struct RunOutput {
    std::vector<TelemetryEvent> events;
    std::vector<Episode> episodes;
    std::int64_t starved = 0;
};

inline RunOutput simulate_run(std::int64_t run, const Corpus& corpus, const QueryPool& pool,
                              const SimulationConfig& cfg) {
    RunOutput out;
    OrchestrationState state;
    state.run_id = run;
    state.agents.resize(static_cast<std::size_t>(cfg.agents));
    for (int a = 0; a < cfg.agents; ++a)
        state.agents[static_cast<std::size_t>(a)].agent_id = "agent-" + std::to_string(a);

    for (int a = 0; a < cfg.agents; ++a) {
        CycleRng rng(cfg.seed, static_cast<std::uint64_t>(run), static_cast<std::uint64_t>(a));
        std::int64_t completed = 0;
        std::int64_t cycles_since_episode = 0;
        while (completed < cfg.episodes_per_run) {
            auto outcome = run_cycle(state, static_cast<std::size_t>(a), corpus, pool, cfg, rng);
            if (outcome) {
                completed += 1;
                cycles_since_episode = 0;
                out.events.insert(out.events.end(), outcome->events.begin(),
                                  outcome->events.end());
                out.episodes.push_back(std::move(outcome->episode));
            } else if (++cycles_since_episode >= cfg.max_cycles_per_episode) {
                out.starved += 1;
                break;
            }
        }
    }
    return out;
}

}  // namespace detail

// Runs n_runs independent runs. Runs execute in parallel (bounded by
// cfg.jobs) but each owns a derived rng and an output slot, and slots
// are concatenated in run order, so the result is identical for any
// job count.
inline ExperimentResult run_experiment(const SimulationConfig& cfg, const Corpus& corpus,
                                       const QueryPool& pool) {
    cfg.validate();
    pool.validate();

    std::vector<detail::RunOutput> slots(static_cast<std::size_t>(cfg.runs));
    const int jobs = static_cast<int>(
        std::min<std::int64_t>(cfg.jobs, cfg.runs));
    if (jobs <= 1) {
        for (std::int64_t r = 0; r < cfg.runs; ++r)
            slots[static_cast<std::size_t>(r)] = detail::simulate_run(r, corpus, pool, cfg);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(jobs));
        for (int w = 0; w < jobs; ++w) {
            workers.emplace_back([&, w] {
                for (std::int64_t r = w; r < cfg.runs; r += jobs)
                    slots[static_cast<std::size_t>(r)] =
                        detail::simulate_run(r, corpus, pool, cfg);
            });
        }
        for (auto& t : workers) t.join();
    }

    ExperimentResult result;
    for (auto& slot : slots) {
        result.events.insert(result.events.end(), slot.events.begin(), slot.events.end());
        for (auto& ep : slot.episodes) {
            result.mode_counts[ep.mode] += 1;
            result.episodes.push_back(std::move(ep));
        }
        result.starved_agent_runs += slot.starved;
    }
    return result;
}

}  // namespace cogrel
