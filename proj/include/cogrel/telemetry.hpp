#pragma once

// Structured telemetry for fault -> recovery cycles: the event wire
// schema (JSONL, one event per line, fixed key order) and the episode
// segmentation that every metric downstream is computed from.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cogrel/error.hpp"

namespace cogrel {

// ---------------------------------------------------------------------------
// enumerations

enum class ReflexCategory { recovery, human_in_the_loop, governance, coordination, safety };

enum class ReflexMode {
    // recovery
    auto_replan,
    rollback,
    tool_retry,
    fallback_policy,
    safe_mode,
    // human in the loop
    human_approve,
    human_override,
    human_review,
    escalate_to_expert,
    // governance
    auto_diagnose,
    self_heal,
    confidence_gate,
    vote_or_consensus,
    sandbox_execute,
    drift_rollback,
    // coordination
    broadcast_update,
    negotiate_task,
    sync_state,
    lock_release_resource,
    // safety
    graceful_abort,
    force_terminate,
    audit_snapshot,
};

constexpr int kReflexModeCount = 22;

// The four modes with calibrated latency profiles; the policy tree only
// ever selects from these.
constexpr std::array<ReflexMode, 4> kCalibratedModes = {
    ReflexMode::auto_replan,
    ReflexMode::tool_retry,
    ReflexMode::rollback,
    ReflexMode::human_approve,
};

enum class TriggerKind { tool_error, low_confidence, drift_observed };

enum class EventType { fault_detected, policy_selected, reflex_started, recovered };

inline ReflexCategory category_of(ReflexMode m) {
    switch (m) {
        case ReflexMode::auto_replan:
        case ReflexMode::rollback:
        case ReflexMode::tool_retry:
        case ReflexMode::fallback_policy:
        case ReflexMode::safe_mode:
            return ReflexCategory::recovery;
        case ReflexMode::human_approve:
        case ReflexMode::human_override:
        case ReflexMode::human_review:
        case ReflexMode::escalate_to_expert:
            return ReflexCategory::human_in_the_loop;
        case ReflexMode::auto_diagnose:
        case ReflexMode::self_heal:
        case ReflexMode::confidence_gate:
        case ReflexMode::vote_or_consensus:
        case ReflexMode::sandbox_execute:
        case ReflexMode::drift_rollback:
            return ReflexCategory::governance;
        case ReflexMode::broadcast_update:
        case ReflexMode::negotiate_task:
        case ReflexMode::sync_state:
        case ReflexMode::lock_release_resource:
            return ReflexCategory::coordination;
        case ReflexMode::graceful_abort:
        case ReflexMode::force_terminate:
        case ReflexMode::audit_snapshot:
            return ReflexCategory::safety;
    }
    throw DomainError("category_of: unknown mode");
}

inline std::string_view to_string(ReflexMode m) {
    switch (m) {
        case ReflexMode::auto_replan: return "auto-replan";
        case ReflexMode::rollback: return "rollback";
        case ReflexMode::tool_retry: return "tool-retry";
        case ReflexMode::fallback_policy: return "fallback-policy";
        case ReflexMode::safe_mode: return "safe-mode";
        case ReflexMode::human_approve: return "human-approve";
        case ReflexMode::human_override: return "human-override";
        case ReflexMode::human_review: return "human-review";
        case ReflexMode::escalate_to_expert: return "escalate-to-expert";
        case ReflexMode::auto_diagnose: return "auto-diagnose";
        case ReflexMode::self_heal: return "self-heal";
        case ReflexMode::confidence_gate: return "confidence-gate";
        case ReflexMode::vote_or_consensus: return "vote-or-consensus";
        case ReflexMode::sandbox_execute: return "sandbox-execute";
        case ReflexMode::drift_rollback: return "drift-rollback";
        case ReflexMode::broadcast_update: return "broadcast-update";
        case ReflexMode::negotiate_task: return "negotiate-task";
        case ReflexMode::sync_state: return "sync-state";
        case ReflexMode::lock_release_resource: return "lock-release-resource";
        case ReflexMode::graceful_abort: return "graceful-abort";
        case ReflexMode::force_terminate: return "force-terminate";
        case ReflexMode::audit_snapshot: return "audit-snapshot";
    }
    throw DomainError("to_string: unknown mode");
}

inline std::string_view to_string(ReflexCategory c) {
    switch (c) {
        case ReflexCategory::recovery: return "recovery";
        case ReflexCategory::human_in_the_loop: return "human-in-the-loop";
        case ReflexCategory::governance: return "governance";
        case ReflexCategory::coordination: return "coordination";
        case ReflexCategory::safety: return "safety";
    }
    throw DomainError("to_string: unknown category");
}

inline std::string_view to_string(TriggerKind k) {
    switch (k) {
        case TriggerKind::tool_error: return "tool-error";
        case TriggerKind::low_confidence: return "low-confidence";
        case TriggerKind::drift_observed: return "drift-observed";
    }
    throw DomainError("to_string: unknown trigger");
}

inline std::string_view to_string(EventType t) {
    switch (t) {
        case EventType::fault_detected: return "fault_detected";
        case EventType::policy_selected: return "policy_selected";
        case EventType::reflex_started: return "reflex_started";
        case EventType::recovered: return "recovered";
    }
    throw DomainError("to_string: unknown event type");
}

inline std::optional<ReflexMode> parse_reflex_mode(std::string_view s) {
    for (int i = 0; i < kReflexModeCount; ++i) {
        const auto m = static_cast<ReflexMode>(i);
        if (to_string(m) == s) return m;
    }
    return std::nullopt;
}

inline std::optional<TriggerKind> parse_trigger(std::string_view s) {
    if (s == "tool-error") return TriggerKind::tool_error;
    if (s == "low-confidence") return TriggerKind::low_confidence;
    if (s == "drift-observed") return TriggerKind::drift_observed;
    return std::nullopt;
}

inline std::optional<EventType> parse_event_type(std::string_view s) {
    if (s == "fault_detected") return EventType::fault_detected;
    if (s == "policy_selected") return EventType::policy_selected;
    if (s == "reflex_started") return EventType::reflex_started;
    if (s == "recovered") return EventType::recovered;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// events

// Comparisons of virtual timestamps use this absolute tolerance.
constexpr double kTimeTolerance = 1e-9;

struct TelemetryEvent {
    std::int64_t run_id = 0;
    std::string agent_id;
    std::int64_t episode_id = 0;
    EventType event_type = EventType::fault_detected;
    double t = 0.0;                    // virtual seconds
    std::optional<double> onset;       // drift onset; fault_detected only
    std::optional<ReflexMode> mode;
    std::optional<TriggerKind> trigger;
    std::optional<double> confidence;

    bool operator==(const TelemetryEvent&) const = default;

    // Field invariants. Presence rules:
    //   mode       iff event_type in {policy_selected, reflex_started, recovered}
    //   trigger    iff event_type == fault_detected
    //   confidence iff fault_detected with trigger in {low-confidence, drift-observed}
    //   onset      only on fault_detected, 0 <= onset <= t
    void validate() const {
        if (run_id < 0) throw InvariantError("run_id must be non-negative");
        if (episode_id < 0) throw InvariantError("episode_id must be non-negative");
        if (agent_id.empty()) throw InvariantError("agent_id must be non-empty");
        if (!std::isfinite(t) || t < 0.0) throw InvariantError("t must be finite and >= 0");
        const bool wants_mode = event_type != EventType::fault_detected;
        if (mode.has_value() != wants_mode)
            throw InvariantError(wants_mode ? "mode required for this event_type"
                                            : "mode not allowed on fault_detected");
        const bool wants_trigger = event_type == EventType::fault_detected;
        if (trigger.has_value() != wants_trigger)
            throw InvariantError(wants_trigger ? "trigger required on fault_detected"
                                               : "trigger only allowed on fault_detected");
        const bool wants_confidence =
            wants_trigger && (trigger == TriggerKind::low_confidence ||
                              trigger == TriggerKind::drift_observed);
        if (confidence.has_value() != wants_confidence)
            throw InvariantError(wants_confidence
                                     ? "confidence required for this trigger"
                                     : "confidence not allowed on this event");
        if (confidence && (!std::isfinite(*confidence) || *confidence < 0.0 || *confidence > 1.0))
            throw InvariantError("confidence must lie in [0, 1]");
        if (onset) {
            if (event_type != EventType::fault_detected)
                throw InvariantError("onset only allowed on fault_detected");
            if (!std::isfinite(*onset) || *onset < 0.0 || *onset > t + kTimeTolerance)
                throw InvariantError("onset must satisfy 0 <= onset <= t");
        }
    }
};

namespace detail {

// Fixed-point with >= 6 decimals; precision escalates only when needed
// so that strtod(output) reproduces the exact double.
inline std::string format_wire_real(double v) {
    char buf[64];
    for (int prec : {6, 9, 12, 15, 17}) {
        std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17e", v);
    return buf;
}

inline void append_json_string(std::string& out, std::string_view s) {
    out += '"';
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    out += '"';
}

}  // namespace detail

// One newline-free JSON object; key order is fixed
// (run_id, agent_id, episode_id, event_type, t, onset, mode, trigger, confidence)
// with absent optionals omitted entirely.
inline std::string encode_event(const TelemetryEvent& e) {
    e.validate();
    std::string out;
    out.reserve(160);
    out += "{\"run_id\":";
    out += std::to_string(e.run_id);
    out += ",\"agent_id\":";
    detail::append_json_string(out, e.agent_id);
    out += ",\"episode_id\":";
    out += std::to_string(e.episode_id);
    out += ",\"event_type\":\"";
    out += to_string(e.event_type);
    out += "\",\"t\":";
    out += detail::format_wire_real(e.t);
    if (e.onset) {
        out += ",\"onset\":";
        out += detail::format_wire_real(*e.onset);
    }
    if (e.mode) {
        out += ",\"mode\":\"";
        out += to_string(*e.mode);
        out += '"';
    }
    if (e.trigger) {
        out += ",\"trigger\":\"";
        out += to_string(*e.trigger);
        out += '"';
    }
    if (e.confidence) {
        out += ",\"confidence\":";
        out += detail::format_wire_real(*e.confidence);
    }
    out += '}';
    return out;
}

namespace detail {

inline std::string line_prefix(std::size_t line_no) {
    return line_no > 0 ? "line " + std::to_string(line_no) + ": " : std::string{};
}

}  // namespace detail

// Parses one JSONL line. line_no (1-based) is used for error messages
// when known; pass 0 for standalone lines.
inline TelemetryEvent decode_event(std::string_view line, std::size_t line_no = 0) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& ex) {
        throw ParseError(detail::line_prefix(line_no) + "malformed JSON: " + ex.what());
    }
    if (!j.is_object())
        throw SchemaError(detail::line_prefix(line_no) + "event must be a JSON object");

    static const std::set<std::string> known = {"run_id", "agent_id", "episode_id", "event_type",
                                                "t",      "onset",    "mode",       "trigger",
                                                "confidence"};
    for (const auto& item : j.items()) {
        if (!known.count(item.key()))
            throw SchemaError(detail::line_prefix(line_no) + "unknown field '" + item.key() + "'");
    }
    auto require = [&](const char* key) -> const nlohmann::json& {
        auto it = j.find(key);
        if (it == j.end())
            throw SchemaError(detail::line_prefix(line_no) + "missing field '" + key + "'");
        return *it;
    };

    TelemetryEvent e;
    {
        const auto& v = require("run_id");
        if (!v.is_number_integer())
            throw SchemaError(detail::line_prefix(line_no) + "run_id must be an integer");
        e.run_id = v.get<std::int64_t>();
    }
    {
        const auto& v = require("agent_id");
        if (!v.is_string())
            throw SchemaError(detail::line_prefix(line_no) + "agent_id must be a string");
        e.agent_id = v.get<std::string>();
    }
    {
        const auto& v = require("episode_id");
        if (!v.is_number_integer())
            throw SchemaError(detail::line_prefix(line_no) + "episode_id must be an integer");
        e.episode_id = v.get<std::int64_t>();
    }
    {
        const auto& v = require("event_type");
        if (!v.is_string())
            throw SchemaError(detail::line_prefix(line_no) + "event_type must be a string");
        auto parsed = parse_event_type(v.get<std::string>());
        if (!parsed)
            throw SchemaError(detail::line_prefix(line_no) + "unknown event_type '" +
                              v.get<std::string>() + "'");
        e.event_type = *parsed;
    }
    {
        const auto& v = require("t");
        if (!v.is_number())
            throw SchemaError(detail::line_prefix(line_no) + "t must be a number");
        e.t = v.get<double>();
    }
    if (auto it = j.find("onset"); it != j.end()) {
        if (!it->is_number())
            throw SchemaError(detail::line_prefix(line_no) + "onset must be a number");
        e.onset = it->get<double>();
    }
    if (auto it = j.find("mode"); it != j.end()) {
        if (!it->is_string())
            throw SchemaError(detail::line_prefix(line_no) + "mode must be a string");
        auto parsed = parse_reflex_mode(it->get<std::string>());
        if (!parsed)
            throw SchemaError(detail::line_prefix(line_no) + "unknown mode '" +
                              it->get<std::string>() + "'");
        e.mode = *parsed;
    }
    if (auto it = j.find("trigger"); it != j.end()) {
        if (!it->is_string())
            throw SchemaError(detail::line_prefix(line_no) + "trigger must be a string");
        auto parsed = parse_trigger(it->get<std::string>());
        if (!parsed)
            throw SchemaError(detail::line_prefix(line_no) + "unknown trigger '" +
                              it->get<std::string>() + "'");
        e.trigger = *parsed;
    }
    if (auto it = j.find("confidence"); it != j.end()) {
        if (!it->is_number())
            throw SchemaError(detail::line_prefix(line_no) + "confidence must be a number");
        e.confidence = it->get<double>();
    }
    try {
        e.validate();
    } catch (const InvariantError& ex) {
        throw InvariantError(detail::line_prefix(line_no) + ex.what());
    }
    return e;
}

// Whitespace-only lines are skipped; errors carry 1-based line numbers.
inline std::vector<TelemetryEvent> read_telemetry(std::istream& in) {
    std::vector<TelemetryEvent> events;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        events.push_back(decode_event(line, line_no));
    }
    return events;
}

inline std::vector<TelemetryEvent> read_telemetry_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open telemetry file: " + path);
    return read_telemetry(in);
}

inline void write_telemetry(std::ostream& out, std::span<const TelemetryEvent> events) {
    for (const auto& e : events) {
        out << encode_event(e) << '\n';
    }
}

inline void write_telemetry_file(const std::string& path,
                                 std::span<const TelemetryEvent> events) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    write_telemetry(out, events);
    out.flush();
    if (!out) throw IoError("failed writing telemetry to: " + path);
}

// ---------------------------------------------------------------------------
// episodes

struct Episode {
    std::int64_t run_id = 0;
    std::string agent_id;
    double t_fault = 0.0;      // drift onset when recorded, else fault_detected time
    double t_recovered = 0.0;
    double delta_t = 0.0;      // == t_recovered - t_fault, exactly
    double t_detect = 0.0;     // == delta_t - t_decide - t_execute, exactly
    double t_decide = 0.0;
    double t_execute = 0.0;
    ReflexMode mode = ReflexMode::auto_replan;
    TriggerKind trigger = TriggerKind::drift_observed;

    bool operator==(const Episode&) const = default;
};

struct EpisodeExtraction {
    std::vector<Episode> episodes;     // completion (recovered-event) order
    std::size_t incomplete = 0;        // faults never closed by a recovered event
    std::set<std::string> agents_seen; // every agent_id appearing in the stream
};

namespace detail {

struct PendingEpisode {
    std::int64_t episode_id = 0;
    double t_fault = 0.0;
    std::optional<double> onset;
    double t_policy = 0.0;
    double t_start = 0.0;
    std::optional<ReflexMode> mode;
    TriggerKind trigger = TriggerKind::drift_observed;
    EventType stage = EventType::fault_detected;  // last event applied
};

}  // namespace detail

// Segments an event stream into completed episodes. Events must be
// time-ordered within each (run_id, agent_id) stream; streams may be
// concatenated or interleaved arbitrarily with respect to each other.
//
// Segmentation contract per episode:
//   t_fault   = onset when present, else t(fault_detected)
//   t_decide  = t(reflex_started) - t(policy_selected)
//   t_execute = t(recovered) - t(reflex_started)
//   delta_t   = t(recovered) - t_fault
//   t_detect  = delta_t - t_decide - t_execute
// Note t_detect is the remainder, not t(policy_selected) - t(fault_detected);
// when an onset is recorded it also absorbs the pre-detection lag.
inline EpisodeExtraction episodes_from_events(std::span<const TelemetryEvent> events) {
    EpisodeExtraction out;
    using StreamKey = std::pair<std::int64_t, std::string>;
    std::map<StreamKey, detail::PendingEpisode> pending;
    std::map<StreamKey, double> last_t;

    auto context = [](const TelemetryEvent& e) {
        return " (run " + std::to_string(e.run_id) + ", agent " + e.agent_id + ", episode " +
               std::to_string(e.episode_id) + ")";
    };

    for (const auto& e : events) {
        e.validate();
        out.agents_seen.insert(e.agent_id);
        const StreamKey key{e.run_id, e.agent_id};

        if (auto it = last_t.find(key); it != last_t.end() && e.t < it->second - kTimeTolerance)
            throw StreamError("events out of order: t decreases" + context(e));
        last_t[key] = e.t;

        auto open = pending.find(key);
        switch (e.event_type) {
            case EventType::fault_detected: {
                if (open != pending.end())
                    throw StreamError("fault_detected while episode " +
                                      std::to_string(open->second.episode_id) + " is open" +
                                      context(e));
                detail::PendingEpisode p;
                p.episode_id = e.episode_id;
                p.t_fault = e.t;
                p.onset = e.onset;
                p.trigger = *e.trigger;
                p.stage = EventType::fault_detected;
                pending.emplace(key, p);
                break;
            }
            case EventType::policy_selected: {
                if (open == pending.end() || open->second.episode_id != e.episode_id ||
                    open->second.stage != EventType::fault_detected)
                    throw StreamError("policy_selected without matching open fault" + context(e));
                open->second.t_policy = e.t;
                open->second.mode = e.mode;
                open->second.stage = EventType::policy_selected;
                break;
            }
            case EventType::reflex_started: {
                if (open == pending.end() || open->second.episode_id != e.episode_id ||
                    open->second.stage != EventType::policy_selected)
                    throw StreamError("reflex_started out of sequence" + context(e));
                if (e.mode != open->second.mode)
                    throw StreamError("mode changed mid-episode" + context(e));
                open->second.t_start = e.t;
                open->second.stage = EventType::reflex_started;
                break;
            }
            case EventType::recovered: {
                if (open == pending.end() || open->second.episode_id != e.episode_id ||
                    open->second.stage != EventType::reflex_started)
                    throw StreamError("recovered out of sequence" + context(e));
                if (e.mode != open->second.mode)
                    throw StreamError("mode changed mid-episode" + context(e));
                const auto& p = open->second;
                Episode ep;
                ep.run_id = e.run_id;
                ep.agent_id = e.agent_id;
                ep.t_fault = p.onset.value_or(p.t_fault);
                ep.t_recovered = e.t;
                ep.delta_t = ep.t_recovered - ep.t_fault;
                ep.t_decide = p.t_start - p.t_policy;
                ep.t_execute = e.t - p.t_start;
                ep.t_detect = ep.delta_t - ep.t_decide - ep.t_execute;
                if (ep.t_detect < 0.0) {
                    if (ep.t_detect < -kTimeTolerance)
                        throw StreamError("negative detection remainder" + context(e));
                    ep.t_detect = 0.0;  // float dust from the subtraction chain
                }
                ep.mode = *p.mode;
                ep.trigger = p.trigger;
                out.episodes.push_back(std::move(ep));
                pending.erase(open);
                break;
            }
        }
    }
    out.incomplete = pending.size();
    return out;
}

}  // namespace cogrel
