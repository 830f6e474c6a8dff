#pragma once

// Recovery-latency model. Every reflex episode decomposes as
//   delta_t = t_detect + t_decide + t_execute
// and each calibrated mode carries one distribution per phase.

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "cogrel/error.hpp"
#include "cogrel/rng.hpp"
#include "cogrel/telemetry.hpp"

namespace cogrel {

enum class PhaseKind { point, truncated_normal };

struct PhaseDistribution {
    PhaseKind kind = PhaseKind::point;
    double location = 0.0;  // point value, or normal mean before truncation
    double scale = 0.0;     // normal stddev; ignored for point

    void validate() const {
        if (!std::isfinite(location) || location < 0.0)
            throw ConfigError("phase location must be finite and >= 0");
        if (!std::isfinite(scale) || scale < 0.0)
            throw ConfigError("phase scale must be finite and >= 0");
    }

    double sample(RandomSource& rng) const {
        switch (kind) {
            case PhaseKind::point: return location;
            case PhaseKind::truncated_normal: return rng.truncated_normal(location, scale);
        }
        throw DomainError("unknown phase kind");
    }
};

struct LatencyProfile {
    ReflexMode mode = ReflexMode::auto_replan;
    PhaseDistribution detect;
    PhaseDistribution decide;
    PhaseDistribution execute;

    void validate() const {
        detect.validate();
        decide.validate();
        execute.validate();
    }
};

struct LatencySample {
    double detect = 0.0;
    double decide = 0.0;
    double execute = 0.0;

    double total() const { return detect + decide + execute; }
};

// Draw order is fixed (detect, decide, execute) so a seeded replay is
// reproducible.
inline LatencySample sample_latency(const LatencyProfile& profile, RandomSource& rng) {
    profile.validate();
    LatencySample s;
    s.detect = profile.detect.sample(rng);
    s.decide = profile.decide.sample(rng);
    s.execute = profile.execute.sample(rng);
    return s;
}

// Splits a mode's target median across phases: detect and decide are
// point masses at the given fractions of the median, execute is a
// truncated normal holding the remainder of the location and all of
// the spread. Locations sum to the target median exactly by
// construction (execute gets median - detect - decide).
inline LatencyProfile make_split_profile(ReflexMode mode, double median, double stddev,
                                         double detect_frac = 0.15, double decide_frac = 0.05) {
    if (!(median > 0.0)) throw ConfigError("profile median must be > 0");
    if (!(stddev >= 0.0)) throw ConfigError("profile stddev must be >= 0");
    if (!(detect_frac >= 0.0) || !(decide_frac >= 0.0) || detect_frac + decide_frac >= 1.0)
        throw ConfigError("phase fractions must be >= 0 and sum below 1");
    LatencyProfile p;
    p.mode = mode;
    p.detect = {PhaseKind::point, median * detect_frac, 0.0};
    p.decide = {PhaseKind::point, median * decide_frac, 0.0};
    p.execute = {PhaseKind::truncated_normal, median - p.detect.location - p.decide.location,
                 stddev};
    p.validate();
    return p;
}

// Calibrated (median, stddev) pairs for the four reflex modes the
// policy tree selects. The execute-phase dominance and the
// median + 1.2816 * stddev ~ P90 relationship are pinned by tests.
inline std::map<ReflexMode, LatencyProfile> default_profiles() {
    std::map<ReflexMode, LatencyProfile> out;
    out.emplace(ReflexMode::auto_replan,
                make_split_profile(ReflexMode::auto_replan, 5.94, 0.70));
    out.emplace(ReflexMode::tool_retry,
                make_split_profile(ReflexMode::tool_retry, 4.46, 0.61));
    out.emplace(ReflexMode::rollback,
                make_split_profile(ReflexMode::rollback, 6.99, 0.43));
    out.emplace(ReflexMode::human_approve,
                make_split_profile(ReflexMode::human_approve, 12.22, 0.68));
    return out;
}

// Override file: one record per line,
//   <mode> median=<s> std=<s> [detect_frac=<f>] [decide_frac=<f>]
// '#' starts a comment. Unlisted modes keep their defaults.
inline std::map<ReflexMode, LatencyProfile> parse_profile_overrides(
    std::istream& in, std::map<ReflexMode, LatencyProfile> base = default_profiles()) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string mode_name;
        if (!(ls >> mode_name)) continue;  // blank line
        const auto mode = parse_reflex_mode(mode_name);
        if (!mode)
            throw ConfigError("profile override line " + std::to_string(line_no) +
                              ": unknown mode '" + mode_name + "'");
        double median = -1.0, stddev = -1.0, detect_frac = 0.15, decide_frac = 0.05;
        std::string kv;
        while (ls >> kv) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw ConfigError("profile override line " + std::to_string(line_no) +
                                  ": expected key=value, got '" + kv + "'");
            const std::string key = kv.substr(0, eq);
            double value = 0.0;
            try {
                value = std::stod(kv.substr(eq + 1));
            } catch (const std::exception&) {
                throw ConfigError("profile override line " + std::to_string(line_no) +
                                  ": bad number in '" + kv + "'");
            }
            if (key == "median") median = value;
            else if (key == "std") stddev = value;
            else if (key == "detect_frac") detect_frac = value;
            else if (key == "decide_frac") decide_frac = value;
            else
                throw ConfigError("profile override line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
        }
        if (median < 0.0 || stddev < 0.0)
            throw ConfigError("profile override line " + std::to_string(line_no) +
                              ": median and std are required");
        base[*mode] = make_split_profile(*mode, median, stddev, detect_frac, decide_frac);
    }
    return base;
}

inline std::map<ReflexMode, LatencyProfile> load_profile_overrides_file(
    const std::string& path, std::map<ReflexMode, LatencyProfile> base = default_profiles()) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open profile override file: " + path);
    return parse_profile_overrides(in, std::move(base));
}

}  // namespace cogrel
