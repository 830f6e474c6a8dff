#pragma once

// Offline analysis artifacts over an episode set: recovery-time
// histogram, per-mode five-number summaries, a rolling MTTR series
// over runs, and the detect/decide/execute phase breakdown.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cogrel/error.hpp"
#include "cogrel/metrics.hpp"
#include "cogrel/telemetry.hpp"

namespace cogrel {

struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    std::int64_t count = 0;
};

// Equal-width bins over [min, max]; the last bin is closed on the
// right so the maximum lands inside it. A degenerate sample (all
// values equal) collapses to one bin of unit width centered on the
// value.
inline std::vector<HistogramBin> delta_histogram(std::span<const Episode> episodes, int bins) {
    if (episodes.empty()) throw UndefinedMetricError("histogram of zero episodes");
    if (bins < 1) throw DomainError("bins must be >= 1");
    double lo = episodes[0].delta_t;
    double hi = lo;
    for (const Episode& ep : episodes) {
        lo = std::min(lo, ep.delta_t);
        hi = std::max(hi, ep.delta_t);
    }
    std::vector<HistogramBin> out;
    if (hi == lo) {
        out.push_back({lo - 0.5, lo + 0.5, static_cast<std::int64_t>(episodes.size())});
        return out;
    }
    const double width = (hi - lo) / bins;
    out.resize(static_cast<std::size_t>(bins));
    for (int b = 0; b < bins; ++b) {
        out[static_cast<std::size_t>(b)].lo = lo + b * width;
        out[static_cast<std::size_t>(b)].hi = lo + (b + 1) * width;
    }
    out.back().hi = hi;
    for (const Episode& ep : episodes) {
        auto idx = static_cast<std::int64_t>((ep.delta_t - lo) / width);
        idx = std::clamp<std::int64_t>(idx, 0, bins - 1);
        out[static_cast<std::size_t>(idx)].count += 1;
    }
    return out;
}

// Quartiles by linear interpolation between order statistics
// (the common q = (n-1)*p convention).
inline double quantile_linear(std::vector<double> xs, double p) {
    if (xs.empty()) throw UndefinedMetricError("quantile of empty sample");
    if (!(p >= 0.0) || !(p <= 1.0)) throw DomainError("quantile p must be in [0, 1]");
    std::sort(xs.begin(), xs.end());
    const double pos = p * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return xs[lo] + frac * (xs[hi] - xs[lo]);
}

struct FiveNumberSummary {
    ReflexMode mode = ReflexMode::auto_replan;
    std::int64_t count = 0;
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
};

inline std::vector<FiveNumberSummary> mode_summaries(std::span<const Episode> episodes) {
    if (episodes.empty()) throw UndefinedMetricError("summary of zero episodes");
    std::map<ReflexMode, std::vector<double>> by_mode;
    for (const Episode& ep : episodes) by_mode[ep.mode].push_back(ep.delta_t);
    std::vector<FiveNumberSummary> out;
    for (auto& [mode, deltas] : by_mode) {
        FiveNumberSummary s;
        s.mode = mode;
        s.count = static_cast<std::int64_t>(deltas.size());
        s.min = quantile_linear(deltas, 0.0);
        s.q1 = quantile_linear(deltas, 0.25);
        s.median = quantile_linear(deltas, 0.5);
        s.q3 = quantile_linear(deltas, 0.75);
        s.max = quantile_linear(deltas, 1.0);
        out.push_back(s);
    }
    std::sort(out.begin(), out.end(), [](const FiveNumberSummary& a, const FiveNumberSummary& b) {
        return to_string(a.mode) < to_string(b.mode);
    });
    return out;
}

struct RollingPoint {
    std::int64_t window_end_run = 0;  // run_id closing the window
    double mean = 0.0;
    double median = 0.0;
};

// Rolling statistics over the per-run mean recovery time, runs ordered
// by run_id. A full window is required, so the series has
// (runs - window + 1) points; fewer runs than the window yield an
// empty series.
inline std::vector<RollingPoint> rolling_mttr(std::span<const Episode> episodes, int window) {
    if (episodes.empty()) throw UndefinedMetricError("rolling series of zero episodes");
    if (window < 1) throw DomainError("window must be >= 1");
    std::map<std::int64_t, std::vector<double>> by_run;
    for (const Episode& ep : episodes) by_run[ep.run_id].push_back(ep.delta_t);
    std::vector<std::int64_t> run_ids;
    std::vector<double> run_means;
    for (auto& [run_id, deltas] : by_run) {
        run_ids.push_back(run_id);
        run_means.push_back(mean(deltas));
    }
    std::vector<RollingPoint> out;
    if (run_means.size() < static_cast<std::size_t>(window)) return out;
    for (std::size_t end = static_cast<std::size_t>(window); end <= run_means.size(); ++end) {
        std::vector<double> win(run_means.begin() + static_cast<std::ptrdiff_t>(end) - window,
                                run_means.begin() + static_cast<std::ptrdiff_t>(end));
        RollingPoint p;
        p.window_end_run = run_ids[end - 1];
        p.mean = mean(win);
        p.median = median(win);
        out.push_back(p);
    }
    return out;
}

struct PhaseBreakdown {
    ReflexMode mode = ReflexMode::auto_replan;
    std::int64_t count = 0;
    double mean_detect = 0.0;
    double mean_decide = 0.0;
    double mean_execute = 0.0;
    double mean_total = 0.0;
};

inline std::vector<PhaseBreakdown> phase_breakdown(std::span<const Episode> episodes) {
    if (episodes.empty()) throw UndefinedMetricError("phase breakdown of zero episodes");
    struct Acc {
        std::int64_t n = 0;
        double detect = 0.0, decide = 0.0, execute = 0.0, total = 0.0;
    };
    std::map<ReflexMode, Acc> by_mode;
    for (const Episode& ep : episodes) {
        Acc& a = by_mode[ep.mode];
        a.n += 1;
        a.detect += ep.t_detect;
        a.decide += ep.t_decide;
        a.execute += ep.t_execute;
        a.total += ep.delta_t;
    }
    std::vector<PhaseBreakdown> out;
    for (auto& [mode, a] : by_mode) {
        PhaseBreakdown pb;
        pb.mode = mode;
        pb.count = a.n;
        const auto n = static_cast<double>(a.n);
        pb.mean_detect = a.detect / n;
        pb.mean_decide = a.decide / n;
        pb.mean_execute = a.execute / n;
        pb.mean_total = a.total / n;
        out.push_back(pb);
    }
    std::sort(out.begin(), out.end(), [](const PhaseBreakdown& a, const PhaseBreakdown& b) {
        return to_string(a.mode) < to_string(b.mode);
    });
    return out;
}

namespace detail {

inline std::string report_num(double x) { return nlohmann::json(x).dump(); }

inline std::ofstream open_report_file(const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    return os;
}

}  // namespace detail

// Writes delta_histogram.csv, mode_summary.csv, rolling_mttr.csv and
// phase_breakdown.csv into out_dir (created if missing).
inline void write_report_files(std::span<const Episode> episodes,
                               const std::filesystem::path& out_dir, int bins = 20,
                               int window = 20) {
    std::filesystem::create_directories(out_dir);

    {
        auto os = detail::open_report_file(out_dir / "delta_histogram.csv");
        os << "bin_lo,bin_hi,count\n";
        for (const HistogramBin& b : delta_histogram(episodes, bins))
            os << detail::report_num(b.lo) << ',' << detail::report_num(b.hi) << ',' << b.count
               << '\n';
    }
    {
        auto os = detail::open_report_file(out_dir / "mode_summary.csv");
        os << "mode,count,min,q1,median,q3,max\n";
        for (const FiveNumberSummary& s : mode_summaries(episodes))
            os << to_string(s.mode) << ',' << s.count << ',' << detail::report_num(s.min) << ','
               << detail::report_num(s.q1) << ',' << detail::report_num(s.median) << ','
               << detail::report_num(s.q3) << ',' << detail::report_num(s.max) << '\n';
    }
    {
        auto os = detail::open_report_file(out_dir / "rolling_mttr.csv");
        os << "window_end_run,mean,median\n";
        for (const RollingPoint& p : rolling_mttr(episodes, window))
            os << p.window_end_run << ',' << detail::report_num(p.mean) << ','
               << detail::report_num(p.median) << '\n';
    }
    {
        auto os = detail::open_report_file(out_dir / "phase_breakdown.csv");
        os << "mode,count,mean_detect,mean_decide,mean_execute,mean_total\n";
        for (const PhaseBreakdown& pb : phase_breakdown(episodes))
            os << to_string(pb.mode) << ',' << pb.count << ',' << detail::report_num(pb.mean_detect)
               << ',' << detail::report_num(pb.mean_decide) << ','
               << detail::report_num(pb.mean_execute) << ',' << detail::report_num(pb.mean_total)
               << '\n';
    }
}

}  // namespace cogrel
