#pragma once

// Monte-Carlo verification of the two reliability bounds:
//   theorem 1: pi = 1/(1 + lambda*mu) >= 1 - lambda*mu = NRR, with
//              gap pi - NRR = a^2/(1+a) for a = lambda*mu;
//   theorem 2: the recovery-time tail bound behind NRR_alpha holds for
//              any finite-variance recovery distribution.

#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cogrel/error.hpp"
#include "cogrel/metrics.hpp"
#include "cogrel/rng.hpp"

namespace cogrel {

enum class DistFamily { point, exponential, normal, truncated_normal, lognormal };

// A sampling distribution together with its exact first two moments,
// so bound checks compare the empirical tail against the true mu and
// sigma rather than estimates.
struct Distribution {
    DistFamily family = DistFamily::point;
    double p0 = 0.0;  // family-specific: value, mean, location, or log-mean
    double p1 = 0.0;  // unused, stddev, scale, or log-stddev
    double mean_true = 0.0;
    double std_true = 0.0;
    std::string name;

    static Distribution point(double value) {
        if (!std::isfinite(value)) throw DomainError("point value must be finite");
        return {DistFamily::point, value, 0.0, value, 0.0, "point"};
    }

    static Distribution exponential(double mean) {
        if (!(mean > 0.0)) throw DomainError("exponential mean must be > 0");
        return {DistFamily::exponential, mean, 0.0, mean, mean, "exponential"};
    }

    static Distribution normal(double mean, double stddev) {
        if (!(stddev >= 0.0)) throw DomainError("normal stddev must be >= 0");
        return {DistFamily::normal, mean, stddev, mean, stddev, "normal"};
    }

    // Redraw-truncated at zero; exact moments via the standard
    // left-truncation formulas.
    static Distribution truncated_normal(double location, double scale) {
        if (!(scale >= 0.0)) throw DomainError("truncated normal scale must be >= 0");
        if (scale == 0.0) {
            if (!(location >= 0.0))
                throw DomainError("degenerate truncated normal needs location >= 0");
            Distribution d = point(location);
            d.family = DistFamily::truncated_normal;
            d.p0 = location;
            d.p1 = 0.0;
            d.name = "truncated_normal";
            return d;
        }
        const double alpha = -location / scale;
        const double phi = std::exp(-0.5 * alpha * alpha) / std::sqrt(2.0 * std::acos(-1.0));
        const double z = 0.5 * std::erfc(alpha / std::sqrt(2.0));  // P(X > alpha), X std normal
        if (!(z > 0.0)) throw DomainError("truncation keeps no mass above zero");
        const double ratio = phi / z;
        const double m = location + scale * ratio;
        const double var = scale * scale * (1.0 + alpha * ratio - ratio * ratio);
        return {DistFamily::truncated_normal, location, scale, m,
                std::sqrt(std::max(var, 0.0)), "truncated_normal"};
    }

    // Log-normal with log-space parameters chosen so the real-space
    // mean and stddev match the targets exactly.
    static Distribution lognormal_matched(double mean, double stddev) {
        if (!(mean > 0.0)) throw DomainError("lognormal mean must be > 0");
        if (!(stddev > 0.0)) throw DomainError("lognormal stddev must be > 0");
        const double cv2 = (stddev / mean) * (stddev / mean);
        const double sigma2 = std::log(1.0 + cv2);
        const double mu_log = std::log(mean) - 0.5 * sigma2;
        return {DistFamily::lognormal, mu_log, std::sqrt(sigma2), mean, stddev, "lognormal"};
    }

    double sample(RandomSource& rng) const {
        switch (family) {
            case DistFamily::point: return p0;
            case DistFamily::exponential: return rng.exponential(p0);
            case DistFamily::normal: return p1 == 0.0 ? p0 : rng.normal(p0, p1);
            case DistFamily::truncated_normal:
                return p1 == 0.0 ? p0 : rng.truncated_normal(p0, p1);
            case DistFamily::lognormal: return rng.lognormal(p0, p1);
        }
        throw DomainError("sample: unknown family");
    }
};

struct RenewalTrace {
    std::vector<double> up_durations;    // as drawn, before horizon truncation
    std::vector<double> down_durations;
    double horizon = 0.0;
    double uptime_total = 0.0;
};

namespace detail {

// Both renewal walkers guard against a process that stops advancing
// (all-zero durations) instead of spinning forever.
constexpr int kMaxZeroAdvance = 1000;

}  // namespace detail

// Alternates operating and recovery intervals from t = 0 (starting
// up); the interval straddling the horizon contributes only its
// portion inside it.
inline RenewalTrace simulate_renewal(const Distribution& up, const Distribution& down,
                                     double horizon, RandomSource& rng) {
    if (!(horizon > 0.0)) throw DomainError("horizon must be > 0");
    RenewalTrace trace;
    trace.horizon = horizon;
    double t = 0.0;
    int zero_streak = 0;
    while (t < horizon) {
        const double u = up.sample(rng);
        if (!(u >= 0.0)) throw DomainError("negative operating duration");
        trace.up_durations.push_back(u);
        trace.uptime_total += std::min(u, horizon - t);
        t += u;
        if (t >= horizon) break;
        const double d = down.sample(rng);
        if (!(d >= 0.0)) throw DomainError("negative recovery duration");
        trace.down_durations.push_back(d);
        t += d;
        zero_streak = (u == 0.0 && d == 0.0) ? zero_streak + 1 : 0;
        if (zero_streak > detail::kMaxZeroAdvance)
            throw InvariantError("renewal process stopped advancing");
    }
    return trace;
}

inline double empirical_uptime(const RenewalTrace& trace) {
    return trace.uptime_total / trace.horizon;
}

// Streaming variant for long horizons; identical draw sequence to
// simulate_renewal.
inline double empirical_uptime(const Distribution& up, const Distribution& down, double horizon,
                               RandomSource& rng) {
    if (!(horizon > 0.0)) throw DomainError("horizon must be > 0");
    double t = 0.0;
    double up_total = 0.0;
    int zero_streak = 0;
    while (t < horizon) {
        const double u = up.sample(rng);
        if (!(u >= 0.0)) throw DomainError("negative operating duration");
        up_total += std::min(u, horizon - t);
        t += u;
        if (t >= horizon) break;
        const double d = down.sample(rng);
        if (!(d >= 0.0)) throw DomainError("negative recovery duration");
        t += d;
        zero_streak = (u == 0.0 && d == 0.0) ? zero_streak + 1 : 0;
        if (zero_streak > detail::kMaxZeroAdvance)
            throw InvariantError("renewal process stopped advancing");
    }
    return up_total / horizon;
}

struct Theorem1Row {
    double lambda = 0.0;
    double mu = 0.0;
    double a = 0.0;          // lambda * mu
    double pi = 0.0;         // 1 / (1 + a)
    double nrr_value = 0.0;  // 1 - a
    double gap = 0.0;        // pi - nrr, equals a^2/(1+a)
    double empirical = 0.0;  // measured uptime fraction
    bool analytic_ok = false;
    bool empirical_ok = false;
};

// (lambda, a) grid spanning light load through past the NRR <= 0
// regime; mu = a / lambda.
inline std::vector<std::pair<double, double>> default_theorem1_grid() {
    std::vector<std::pair<double, double>> pairs;
    for (int i = 0; i < 10; ++i) {
        const double lambda = 0.05 * std::pow(2.0 / 0.05, i / 9.0);
        for (int j = 0; j < 10; ++j) {
            const double a = 2.0 * j / 9.0;
            pairs.emplace_back(lambda, a / lambda);
        }
    }
    return pairs;
}

// Simulates an alternating renewal process (exponential operating
// intervals, fixed-length recoveries) for each (lambda, mu) pair and
// checks pi >= NRR, the gap identity, and agreement between the
// analytic pi and the measured uptime within 1% absolute.
inline std::vector<Theorem1Row> check_theorem1(std::span<const std::pair<double, double>> pairs,
                                               double horizon_cycles, std::uint64_t seed,
                                               bool flip_bound_for_test = false) {
    if (!(horizon_cycles >= 1.0)) throw DomainError("horizon must cover at least one cycle");
    std::vector<Theorem1Row> rows;
    rows.reserve(pairs.size());
    std::uint64_t index = 0;
    for (const auto& [lambda, mu] : pairs) {
        if (!(lambda > 0.0) || !(mu >= 0.0))
            throw DomainError("theorem 1 needs lambda > 0 and mu >= 0");
        Theorem1Row row;
        row.lambda = lambda;
        row.mu = mu;
        row.a = lambda * mu;
        row.pi = steady_state_uptime(lambda, mu);
        row.nrr_value = 1.0 - row.a;
        row.gap = row.pi - row.nrr_value;

        const Distribution up = Distribution::exponential(1.0 / lambda);
        const Distribution down = Distribution::point(mu);
        const double horizon = horizon_cycles * (1.0 / lambda + mu);
        RandomSource rng(derive_seed(seed, index++, 0, 6));
        row.empirical = empirical_uptime(up, down, horizon, rng);

        const double gap_expected = row.a * row.a / (1.0 + row.a);
        const bool ordered = flip_bound_for_test ? row.pi < row.nrr_value - 1e-12
                                                 : row.pi >= row.nrr_value - 1e-12;
        row.analytic_ok = ordered && std::abs(row.gap - gap_expected) <= 1e-9;
        row.empirical_ok = std::abs(row.empirical - row.pi) <= 0.01;
        rows.push_back(row);
    }
    return rows;
}

struct Theorem2Row {
    std::string family;
    double lambda = 0.0;
    double mu = 0.0;     // true mean of the recovery distribution
    double sigma = 0.0;  // true stddev
    double alpha = 0.0;
    double k_cov = 0.0;      // sqrt(alpha/(1-alpha)); tail factor with coverage >= alpha
    double threshold = 0.0;  // mu + k_cov * sigma
    double coverage = 0.0;   // empirical P(recovery <= threshold)
    double required = 0.0;   // alpha minus three binomial sigmas
    std::string status;      // ok | marginal | violation
    double nrr_value = 0.0;
    double nrr_alpha_value = 0.0;
    bool analytic_ok = false;       // nrr_alpha <= nrr
    double k_report = 0.0;          // sqrt((1-alpha)/alpha), the reporting factor
    double coverage_at_k_report = 0.0;
};

inline std::vector<double> default_theorem2_alphas() { return {0.5, 0.8, 0.9, 0.95, 0.99}; }

// Recovery-time families used by the bound check; each carries its
// exact moments.
inline std::vector<Distribution> default_theorem2_families(double mu, double sigma) {
    return {
        Distribution::point(mu),
        Distribution::normal(mu, sigma),
        Distribution::lognormal_matched(mu, sigma),
        Distribution::exponential(mu),
    };
}

// For each alpha, draws n_trials recovery times and checks that the
// one-sided band mu + k*sigma with k = sqrt(alpha/(1-alpha)) covers at
// least an alpha fraction, up to binomial noise (three sigmas below
// alpha counts as marginal, further as violation). Also records the
// empirical coverage at the reporting factor k = sqrt((1-alpha)/alpha)
// and checks the ordering NRR_alpha <= NRR.
inline std::vector<Theorem2Row> check_theorem2(const Distribution& dist, double lambda,
                                               std::span<const double> alphas,
                                               std::int64_t n_trials, std::uint64_t seed,
                                               bool flip_bound_for_test = false) {
    if (!(lambda > 0.0)) throw DomainError("lambda must be > 0");
    if (n_trials < 1) throw DomainError("n_trials must be >= 1");
    std::vector<Theorem2Row> rows;
    rows.reserve(alphas.size());
    std::uint64_t index = 0;
    for (double alpha : alphas) {
        if (!(alpha > 0.0) || !(alpha < 1.0)) throw DomainError("alpha must be in (0, 1)");
        Theorem2Row row;
        row.family = dist.name;
        row.lambda = lambda;
        row.mu = dist.mean_true;
        row.sigma = dist.std_true;
        row.alpha = alpha;
        row.k_cov = std::sqrt(alpha / (1.0 - alpha));
        row.k_report = k_alpha(alpha);
        row.threshold = row.mu + row.k_cov * row.sigma;
        const double report_threshold = row.mu + row.k_report * row.sigma;

        RandomSource rng(derive_seed(seed, index++, 1, 7));
        std::int64_t covered = 0;
        std::int64_t covered_report = 0;
        for (std::int64_t i = 0; i < n_trials; ++i) {
            const double x = dist.sample(rng);
            if (x <= row.threshold + 1e-12) covered += 1;
            if (x <= report_threshold + 1e-12) covered_report += 1;
        }
        row.coverage = static_cast<double>(covered) / static_cast<double>(n_trials);
        row.coverage_at_k_report =
            static_cast<double>(covered_report) / static_cast<double>(n_trials);
        row.required =
            alpha - 3.0 * std::sqrt(alpha * (1.0 - alpha) / static_cast<double>(n_trials));
        if (row.coverage >= alpha)
            row.status = "ok";
        else if (row.coverage >= row.required)
            row.status = "marginal";
        else
            row.status = "violation";

        row.nrr_value = 1.0 - lambda * row.mu;
        row.nrr_alpha_value = nrr_alpha(row.mu, row.sigma, lambda, alpha);
        row.analytic_ok = flip_bound_for_test
                              ? row.nrr_alpha_value > row.nrr_value + 1e-12
                              : row.nrr_alpha_value <= row.nrr_value + 1e-12;
        rows.push_back(row);
    }
    return rows;
}

inline bool theorem1_passed(std::span<const Theorem1Row> rows) {
    for (const auto& r : rows)
        if (!r.analytic_ok || !r.empirical_ok) return false;
    return !rows.empty();
}

inline bool theorem2_passed(std::span<const Theorem2Row> rows) {
    for (const auto& r : rows)
        if (!r.analytic_ok || r.status == "violation") return false;
    return !rows.empty();
}

// One combined table, blank cells where a column does not apply.
inline void write_verification_csv(std::span<const Theorem1Row> t1,
                                   std::span<const Theorem2Row> t2, std::ostream& os) {
    auto num = [](double x) { return nlohmann::json(x).dump(); };
    os << "check,family,lambda,mu,sigma,alpha,pi,nrr,nrr_alpha,empirical_uptime,coverage,pass\n";
    for (const auto& r : t1) {
        os << "theorem1,exponential-up/point-down," << num(r.lambda) << ',' << num(r.mu)
           << ",,," << num(r.pi) << ',' << num(r.nrr_value) << ",," << num(r.empirical) << ",,"
           << ((r.analytic_ok && r.empirical_ok) ? "true" : "false") << '\n';
    }
    for (const auto& r : t2) {
        os << "theorem2," << r.family << ',' << num(r.lambda) << ',' << num(r.mu) << ','
           << num(r.sigma) << ',' << num(r.alpha) << ",," << num(r.nrr_value) << ','
           << num(r.nrr_alpha_value) << ",," << num(r.coverage) << ','
           << ((r.analytic_ok && r.status != "violation") ? "true" : "false") << '\n';
    }
}

}  // namespace cogrel
