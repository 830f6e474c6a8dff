#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "cogrel/renewal.hpp"

using namespace cogrel;
using Catch::Matchers::WithinAbs;

TEST_CASE("renewal trace with point intervals") {
    RandomSource rng(1);
    SECTION("9 up / 1 down over horizon 100") {
        const auto trace =
            simulate_renewal(Distribution::point(9.0), Distribution::point(1.0), 100.0, rng);
        CHECK(trace.up_durations.size() == 10);
        CHECK(trace.down_durations.size() == 10);
        CHECK(trace.uptime_total == 90.0);
        CHECK(empirical_uptime(trace) == 0.9);
    }
    SECTION("horizon cuts an operating interval") {
        const auto trace =
            simulate_renewal(Distribution::point(9.0), Distribution::point(1.0), 95.0, rng);
        CHECK(trace.uptime_total == 86.0);
        CHECK_THAT(empirical_uptime(trace), WithinAbs(86.0 / 95.0, 1e-15));
    }
    SECTION("zero-length recoveries give full uptime") {
        const auto trace =
            simulate_renewal(Distribution::exponential(5.0), Distribution::point(0.0), 200.0, rng);
        CHECK_THAT(empirical_uptime(trace), WithinAbs(1.0, 1e-12));
    }
    SECTION("streaming walker matches the trace walker draw for draw") {
        RandomSource a(77), b(77);
        const auto trace = simulate_renewal(Distribution::exponential(3.0),
                                            Distribution::exponential(1.0), 500.0, a);
        CHECK(empirical_uptime(Distribution::exponential(3.0), Distribution::exponential(1.0),
                               500.0, b) == empirical_uptime(trace));
    }
    CHECK_THROWS_AS(simulate_renewal(Distribution::point(1.0), Distribution::point(1.0), 0.0, rng),
                    DomainError);
    CHECK_THROWS_AS(simulate_renewal(Distribution::point(-5.0), Distribution::point(1.0), 10.0,
                                     rng),
                    DomainError);
    CHECK_THROWS_AS(simulate_renewal(Distribution::point(0.0), Distribution::point(0.0), 10.0,
                                     rng),
                    InvariantError);
}

TEST_CASE("long-run uptime approaches the analytic ratio") {
    RandomSource rng(4242);
    const double measured = empirical_uptime(Distribution::exponential(6.73),
                                             Distribution::point(6.21), 1e6, rng);
    CHECK_THAT(measured, WithinAbs(steady_state_uptime(1.0 / 6.73, 6.21), 0.005));
    CHECK_THAT(measured, WithinAbs(0.5201, 0.006));
}

TEST_CASE("theorem 1 pinned points") {
    SECTION("a = 0: both sides equal one") {
        const std::vector<std::pair<double, double>> pts = {{0.2, 0.0}};
        const auto rows = check_theorem1(pts, 100.0, 7);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].a == 0.0);
        CHECK(rows[0].pi == 1.0);
        CHECK(rows[0].nrr_value == 1.0);
        CHECK(rows[0].gap == 0.0);
        CHECK_THAT(rows[0].empirical, WithinAbs(1.0, 1e-12));
        CHECK(rows[0].analytic_ok);
        CHECK(rows[0].empirical_ok);
    }
    SECTION("a = 1: pi 0.5 against nrr 0") {
        const std::vector<std::pair<double, double>> pts = {{0.5, 2.0}};
        const auto rows = check_theorem1(pts, 2e4, 7);
        CHECK_THAT(rows[0].pi, WithinAbs(0.5, 1e-15));
        CHECK_THAT(rows[0].nrr_value, WithinAbs(0.0, 1e-15));
        CHECK_THAT(rows[0].gap, WithinAbs(0.5, 1e-15));
        CHECK_THAT(rows[0].empirical, WithinAbs(0.5, 0.01));
        CHECK(rows[0].analytic_ok);
    }
    SECTION("headline regime") {
        const std::vector<std::pair<double, double>> pts = {{1.0 / 6.73, 6.21}};
        const auto rows = check_theorem1(pts, 2e4, 7);
        CHECK_THAT(rows[0].pi, WithinAbs(0.5201, 0.0001));
        CHECK_THAT(rows[0].nrr_value, WithinAbs(0.0773, 0.0001));
        CHECK_THAT(rows[0].gap, WithinAbs(0.4428, 0.0001));
        CHECK(rows[0].analytic_ok);
        CHECK(rows[0].empirical_ok);
    }
    CHECK_THROWS_AS(check_theorem1(std::vector<std::pair<double, double>>{{0.0, 1.0}}, 100.0, 7),
                    DomainError);
    CHECK_THROWS_AS(check_theorem1(std::vector<std::pair<double, double>>{{1.0, 1.0}}, 0.5, 7),
                    DomainError);
}

TEST_CASE("theorem 1 holds across the default grid") {
    const auto grid = default_theorem1_grid();
    REQUIRE(grid.size() == 100);
    const auto rows = check_theorem1(grid, 2e4, 42);
    REQUIRE(rows.size() == 100);
    CHECK(theorem1_passed(rows));
    // the grid reaches into the regime where the linear bound goes
    // negative yet stays below pi
    bool saw_negative_nrr = false;
    for (const auto& r : rows) {
        if (r.nrr_value < 0.0) saw_negative_nrr = true;
        REQUIRE(r.pi >= r.nrr_value);
        REQUIRE(r.gap >= 0.0);
    }
    CHECK(saw_negative_nrr);

    SECTION("deterministic under the same seed") {
        const auto again = check_theorem1(grid, 2e4, 42);
        for (std::size_t i = 0; i < rows.size(); ++i)
            REQUIRE(rows[i].empirical == again[i].empirical);
    }
    SECTION("inverted bound fails every point") {
        const auto flipped = check_theorem1(grid, 100.0, 42, true);
        CHECK_FALSE(theorem1_passed(flipped));
        for (const auto& r : flipped) REQUIRE_FALSE(r.analytic_ok);
    }
}

TEST_CASE("empirical error shrinks with the horizon") {
    // root-n convergence, checked in aggregate over seeds with slack
    const std::vector<std::pair<double, double>> pt = {{0.5, 2.0}};
    double err_short = 0.0, err_long = 0.0;
    for (std::uint64_t s = 0; s < 12; ++s) {
        err_short += std::abs(check_theorem1(pt, 200.0, s)[0].empirical - 0.5);
        err_long += std::abs(check_theorem1(pt, 12800.0, s)[0].empirical - 0.5);
    }
    CHECK(err_long < err_short / 2.5);
}

TEST_CASE("theorem 2 pinned coverage") {
    const auto alphas = default_theorem2_alphas();
    REQUIRE(alphas == std::vector<double>{0.5, 0.8, 0.9, 0.95, 0.99});
    SECTION("point recovery covers everything") {
        const auto rows = check_theorem2(Distribution::point(6.21), 1.0 / 6.73, alphas, 2000, 5);
        for (const auto& r : rows) {
            REQUIRE(r.coverage == 1.0);
            REQUIRE(r.status == "ok");
            REQUIRE(r.analytic_ok);
        }
    }
    SECTION("normal at alpha 0.5 covers about phi(1)") {
        const std::vector<double> a = {0.5};
        const auto rows =
            check_theorem2(Distribution::normal(6.21, 2.14), 1.0 / 6.73, a, 100000, 5);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].k_cov == 1.0);
        CHECK_THAT(rows[0].threshold, WithinAbs(6.21 + 2.14, 1e-12));
        CHECK_THAT(rows[0].coverage, WithinAbs(0.8413, 0.01));
        CHECK(rows[0].status == "ok");
    }
    SECTION("reporting factor sits below the coverage factor") {
        const auto rows =
            check_theorem2(Distribution::normal(6.21, 2.14), 1.0 / 6.73, alphas, 2000, 5);
        for (const auto& r : rows) {
            REQUIRE_THAT(r.k_cov * r.k_report, WithinAbs(1.0, 1e-12));
            if (r.alpha > 0.5) REQUIRE(r.k_report < r.k_cov);
            REQUIRE(r.coverage_at_k_report <= r.coverage);
        }
    }
}

TEST_CASE("theorem 2 holds for every default family") {
    const auto alphas = default_theorem2_alphas();
    for (const auto& dist : default_theorem2_families(6.21, 2.14)) {
        INFO("family " << dist.name);
        const auto rows = check_theorem2(dist, 1.0 / 6.73, alphas, 100000, 42);
        REQUIRE(rows.size() == alphas.size());
        CHECK(theorem2_passed(rows));
        for (const auto& r : rows) {
            REQUIRE(r.coverage >= r.required);
            REQUIRE(r.nrr_alpha_value <= r.nrr_value + 1e-12);
        }
    }
    SECTION("inverted bound fails") {
        const auto rows = check_theorem2(Distribution::normal(6.21, 2.14), 1.0 / 6.73, alphas,
                                         2000, 42, true);
        CHECK_FALSE(theorem2_passed(rows));
    }
    CHECK_THROWS_AS(check_theorem2(Distribution::point(1.0), 0.0, alphas, 10, 1), DomainError);
    CHECK_THROWS_AS(check_theorem2(Distribution::point(1.0), 1.0, std::vector<double>{1.0}, 10, 1),
                    DomainError);
    CHECK_THROWS_AS(check_theorem2(Distribution::point(1.0), 1.0, alphas, 0, 1), DomainError);
}

TEST_CASE("truncated normal carries exact moments") {
    SECTION("heavy truncation at the origin") {
        const auto d = Distribution::truncated_normal(1.0, 2.0);
        RandomSource rng(9);
        double sum = 0.0, sq = 0.0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) {
            const double x = d.sample(rng);
            REQUIRE(x >= 0.0);
            sum += x;
            sq += x * x;
        }
        const double mean = sum / n;
        const double var = sq / n - mean * mean;
        CHECK_THAT(mean, WithinAbs(d.mean_true, 0.02));
        CHECK_THAT(std::sqrt(var), WithinAbs(d.std_true, 0.02));
        // truncation pulls the mean up and tightens the spread
        CHECK(d.mean_true > 1.0);
        CHECK(d.std_true < 2.0);
    }
    SECTION("negligible truncation in the headline regime") {
        const auto d = Distribution::truncated_normal(6.21, 2.14);
        CHECK(d.mean_true > 6.21);
        CHECK(d.mean_true < 6.23);
        CHECK(d.std_true < 2.14);
        CHECK(d.std_true > 2.10);
    }
    SECTION("degenerate scale behaves like a point") {
        const auto d = Distribution::truncated_normal(5.0, 0.0);
        CHECK(d.mean_true == 5.0);
        CHECK(d.std_true == 0.0);
        RandomSource rng(1);
        CHECK(d.sample(rng) == 5.0);
        CHECK_THROWS_AS(Distribution::truncated_normal(-1.0, 0.0), DomainError);
    }
}

TEST_CASE("matched lognormal reproduces the target moments") {
    const auto d = Distribution::lognormal_matched(6.21, 2.14);
    CHECK(d.mean_true == 6.21);
    CHECK(d.std_true == 2.14);
    // analytic identity for the constructed log-space parameters
    CHECK_THAT(std::exp(d.p0 + 0.5 * d.p1 * d.p1), WithinAbs(6.21, 1e-12));
    RandomSource rng(13);
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = d.sample(rng);
        REQUIRE(x > 0.0);
        sum += x;
        sq += x * x;
    }
    const double mean = sum / n;
    CHECK_THAT(mean, WithinAbs(6.21, 0.03));
    CHECK_THAT(std::sqrt(sq / n - mean * mean), WithinAbs(2.14, 0.1));
}

TEST_CASE("distribution factories reject bad parameters") {
    CHECK_THROWS_AS(Distribution::exponential(0.0), DomainError);
    CHECK_THROWS_AS(Distribution::exponential(-1.0), DomainError);
    CHECK_THROWS_AS(Distribution::normal(1.0, -1.0), DomainError);
    CHECK_THROWS_AS(Distribution::truncated_normal(1.0, -1.0), DomainError);
    CHECK_THROWS_AS(Distribution::lognormal_matched(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(Distribution::lognormal_matched(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(Distribution::point(std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("verification csv layout") {
    const std::vector<std::pair<double, double>> pts = {{0.5, 2.0}};
    const auto t1 = check_theorem1(pts, 100.0, 1);
    const auto t2 = check_theorem2(Distribution::point(6.21), 1.0 / 6.73,
                                   std::vector<double>{0.9}, 100, 1);
    std::ostringstream os;
    write_verification_csv(t1, t2, os);
    const std::string csv = os.str();
    CHECK(csv.rfind("check,family,lambda,mu,sigma,alpha,pi,nrr,nrr_alpha,empirical_uptime,"
                    "coverage,pass\n",
                    0) == 0);
    CHECK(csv.find("theorem1,exponential-up/point-down,0.5,2.0,") != std::string::npos);
    CHECK(csv.find("theorem2,point,") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
