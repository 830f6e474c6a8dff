#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cogrel/metrics.hpp"
#include "cogrel/telemetry.hpp"

namespace fs = std::filesystem;
using Catch::Matchers::WithinAbs;

namespace {

struct CliResult {
    int code = -1;
    std::string out;  // stdout and stderr combined
};

const fs::path& work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("cogrel_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path capture = work_dir() / ("out_" + std::to_string(counter++) + ".txt");
    const std::string cmd =
        std::string(COGREL_CLI_PATH) + " " + args + " > " + capture.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.code = (status != -1 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    r.out = slurp(capture);
    return r;
}

std::string path_of(const std::string& name) { return (work_dir() / name).string(); }

}  // namespace

TEST_CASE("help exits zero") {
    CHECK(run_cli("--help").code == 0);
    const auto sim = run_cli("simulate --help");
    CHECK(sim.code == 0);
    CHECK(sim.out.find("--tau-drift") != std::string::npos);
}

TEST_CASE("usage errors exit two") {
    CHECK(run_cli("").code == 2);
    CHECK(run_cli("frobnicate").code == 2);
    CHECK(run_cli("simulate --no-such-flag").code == 2);
    CHECK(run_cli("metrics").code == 2);
    CHECK(run_cli("metrics --in x --format yaml").code == 2);
    CHECK(run_cli("simulate --runs 0").code == 2);
    CHECK(run_cli("simulate --tau-drift 1.5").code == 2);
    CHECK(run_cli("simulate --runs 2 --drift-replan-weight 1.5").code == 2);
}

TEST_CASE("runtime failures exit one") {
    CHECK(run_cli("metrics --in " + path_of("missing.jsonl")).code == 1);

    std::ofstream(work_dir() / "garbage.jsonl") << "{\"run_id\": oops\n";
    const auto r = run_cli("metrics --in " + path_of("garbage.jsonl"));
    CHECK(r.code == 1);
    CHECK(r.out.find("line 1") != std::string::npos);
}

TEST_CASE("simulate writes decodable telemetry") {
    const std::string tele = path_of("small.jsonl");
    const auto r = run_cli("simulate --runs 8 --seed 3 --out " + tele);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("wrote " + tele) != std::string::npos);
    CHECK(r.out.find("episodes: 8") != std::string::npos);

    const auto events = cogrel::read_telemetry_file(tele);
    REQUIRE(events.size() == 32);  // one staged quartet per episode
    const auto extraction = cogrel::episodes_from_events(events);
    CHECK(extraction.episodes.size() == 8);
    CHECK(extraction.incomplete == 0);
}

TEST_CASE("metrics output closes the loop with the library") {
    const std::string tele = path_of("loop.jsonl");
    REQUIRE(run_cli("simulate --runs 12 --seed 5 --out " + tele).code == 0);

    const std::string mj = path_of("metrics.json");
    REQUIRE(run_cli("metrics --in " + tele + " --format json --out " + mj).code == 0);

    // recompute in-process from the same telemetry
    const auto events = cogrel::read_telemetry_file(tele);
    const auto extraction = cogrel::episodes_from_events(events);
    auto report = cogrel::build_report(extraction.episodes, 0.0, 0.9, true,
                                       extraction.agents_seen);
    report.incomplete_episodes = static_cast<std::int64_t>(extraction.incomplete);
    CHECK(slurp(mj) == cogrel::to_json(report).dump(2) + "\n");

    SECTION("csv carries the same numbers textually") {
        const std::string mc = path_of("metrics.csv");
        REQUIRE(run_cli("metrics --in " + tele + " --format csv --out " + mc).code == 0);
        const std::string csv = slurp(mc);
        const auto j = cogrel::to_json(report);
        for (const std::string key : {"mttr_sys", "medttr_sys", "mtbf_sys", "nrr_sys", "nrr_med",
                                      "nrr_alpha"}) {
            const std::string row = key + "," + j["system"][key].dump() + "\n";
            INFO("row " << row);
            REQUIRE(csv.find(row) != std::string::npos);
        }
    }

    SECTION("alpha flag reaches the tail factor") {
        const std::string ma = path_of("metrics_a.json");
        REQUIRE(run_cli("metrics --alpha 0.5 --in " + tele + " --out " + ma).code == 0);
        const auto j = nlohmann::json::parse(slurp(ma));
        CHECK(j["system"]["alpha"].get<double>() == 0.5);
        CHECK(j["system"]["k_alpha"].get<double>() == 1.0);
    }
}

TEST_CASE("simulate is deterministic and thread-count invariant") {
    const std::string a = path_of("det_a.jsonl");
    const std::string b = path_of("det_b.jsonl");
    const std::string c = path_of("det_c.jsonl");
    REQUIRE(run_cli("simulate --runs 20 --seed 11 --agents 2 --out " + a).code == 0);
    REQUIRE(run_cli("simulate --runs 20 --seed 11 --agents 2 --out " + b).code == 0);
    REQUIRE(run_cli("simulate --runs 20 --seed 11 --agents 2 --jobs 4 --out " + c).code == 0);
    const std::string base = slurp(a);
    CHECK(base == slurp(b));
    CHECK(base == slurp(c));
    REQUIRE(run_cli("simulate --runs 20 --seed 12 --agents 2 --out " + b).code == 0);
    CHECK(base != slurp(b));
}

TEST_CASE("boundary drift sweep classifies every fault as drift") {
    const std::string tele = path_of("drift_all.jsonl");
    REQUIRE(run_cli("simulate --runs 10 --seed 2 --tau-drift 1.0 --perturbation-prob 0 --out " +
                    tele)
                .code == 0);
    const auto events = cogrel::read_telemetry_file(tele);
    const auto extraction = cogrel::episodes_from_events(events);
    REQUIRE(extraction.episodes.size() == 10);
    for (const auto& ep : extraction.episodes) {
        REQUIRE(ep.trigger == cogrel::TriggerKind::drift_observed);
        REQUIRE((ep.mode == cogrel::ReflexMode::auto_replan ||
                 ep.mode == cogrel::ReflexMode::rollback));
    }
}

TEST_CASE("profile overrides flow through the pipeline") {
    std::ofstream(work_dir() / "profiles.txt")
        << "auto-replan median=3.0 std=0.05\n"
        << "rollback median=3.0 std=0.05\n"
        << "tool-retry median=3.0 std=0.05\n"
        << "human-approve median=3.0 std=0.05\n";
    const std::string tele = path_of("profiled.jsonl");
    REQUIRE(run_cli("simulate --runs 25 --seed 6 --profiles " + path_of("profiles.txt") +
                    " --out " + tele)
                .code == 0);
    const std::string mj = path_of("profiled.json");
    REQUIRE(run_cli("metrics --in " + tele + " --out " + mj).code == 0);
    const auto j = nlohmann::json::parse(slurp(mj));
    CHECK_THAT(j["system"]["medttr_sys"].get<double>(), WithinAbs(3.0, 0.15));
}

TEST_CASE("verify-bounds verdict drives the exit code") {
    const std::string csv_path = path_of("bounds.csv");
    const auto pass = run_cli("verify-bounds --cycles 20000 --trials 2000 --seed 42 --out " +
                              csv_path);
    REQUIRE(pass.code == 0);
    CHECK(pass.out.find("theorem1: 100/100 points ok") != std::string::npos);
    CHECK(pass.out.find("verdict: PASS") != std::string::npos);

    const std::string csv = slurp(csv_path);
    CHECK(csv.rfind("check,family,", 0) == 0);
    // header + 100 grid points + 4 families x 5 alphas
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 100 + 20);

    const auto fail = run_cli("verify-bounds --cycles 300 --trials 2000 --inject-bound-bug");
    CHECK(fail.code == 1);
    CHECK(fail.out.find("verdict: FAIL") != std::string::npos);
}

TEST_CASE("report writes the four analysis tables") {
    const std::string tele = path_of("report_in.jsonl");
    REQUIRE(run_cli("simulate --runs 60 --seed 9 --out " + tele).code == 0);
    const std::string dir = path_of("report_dir");
    REQUIRE(run_cli("report --in " + tele + " --out-dir " + dir + " --window 10").code == 0);

    for (const std::string name : {"delta_histogram.csv", "mode_summary.csv", "rolling_mttr.csv",
                                   "phase_breakdown.csv"}) {
        INFO("file " << name);
        REQUIRE(fs::exists(fs::path(dir) / name));
    }

    // full windows only: 60 runs, window 10 -> 51 rows plus header
    const std::string rolling = slurp(fs::path(dir) / "rolling_mttr.csv");
    CHECK(std::count(rolling.begin(), rolling.end(), '\n') == 52);

    // the human gate is the slowest path by construction
    const std::string modes = slurp(fs::path(dir) / "mode_summary.csv");
    double med_human = -1.0, med_replan = -1.0;
    std::istringstream is(modes);
    std::string line;
    std::getline(is, line);  // header: mode,count,min,q1,median,q3,max
    while (std::getline(is, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        REQUIRE(cells.size() == 7);
        if (cells[0] == "human-approve") med_human = std::stod(cells[4]);
        if (cells[0] == "auto-replan") med_replan = std::stod(cells[4]);
    }
    REQUIRE(med_human > 0.0);
    REQUIRE(med_replan > 0.0);
    CHECK(med_human > med_replan);
}
