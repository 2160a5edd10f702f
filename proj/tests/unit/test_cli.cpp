#include <doctest.h>

#include "config.hpp"
#include "experiments.hpp"
#include "output.hpp"

#include "kldwave/errors.hpp"

#include <clocale>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace kldwave;
using namespace kldwave::cli;

namespace {

std::filesystem::path scratch(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / ("kldwave_cli_test_" + name);
    std::filesystem::remove_all(p);
    return p;
}

int invoke(Invocation inv, std::string* log_text = nullptr) {
    std::ostringstream log, err;
    const int code = run(inv, log, err);
    if (log_text) *log_text = log.str() + err.str();
    return code;
}

}  // namespace

TEST_CASE("defaults exist for every command") {
    for (std::string_view c : kCommands) {
        const Json j = default_config(c);
        CHECK(j.contains("seed"));
        CHECK(j.contains("out"));
        CHECK(j.contains("parallel"));
    }
    CHECK_THROWS_AS(default_config("nope"), ConfigError);
}

TEST_CASE("merging and --set") {
    Json c = default_config("optimize");
    apply_set(c, "generator.n_tx=6");
    apply_set(c, "algorithm=fp");
    apply_set(c, "solver.epsilon=1e-9");
    apply_set(c, "generator.snr_db=3");
    CHECK(c["generator"]["n_tx"] == 6);
    CHECK(c["algorithm"] == "fp");
    CHECK(c["solver"]["epsilon"].get<double>() == 1e-9);
    CHECK(c["generator"]["snr_db"].is_number_float());
    CHECK_THROWS_AS(apply_set(c, "generator.bogus=1"), ConfigError);
    CHECK_THROWS_AS(apply_set(c, "generator.n_tx=2.5"), ConfigError);
    CHECK_THROWS_AS(apply_set(c, "generator.n_tx=abc"), ConfigError);
    CHECK_THROWS_AS(apply_set(c, "noequals"), ConfigError);
    CHECK_THROWS_AS(merge_config(c, Json{{"solver", {{"max_iters", "x"}}}}), ConfigError);
}

TEST_CASE("typed accessors validate domains") {
    const Json j = Json{{"n", -1}, {"s", "x"}, {"a", Json::array({1, "b"})}};
    CHECK_THROWS_AS(get_int(j, "n", 0), ConfigError);
    CHECK_THROWS_AS(get_number(j, "s"), ConfigError);
    CHECK_THROWS_AS(get_numbers(j, "a"), ConfigError);
    CHECK_THROWS_AS(get_bool(j, "missing"), ConfigError);
    Json s = default_config("optimize")["solver"];
    s["epsilon"] = 0.0;
    CHECK_THROWS_AS(solver_from(s, 0), ConfigError);
}

TEST_CASE("CSV numbers ignore the locale and round-trip") {
    std::setlocale(LC_ALL, "de_DE.UTF-8");
    CHECK(csv_number(0.5) == "0.5");
    const double x = 0.1 + 0.2;
    CHECK(std::stod(csv_number(x)) == x);
    CHECK(csv_number(std::nan("")) == "nan");
    std::setlocale(LC_ALL, "C");
    CsvTable t({"a", "t"}, {"t"});
    t.add_row({"1", "0.25"});
    CHECK(t.text() == "a,t\n1,0.25\n");
    CHECK(t.reproducible_text() == "a,t\n1,\n");
    CHECK_THROWS(t.add_row({"1"}));
}

TEST_CASE("SHA-256 test vector") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("optimize writes its files and reproduces from the manifest") {
    const auto dir = scratch("optimize");
    Invocation inv;
    inv.command = "optimize";
    inv.out = (dir / "a").string();
    inv.sets = {"generator.n_tx=3", "generator.snapshots=6"};
    REQUIRE(invoke(inv) == kExitOk);
    for (const char* f : {"trace.csv", "waveform.json", "manifest.json"}) CHECK(std::filesystem::exists(dir / "a" / f));
    std::ifstream trace(dir / "a" / "trace.csv");
    std::string header;
    std::getline(trace, header);
    CHECK(header == "iter,objective,elapsed_s,mu_or_gamma");

    Invocation again;
    again.command = "optimize";
    again.config_path = (dir / "a" / "manifest.json").string();
    again.out = (dir / "b").string();
    REQUIRE(invoke(again) == kExitOk);
    const Json ma = read_json_file(dir / "a" / "manifest.json");
    const Json mb = read_json_file(dir / "b" / "manifest.json");
    CHECK(ma["config"]["generator"] == mb["config"]["generator"]);
    for (std::size_t i = 0; i < ma["files"].size(); ++i) {
        CHECK(ma["files"][i]["reproducible_sha256"] == mb["files"][i]["reproducible_sha256"]);
    }
    CHECK(ma["files"][1]["sha256"] == mb["files"][1]["sha256"]);

    // amm and mm from the same seed agree.
    Invocation mm = inv;
    mm.out = (dir / "c").string();
    mm.sets.push_back("algorithm=mm");
    REQUIRE(invoke(mm) == kExitOk);
    const double a = ma["result"]["kld"], c = read_json_file(dir / "c" / "manifest.json")["result"]["kld"];
    CHECK(std::abs(a - c) <= 1e-3 * std::abs(a));
    std::filesystem::remove_all(dir);
}

TEST_CASE("config errors exit with 2") {
    const auto dir = scratch("errors");
    Invocation inv;
    inv.command = "optimize";
    inv.out = dir.string();
    inv.sets = {"bogus=1"};
    CHECK(invoke(inv) == kExitConfig);
    inv.sets = {"algorithm=newton"};
    CHECK(invoke(inv) == kExitConfig);
    inv.sets = {"generator.n_tx=0"};
    CHECK(invoke(inv) == kExitConfig);
    inv.sets = {};
    inv.config_path = (dir / "missing.json").string();
    CHECK(invoke(inv) == kExitConfig);
    std::filesystem::remove_all(dir);
}

TEST_CASE("benchmark honors repetitions") {
    const auto dir = scratch("benchmark");
    Invocation inv;
    inv.command = "benchmark";
    inv.out = dir.string();
    inv.sets = {R"(sizes=[{"n_tx":2,"n_rx":2,"snapshots":4}])", "repetitions=4", R"(algorithms=["fp","mm"])"};
    REQUIRE(invoke(inv) == kExitOk);
    std::ifstream f(dir / "benchmark.csv");
    std::string line;
    int rows = -1;
    while (std::getline(f, line)) ++rows;
    CHECK(rows == 8);
    inv.sets.push_back("repetitions=2");
    CHECK(invoke(inv) == kExitConfig);
    std::filesystem::remove_all(dir);
}

TEST_CASE("pareto and random-access write their tables") {
    const auto dir = scratch("experiments");
    Invocation p;
    p.command = "pareto";
    p.out = (dir / "p").string();
    p.sets = {"rho_points=3", "generator.n_tx=2", "generator.snapshots=4", "comm.n_c=2", "detection.alpha=0.01",
              "detection.n_cal=10000", "detection.n_mc=500"};
    REQUIRE(invoke(p) == kExitOk);
    const Json pm = read_json_file(dir / "p" / "manifest.json");
    CHECK(pm["files"][0]["name"] == "pareto.csv");

    Invocation r;
    r.command = "random-access";
    r.out = (dir / "r").string();
    r.sets = {"generator.n_devices=2",   "generator.n_tx=2",   "generator.n_rx=2", "generator.snapshots=4",
              "t_grid=[4]",               "detection.alpha=0.01", "detection.n_cal=10000",
              "detection.n_mc=500"};
    REQUIRE(invoke(r) == kExitOk);
    std::ifstream snr(dir / "r" / "ra_snr.csv");
    std::string header;
    std::getline(snr, header);
    CHECK(header == "design,snr_db,p_d_1,p_d_2,geometric_mean,ci_low,ci_high");
    CHECK(std::filesystem::exists(dir / "r" / "ra_length.csv"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("validate surfaces scenario errors and runs selected checks") {
    const auto dir = scratch("validate");
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "bad.json") << R"({"n_tx": 2})";
    Invocation v;
    v.command = "validate";
    v.out = (dir / "o").string();
    v.sets = {"scenario_file=" + (dir / "bad.json").string()};
    CHECK(invoke(v) == kExitConfig);
    v.sets = {R"(checks=["stem_exactness"])"};
    v.seed = 5;
    std::string log;
    CHECK(invoke(v, &log) == kExitOk);
    CHECK(log.find("PASS stem_exactness") != std::string::npos);
    CHECK(read_json_file(dir / "o" / "manifest.json")["seed"] == 5);
    v.sets = {R"(checks=["nope"])"};
    CHECK(invoke(v) == kExitConfig);
    std::filesystem::remove_all(dir);
}
