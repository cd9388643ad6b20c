#include "levyts/cli.hpp"
#include "levyts/series.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace levyts;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("levyts_cli_" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string data_file(const std::string& name) { return std::string(LEVYTS_TEST_DATA) + "/" + name; }

} // namespace

TEST_CASE("help and usage errors") {
    CHECK(run({"--help"}).code == kExitOk);
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"frobnicate"}).code == kExitUsage);
    CHECK(run({"classify"}).code == kExitUsage);
    CHECK(run({"simulate", "--scenario", "D", "--output-dir", "/tmp"}).code == kExitUsage);
    CHECK(run({"simulate", "--scenario", "A", "--length", "100", "--output-dir", "/tmp"}).code == kExitUsage);
}

TEST_CASE("simulate is deterministic under the seed") {
    TempDir a, b, c;
    const std::vector<std::string> base{"simulate", "--scenario", "C", "--beta", "1.5", "--replicates", "2",
                                        "--length", "800", "--seed", "7", "--output-dir"};
    auto args = base;
    args.push_back(a.path.string());
    REQUIRE(run(args).code == kExitOk);
    args.back() = b.path.string();
    args.insert(args.end(), {"--jobs", "2"});
    REQUIRE(run(args).code == kExitOk);
    for (const auto* f : {"replicate_000.txt", "replicate_001.txt", "manifest.json"})
        CHECK(slurp(a / f) == slurp(b / f));
    CHECK(slurp(a / "replicate_000.txt") != slurp(a / "replicate_001.txt"));

    args = base;
    args[10] = "8";
    args.push_back(c.path.string());
    REQUIRE(run(args).code == kExitOk);
    CHECK(slurp(a / "replicate_000.txt") != slurp(c / "replicate_000.txt"));

    const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
    CHECK(manifest["replicates"].size() == 2);
    CHECK(manifest["replicates"][0]["truth"]["scenario"] == "C");
    const auto ts = read_series_file(a / "replicate_001.txt");
    CHECK(ts.size() == 800);
}

TEST_CASE("oracle check emits one row per kind and length") {
    const auto r = run({"oracle-check"});
    REQUIRE(r.code == kExitOk);
    std::istringstream in(r.out);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 10);
    CHECK(r.out.rfind("kind,L,", 0) == 0);
    TempDir d;
    REQUIRE(run({"oracle-check", "--lengths", "10,20", "--output-dir", d.path.string()}).code == kExitOk);
    CHECK(fs::exists(d / "oracle.csv"));
    CHECK(run({"oracle-check", "--lengths", "10,x"}).code == kExitUsage);
}

TEST_CASE("config files") {
    TempDir d;
    {
        std::ofstream cfg(d / "bad.cfg");
        cfg << "# comment\nbogus = 3\n";
    }
    CHECK(run({"oracle-check", "--config", d / "bad.cfg"}).code == kExitUsage);
    {
        std::ofstream cfg(d / "good.cfg");
        cfg << "lengths = \"10,20,30\"\n";
    }
    auto r = run({"oracle-check", "--config", d / "good.cfg"});
    REQUIRE(r.code == kExitOk);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 10);
    // Command-line flags win over the file.
    r = run({"oracle-check", "--config", d / "good.cfg", "--lengths", "10"});
    REQUIRE(r.code == kExitOk);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 4);
    CHECK(run({"oracle-check", "--config", d / "missing.cfg"}).code == kExitIo);
}

TEST_CASE("unreadable input and unwritable output") {
    CHECK(run({"fit", "--input", "/nonexistent/series.txt"}).code == kExitIo);
    CHECK(run({"classify", "--input", "/nonexistent/series.txt"}).code == kExitIo);
    CHECK(run({"report", "--input", "/nonexistent/report.json"}).code == kExitIo);
    CHECK(run({"simulate", "--scenario", "A", "--output-dir", "/proc/levyts_no_such_dir"}).code == kExitIo);
    TempDir d;
    {
        std::ofstream bad(d / "bad.txt");
        bad << "51544 1.0\n51545 oops\n";
    }
    const auto r = run({"fit", "--input", d / "bad.txt"});
    CHECK(r.code == kExitIo);
    CHECK(r.err.find("line 2") != std::string::npos);
}

TEST_CASE("bundled series parses with its gaps and offset catalogue") {
    const auto ts = read_series_file(data_file("synthetic_station.txt"));
    CHECK(ts.size() == 3605);
    CHECK(ts.gap_count() == 45);
    CHECK(ts.dt() == 1.0);
    const auto off = read_offsets_file(data_file("synthetic_station_offsets.txt"));
    REQUIRE(off.size() == 1);
    CHECK_NOTHROW(off.validate_against(ts));
}

TEST_CASE("fit, classify and report on the bundled series") {
    TempDir d;
    auto r = run({"fit", "--input", data_file("synthetic_station.txt"), "--offsets",
                  data_file("synthetic_station_offsets.txt")});
    REQUIRE(r.code == kExitOk);
    const auto fit = nlohmann::json::parse(r.out);
    CHECK(fit["stochastic"]["a_wh"].get<double>() > 1.0);
    CHECK(fit["stochastic"]["a_wh"].get<double>() < 2.2);

    r = run({"classify", "--input", data_file("synthetic_station.txt"), "--offsets",
             data_file("synthetic_station_offsets.txt"), "--steps", "0,1", "--analysis", "first", "--max-order",
             "1", "--output-dir", d.path.string()});
    REQUIRE(r.code == kExitOk);
    for (const auto* f : {"report.json", "curves.csv", "parameters.csv"}) CHECK(fs::exists(d / f));
    const auto rep = nlohmann::json::parse(slurp(d / "report.json"));
    CHECK(rep["steps"].size() == 2);
    CHECK(rep.contains("levy_class"));
    CHECK(rep["series_meta"]["missing_epochs"] == 45);

    TempDir e;
    r = run({"report", "--input", d / "report.json", "--output-dir", e.path.string()});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.find(rep["levy_class"].get<std::string>()) != std::string::npos);
    CHECK(slurp(e / "curves.csv") == slurp(d / "curves.csv"));
}
