#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using degennes::cli::run;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "degennes");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Result r;
    r.code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "degennes_test_cli";
    fs::create_directories(dir);
    return dir / name;
}

std::vector<std::vector<std::string>> data_rows(const std::string& csv) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);   // header
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::string summary_value(const std::string& csv, const std::string& key) {
    const std::string tag = "# " + key + ",";
    const auto pos = csv.find(tag);
    if (pos == std::string::npos) return {};
    const auto end = csv.find('\n', pos);
    return csv.substr(pos + tag.size(), end - pos - tag.size());
}

}  // namespace

TEST_CASE("band grid and symmetry row") {
    const fs::path path = scratch("band.csv");
    const Result r = invoke({"band", "--from", "-2", "--to", "4", "--step", "0.05", "--k", "3", "--out", path.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    const std::string csv = slurp(path);
    CHECK(csv.rfind("xi,mu_1,mu_2,mu_3,gap_1,gap_2\n", 0) == 0);
    const auto rows = data_rows(csv);
    CHECK(rows.size() == 121);
    bool seen_zero = false;
    const double r0 = std::stod(summary_value(csv, "r0"));
    for (const auto& row : rows) {
        if (std::stod(row[0]) == 0.0) {
            seen_zero = true;
            CHECK(std::abs(std::stod(row[1]) - 1.0) <= 1e-6);
        }
        CHECK(std::stod(row[4]) >= 4.0 * r0);
    }
    CHECK(seen_zero);
    CHECK(std::stod(summary_value(csv, "theta0")) == doctest::Approx(0.590106125).epsilon(1e-8));
}

TEST_CASE("theta0 fields") {
    const Result r = invoke({"theta0", "--stdout"});
    REQUIRE(r.code == 0);
    const auto rows = data_rows(r.out);
    std::map<std::string, double> v;
    for (const auto& row : rows) v[row[0]] = std::stod(row[1]);
    CHECK(v.at("theta0") == doctest::Approx(0.5901).epsilon(1e-4));
    CHECK(v.at("feynman_hellmann_residual") <= 1e-5);
    CHECK(v.at("scheme_agreement") <= 1e-6);
}

TEST_CASE("extend on a small strip") {
    const Result r = invoke({"extend", "--re-from", "0", "--re-to", "1", "--eps", "0.1", "--stdout"});
    REQUIRE(r.code == 0);
    const auto rows = data_rows(r.out);
    CHECK(rows.size() == 11 * 5);
    std::map<std::pair<std::string, std::string>, std::pair<double, double>> F;
    for (const auto& row : rows) {
        CHECK(row.back() == "ok");
        F[{row[0], row[1]}] = {std::stod(row[2]), std::stod(row[3])};
        if (std::stod(row[1]) == 0.0) CHECK(std::abs(std::stod(row[3])) <= 1e-8);
    }
    for (const auto& [key, value] : F) {
        const double im = std::stod(key.second);
        if (im <= 0.0) continue;
        bool found = false;
        for (const auto& [k2, v2] : F) {
            if (k2.first == key.first && std::abs(std::stod(k2.second) + im) < 1e-12) {
                // The printed digits bound the comparison; conj symmetry itself is tested in the library suite.
                CHECK(std::abs(v2.first - value.first) <= 1e-10);
                CHECK(std::abs(v2.second + value.second) <= 1e-10);
                found = true;
            }
        }
        CHECK(found);
    }
    CHECK(std::stod(summary_value(r.out, "worst_slack")) >= -1e-8);
    CHECK(std::stod(summary_value(r.out, "certified_eps")) == doctest::Approx(0.1));
}

TEST_CASE("extend failure gives exit 3 with per-row status") {
    const Result r = invoke({"extend", "--re-from", "-2", "--re-to", "4", "--re-step", "1", "--contour", "global", "--stdout"});
    CHECK(r.code == 3);
    CHECK(r.out.find("rank_failure") != std::string::npos);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("json output keeps numbers as strings") {
    const Result r = invoke({"band", "--from", "0", "--to", "1", "--step", "0.5", "--k", "2", "--format", "json",
                             "--stdout"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["command"] == "band");
    CHECK(doc["metadata"]["scheme"] == "colloc");
    CHECK(doc["metadata"]["n_points"] == "64");
    CHECK(doc["rows"].size() == 3);
    CHECK(doc["rows"][0]["mu_1"].is_string());
    CHECK(doc["rows"][0]["xi"] == "0.000000000000e+00");
    CHECK(doc["summary"]["r0"].is_string());
}

TEST_CASE("usage errors exit 2") {
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"band", "--scheme", "spectral"}).code == 2);
    CHECK(invoke({"band", "--k", "0", "--stdout"}).code == 2);
    CHECK(invoke({"band", "--from", "1", "--to", "0", "--stdout"}).code == 2);
    CHECK(invoke({"band", "--n-points", "4", "--stdout"}).code == 2);
    CHECK(invoke({"extend", "--eps", "0.5", "--stdout"}).code == 2);
    CHECK(invoke({"extend", "--contour-nodes", "7", "--stdout"}).code == 2);
    CHECK(invoke({"extend", "--scheme", "fd", "--n-points", "8000", "--stdout"}).code == 2);
    CHECK(invoke({"montgomery", "--n", "0", "--stdout"}).code == 2);
    CHECK(invoke({"asymptotics", "--side", "minus", "--values", "1,2", "--stdout"}).code == 2);
    const Result r = invoke({"band", "--k", "0", "--stdout"});
    CHECK(r.out.empty());
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("numerical failure exits 1") {
    const Result r = invoke({"theta0", "--lo", "1", "--hi", "2", "--stdout"});
    CHECK(r.code == 1);
    CHECK(r.out.empty());
}

TEST_CASE("help exits 0") { CHECK(invoke({"--help"}).code == 0); }

TEST_CASE("config file with flag precedence") {
    const fs::path cfg = scratch("run.ini");
    {
        std::ofstream f(cfg);
        f << "[band]\nfrom = 0\nto = 1\nstep = 0.25\nk = 2\n";
    }
    const Result a = invoke({"band", "--config", cfg.string(), "--stdout"});
    REQUIRE(a.code == 0);
    CHECK(data_rows(a.out).size() == 5);
    const Result b = invoke({"band", "--config", cfg.string(), "--step", "0.5", "--stdout"});
    REQUIRE(b.code == 0);
    CHECK(data_rows(b.out).size() == 3);
}

TEST_CASE("asymptotics and montgomery") {
    const Result plus = invoke({"asymptotics", "--side", "plus", "--k", "1", "--stdout"});
    CHECK(plus.code == 0);
    CHECK(data_rows(plus.out).size() == 4);
    CHECK(summary_value(plus.out, "monotone") == "true");
    const Result minus = invoke({"asymptotics", "--side", "minus", "--stdout"});
    CHECK(minus.code == 0);
    CHECK(data_rows(minus.out).size() == 3);

    const Result m = invoke({"montgomery", "--n", "1", "--im", "0.1", "--stdout"});
    CHECK(m.code == 0);
    const auto rows = data_rows(m.out);
    CHECK(rows.size() == 9);
    for (const auto& row : rows) {
        CHECK(std::stod(row[1]) > 0.0);
        CHECK(row.back() == "ok");
    }
}

TEST_CASE("output is written to the requested file only") {
    const fs::path a = scratch("a.csv");
    const fs::path b = scratch("b.csv");
    const Result ra = invoke({"extend", "--re-from", "0.5", "--re-to", "0.7", "--eps", "0.05", "--out", a.string()});
    const Result rb = invoke({"extend", "--re-from", "0.5", "--re-to", "0.7", "--eps", "0.05", "--out", b.string()});
    REQUIRE(ra.code == 0);
    REQUIRE(rb.code == 0);
    CHECK(ra.out.empty());
    CHECK(slurp(a) == slurp(b));
    CHECK_FALSE(slurp(a).empty());
}
