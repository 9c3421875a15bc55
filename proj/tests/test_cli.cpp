#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "dr/graphs.hpp"

using nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(DRENGINE_BIN) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    RunResult r;
    std::array<char, 4096> buf;
    size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
    int status = pclose(p);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string loop_graph_file() {
    dr::StableGraph G;
    G.genus = 1;
    G.vertices = {{0, 0}};
    G.half_edges = {1, 2, 3};
    G.attach = {{1, 0}, {2, 0}, {3, 0}};
    G.involution = {{1, 1}, {2, 3}, {3, 2}};
    G.legs = {1};

    std::filesystem::create_directories(TEST_DATA_DIR);
    std::string path = std::string(TEST_DATA_DIR) + "/loop.json";
    std::ofstream(path) << G.to_json().dump();
    return path;
}

} // namespace

TEST_CASE("cli graphs") {
    auto r = run("graphs --g 1 --n 2");
    CHECK(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["graphs"].size() == 5);
    for (const auto& entry : j["graphs"]) {
        CHECK(entry.contains("graph"));
        CHECK(entry.contains("canonical"));
        CHECK(entry.contains("automorphisms"));
    }
}

TEST_CASE("cli sum and ct") {
    std::string path = loop_graph_file();

    auto s = run("sum --graph " + path + " --A 0 --k 0 --r 5 --Q \"x_2*x_3\"");
    CHECK(s.exit_code == 0);
    json js = json::parse(s.out);
    CHECK(js["value"]["num"] == "4");
    CHECK(js["value"]["den"] == "1");

    auto c = run("ct --graph " + path + " --A 0 --k 0 --Q \"x_2*x_3\"");
    CHECK(c.exit_code == 0);
    json jc = json::parse(c.out);
    CHECK(jc["value"]["num"] == "-1");
    CHECK(jc["value"]["den"] == "6");
    CHECK(jc.contains("certificate"));
    CHECK(jc.contains("r_polynomial"));
}

TEST_CASE("cli dr") {
    auto r = run("dr --g 0 --n 4 --A 1,2,-3,0 --k 0");
    CHECK(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["g"] == 0);
    CHECK(j["n"] == 4);
    REQUIRE(j["terms"].size() == 1);
    CHECK(j["terms"][0]["coeff"]["num"] == "1");
}

TEST_CASE("cli domain errors exit 2") {
    CHECK(run("dr --g 0 --n 4 --A 1,2,3,4 --k 0").exit_code == 2); // bad sum
    CHECK(run("dr --g 0 --n 2 --A 1,-1 --k 0").exit_code == 2);    // unstable
    std::string path = loop_graph_file();
    CHECK(run("sum --graph " + path + " --A 0 --k 0 --r 5 --Q \"x_2*(\"").exit_code == 2);
}

TEST_CASE("cli output is thread-count independent") {
    std::string args = "drpoly --g 1 --n 2 --method recursion";
    auto a = run(args + " --threads 1");
    auto b = run(args + " --threads 8");
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    // and re-readable
    json j = json::parse(a.out);
    CHECK(j.contains("terms"));
}

TEST_CASE("cli --out writes the same JSON") {
    std::filesystem::create_directories(TEST_DATA_DIR);
    std::string path = std::string(TEST_DATA_DIR) + "/g04.json";
    auto r = run("dr --g 0 --n 4 --A 0,0,0,0 --k 0 --out " + path);
    CHECK(r.exit_code == 0);
    std::ifstream in(path);
    REQUIRE(in.good());
    json j = json::parse(in);
    CHECK(j["terms"].size() == 1);
}
