#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <unistd.h>

namespace {

std::string binary_path() {
    const char* path = std::getenv("CYCLOBAR_BIN");
    REQUIRE(path != nullptr);
    return path;
}

struct RunResult {
    int status = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = binary_path() + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    int rc = pclose(pipe);
    r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return r;
}

}  // namespace

TEST_CASE("exit statuses: 0 success, 1 usage, 2 budget") {
    CHECK(run("witt --decompose -p 2 -r 3").status == 0);
    CHECK(run("witt --decompose").status == 1);
    CHECK(run("witt --decompose -p 2 -r 3 --format yaml").status == 1);
    CHECK(run("bogus-subcommand").status == 1);
    CHECK(run("homology -m 99").status == 2);
}

TEST_CASE("output is byte-stable across runs") {
    for (std::string args : {std::string("ktable -p 2 -r 5"), std::string("witt --decompose -p 3 -r 9 --format csv"),
                             std::string("verify ss --quick -p 2 --format csv")}) {
        auto a = run(args);
        auto b = run(args);
        CHECK(a.status == 0);
        CHECK(a.out == b.out);
        CHECK(!a.out.empty());
    }
}

TEST_CASE("ktable json matches the documented schema") {
    auto r = run("ktable -p 2 -r 3");
    REQUIRE(r.status == 0);
    auto doc = nlohmann::json::parse(r.out);
    REQUIRE(doc.is_array());
    // odd rows carry entries; the degree-7 row is W_3(F_2) = Z/4 x Z/2
    bool found7 = false;
    for (const auto& row : doc) {
        REQUIRE(row.contains("prime"));
        REQUIRE(row.contains("degree"));
        REQUIRE(row.contains("entries"));
        REQUIRE(row.contains("group"));
        REQUIRE(row.contains("order"));
        CHECK(row["prime"] == 2);
        if (row["degree"] == 7) {
            found7 = true;
            CHECK(row["order"] == "8");
            REQUIRE(row["entries"].size() == 2);
            CHECK(row["entries"][0]["mprime"] == 1);
            CHECK(row["entries"][0]["s"] == 2);
            CHECK(row["entries"][1]["mprime"] == 3);
            CHECK(row["entries"][1]["s"] == 1);
            CHECK(row["group"] == nlohmann::json::array({"2", "4"}));
        }
        if (row["degree"].get<long long>() % 2 == 0) CHECK(row["order"] == "1");
    }
    CHECK(found7);
}

TEST_CASE("ghost and homology commands emit the documented values") {
    auto ghost = run("witt --ghost -S 1,2 --input 3,1 --format csv");
    CHECK(ghost.status == 0);
    CHECK(ghost.out == "3,11\n");

    auto hom = run("homology -m 1");
    REQUIRE(hom.status == 0);
    auto doc = nlohmann::json::parse(hom.out);
    CHECK(doc["contract"] == "PASS");
    CHECK(doc["weight"] == 1);
    for (const auto& entry : doc["reduced_homology"]) {
        long long d = entry["degree"].get<long long>();
        std::size_t rank = entry["group"]["free_rank"].get<std::size_t>();
        CHECK(rank == ((d == 2 || d == 3) ? 1u : 0u));
    }

    auto hom0 = run("homology -m 0");
    REQUIRE(hom0.status == 0);
    auto doc0 = nlohmann::json::parse(hom0.out);
    CHECK(doc0["contract"] == "PASS");
    CHECK(doc0.contains("note"));  // unit weight flag
}

TEST_CASE("structure polynomial rendering") {
    auto r = run("witt --poly add -S 1,2 --format csv");
    REQUIRE(r.status == 0);
    CHECK(r.out.find("s_2 = -1*a1*b1 + a2 + b2") != std::string::npos);
}

TEST_CASE("config file feeds the configuration, flags win") {
    std::string conf = "/tmp/cyclobar_test_conf_" + std::to_string(getpid()) + ".conf";
    {
        std::FILE* f = std::fopen(conf.c_str(), "w");
        REQUIRE(f != nullptr);
        std::fputs("budget = 1\nformat = csv\n", f);
        std::fclose(f);
    }
    // the config budget trips the weight-2 build
    CHECK(run("homology -m 2 --config " + conf).status == 2);
    // a flag overrides the config file
    CHECK(run("homology -m 2 --config " + conf + " --budget 3").status == 0);
    std::remove(conf.c_str());
}

TEST_CASE("chain complex export writes one file per degree") {
    std::string dir = "/tmp/cyclobar_test_dump_" + std::to_string(getpid());
    auto r = run("homology -m 1 --dump-chains " + dir);
    REQUIRE(r.status == 0);
    std::FILE* f = std::fopen((dir + "/boundary_3.txt").c_str(), "r");
    REQUIRE(f != nullptr);
    char line[64] = {};
    REQUIRE(std::fgets(line, sizeof line, f) != nullptr);
    CHECK(std::string(line) == "3 3\n");  // three 2-cells, three 3-cells
    std::fclose(f);
    std::string cleanup = "rm -rf " + dir;
    REQUIRE(std::system(cleanup.c_str()) == 0);
}

TEST_CASE("environment variables feed the configuration") {
    // a budget from the environment trips the weight check
    std::string cmd = "CYCLOBAR_BUDGET=1 " + binary_path() + " homology -m 2 >/dev/null 2>&1; echo $?";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[16] = {};
    REQUIRE(fgets(buf, sizeof buf, pipe) != nullptr);
    pclose(pipe);
    CHECK(std::string(buf) == "2\n");
}
