#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "smtw/formats.hpp"
#include "smtw/random_instance.hpp"

using namespace smtw;

namespace {

struct RunResult {
    int status;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(SMTW_CLI_PATH) + " " + args + " 2>&1";
    std::array<char, 4096> buf;
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (fgets(buf.data(), (int)buf.size(), pipe)) out += buf.data();
    int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

std::string instance_path(const std::string& name) {
    return std::string(SMTW_INSTANCE_DIR) + "/" + name;
}

std::string tmp_file(const std::string& name, const std::string& content) {
    std::string path = "/tmp/smtw_test_" + name;
    std::ofstream f(path);
    f << content;
    return path;
}

}  // namespace

TEST_CASE("solve subcommand json") {
    for (std::string method : {"fpt", "xp", "oracle"}) {
        auto res = run_cli("solve --problem sesm --method " + method + " --instance " +
                           instance_path("i3.smti") + " --witness");
        REQUIRE(res.status == 0);
        auto j = nlohmann::json::parse(res.out);
        CHECK(j["problem"] == "sesm");
        CHECK(j["method"] == method);
        CHECK(j["optimum"] == 0);
        CHECK(j.contains("witness"));
        CHECK(j.contains("stats"));
        CHECK(j["witness"].size() == 3);
    }
    auto res = run_cli("solve --problem max-smt --method xp --instance " +
                       instance_path("it.smti"));
    REQUIRE(res.status == 0);
    auto j = nlohmann::json::parse(res.out);
    CHECK(j["optimum"] == 2);
    CHECK(j["witness"].is_null());

    auto gsm = run_cli("solve --problem gsm --method fpt --instance " +
                       instance_path("i3.smti"));
    REQUIRE(gsm.status == 0);
    auto jg = nlohmann::json::parse(gsm.out);
    CHECK(jg["optimum"].size() == 3);
}

TEST_CASE("solve with an external decomposition") {
    auto dec = run_cli("decompose --instance " + instance_path("i3.smti") +
                       " --graph rotation");
    REQUIRE(dec.status == 0);
    std::string td_path = tmp_file("i3_rot.td", dec.out);
    auto res = run_cli("solve --problem bsm --method fpt --instance " +
                       instance_path("i3.smti") + " --td " + td_path);
    REQUIRE(res.status == 0);
    CHECK(nlohmann::json::parse(res.out)["optimum"] == 6);
}

TEST_CASE("rotations subcommand") {
    auto res = run_cli("rotations --instance " + instance_path("i3.smti") + " --dot");
    REQUIRE(res.status == 0);
    CHECK(res.out.find("digraph") != std::string::npos);
    CHECK(res.out.find("r0 -> r1") != std::string::npos);
}

TEST_CASE("verify-reduction subcommand") {
    std::string graph = tmp_file("mc.gr", "p tw 4 2\n1 3\n2 4\n");
    std::string part = tmp_file("mc.part", "1 2\n3 4\n");
    auto res = run_cli("verify-reduction --kind clique-minsmt --input " + graph +
                       " --partition " + part + " --relaxed");
    REQUIRE(res.status == 0);
    auto j = nlohmann::json::parse(res.out);
    CHECK(j["all_passed"] == true);
    CHECK(j["checks"].size() >= 5);
}

TEST_CASE("verify-reduction for sat kinds") {
    std::string cnf = tmp_file("f.cnf", "p cnf 2 1\n1 2 0\n");
    auto res = run_cli("verify-reduction --kind sat-sesm --input " + cnf +
                       " --block-size 1 --scale 8 --tau 2");
    REQUIRE(res.status == 0);
    auto j = nlohmann::json::parse(res.out);
    CHECK(j["all_passed"] == true);
    bool saw_lambda = false;
    for (const auto& c : j["checks"])
        if (c["name"] == "stable-set-is-excellent") saw_lambda = true;
    CHECK(saw_lambda);
}

TEST_CASE("generate subcommand writes instance and metadata") {
    std::string graph = tmp_file("mc2.gr", "p tw 4 2\n1 3\n2 4\n");
    std::string part = tmp_file("mc2.part", "1 2\n3 4\n");
    std::string inst = "/tmp/smtw_test_red.smti";
    std::string meta = "/tmp/smtw_test_red.meta";
    auto res = run_cli("generate --kind clique-sesm --input " + graph + " --partition " +
                       part + " --out " + inst + " --meta " + meta);
    REQUIRE(res.status == 0);
    Instance parsed = read_instance_file(inst);
    CHECK(parsed.total_agents() > 20);
    std::string meta_text = read_text_file(meta);
    CHECK(meta_text.find("kind: clique-sesm") != std::string::npos);
}

TEST_CASE("exit codes") {
    CHECK(run_cli("solve --problem sesm --method oracle --instance /nonexistent").status ==
          2);
    // Oracle guard on a large instance.
    RandomSpec spec;
    spec.min_side = 14;
    spec.max_side = 14;
    std::string big = tmp_file("big.smti", format_instance(random_instance(1, spec)));
    CHECK(run_cli("solve --problem sesm --method oracle --instance " + big).status == 3);
    CHECK(run_cli("solve --problem sesm --method bogus --instance " + big).status == 2);
}

TEST_CASE("fuzz subcommand") {
    auto res = run_cli("fuzz --n 5 --trials 6 --seed 42");
    CHECK(res.status == 0);
    CHECK(res.out.find("6/6") != std::string::npos);
    auto tied = run_cli("fuzz --n 5 --trials 6 --seed 43 --ties");
    CHECK(tied.status == 0);
}
