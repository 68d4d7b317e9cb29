#include "doctest.h"

#include <array>
#include <cstdio>
#include <string>

#include "json.hpp"

namespace {
struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(BD_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    std::array<char, 4096> buf{};
    while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
    const int status = pclose(p);
    return {WEXITSTATUS(status), out};
}

std::string data(const char* name) { return std::string(BD_EXAMPLES_DIR) + "/" + name; }
}  // namespace

TEST_CASE("cli dichotomy") {
    auto r = run("dichotomy --class horn,antihorn");
    CHECK(r.code == 0);
    CHECK(r.out.find("W[2]-hard (bad pair: horn/antihorn)") != std::string::npos);
    CHECK(run("dichotomy --class 2cnf,horn,0val").out.find("FPT") != std::string::npos);
}

TEST_CASE("cli detect on the intro family") {
    auto r = run("gen intro -n 5 | " + std::string(BD_CLI_PATH) + " detect --mode strong --class horn,2cnf -k 1");
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["found"] == true);
    CHECK(j["backdoor"] == nlohmann::json::array({1}));
    CHECK(j["mode"] == "strong");

    auto f = nlohmann::json::parse(run("detect --class horn,2cnf -k 1 " + data("intro5.cnf")).out);
    CHECK(f["backdoor"] == nlohmann::json::array({1}));
}

TEST_CASE("cli detect in class with k = 0") {
    auto r = run("detect --class horn -k 0 " + data("horn.cnf"));
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["found"] == true);
    CHECK(j["backdoor"].empty());
}

TEST_CASE("cli not found and errors") {
    auto r = run("detect --class horn -k 0 " + data("intro5.cnf"));
    CHECK(r.code == 1);
    CHECK(nlohmann::json::parse(r.out)["found"] == false);
    CHECK(run("detect --class nope -k 1 " + data("horn.cnf")).code == 2);
    CHECK(run("detect --class horn " + data("horn.cnf")).code == 2);
}

TEST_CASE("cli csp commands") {
    auto r = run("detect --props majority -k 0 " + data("xor.json"));
    CHECK(r.code == 0);
    auto s = run("solve --props majority --backdoor '' " + data("xor.json"));
    CHECK(s.code == 0);
    auto b = run("gen hs-csp-boolean --sets " + data("sets.txt") + " --props majority | " + std::string(BD_CLI_PATH) +
                 " detect --format csp --props majority -k 1");
    REQUIRE(b.code == 0);
    CHECK(nlohmann::json::parse(b.out)["backdoor"].size() == 1);
}

TEST_CASE("cli verify and classify") {
    auto v = run("verify --class horn,2cnf --backdoor 1 " + data("intro5.cnf"));
    CHECK(v.code == 0);
    auto bad = run("verify --class horn,2cnf --backdoor 7 " + data("intro5.cnf"));
    CHECK(bad.code == 1);
    CHECK(run("classify --class horn " + data("horn.cnf")).code == 0);
}
