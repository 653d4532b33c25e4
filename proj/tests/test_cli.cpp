#include <doctest.h>
#include <json.hpp>

#include <array>
#include <cstdio>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args)
{
    std::string cmd = std::string(TSLAB_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf{};
    while (auto n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

} // namespace

TEST_CASE("norm")
{
    auto r = run("norm --vec 2:1,3:1");
    CHECK(r.code == 0);
    CHECK(r.out == "1  (1)\n");
    r = run("norm --vec 2:1,3:1,4:1,5:1 --certificate");
    CHECK(r.out == "3/2  (1.5)\n1/2[L1,adm](+e3 +e4 +e5)\n");
    r = run("norm --space tsirelson_modified --vec 2:1,3:1 --json");
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["exact"] == true);
    CHECK(j["space"] == "tsirelson_modified");
    CHECK(run("norm --vec 0:1").code == 3);
    CHECK(run("norm --space nowhere --vec 1:1").code == 3);
    CHECK(run("norm").code == 3);
    CHECK(run("norm --space tsirelson_modified --exact --vec "
              "3:1,4:1,5:1,6:1,7:1,8:1,9:1,10:1,11:1,12:1,13:1,14:1,15:1,16:1,17:1")
              .code == 2);
}

TEST_CASE("families")
{
    CHECK(run("families 'S(1)' --window 2..4 --what maximal").out == "{2,3}\n{2,4}\n{3,4}\n");
    CHECK(run("families 'S(2)' --window 1..8 --what count").out == "128\n");
    CHECK(run("families 'S(0)' --window 5..6").out == "{}\n{5}\n{6}\n");
    CHECK(run("families 'S(1)' --window 4..2").code == 3);
    CHECK(run("families 'X(1)'").code == 3);
}

TEST_CASE("scc and spaces")
{
    auto r = run("scc make --eps 1/2 --n 1 --D evens");
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["anchors"] == nlohmann::json::array({4, 6, 8}));
    CHECK(run("scc check --vec 4:1/3,6:1/3,8:1/3 --eps 1/2 --n 1").out == "pass\n");
    auto f = run("scc check --vec 5:1 --eps 1/2 --n 1");
    CHECK(f.out == "fail\n");
    CHECK(f.code == 1);
    CHECK(run("spaces list").out.find("xm1u(3)\n") != std::string::npos);
    auto show = run("spaces show xm1u_toy");
    CHECK(show.out.find("growth-conditions-violated") != std::string::npos);
}

TEST_CASE("verify and distort")
{
    auto r = run("verify schreier --json");
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["experiment"] == "schreier");
    CHECK(run("verify theta1_lower --count 5 --seed 7").out == run("verify theta1_lower --count 5 --seed 7").out);
    CHECK(run("verify nothing").code == 3);
    CHECK(run("verify theta1_lower --seed banana").code == 3);
    auto d = run("distort --trials 2 --i0 2 --j 2");
    CHECK(d.code == 0);
    CHECK(d.out.find("growth-conditions-violated") != std::string::npos);
}
