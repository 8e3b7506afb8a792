#include "bergman/cli.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bergman::cli;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("bergman_cli_" + name);
    std::filesystem::remove_all(p);
    return p;
}

const json kOneRoot = {{"factors", json::array({json::array({{{"alpha", {1}}, {"re", 1.0}, {"im", 0.0}},
                                                              {{"alpha", {0}}, {"re", -0.3}, {"im", 0.0}}})})}};

}  // namespace

TEST_CASE("config merge keeps defaults and rejects unknown keys") {
    RunConfig c = config_from_json(json{{"dimension", 2}, {"weight", {{"beta", 4.0}}}});
    CHECK(c.dimension == 2);
    CHECK(c.weight.beta == 4.0);
    CHECK(c.degree == 12);
    CHECK_THROWS_AS(config_from_json(json{{"dimensions", 2}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"grid", {{"step", 1}}}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"degree", "twelve"}}), ConfigError);
    RunConfig back = config_from_json(c.to_json());
    CHECK(back.to_json() == c.to_json());
}

TEST_CASE("invalid configurations exit with code 2") {
    std::ostringstream log;
    RunConfig c;
    c.output = scratch("bad").string();
    c.dimension = 4;
    CHECK(run(c, log) == 2);
    c.dimension = 1;
    c.r = 1.5;
    CHECK(run(c, log) == 2);
    c.r = 0.5;
    c.polynomial = json{{"factors", 3}};
    CHECK(run(c, log) == 2);
    c.polynomial = nullptr;
    c.command = Command::seip_sweep;
    c.dimension = 2;
    CHECK(run(c, log) == 2);
}

TEST_CASE("potential-check writes reproducible reports") {
    RunConfig c;
    c.command = Command::potential_check;
    c.polynomial = kOneRoot;
    c.points = 12;
    const auto a = scratch("pc_a"), b = scratch("pc_b");
    std::ostringstream log;
    c.output = a.string();
    REQUIRE(run(c, log) == 0);
    c.output = b.string();
    REQUIRE(run(c, log) == 0);
    CHECK(slurp(a / "potential-check.csv") == slurp(b / "potential-check.csv"));
    const json rep = json::parse(slurp(a / "potential-check.json"));
    CHECK(rep.contains("conventions"));
    CHECK(rep["config"]["points"] == 12);
    CHECK(rep["result"]["max_rel_diff"].get<double>() < 1e-6);
    CHECK(rep["result"]["max_value"].get<double>() <= 1e-9);
}

TEST_CASE("selftest and seip-sweep through the argument parser") {
    const auto out = scratch("argv");
    const std::string o = out.string();
    {
        const char* argv[] = {"bergman", "selftest", "-o", o.c_str()};
        CHECK(main(4, const_cast<char**>(argv)) == 0);
    }
    {
        const char* argv[] = {"bergman", "seip-sweep", "--separations", "0.9,0.8", "--degrees", "8", "-o", o.c_str()};
        CHECK(main(8, const_cast<char**>(argv)) == 0);
        std::istringstream csv(slurp(out / "seip-sweep.csv"));
        std::string line;
        int rows = 0;
        std::getline(csv, line);
        CHECK(line.rfind("separation,density_estimate,lambda_min,lambda_max,extension_norm_ratio", 0) == 0);
        while (std::getline(csv, line)) ++rows;
        CHECK(rows == 2);
    }
    {
        const char* argv[] = {"bergman", "selftest", "--unknown"};
        CHECK(main(3, const_cast<char**>(argv)) == 2);
    }
}

TEST_CASE("config file values are overridden by flags") {
    const auto dir = scratch("cfg");
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / "run.json");
        f << json{{"points", 5}, {"polynomial", kOneRoot}, {"seed", 3}}.dump();
    }
    const std::string cfg = (dir / "run.json").string(), o = (dir / "out").string();
    const char* argv[] = {"bergman", "potential-check", "--config", cfg.c_str(), "--points", "7", "-o", o.c_str()};
    REQUIRE(main(8, const_cast<char**>(argv)) == 0);
    const json rep = json::parse(slurp(dir / "out" / "potential-check.json"));
    CHECK(rep["config"]["points"] == 7);
    CHECK(rep["config"]["seed"] == 3);
    {
        std::ofstream f(dir / "bad.json");
        f << R"({"points": 5, "colour": "red"})";
    }
    const std::string bad = (dir / "bad.json").string();
    const char* argv2[] = {"bergman", "potential-check", "--config", bad.c_str()};
    CHECK(main(4, const_cast<char**>(argv2)) == 2);
}
