#include <puiseux/io.hpp>

#include "support.hpp"

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace puiseux;
using puiseux::io::json;
using testsup::CF;
using testsup::GQ;

namespace {

const char* kPaperSpec = R"({
  "n": 3,
  "mode": "exact",
  "lambda0": "0",
  "order": 2,
  "root_branch": 0,
  "matrices": [
    [["-1/2", "1", "1/2"], ["1/2", "0", "-1/2"], ["-1", "1", "1"]],
    [["2", "0", "-1"], ["2", "0", "-1"], ["1", "0", "0"]]
  ],
  "U": [["1", "1", "1"], ["0", "1", "1"], ["1", "1", "0"]]
})";

struct RunResult {
    int exit_code;
    std::string report_text;
};

std::filesystem::path temp_dir() {
    auto d = std::filesystem::temp_directory_path() / "puiseux_cli_test";
    std::filesystem::create_directories(d);
    return d;
}

RunResult run_perturb(const std::string& spec_text, const std::string& extra_args = "",
                      const std::string& env_prefix = "") {
    const auto dir = temp_dir();
    static int counter = 0;
    const auto spec = dir / ("spec" + std::to_string(counter) + ".json");
    const auto out = dir / ("report" + std::to_string(counter) + ".json");
    ++counter;
    {
        std::ofstream f(spec);
        f << spec_text;
    }
    std::string cmd = env_prefix + PERTURB_BIN " expand " + spec.string() + " --out " +
                      out.string() + " " + extra_args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(status);
    std::ifstream f(out);
    std::ostringstream ss;
    ss << f.rdbuf();
    r.report_text = ss.str();
    return r;
}

} // namespace

TEST_CASE("scalar json round trips") {
    const GQ z{mpq_class(3, 7), mpq_class(-1, 2)};
    CHECK(io::scalar_from_json<GQ>(io::to_json(z)) == z);
    const GQ r{mpq_class(-5, 3)};
    CHECK(io::to_json(r) == json("-5/3"));
    CHECK(io::scalar_from_json<GQ>(json("-5/3")) == r);
    CHECK(io::scalar_from_json<GQ>(json(4)) == GQ(4L));

    const CF c{1.5, -2.25};
    CHECK(io::scalar_from_json<CF>(io::to_json(c)) == c);
    CHECK(io::scalar_from_json<CF>(json(2.5)) == CF{2.5, 0});
    CHECK(io::scalar_from_json<CF>(json("1/4")) == CF{0.25, 0});

    // float literals are contamination in exact mode
    CHECK_THROWS_AS((void)io::scalar_from_json<GQ>(json(0.5)), Error);
    CHECK_THROWS_AS((void)io::scalar_from_json<GQ>(json("not-a-number")), Error);
}

TEST_CASE("problem spec parses and re-serializes to the same document") {
    const json j = json::parse(kPaperSpec);
    auto spec = io::parse_problem_spec<GQ>(j);
    CHECK(spec.n == 3);
    CHECK(spec.order == 2);
    CHECK(spec.series.order() == 1);
    CHECK(spec.series.coeffs[0](0, 0) == GQ{mpq_class(-1, 2)});
    CHECK(spec.pinned_frame.has_value());

    const json round1 = io::spec_to_json(spec, "exact");
    auto spec2 = io::parse_problem_spec<GQ>(round1);
    const json round2 = io::spec_to_json(spec2, "exact");
    CHECK(round1 == round2);
}

TEST_CASE("cli: worked example report") {
    auto r = run_perturb(kPaperSpec);
    REQUIRE(r.exit_code == 0);
    const json rep = json::parse(r.report_text);

    CHECK(rep.at("generic_condition").at("holds") == true);
    CHECK(rep.at("generic_condition").at("charpoly_value") == json("1"));
    CHECK(rep.at("generic_condition").at("a_m1_value") == json("1"));
    CHECK(rep.at("expansion").at("m") == 2);
    CHECK(rep.at("expansion").at("alphas") == json::parse(R"(["1","1/2"])"));
    CHECK(rep.at("expansion").at("betas") ==
          json::parse(R"([["1","0","1"],["1","1","1"],["1/2","1/2","1/2"]])"));
    CHECK(rep.contains("input_hash"));
    // the echoed input re-parses to an identical spec
    auto echoed = io::parse_problem_spec<GQ>(rep.at("input"));
    CHECK(io::spec_to_json(echoed, "exact") == rep.at("input"));
    CHECK_FALSE(rep.contains("timing_ms")); // off by default, keeps bytes stable
}

TEST_CASE("cli: exact reports are byte-identical across runs") {
    auto r1 = run_perturb(kPaperSpec, "--verbose-frame");
    auto r2 = run_perturb(kPaperSpec, "--verbose-frame");
    REQUIRE(r1.exit_code == 0);
    CHECK(r1.report_text == r2.report_text);
    const json rep = json::parse(r1.report_text);
    CHECK(rep.at("expansion").at("frame").at("label") == "witness");
    CHECK(rep.at("expansion").at("frame").at("Lambda") ==
          json::parse(R"([["3","-1","-2"],["3","-1","-2"],["1","-1","0"]])"));
}

TEST_CASE("cli: float mode and validation harness") {
    json j = json::parse(kPaperSpec);
    j["mode"] = "float";
    j.erase("U");
    auto r = run_perturb(j.dump(), "--validate");
    REQUIRE(r.exit_code == 0);
    const json rep = json::parse(r.report_text);
    CHECK(rep.at("validation").at("pass") == true);
    const double slope = rep.at("validation").at("slopes").at(0).get<double>();
    CHECK(slope > 1.25);
}

TEST_CASE("cli: exit codes mirror the failure taxonomy") {
    // zeroed perturbation: generic condition fails -> 2
    json j = json::parse(kPaperSpec);
    j["matrices"][1] = json::parse(R"([["0","0","0"],["0","0","0"],["0","0","0"]])");
    j.erase("U");
    auto r2 = run_perturb(j.dump());
    CHECK(r2.exit_code == 2);
    const json rep2 = json::parse(r2.report_text);
    CHECK(rep2.at("error").at("code") == "GenericConditionFails");
    CHECK(rep2.at("generic_condition").at("holds") == false);

    // derogatory A_0 -> 3
    const char* derog = R"({
      "n": 2, "mode": "exact", "lambda0": "0", "order": 2,
      "matrices": [[["0","0"],["0","0"]], [["1","0"],["2","0"]]]
    })";
    CHECK(run_perturb(derog).exit_code == 3);

    // order 5 with K = 1 -> 4; explicit zero matrices -> success
    json j5 = json::parse(kPaperSpec);
    j5["order"] = 5;
    CHECK(run_perturb(j5.dump()).exit_code == 4);
    const json zero3 = json::parse(R"([["0","0","0"],["0","0","0"],["0","0","0"]])");
    j5["matrices"].push_back(zero3);
    j5["matrices"].push_back(zero3);
    auto r5 = run_perturb(j5.dump());
    REQUIRE(r5.exit_code == 0);
    const json rep5 = json::parse(r5.report_text);
    CHECK(rep5.at("expansion").at("alphas") ==
          json::parse(R"(["1","1/2","1/8","0","-1/128"])"));

    // malformed input -> 1
    CHECK(run_perturb("{\"n\": 3}").exit_code == 1);
}

TEST_CASE("cli: flag and environment overrides") {
    // --order overrides the spec field
    auto r = run_perturb(kPaperSpec, "--order 1");
    REQUIRE(r.exit_code == 0);
    CHECK(json::parse(r.report_text).at("expansion").at("alphas") == json::parse(R"(["1"])"));

    // an absurd zero threshold makes f_eps = 1/2 look like zero in float mode
    json j = json::parse(kPaperSpec);
    j["mode"] = "float";
    j.erase("U");
    auto renv = run_perturb(j.dump(), "", "PERTURB_ZERO_THRESHOLD=1e6 ");
    CHECK(renv.exit_code == 2);
}

TEST_CASE("branch terms table lists zeta powers") {
    auto r = run_perturb(kPaperSpec);
    REQUIRE(r.exit_code == 0);
    const json rep = json::parse(r.report_text);
    const json& branches = rep.at("expansion").at("branches");
    REQUIRE(branches.size() == 2);
    CHECK(branches.at(1).at("terms").at(0).at("zeta_power") == 1); // h=1, k=1
    CHECK(branches.at(1).at("terms").at(1).at("zeta_power") == 0); // h=1, k=2
    CHECK(branches.at(1).at("terms").at(1).at("coefficient") == json("1/2"));
}
