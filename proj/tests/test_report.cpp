#include <doctest.h>

#include "errors.hpp"
#include "hdcore.hpp"
#include "laurent.hpp"
#include "report.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>

using namespace dymforge;

namespace {

bool braces_balanced(const std::string& s) {
    int depth = 0;
    for (char c : s) {
        if (c == '{')
            ++depth;
        if (c == '}' && --depth < 0)
            return false;
    }
    return depth == 0;
}

std::filesystem::path fresh_cache_dir(const char* tag) {
    auto dir = std::filesystem::temp_directory_path() / (std::string("dymforge-test-") + tag);
    std::filesystem::remove_all(dir);
    return dir;
}

} // namespace

TEST_CASE("format names parse and bad ones are refused") {
    CHECK(parse_format("text") == OutputFormat::text);
    CHECK(parse_format("json") == OutputFormat::json);
    CHECK(parse_format("latex") == OutputFormat::latex);
    CHECK(parse_format("csv") == OutputFormat::csv);
    CHECK_THROWS_AS(parse_format("yaml"), DomainError);
    CHECK_THROWS_AS(parse_format(""), DomainError);
}

TEST_CASE("hierarchy text prints the printed coefficients verbatim") {
    const std::string out = render_hierarchy(1, OutputFormat::text);
    CHECK(out.find("k_-1 = u^(1/2)\n") != std::string::npos);
    CHECK(out.find("k_0 = -1/4*u^(-1)*u1\n") != std::string::npos);
    CHECK(out.find("k_1 = 1/8*u^(-3/2)*u2 - 5/32*u^(-5/2)*u1^2\n") != std::string::npos);
    CHECK(out.find("density 2k_-1 = 2*u^(1/2)\n") != std::string::npos);
    CHECK(out.find("gradient w_0 = u^(-1/2)\n") != std::string::npos);
    CHECK(out.find("field X_0 = ") != std::string::npos);
}

TEST_CASE("hierarchy order 0 is the bare k_-1 line") {
    CHECK(render_hierarchy(0, OutputFormat::text) == "k_-1 = u^(1/2)\n");
}

TEST_CASE("hierarchy json embeds a series that round-trips") {
    const std::string out = render_hierarchy(3, OutputFormat::json);
    auto j = nlohmann::json::parse(out);
    CHECK(j["order"] == 3);
    REQUIRE(j["coefficients"].size() == 5);
    CHECK(j["coefficients"][0]["index"] == -1);
    CHECK(j["coefficients"][0]["expr"] == "u^(1/2)");

    LaurentSeries k = LaurentSeries::from_json(j["k_series"].dump(), u_ring());
    CHECK(k == solve_riccati_hd(4).k);
    CHECK(j["densities"].size() == j["fields"].size());
    CHECK(j["gradients"][0] == "u^(-1/2)");
}

TEST_CASE("hierarchy latex balances braces") {
    const std::string out = render_hierarchy(2, OutputFormat::latex);
    CHECK(braces_balanced(out));
    CHECK(out.find("\\begin{aligned}") != std::string::npos);
    CHECK(out.find("k_{-1} &= ") != std::string::npos);
    CHECK(out.find("\\end{aligned}") != std::string::npos);
}

TEST_CASE("symbolic commands refuse csv") {
    CHECK_THROWS_AS(render_hierarchy(2, OutputFormat::csv), DomainError);
    CHECK_THROWS_AS(render_currents(3, 3, false, OutputFormat::csv), DomainError);
    CHECK_THROWS_AS(render_central(4, 2, OutputFormat::csv), DomainError);
}

TEST_CASE("hierarchy rejects a negative order") {
    CHECK_THROWS_AS(render_hierarchy(-1, OutputFormat::text), DomainError);
}

TEST_CASE("the riccati cache is written, reused, and survives corruption") {
    const auto dir = fresh_cache_dir("cache");
    const std::string first = render_hierarchy(2, OutputFormat::text, dir.string());
    CHECK(std::filesystem::exists(dir / "riccati-3.json"));
    CHECK(render_hierarchy(2, OutputFormat::text, dir.string()) == first);

    std::ofstream(dir / "riccati-3.json") << "{ not json";
    CHECK(render_hierarchy(2, OutputFormat::text, dir.string()) == first);
    // the corrupt file was replaced by a good one
    LaurentSeries k = LaurentSeries::from_json(
        [&] {
            std::ifstream in(dir / "riccati-3.json");
            return std::string(std::istreambuf_iterator<char>(in), {});
        }(),
        u_ring());
    CHECK(k == solve_riccati_hd(3).k);
    std::filesystem::remove_all(dir);
}

TEST_CASE("free currents print the span combination") {
    const std::string out = render_currents(2, 2, false, OutputFormat::text);
    CHECK(out.find("K^(2) = k_m1^(-2)*k^(2)\n") != std::string::npos);
    const std::string three = render_currents(3, 3, false, OutputFormat::text);
    CHECK(three.find("K^(3) = ") != std::string::npos);
    CHECK(three.find("*k^(3)") != std::string::npos);
    CHECK_THROWS_AS(render_currents(1, 3, false, OutputFormat::text), DomainError);
}

TEST_CASE("constrained even currents collapse to powers of z") {
    const std::string out = render_currents(2, 4, true, OutputFormat::text);
    CHECK(out.find("K^(2) = z^(2)\n") != std::string::npos);
}

TEST_CASE("currents json carries one entry per current") {
    auto j = nlohmann::json::parse(render_currents(4, 4, false, OutputFormat::json));
    CHECK(j["mode"] == "free");
    REQUIRE(j["currents"].size() == 3);
    CHECK(j["currents"][0]["index"] == 2);
    CHECK(j["currents"][2]["index"] == 4);
    CHECK(braces_balanced(render_currents(3, 3, false, OutputFormat::latex)));
}

TEST_CASE("central text lists windows and evolution equations") {
    const std::string out = render_central(5, 2, OutputFormat::text);
    CHECK(out.find("K^(2) = ") != std::string::npos);
    CHECK(out.find("d K2_m1 / d t_2 = ") != std::string::npos);
    CHECK(out.find("d t_3") != std::string::npos);

    auto j = nlohmann::json::parse(render_central(5, 2, OutputFormat::json));
    CHECK(j["family"] == 5);
    CHECK(j["equations"].size() > 0);
    CHECK(j["equations"][0].contains("dK"));
    CHECK(braces_balanced(render_central(4, 2, OutputFormat::latex)));
}

TEST_CASE("simulate renders text, csv, and json but not latex") {
    SimulateRequest req;
    req.n = 32;
    req.steps = 20;
    req.sample_every = 5;
    req.seed = 3;

    const std::string text = render_simulate(req, OutputFormat::text);
    CHECK(text.find("int_sqrt_u") != std::string::npos);
    CHECK(text.find("drift") != std::string::npos);

    const std::string csv = render_simulate(req, OutputFormat::csv);
    CHECK(csv.rfind("step,t,int_sqrt_u", 0) == 0);

    auto j = nlohmann::json::parse(render_simulate(req, OutputFormat::json));
    CHECK(j["n"] == 32);
    CHECK(j["steps"] == 20);
    CHECK(j["report"]["rows"].size() == 5);

    CHECK_THROWS_AS(render_simulate(req, OutputFormat::latex), DomainError);
}

TEST_CASE("simulate output is deterministic for a fixed seed") {
    SimulateRequest req;
    req.n = 32;
    req.steps = 10;
    req.seed = 11;
    CHECK(render_simulate(req, OutputFormat::csv) == render_simulate(req, OutputFormat::csv));
}

TEST_CASE("verify rendering maps results onto a flag") {
    bool ok = false;
    const std::string text = render_verify("riccati", 2, 2, 0, OutputFormat::text, ok);
    CHECK(ok);
    CHECK(text.find("PASS  riccati") != std::string::npos);

    auto j = nlohmann::json::parse(render_verify("riccati", 2, 2, 0, OutputFormat::json, ok));
    CHECK(j["passed"] == true);
    CHECK(j["results"][0]["name"] == "riccati");

    CHECK_THROWS_AS(render_verify("riccati", 2, 2, 0, OutputFormat::csv, ok), DomainError);
    CHECK_THROWS_AS(render_verify("no-such-suite", 2, 2, 0, OutputFormat::text, ok), DomainError);
}
