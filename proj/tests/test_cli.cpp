#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

// DYM_CLI_PATH is injected by the build so the tests drive the real binary.

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(DYM_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    std::size_t got = 0;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0)
        r.out.append(buf, got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

} // namespace

TEST_CASE("hierarchy prints the leading coefficients") {
    RunResult r = run_cli("hierarchy --order 1 --format text");
    CHECK(r.code == 0);
    CHECK(r.out.find("k_-1 = u^(1/2)\n") != std::string::npos);
    CHECK(r.out.find("k_0 = -1/4*u^(-1)*u1\n") != std::string::npos);
    CHECK(r.out.find("k_1 = 1/8*u^(-3/2)*u2 - 5/32*u^(-5/2)*u1^2\n") != std::string::npos);

    RunResult bare = run_cli("hierarchy --order 0");
    CHECK(bare.code == 0);
    CHECK(bare.out == "k_-1 = u^(1/2)\n");
}

TEST_CASE("currents prints the span combination") {
    RunResult r = run_cli("currents --lmax 2");
    CHECK(r.code == 0);
    CHECK(r.out.find("K^(2) = k_m1^(-2)*k^(2)\n") != std::string::npos);
}

TEST_CASE("usage problems exit with 2") {
    CHECK(run_cli("hierarchy --bogus-flag").code == 2);
    CHECK(run_cli("hierarchy --format yaml").code == 2);
    CHECK(run_cli("hierarchy --order 99").code == 2);
    CHECK(run_cli("hierarchy --format csv").code == 2);
    CHECK(run_cli("verify --suite no-such-suite").code == 2);
    CHECK(run_cli("").code == 2);
    CHECK(run_cli("--help").code == 0);
}

TEST_CASE("flags override the config file which overrides defaults") {
    const auto cfg = std::filesystem::temp_directory_path() / "dym-cli-test.cfg";
    std::ofstream(cfg) << "format=json\norder=1\n# trailing comment\n";

    RunResult file_only = run_cli("hierarchy --config " + cfg.string());
    CHECK(file_only.code == 0);
    CHECK(file_only.out.find("\"order\": 1") != std::string::npos);

    RunResult flag_wins = run_cli("hierarchy --config " + cfg.string() + " --format text");
    CHECK(flag_wins.code == 0);
    CHECK(flag_wins.out.find("k_1 = ") != std::string::npos);
    CHECK(flag_wins.out.find("{") == std::string::npos);

    CHECK(run_cli("hierarchy --config /no/such/file.cfg").code == 2);
    std::filesystem::remove(cfg);
}

TEST_CASE("--out writes the same bytes the terminal would get") {
    const auto out = std::filesystem::temp_directory_path() / "dym-cli-test.out";
    RunResult direct = run_cli("hierarchy --order 2");
    RunResult redirected = run_cli("hierarchy --order 2 --out " + out.string());
    CHECK(redirected.code == 0);
    CHECK(redirected.out.empty());
    std::ifstream in(out);
    const std::string written((std::istreambuf_iterator<char>(in)), {});
    CHECK(written == direct.out);
    std::filesystem::remove(out);
}

TEST_CASE("repeated runs are byte-identical") {
    const std::string args = "hierarchy --order 4 --format json";
    CHECK(run_cli(args).out == run_cli(args).out);
    const std::string sim = "simulate --n 32 --steps 8 --seed 9 --format csv";
    CHECK(run_cli(sim).out == run_cli(sim).out);
}

TEST_CASE("verify exits 0 on a passing suite") {
    RunResult r = run_cli("verify --suite riccati --order 2 --family 2");
    CHECK(r.code == 0);
    CHECK(r.out.find("PASS  riccati") != std::string::npos);
    CHECK(r.out.find("OK: 1/1 suites") != std::string::npos);
}
