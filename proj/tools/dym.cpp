#include <dymforge.h>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace {

// Flag values are collected as (key, value) pairs and replayed onto the
// session after the config file, so flags always win over the file and the
// file wins over the built-in defaults.
struct Invocation {
    std::string config;
    std::string out;
    std::vector<std::pair<std::string, std::string>> flag_kv;
};

void add_kv(CLI::App& cmd, Invocation& inv, const std::string& flags,
            const std::string& key, const std::string& desc) {
    cmd.add_option_function<std::string>(
        flags, [&inv, key](const std::string& v) { inv.flag_kv.emplace_back(key, v); },
        desc);
}

void add_common(CLI::App& cmd, Invocation& inv) {
    add_kv(cmd, inv, "--order,-N", "order", "truncation order of the expansions");
    add_kv(cmd, inv, "--family,-M", "family", "number of currents kept");
    add_kv(cmd, inv, "--format", "format", "text, json, latex, or csv");
    add_kv(cmd, inv, "--seed", "seed", "seed for sampled checks and profiles");
    cmd.add_option("--out", inv.out, "write the result to this file");
    cmd.add_option("--config", inv.config, "key=value file with session defaults");
}

int complain(const std::string& what, int code) {
    std::cerr << "dym: " << what << '\n';
    return code;
}

// key=value per line; '#' starts a comment, blank lines are skipped
bool load_config(const std::string& path,
                 std::vector<std::pair<std::string, std::string>>& kv) {
    std::ifstream in(path);
    if (!in)
        return false;
    std::string line;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            kv.emplace_back(line, ""); // let the session report the bad key
            continue;
        }
        kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return true;
}

int exit_code(dym_status st) {
    switch (st) {
    case DYM_OK:
        return 0;
    case DYM_ERR_VERIFY:
    case DYM_ERR_NUMERIC:
    case DYM_ERR_INTERNAL:
        return 1;
    default:
        return 2;
    }
}

int run(const std::string& command, const Invocation& inv) {
    struct SessionGuard {
        dym_session* s = dym_session_new();
        ~SessionGuard() { dym_session_free(s); }
    } guard;
    if (!guard.s)
        return complain("could not create a session", 1);

    std::vector<std::pair<std::string, std::string>> kv;
    if (!inv.config.empty() && !load_config(inv.config, kv))
        return complain("config: cannot open " + inv.config, 2);
    kv.insert(kv.end(), inv.flag_kv.begin(), inv.flag_kv.end());
    for (const auto& [k, v] : kv)
        if (dym_session_set(guard.s, k.c_str(), v.c_str()) != DYM_OK)
            return complain(dym_last_error(), 2);

    char* out = nullptr;
    dym_status st = DYM_ERR_INTERNAL;
    if (command == "hierarchy")
        st = dym_run_hierarchy(guard.s, &out);
    else if (command == "currents")
        st = dym_run_currents(guard.s, &out);
    else if (command == "central")
        st = dym_run_central(guard.s, &out);
    else if (command == "simulate")
        st = dym_run_simulate(guard.s, &out);
    else if (command == "verify")
        st = dym_run_verify(guard.s, &out);

    if (out) {
        if (inv.out.empty()) {
            std::cout << out;
        } else {
            std::ofstream file(inv.out);
            file << out;
            if (!file) {
                dym_string_free(out);
                return complain("cannot write " + inv.out, 2);
            }
        }
        dym_string_free(out);
    }
    if (st != DYM_OK && st != DYM_ERR_VERIFY)
        return complain(dym_last_error(), exit_code(st));
    return exit_code(st);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact engine and verifier for the Harry Dym hierarchy"};
    app.require_subcommand(1);
    Invocation inv;

    CLI::App* hierarchy =
        app.add_subcommand("hierarchy", "conserved densities, gradients, and flows");
    CLI::App* currents = app.add_subcommand("currents", "normalized currents K^(l)");
    add_kv(*currents, inv, "--lmax", "lmax", "highest current index");
    currents->add_flag_callback(
        "--constrained", [&inv] { inv.flag_kv.emplace_back("mode", "constrained"); },
        "collapse the currents under the quadratic constraint");
    CLI::App* central = app.add_subcommand("central", "the truncated central system");
    CLI::App* simulate = app.add_subcommand("simulate", "periodic flow with monitors");
    add_kv(*simulate, inv, "--n", "n", "grid points");
    add_kv(*simulate, inv, "--dt", "dt", "time step (0 picks the stability rule)");
    add_kv(*simulate, inv, "--steps", "steps", "step count (0 runs to t = 0.01)");
    add_kv(*simulate, inv, "--sample-every", "sample_every", "rows kept every k steps");
    CLI::App* verify = app.add_subcommand("verify", "run the verification suites");
    add_kv(*verify, inv, "--suite", "suite", "suite name or 'all'");

    for (CLI::App* cmd : {hierarchy, currents, central, simulate, verify})
        add_common(*cmd, inv);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    return run(app.get_subcommands().front()->get_name(), inv);
}
