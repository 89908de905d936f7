#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dymforge {

struct SuiteResult {
    std::string name;
    bool passed = false;
    int checks = 0;
    std::string detail; // first counterexample on failure, summary otherwise
    double seconds = 0.0;
};

// The named identity suites in their canonical order. Every suite clamps
// its window up to the smallest size that carries its identities, so small
// --order/--family values never water a suite down.
const std::vector<std::string>& verify_suite_names();

// Runs one suite; DomainError for names not in the list. The seed only
// feeds the property-style spot checks (currently the numeric phase
// shift); the symbolic suites are exhaustive over their windows.
SuiteResult run_suite(const std::string& name, int order, int family,
                      std::uint64_t seed);

// Runs every suite concurrently and returns results in canonical order.
std::vector<SuiteResult> run_all_suites(int order, int family, std::uint64_t seed);

// One line per suite plus a tail line; stable bytes for fixed inputs
// (timings are deliberately left out of the text).
std::string render_suite_report(const std::vector<SuiteResult>& results);

} // namespace dymforge
