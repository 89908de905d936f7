#pragma once

#include "numeric.hpp"

#include <cstdint>
#include <string>

namespace dymforge {

enum class OutputFormat { text, json, latex, csv };

// "text" | "json" | "latex" | "csv"; DomainError otherwise.
OutputFormat parse_format(const std::string& name);

// k_{-1}..k_N plus the ladder (densities, gradients, fields) the order
// supports. Order 0 renders the bare k_{-1} line and nothing else. The
// optional cache directory memoizes the riccati series between runs;
// verification never reads it.
std::string render_hierarchy(int order, OutputFormat f, const std::string& cache_dir = "");

// Normalized currents K^(2)..K^(lmax) over the free ring, or collapsed
// under the riccati constraint when `constrained` is set.
std::string render_currents(int lmax, int order, bool constrained, OutputFormat f,
                            const std::string& cache_dir = "");

// The free family's windows and every evolution equation with i + j <= M.
std::string render_central(int family, int order, OutputFormat f);

struct SimulateRequest {
    int n = 128;
    double dt = 0.0;   // 0 = stability rule
    long steps = 0;    // 0 = run to t = 0.01
    int sample_every = 1;
    std::uint64_t seed = 0; // phase of the initial profile
};

// Runs the flow on 1 + 0.1 sin(x + phase) with the three lowest conserved
// monitors and renders the trajectory report.
std::string render_simulate(const SimulateRequest& req, OutputFormat f);

// Runs one named suite (or "all") and renders the outcome. Sets
// `all_passed` so callers can map the result onto an exit code.
std::string render_verify(const std::string& suite, int order, int family,
                          std::uint64_t seed, OutputFormat f, bool& all_passed);

} // namespace dymforge
