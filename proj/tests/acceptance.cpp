// Acceptance gate: every criterion the artifact promises, one line each.
// Exits 0 only when all ten hold at their stated tolerances and budgets.

#include "central.hpp"
#include "errors.hpp"
#include "expr_io.hpp"
#include "hdcore.hpp"
#include "hdkp.hpp"
#include "numeric.hpp"
#include "rational.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

using namespace dymforge;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what) {
    if (!cond)
        throw Failure(what);
}

void criterion_riccati_printed() {
    RiccatiSolution rs = solve_riccati_hd(4);
    AlphabetPtr alph = u_ring();
    require(rs.coeff(-1) == parse_expr("u^(1/2)", alph), "k_-1 != u^(1/2)");
    require(rs.coeff(0) == parse_expr("-1/4*u^(-1)*u1", alph), "k_0 mismatch");
    require(rs.coeff(1) == parse_expr("1/8*u^(-3/2)*u2 - 5/32*u^(-5/2)*u1^2", alph),
            "k_1 mismatch");
    require(riccati_residual(rs).known_zero(), "riccati residual nonzero");
}

void criterion_total_derivative() {
    RiccatiSolution rs = solve_riccati_hd(6);
    for (int j = 0; j <= 2; ++j)
        require(rs.coeff(2 * j).euler(0).is_zero(),
                "euler(k_" + std::to_string(2 * j) + ", u) != 0");
}

void criterion_hd_field() {
    RiccatiSolution rs = solve_riccati_hd(2);
    DiffPoly x0 = apply_p0(rs.coeff(-1).scale(rat(2)).euler(0));
    DiffPoly closed =
        DiffPoly::generator(u_ring(), 0).mono_pow(-1, 2).diff_x(3).scale(rat(-1, 2));
    require(x0 == closed, "P0 euler(2 k_-1, u) != -(1/2)(u^(-1/2))_xxx");
    require(hd_classical_match() == rat(-1, 4), "classical match constant != -1/4");
}

void criterion_casimir_chain() {
    require(casimir_residual(6).known_zero(), "P_lambda w(lambda) != 0 through order 6");
    HamiltonianLadder ladder = lenard_ladder(5);
    for (int j = 0; j <= 4; ++j)
        require(apply_p0(ladder.gradients[static_cast<std::size_t>(j)]) ==
                    apply_p1(ladder.gradients[static_cast<std::size_t>(j) + 1]),
                "P0 w_" + std::to_string(j) + " != P1 w_" + std::to_string(j + 1));
    RiccatiSolution rs = solve_riccati_hd(8);
    for (int j = 0; j <= 3; ++j)
        require(rs.coeff(2 * j + 1).scale(rat(2)).euler(0) ==
                    ladder.gradients[static_cast<std::size_t>(j) + 1],
                "euler(2 k_" + std::to_string(2 * j + 1) + ", u) != w_" +
                    std::to_string(j + 1));
}

void criterion_factorization() {
    require(factorization_check(8), "operator factorization fails at order 8");
}

void criterion_currents() {
    AlphabetPtr alph = k_ring(4);
    FdBBasis fb = fdb(free_k(alph, 4), 4);
    LaurentSeries want = fb.at(2).times(DiffPoly::generator(alph, 0).mono_pow(-2, 1));
    require((current(fb, 2).series - want).known_zero(), "current(2) != k_-1^(-2) k^(2)");

    RiccatiSolution rs = solve_riccati_hd(6);
    FdBBasis cb = fdb(rs.k, 4);
    require((current(cb, 2).series - LaurentSeries::z_pow(rs.k.alphabet(), 2)).known_zero(),
            "constrained current(2) != z^2");
    require((current(cb, 4).series - LaurentSeries::z_pow(rs.k.alphabet(), 4)).known_zero(),
            "constrained current(4) != z^4");
    for (const auto& [m, rhs] : hdkp_flow(cb, 2).assign)
        require(rhs.is_zero(), "even flow moves k_" + std::to_string(m));
}

void criterion_consistency() {
    require(conservation_consistency(3, 6), "(d_x + 2k) dk/dt_3 != z^2 du/dt_3 at order 6");
    RiccatiSolution rs = solve_riccati_hd(6);
    FlowDerivation f3 = hdkp_flow(fdb(rs.k, 4), 3);
    require(rat(2) * (rs.coeff(-1) * f3.assign.at(-1)) == lenard_ladder(0).fields[0],
            "2 k_-1 dk_-1/dt_3 != X_0");
}

void criterion_central_system() {
    CurrentFamily fam = free_family(8, 6);
    for (int i = 2; i + 2 <= 8; ++i)
        for (int j = 2; i + j <= 8; ++j) {
            CSRhs ex = cs_rhs_explicit(i, j, fam);
            CSRhs pr = cs_rhs_projection(i, j, fam);
            const std::string tag = "(" + std::to_string(i) + "," + std::to_string(j) + ")";
            require((ex.series - pr.series).known_zero(), "series mismatch at " + tag);
            require(ex.dK.size() == pr.dK.size(), "window mismatch at " + tag);
            for (const auto& [l, p] : pr.dK) {
                auto it = ex.dK.find(l);
                require(it != ex.dK.end() && it->second == p,
                        "dK_" + std::to_string(l) + " mismatch at " + tag);
            }
        }
    CommuteReport rep = cs_commute_residual(2, 3, free_family(10, 6));
    require(rep.zero && rep.checked > 0, "[d_t2, d_t3] K != 0 at M = 10, N = 6");
    require(spatialization_check(fdb(free_k(k_ring(8), 8), 8), 6),
            "a spatialization identity failed");
}

void criterion_numeric_conservation() {
    GridField u0 = make_grid(128, [](double x) { return 1.0 + 0.1 * std::sin(x); });
    RiccatiSolution rs = solve_riccati_hd(4);
    std::vector<Monitor> mons{{"int_sqrt_u", compile_density(rs.coeff(-1))},
                              {"int_2k1", compile_density(rs.coeff(1).scale(rat(2)))}};

    double dt = hd_stable_dt(u0);
    std::vector<std::vector<double>> drifts;
    for (int k = 0; k < 3; ++k) {
        drifts.push_back(simulate_hd(u0, dt, std::lround(0.01 / dt), mons, {}).drift);
        dt /= 2.0;
    }
    for (std::size_t m = 0; m < mons.size(); ++m) {
        std::ostringstream v;
        v << std::scientific << drifts[0][m];
        require(drifts[0][m] < 1e-6, "drift of " + mons[m].name + " is " + v.str());
        // At this resolution the halved steps sit on the roundoff plateau, so
        // the decrease is required only until the drift falls below the
        // calibrated plateau of 1e-12 (measured two decades above observed).
        for (std::size_t k = 0; k + 1 < drifts.size(); ++k)
            require(drifts[k + 1][m] <= drifts[k][m] || drifts[k + 1][m] <= 1e-12,
                    "drift of " + mons[m].name + " grew past the plateau under halving");
    }
}

void criterion_full_suite() {
    const std::string cmd =
        std::string(DYM_CLI_PATH) + " verify --suite all --order 6 --family 8 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    require(pipe != nullptr, "could not spawn the verifier");
    std::string out;
    char buf[4096];
    std::size_t got = 0;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0)
        out.append(buf, got);
    const int status = pclose(pipe);
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    require(code == 0, "verify exited " + std::to_string(code) + "; tail: " +
                           out.substr(out.size() > 200 ? out.size() - 200 : 0));
}

struct Criterion {
    const char* label;
    void (*run)();
    double budget_seconds; // 0 = wall time not part of the criterion
};

const Criterion criteria[] = {
    {"riccati reproduces the printed coefficients exactly", criterion_riccati_printed, 1.0},
    {"even coefficients k_0, k_2, k_4 are total derivatives", criterion_total_derivative, 0},
    {"HD field matches -(1/2)(u^(-1/2))_xxx and the -1/4 normalization", criterion_hd_field,
     0},
    {"casimir through order 6, chain j = 0..4, duality j = 0..3", criterion_casimir_chain, 0},
    {"operator factorization at truncation order 8", criterion_factorization, 0},
    {"current normalization, constraint collapse, stationary even flow",
     criterion_currents, 0},
    {"conservation form of the t_3 flow and its reduction to X_0", criterion_consistency, 0},
    {"central system: explicit = projection, commuting flows, spatialization",
     criterion_central_system, 0},
    {"conserved integrals drift below 1e-6 and settle under dt halving",
     criterion_numeric_conservation, 60.0},
    {"verify --suite all --order 6 --family 8 exits 0", criterion_full_suite, 600.0},
};

} // namespace

int main() {
    int passed = 0;
    const int total = static_cast<int>(std::size(criteria));
    for (int i = 0; i < total; ++i) {
        const auto start = std::chrono::steady_clock::now();
        std::string why;
        bool ok = true;
        try {
            criteria[i].run();
        } catch (const std::exception& e) {
            ok = false;
            why = e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (ok && criteria[i].budget_seconds > 0 && secs > criteria[i].budget_seconds) {
            ok = false;
            std::ostringstream over;
            over << "took " << secs << " s, budget " << criteria[i].budget_seconds << " s";
            why = over.str();
        }
        passed += ok ? 1 : 0;
        std::printf("%s %2d  %s%s%s\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].label,
                    why.empty() ? "" : ": ", why.c_str());
    }
    std::printf("%s: %d/%d criteria\n", passed == total ? "OK" : "FAILED", passed, total);
    return passed == total ? 0 : 1;
}
