#include "verify.hpp"

#include "central.hpp"
#include "errors.hpp"
#include "expr_io.hpp"
#include "hdcore.hpp"
#include "hdkp.hpp"
#include "numeric.hpp"
#include "rational.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <future>
#include <numbers>
#include <random>
#include <sstream>

namespace dymforge {

namespace {

struct Checker {
    int checks = 0;
    bool ok = true;
    std::string first;
    std::string summary;

    void expect(bool cond, const std::string& what) {
        ++checks;
        if (!cond && ok) {
            ok = false;
            first = "counterexample: " + what;
        }
    }
};

bool series_zero(const LaurentSeries& s) {
    return s.known_zero();
}

void suite_riccati(Checker& c, int order, int, std::uint64_t) {
    const int N = std::max(order, 6);
    RiccatiSolution rs = solve_riccati_hd(N);
    AlphabetPtr alph = u_ring();
    c.expect(rs.coeff(-1) == parse_expr("u^(1/2)", alph), "k_-1 != u^(1/2)");
    c.expect(rs.coeff(0) == parse_expr("-1/4*u^(-1)*u1", alph), "k_0 mismatch");
    c.expect(rs.coeff(1) == parse_expr("1/8*u^(-3/2)*u2 - 5/32*u^(-5/2)*u1^2", alph),
             "k_1 mismatch");
    c.expect(series_zero(riccati_residual(rs)),
             "k_x + k^2 - u z^2 has a nonzero window coefficient");
    for (int j = 0; j <= 2; ++j)
        c.expect(rs.coeff(2 * j).euler(0).is_zero(),
                 "euler(k_" + std::to_string(2 * j) + ", u) != 0");
    c.summary = "printed coefficients, residual window, even coefficients exact";
}

void suite_lenard(Checker& c, int order, int, std::uint64_t) {
    const int N = std::max(order, 8);
    RiccatiSolution rs = solve_riccati_hd(N);
    HamiltonianLadder ladder = lenard_ladder(5);
    for (int j = 0; j + 1 < static_cast<int>(ladder.gradients.size()); ++j)
        c.expect(apply_p0(ladder.gradients[static_cast<std::size_t>(j)]) ==
                     apply_p1(ladder.gradients[static_cast<std::size_t>(j) + 1]),
                 "P0 w_" + std::to_string(j) + " != P1 w_" + std::to_string(j + 1));
    c.expect(apply_p1(ladder.gradients[0]).is_zero(), "P1 w_0 != 0");

    DiffPoly x0 = DiffPoly::generator(u_ring(), 0).mono_pow(-1, 2).diff_x(3).scale(rat(-1, 2));
    c.expect(ladder.fields[0] == x0, "X_0 != -(1/2)(u^(-1/2))_xxx");
    c.expect(ladder.fields[0] == apply_p0(rs.coeff(-1).scale(rat(2)).euler(0)),
             "X_0 != P0 euler(2 k_-1, u)");
    c.expect(hd_classical_match() == rat(-1, 4), "classical match constant != -1/4");

    for (int j = 0; j <= 3; ++j)
        c.expect(rs.coeff(2 * j + 1).scale(rat(2)).euler(0) ==
                     ladder.gradients[static_cast<std::size_t>(j) + 1],
                 "euler(2 k_" + std::to_string(2 * j + 1) + ", u) != w_" + std::to_string(j + 1));
    c.summary = "chain j = 0..4, gradient duality j = 0..3, classical normalization";
}

void suite_casimir(Checker& c, int order, int, std::uint64_t) {
    const int N = std::max(order, 6);
    CasimirSeries cs = solve_casimir_w(N);
    c.expect(cs.wi(0) == parse_expr("u^(-1/2)", u_ring()), "w_0 != u^(-1/2)");
    c.expect(series_zero(casimir_equation_residual(cs)), "defining equation residual nonzero");
    c.expect(series_zero(casimir_residual(N)),
             "P_lambda w(lambda) nonzero through order " + std::to_string(N));
    RiccatiSolution rs = solve_riccati_hd(N);
    c.expect(series_zero(casimir_riccati_link(rs, cs)), "-(1/2) w_x + k w != z");
    c.summary = "pencil kernel through lambda-order " + std::to_string(N) + ", riccati link";
}

void suite_factorization(Checker& c, int order, int, std::uint64_t) {
    const int N = std::max(order, 8);
    c.expect(factorization_check(N),
             "operator factorization fails at truncation order " + std::to_string(N));
    c.summary = "operator identity at truncation order " + std::to_string(N);
}

void suite_currents(Checker& c, int order, int, std::uint64_t) {
    const int N = std::max(order, 6);
    AlphabetPtr free_alph = k_ring(N);
    FdBBasis fb = fdb(free_k(free_alph, N), N);
    Current c2 = current(fb, 2);
    LaurentSeries want = fb.at(2).times(DiffPoly::generator(free_alph, 0).mono_pow(-2, 1));
    c.expect(series_zero(c2.series - want), "current(2) != k_-1^(-2) k^(2)");

    RiccatiSolution rs = solve_riccati_hd(N);
    FdBBasis cb = fdb(rs.k, 4);
    c.expect(series_zero(current(cb, 2).series - LaurentSeries::z_pow(rs.k.alphabet(), 2)),
             "constrained current(2) != z^2");
    c.expect(series_zero(current(cb, 4).series - LaurentSeries::z_pow(rs.k.alphabet(), 4)),
             "constrained current(4) != z^4");

    FlowDerivation f2 = hdkp_flow(cb, 2);
    for (const auto& [m, rhs] : f2.assign)
        c.expect(rhs.is_zero(), "even flow moves k_" + std::to_string(m));

    c.expect(conservation_consistency(3, N), "(d_x + 2k) dk/dt_3 != z^2 du/dt_3");
    FlowDerivation f3 = hdkp_flow(cb, 3);
    c.expect(rat(2) * (rs.coeff(-1) * f3.assign.at(-1)) == lenard_ladder(0).fields[0],
             "2 k_-1 dk_-1/dt_3 != X_0");
    c.summary = "normalization, constraint collapse, stationary even flow, t_3 reduction";
}

void suite_central_equivalence(Checker& c, int, int family, std::uint64_t) {
    const int M = std::max(family, 8);
    CurrentFamily fam = free_family(M, 6);
    for (int i = 1; i <= M - 2; ++i)
        for (int j = 2; i + j <= M; ++j) {
            CSRhs ex = cs_rhs_explicit(i, j, fam);
            CSRhs pr = cs_rhs_projection(i, j, fam);
            const std::string tag = "(" + std::to_string(i) + "," + std::to_string(j) + ")";
            c.expect(series_zero(ex.series - pr.series), "series mismatch at " + tag);
            c.expect(ex.dK.size() == pr.dK.size(), "window mismatch at " + tag);
            for (const auto& [l, p] : pr.dK) {
                auto it = ex.dK.find(l);
                c.expect(it != ex.dK.end() && it->second == p,
                         "dK_" + std::to_string(l) + " mismatch at " + tag);
            }
        }
    c.summary = "explicit = projection for every pair with i + j <= " + std::to_string(M);
}

void suite_commutativity(Checker& c, int order, int family, std::uint64_t) {
    CurrentFamily fam = free_family(std::max(10, family), 6);
    CommuteReport rep = cs_commute_residual(2, 3, fam);
    c.expect(rep.zero, "[d_t2, d_t3] K has a nonzero coefficient");
    c.expect(rep.checked > 0, "commutator window was empty");

    CommuteReport kk = commute_check(2, 3, std::max(order, 6));
    c.expect(kk.zero, "[d_t2, d_t3] k has a nonzero coefficient");
    c.expect(kk.checked > 0, "free-ring commutator window was empty");
    c.summary = "t_2/t_3 flows commute on both the currents and the k-ring";
}

void suite_spatialization(Checker& c, int, int family, std::uint64_t) {
    const int M = std::max(family, 8);
    FdBBasis fb = fdb(free_k(k_ring(M), M), M);
    c.expect(spatialization_check(fb, M - 2), "a spatialization identity failed");
    c.summary = "t_1 flow is d_x and the riccati shape is recovered";
}

void suite_conservation_numeric(Checker& c, int, int, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double phase =
        std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
    GridField u0 = make_grid(128, [phase](double x) { return 1.0 + 0.1 * std::sin(x + phase); });

    RiccatiSolution rs = solve_riccati_hd(4);
    std::vector<Monitor> mons{{"int_sqrt_u", compile_density(rs.coeff(-1))},
                              {"int_2k1", compile_density(rs.coeff(1).scale(rat(2)))}};

    double dt = hd_stable_dt(u0);
    std::vector<std::vector<double>> drifts;
    for (int k = 0; k < 3; ++k) {
        const long steps = std::lround(0.01 / dt);
        drifts.push_back(simulate_hd(u0, dt, steps, mons, {}).drift);
        dt /= 2.0;
    }
    std::ostringstream worst;
    worst << std::scientific;
    double peak = 0.0;
    for (std::size_t m = 0; m < mons.size(); ++m) {
        peak = std::max(peak, drifts[0][m]);
        c.expect(drifts[0][m] < 1e-6, "drift of " + mons[m].name + " above 1e-6");
        for (std::size_t k = 0; k + 1 < drifts.size(); ++k)
            c.expect(drifts[k + 1][m] <= drifts[k][m] || drifts[k + 1][m] <= 1e-12,
                     "drift of " + mons[m].name + " grew past the plateau under halving");
    }
    worst << "drift peak " << peak << " over three dt levels";
    c.summary = worst.str();
}

struct SuiteDef {
    const char* name;
    void (*fn)(Checker&, int, int, std::uint64_t);
};

constexpr SuiteDef suite_defs[] = {
    {"riccati", suite_riccati},
    {"lenard", suite_lenard},
    {"casimir", suite_casimir},
    {"factorization", suite_factorization},
    {"currents", suite_currents},
    {"central-equivalence", suite_central_equivalence},
    {"commutativity", suite_commutativity},
    {"spatialization", suite_spatialization},
    {"conservation-numeric", suite_conservation_numeric},
};

} // namespace

const std::vector<std::string>& verify_suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& d : suite_defs)
            v.emplace_back(d.name);
        return v;
    }();
    return names;
}

SuiteResult run_suite(const std::string& name, int order, int family, std::uint64_t seed) {
    const SuiteDef* def = nullptr;
    for (const auto& d : suite_defs)
        if (name == d.name)
            def = &d;
    if (!def)
        throw DomainError("unknown verify suite: " + name);

    SuiteResult res;
    res.name = name;
    Checker c;
    const auto start = std::chrono::steady_clock::now();
    try {
        def->fn(c, order, family, seed);
        res.passed = c.ok;
        res.detail = c.ok ? c.summary : c.first;
    } catch (const Error& e) {
        res.passed = false;
        res.detail = std::string("error: ") + e.what();
    }
    res.checks = c.checks;
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

std::vector<SuiteResult> run_all_suites(int order, int family, std::uint64_t seed) {
    std::vector<std::future<SuiteResult>> jobs;
    for (const auto& name : verify_suite_names())
        jobs.push_back(std::async(std::launch::async, [name, order, family, seed] {
            return run_suite(name, order, family, seed);
        }));
    std::vector<SuiteResult> out;
    out.reserve(jobs.size());
    for (auto& j : jobs)
        out.push_back(j.get());
    return out;
}

std::string render_suite_report(const std::vector<SuiteResult>& results) {
    std::ostringstream out;
    int failed = 0;
    for (const auto& r : results) {
        out << (r.passed ? "PASS" : "FAIL") << "  " << r.name << "  (" << r.checks
            << " checks)";
        if (!r.detail.empty())
            out << "  " << r.detail;
        out << '\n';
        if (!r.passed)
            ++failed;
    }
    out << (failed ? "FAILED" : "OK") << ": " << (results.size() - static_cast<std::size_t>(failed))
        << "/" << results.size() << " suites\n";
    return out.str();
}

} // namespace dymforge
