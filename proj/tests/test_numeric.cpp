#include <doctest.h>

#include "hdcore.hpp"
#include "numeric.hpp"
#include "rational.hpp"

#include <cmath>
#include <numbers>

using namespace dymforge;

namespace {

constexpr double pi = std::numbers::pi;

GridField sine_state(int n, double amp) {
    return make_grid(n, [amp](double x) { return 1.0 + amp * std::sin(x); });
}

double sup_diff(const GridField& a, const GridField& b) {
    double mx = 0.0;
    for (int i = 0; i < a.n(); ++i)
        mx = std::max(mx, std::abs(a[i] - b[i]));
    return mx;
}

Monitor density_monitor(const std::string& name, const DiffPoly& p) {
    return {name, compile_density(p)};
}

// The three lowest conserved functionals of the flow: the Casimir density
// u^{1/2} and the odd riccati coefficients that generate the ladder.
std::vector<Monitor> hierarchy_monitors() {
    RiccatiSolution rs = solve_riccati_hd(6);
    return {density_monitor("int_sqrt_u", rs.coeff(-1)),
            density_monitor("int_2k1", rs.coeff(1).scale(rat(2))),
            density_monitor("int_2k3", rs.coeff(3).scale(rat(2)))};
}

} // namespace

TEST_CASE("make_grid samples [0, 2pi) and rejects tiny grids") {
    GridField g = make_grid(8, [](double x) { return std::sin(x); });
    CHECK(g.n() == 8);
    CHECK(g[0] == 0.0);
    CHECK(g[2] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(make_grid(7, [](double) { return 0.0; }), DomainError);
}

TEST_CASE("spectral derivative is exact on band-limited data") {
    GridField s = make_grid(32, [](double x) { return std::sin(x); });
    GridField c = make_grid(32, [](double x) { return std::cos(x); });
    CHECK(sup_diff(spectral_diff(s, 1), c) < 1e-14);

    GridField s3 = make_grid(32, [](double x) { return std::sin(3.0 * x); });
    GridField want;
    want.values.resize(32);
    for (int i = 0; i < 32; ++i)
        want[i] = -9.0 * s3[i];
    CHECK(sup_diff(spectral_diff(s3, 2), want) < 1e-12);

    GridField flat = make_grid(32, [](double) { return 2.5; });
    GridField d = spectral_diff(flat, 3);
    for (double v : d.values)
        CHECK(v == 0.0);

    CHECK_THROWS_AS(spectral_diff(flat, 0), DomainError);
}

TEST_CASE("the nyquist mode is dropped for odd orders and kept for even") {
    GridField f = make_grid(8, [](double x) { return std::cos(4.0 * x); });
    GridField d1 = spectral_diff(f, 1);
    for (double v : d1.values)
        CHECK(std::abs(v) < 1e-13);
    GridField d2 = spectral_diff(f, 2);
    GridField want;
    want.values.resize(8);
    for (int i = 0; i < 8; ++i)
        want[i] = -16.0 * f[i];
    CHECK(sup_diff(d2, want) < 1e-12);
}

TEST_CASE("the fd4 backend converges to the spectral one at fourth order") {
    auto gap = [](int n) {
        GridField f = make_grid(n, [](double x) { return std::exp(std::sin(x)); });
        return sup_diff(spectral_diff(f, 1), fd4_diff(f, 1));
    };
    const double e32 = gap(32);
    const double e64 = gap(64);
    CHECK(e32 > 1e-6);
    CHECK(e32 / e64 > 12.0);
    CHECK(e32 / e64 < 20.0);
}

TEST_CASE("dealias zeroes everything above a third of the band") {
    GridField f = make_grid(32, [](double x) { return std::sin(2.0 * x) + std::sin(13.0 * x); });
    GridField low = make_grid(32, [](double x) { return std::sin(2.0 * x); });
    CHECK(sup_diff(dealias(f), low) < 1e-13);
    CHECK(sup_diff(dealias(low), low) < 1e-14);
}

TEST_CASE("integrate is the periodic trapezoid rule") {
    GridField f = make_grid(64, [](double x) { return 2.0 + std::cos(x); });
    CHECK(integrate(f) == doctest::Approx(4.0 * pi).epsilon(1e-14));
    GridField s = make_grid(64, [](double x) { return std::sin(x); });
    CHECK(std::abs(integrate(s)) < 1e-14);
}

TEST_CASE("compile_density lowers a one-generator polynomial") {
    RiccatiSolution rs = solve_riccati_hd(4);
    CompiledDensity d = compile_density(rs.coeff(1).scale(rat(2)));
    CHECK(d.gen == 0);
    CHECK(d.max_order == 2);
    CHECK(d.terms.size() == 2);

    auto two = make_alphabet({{"a", GeneratorKind::Plain}, {"b", GeneratorKind::Plain}});
    DiffPoly mixed = DiffPoly::generator(two, 0) * DiffPoly::generator(two, 1, 1);
    CHECK_THROWS_AS(compile_density(mixed, 0), DomainError);
}

TEST_CASE("functional_eval integrates densities over the circle") {
    AlphabetPtr alph = u_ring();
    CompiledDensity root = compile_density(DiffPoly::generator(alph, 0).mono_root(2));
    GridField four = make_grid(64, [](double) { return 4.0; });
    CHECK(functional_eval(root, four) == doctest::Approx(4.0 * pi).epsilon(1e-14));

    // total x-derivative: the integral dies no matter the state
    CompiledDensity ux = compile_density(DiffPoly::generator(alph, 0, 1));
    GridField smooth = make_grid(64, [](double x) { return std::exp(std::sin(x)); });
    CHECK(std::abs(functional_eval(ux, smooth)) < 1e-12);
}

TEST_CASE("the backends cross-check the 2k1 functional to 1e-8") {
    RiccatiSolution rs = solve_riccati_hd(4);
    CompiledDensity d = compile_density(rs.coeff(1).scale(rat(2)));
    auto gap = [&](int n) {
        GridField u = sine_state(n, 0.1);
        const double a = functional_eval(d, u, DiffBackend::spectral);
        const double b = functional_eval(d, u, DiffBackend::fd4);
        return std::abs(a - b) / std::abs(a);
    };
    const double g128 = gap(128);
    const double g256 = gap(256);
    const double g512 = gap(512);
    CHECK(g512 < 1e-8);
    // the disagreement itself shrinks at the fd4 order
    CHECK(g128 / g256 > 12.0);
    CHECK(g128 / g256 < 20.0);
    CHECK(g256 / g512 > 12.0);
    CHECK(g256 / g512 < 20.0);
}

TEST_CASE("radical densities demand positive states") {
    AlphabetPtr alph = u_ring();
    CompiledDensity root = compile_density(DiffPoly::generator(alph, 0).mono_root(2));
    GridField dips = make_grid(32, [](double x) { return std::sin(x); });
    CHECK_THROWS_AS(functional_eval(root, dips), DomainError);

    // plain powers never look at the sign
    CompiledDensity square = compile_density(DiffPoly::generator(alph, 0).pow(2));
    CHECK(functional_eval(square, dips) == doctest::Approx(pi).epsilon(1e-13));
}

TEST_CASE("hd_rhs matches the jet-expanded symbolic field") {
    AlphabetPtr alph = u_ring();
    DiffPoly field = DiffPoly::generator(alph, 0).mono_pow(-1, 2).diff_x(3).scale(-rat(1, 2));
    GridField u = sine_state(128, 0.1);
    std::vector<GridField> jets{u, spectral_diff(u, 1), spectral_diff(u, 2), spectral_diff(u, 3)};
    GridField want;
    want.values.resize(128);
    for (int i = 0; i < 128; ++i)
        want[i] = field.eval([&](JetVar v) { return jets[static_cast<std::size_t>(v.order)][i]; });
    CHECK(sup_diff(hd_rhs(u), want) < 1e-10);

    GridField one = make_grid(128, [](double) { return 1.0; });
    for (double v : hd_rhs(one).values)
        CHECK(v == 0.0);
}

TEST_CASE("rk4_evolve flags non-finite states") {
    GridField u = sine_state(32, 0.1);
    GridRhs blowup = [](const GridField& s) {
        GridField out = s;
        for (double& v : out.values)
            v *= 1e200;
        return out;
    };
    CHECK_THROWS_AS(rk4_evolve(u, blowup, 1.0, 3), NonFiniteStateError);
    CHECK_THROWS_AS(rk4_evolve(u, blowup, 0.0, 1), DomainError);
}

TEST_CASE("hd_stable_dt follows the dispersive bound") {
    GridField u128 = sine_state(128, 0.1);
    GridField u64 = sine_state(64, 0.1);
    // halving n halves the dealiased band, so the step grows eightfold
    CHECK(hd_stable_dt(u64) / hd_stable_dt(u128) == doctest::Approx(8.0).epsilon(1e-12));
    GridField one = make_grid(128, [](double) { return 1.0; });
    GridField four = make_grid(128, [](double) { return 4.0; });
    CHECK(hd_stable_dt(four) / hd_stable_dt(one) == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(hd_stable_dt(one, 1.0) / hd_stable_dt(one, 0.5) == doctest::Approx(2.0).epsilon(1e-12));
    GridField bad = make_grid(32, [](double x) { return std::sin(x); });
    CHECK_THROWS_AS(hd_stable_dt(bad), DomainError);
    CHECK_THROWS_AS(hd_stable_dt(one, 0.0), DomainError);
}

TEST_CASE("simulate_hd conserves the hierarchy functionals") {
    GridField u0 = sine_state(128, 0.1);
    const double dt = hd_stable_dt(u0);
    const long steps = std::lround(0.01 / dt);
    SimReport rep = simulate_hd(u0, dt, steps, hierarchy_monitors());

    REQUIRE(rep.drift.size() == 3);
    for (double d : rep.drift)
        CHECK(d < 1e-10);

    REQUIRE(rep.columns.size() == 8);
    CHECK(rep.columns[0] == "step");
    CHECK(rep.columns[2] == "int_sqrt_u");
    CHECK(rep.columns[5] == "drift_int_sqrt_u");
    REQUIRE(rep.rows.size() == static_cast<std::size_t>(steps) + 1);
    CHECK(rep.rows.front()[0] == 0.0);
    CHECK(rep.rows.front()[5] == 0.0);
    CHECK(rep.rows.back()[0] == static_cast<double>(steps));
    CHECK(rep.final_state.n() == 128);
}

TEST_CASE("a flat state is a bitwise fixed point") {
    GridField one = make_grid(128, [](double) { return 1.0; });
    SimReport rep = simulate_hd(one, 1e-4, 100, hierarchy_monitors(), {.sample_every = 50});
    for (double d : rep.drift)
        CHECK(d == 0.0);
    for (double v : rep.final_state.values)
        CHECK(v == 1.0);
}

TEST_CASE("halving dt keeps the drift inside the roundoff plateau") {
    // At these parameters the time error sits far below roundoff, so the
    // refinement study bottoms out: the calibrated plateau is 1e-12 and
    // every halving must stay monotone up to it.
    GridField u0 = sine_state(128, 0.1);
    std::vector<Monitor> mons = hierarchy_monitors();
    double dt = hd_stable_dt(u0);
    std::vector<std::vector<double>> drifts;
    for (int k = 0; k < 3; ++k) {
        const long steps = std::lround(0.01 / dt);
        drifts.push_back(simulate_hd(u0, dt, steps, mons, {.sample_every = 10000}).drift);
        dt /= 2.0;
    }
    for (std::size_t k = 0; k + 1 < drifts.size(); ++k)
        for (std::size_t m = 0; m < mons.size(); ++m) {
            const bool monotone = drifts[k + 1][m] <= drifts[k][m];
            const bool plateaued = drifts[k + 1][m] <= 1e-12;
            CHECK((monotone || plateaued));
        }
}

TEST_CASE("drift falls steeply under spatial refinement") {
    RiccatiSolution rs = solve_riccati_hd(6);
    std::vector<Monitor> mons{density_monitor("int_2k1", rs.coeff(1).scale(rat(2))),
                              density_monitor("int_2k3", rs.coeff(3).scale(rat(2)))};
    std::vector<std::vector<double>> drifts;
    for (int n : {32, 48, 64, 96}) {
        GridField u0 = sine_state(n, 0.5);
        drifts.push_back(simulate_hd(u0, 1e-4, 500, mons, {.sample_every = 10000}).drift);
    }
    CHECK(drifts[0][1] > 1e-5); // coarse grid visibly leaks
    for (std::size_t k = 0; k + 1 < drifts.size(); ++k)
        for (std::size_t m = 0; m < mons.size(); ++m)
            CHECK(drifts[k][m] > 10.0 * drifts[k + 1][m]);
}

TEST_CASE("the solution self-converges at fourth order in time") {
    GridField u0 = sine_state(64, 0.5);
    const double T = 0.05;
    GridField fin[3];
    for (int k = 0; k < 3; ++k) {
        const long steps = 146L << k;
        fin[k] = simulate_hd(u0, T / steps, steps, {}, {}).final_state;
    }
    const double e1 = sup_diff(fin[0], fin[1]);
    const double e2 = sup_diff(fin[1], fin[2]);
    CHECK(e1 > 1e-9);
    CHECK(e1 / e2 > 10.0);
    CHECK(e1 / e2 < 22.0);
}

TEST_CASE("the classical q-form evolves in lockstep with the u-form") {
    GridField u0 = sine_state(128, 0.1);
    const double dt = hd_stable_dt(u0);
    const long steps = std::lround(0.01 / dt);
    GridField ufin = simulate_hd(u0, dt, steps, {}, {}).final_state;

    GridField q0;
    q0.values.resize(128);
    for (int i = 0; i < 128; ++i)
        q0[i] = u0[i] - 1.0;
    const double scale = to_double(hd_classical_match());
    auto run_q = [&](double c) {
        return rk4_evolve(q0, [&, c](const GridField& q) { return hd_rhs_classical(q, c); }, dt, steps);
    };
    GridField qfin = run_q(scale);
    double mx = 0.0;
    for (int i = 0; i < 128; ++i)
        mx = std::max(mx, std::abs(ufin[i] - (1.0 + qfin[i])));
    CHECK(mx < 1e-12);

    // flipping the sign of the match constant is a different vector field
    GridField qwrong = run_q(-scale);
    double wrong = 0.0;
    for (int i = 0; i < 128; ++i)
        wrong = std::max(wrong, std::abs(ufin[i] - (1.0 + qwrong[i])));
    CHECK(wrong > 1e-4);
}

TEST_CASE("losing positivity aborts the run") {
    GridField u0 = sine_state(128, 0.1);
    const double dt = hd_stable_dt(u0, 1.2); // past the observed boundary
    CHECK_THROWS_AS(simulate_hd(u0, dt, std::lround(0.01 / dt), {}, {}), DomainError);

    GridField touching = make_grid(32, [](double x) { return 1.0 + std::sin(x); });
    CHECK_THROWS_AS(simulate_hd(touching, 1e-5, 2, {}, {}), DomainError);
}

TEST_CASE("simulate_hd validates its arguments") {
    GridField u0 = sine_state(32, 0.1);
    CHECK_THROWS_AS(simulate_hd(u0, 0.0, 10, {}, {}), DomainError);
    CHECK_THROWS_AS(simulate_hd(u0, 1e-5, 0, {}, {}), DomainError);
    CHECK_THROWS_AS(simulate_hd(u0, 1e-5, 10, {}, {.sample_every = 0}), DomainError);
}

TEST_CASE("sampling respects the requested cadence") {
    GridField u0 = sine_state(32, 0.1);
    SimReport rep = simulate_hd(u0, 1e-5, 10, hierarchy_monitors(), {.sample_every = 4});
    REQUIRE(rep.rows.size() == 4); // steps 0, 4, 8, 10
    CHECK(rep.rows[1][0] == 4.0);
    CHECK(rep.rows.back()[0] == 10.0);
    CHECK(rep.rows.back()[1] == doctest::Approx(1e-4).epsilon(1e-12));
}

TEST_CASE("reports serialize to csv and json") {
    GridField u0 = sine_state(32, 0.1);
    SimReport rep = simulate_hd(u0, 1e-5, 4, hierarchy_monitors(), {.sample_every = 2});
    const std::string csv = rep.to_csv();
    CHECK(csv.rfind("step,t,int_sqrt_u", 0) == 0);
    CHECK(csv.find("drift_int_2k3") != std::string::npos);
    const std::string js = rep.to_json();
    CHECK(js.find("\"columns\"") != std::string::npos);
    CHECK(js.find("\"drift\"") != std::string::npos);
    CHECK(js.find("\"rows\"") != std::string::npos);
}
