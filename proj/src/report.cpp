#include "report.hpp"

#include "central.hpp"
#include "errors.hpp"
#include "expr_io.hpp"
#include "hdcore.hpp"
#include "hdkp.hpp"
#include "rational.hpp"
#include "verify.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include <unistd.h>

namespace dymforge {

namespace {

namespace fs = std::filesystem;

std::string degree_label(int d) {
    if (d == 0)
        return "1";
    if (d == 1)
        return "z";
    return "z^(" + std::to_string(d) + ")";
}

std::string render_series_text(const LaurentSeries& s) {
    std::string out;
    for (int d = s.top(); !s.coeffs().empty() && d >= s.coeffs().begin()->first; --d) {
        const DiffPoly c = s.coeff_at(d);
        if (c.is_zero())
            continue;
        if (!out.empty())
            out += " + ";
        if (c.is_constant() && c.constant_value() == 1 && d != 0)
            out += degree_label(d);
        else if (c.is_monomial() && d != 0)
            out += render_text(c) + "*" + degree_label(d);
        else if (d != 0)
            out += "(" + render_text(c) + ")*" + degree_label(d);
        else
            out += "(" + render_text(c) + ")";
    }
    return out.empty() ? "0" : out;
}

std::string render_series_latex(const LaurentSeries& s) {
    std::string out;
    for (int d = s.top(); !s.coeffs().empty() && d >= s.coeffs().begin()->first; --d) {
        const DiffPoly c = s.coeff_at(d);
        if (c.is_zero())
            continue;
        if (!out.empty())
            out += " + ";
        std::string zpart = d == 0 ? "" : (d == 1 ? "z" : "z^{" + std::to_string(d) + "}");
        if (c.is_constant() && c.constant_value() == 1 && d != 0)
            out += zpart;
        else
            out += "\\left(" + render_latex(c) + "\\right)" + (zpart.empty() ? "" : " " + zpart);
    }
    return out.empty() ? "0" : out;
}

// Cache lookups must never change results or break a command: a hit is
// trusted only after a shape check, and write failures are swallowed.
RiccatiSolution riccati_cached(int N, const std::string& cache_dir) {
    const fs::path file = cache_dir.empty()
                              ? fs::path()
                              : fs::path(cache_dir) / ("riccati-" + std::to_string(N) + ".json");
    if (!cache_dir.empty()) {
        std::ifstream in(file);
        if (in) {
            std::stringstream buf;
            buf << in.rdbuf();
            try {
                LaurentSeries k = LaurentSeries::from_json(buf.str(), u_ring());
                if (k.top() == 1 && k.floor() && *k.floor() == -(N - 1))
                    return RiccatiSolution{std::move(k), N - 1, 0};
            } catch (const Error&) {
            }
        }
    }
    RiccatiSolution rs = solve_riccati_hd(N);
    if (!cache_dir.empty()) {
        std::error_code ec;
        fs::create_directories(cache_dir, ec);
        const fs::path tmp = file.string() + ".tmp." + std::to_string(::getpid());
        std::ofstream out(tmp);
        if (out) {
            out << rs.k.to_json();
            out.close();
            fs::rename(tmp, file, ec);
            if (ec)
                fs::remove(tmp, ec);
        }
    }
    return rs;
}

std::string label_k(int j) {
    return "k_" + std::to_string(j);
}

} // namespace

OutputFormat parse_format(const std::string& name) {
    if (name == "text")
        return OutputFormat::text;
    if (name == "json")
        return OutputFormat::json;
    if (name == "latex")
        return OutputFormat::latex;
    if (name == "csv")
        return OutputFormat::csv;
    throw DomainError("unknown output format: " + name);
}

std::string render_hierarchy(int order, OutputFormat f, const std::string& cache_dir) {
    if (order < 0)
        throw DomainError("hierarchy needs order >= 0");
    if (f == OutputFormat::csv)
        throw DomainError("csv output is only available for simulate");

    RiccatiSolution rs = riccati_cached(order + 1, cache_dir);
    const int ladder_n = order == 0 ? -1 : (order + 1) / 2;
    HamiltonianLadder ladder;
    if (ladder_n >= 0)
        ladder = lenard_ladder(ladder_n);

    if (f == OutputFormat::json) {
        nlohmann::json j;
        j["order"] = order;
        j["k_series"] = nlohmann::json::parse(rs.k.to_json());
        auto& coeffs = j["coefficients"] = nlohmann::json::array();
        for (int i = -1; i <= (order == 0 ? -1 : order); ++i)
            coeffs.push_back({{"index", i}, {"expr", render_text(rs.coeff(i))}});
        auto& dens = j["densities"] = nlohmann::json::array();
        auto& grads = j["gradients"] = nlohmann::json::array();
        auto& fields = j["fields"] = nlohmann::json::array();
        for (int i = 0; i <= ladder_n; ++i) {
            dens.push_back(render_text(ladder.densities[static_cast<std::size_t>(i)]));
            grads.push_back(render_text(ladder.gradients[static_cast<std::size_t>(i)]));
            fields.push_back(render_text(ladder.fields[static_cast<std::size_t>(i)]));
        }
        return j.dump(2) + "\n";
    }

    std::ostringstream out;
    if (f == OutputFormat::text) {
        for (int i = -1; i <= (order == 0 ? -1 : order); ++i)
            out << label_k(i) << " = " << render_text(rs.coeff(i)) << '\n';
        for (int i = 0; i <= ladder_n; ++i)
            out << "density 2" << label_k(2 * i - 1) << " = "
                << render_text(ladder.densities[static_cast<std::size_t>(i)]) << '\n';
        for (int i = 0; i <= ladder_n; ++i)
            out << "gradient w_" << i << " = "
                << render_text(ladder.gradients[static_cast<std::size_t>(i)]) << '\n';
        for (int i = 0; i <= ladder_n; ++i)
            out << "field X_" << i << " = "
                << render_text(ladder.fields[static_cast<std::size_t>(i)]) << '\n';
        return out.str();
    }

    out << "\\begin{aligned}\n";
    for (int i = -1; i <= (order == 0 ? -1 : order); ++i)
        out << "k_{" << i << "} &= " << render_latex(rs.coeff(i)) << " \\\\\n";
    for (int i = 0; i <= ladder_n; ++i)
        out << "2k_{" << 2 * i - 1 << "} &= "
            << render_latex(ladder.densities[static_cast<std::size_t>(i)]) << " \\\\\n";
    for (int i = 0; i <= ladder_n; ++i)
        out << "w_{" << i << "} &= "
            << render_latex(ladder.gradients[static_cast<std::size_t>(i)]) << " \\\\\n";
    for (int i = 0; i <= ladder_n; ++i)
        out << "X_{" << i << "} &= "
            << render_latex(ladder.fields[static_cast<std::size_t>(i)]) << " \\\\\n";
    out << "\\end{aligned}\n";
    return out.str();
}

std::string render_currents(int lmax, int order, bool constrained, OutputFormat f,
                            const std::string& cache_dir) {
    if (lmax < 2)
        throw DomainError("currents need lmax >= 2");
    if (f == OutputFormat::csv)
        throw DomainError("csv output is only available for simulate");

    FdBBasis basis;
    if (constrained) {
        RiccatiSolution rs = riccati_cached(std::max(order, 6) + 1, cache_dir);
        basis = fdb(rs.k, lmax);
    } else {
        const int W = std::max(order, lmax);
        basis = fdb(free_k(k_ring(W), W), W);
    }

    std::vector<Current> cs;
    for (int l = 2; l <= lmax; ++l)
        cs.push_back(current(basis, l));

    if (f == OutputFormat::json) {
        nlohmann::json j;
        j["mode"] = constrained ? "constrained" : "free";
        j["lmax"] = lmax;
        auto& arr = j["currents"] = nlohmann::json::array();
        for (const auto& c : cs)
            arr.push_back(nlohmann::json::parse(c.to_json()));
        return j.dump(2) + "\n";
    }

    std::ostringstream out;
    for (const auto& c : cs) {
        if (f == OutputFormat::text) {
            out << "K^(" << c.index << ") =";
            if (constrained) {
                out << " " << render_series_text(c.series) << '\n';
                continue;
            }
            bool first = true;
            for (const auto& [jj, coeff] : c.combo) {
                out << (first ? " " : " + ");
                first = false;
                if (coeff.is_constant() && coeff.constant_value() == 1)
                    out << "k^(" << jj << ")";
                else if (coeff.is_monomial())
                    out << render_text(coeff) << "*k^(" << jj << ")";
                else
                    out << "(" << render_text(coeff) << ")*k^(" << jj << ")";
            }
            out << '\n';
        } else {
            out << "K^{(" << c.index << ")} &=";
            if (constrained) {
                out << " " << render_series_latex(c.series) << " \\\\\n";
                continue;
            }
            bool first = true;
            for (const auto& [jj, coeff] : c.combo) {
                out << (first ? " " : " + ");
                first = false;
                out << "\\left(" << render_latex(coeff) << "\\right) k^{(" << jj << ")}";
            }
            out << " \\\\\n";
        }
    }
    if (f == OutputFormat::latex)
        return "\\begin{aligned}\n" + out.str() + "\\end{aligned}\n";
    return out.str();
}

std::string render_central(int family, int order, OutputFormat f) {
    if (f == OutputFormat::csv)
        throw DomainError("csv output is only available for simulate");
    CurrentFamily fam = free_family(family, order);

    if (f == OutputFormat::json) {
        nlohmann::json j;
        j["family"] = family;
        j["order"] = order;
        auto& cur = j["currents"] = nlohmann::json::array();
        for (int i = 2; i <= family; ++i)
            cur.push_back(nlohmann::json::parse(fam.at(i).to_json()));
        auto& eqs = j["equations"] = nlohmann::json::array();
        for (int i = 1; i + 2 <= family; ++i)
            for (int jj = 2; i + jj <= family; ++jj) {
                CSRhs rhs = cs_rhs_projection(i, jj, fam);
                nlohmann::json eq{{"i", i}, {"j", jj}};
                for (const auto& [l, p] : rhs.dK)
                    eq["dK"][fam.alph->spec(cs_gen(fam, i, l)).name] = render_text(p);
                eqs.push_back(std::move(eq));
            }
        return j.dump(2) + "\n";
    }

    std::ostringstream out;
    const bool latex = f == OutputFormat::latex;
    if (latex)
        out << "\\begin{aligned}\n";
    for (int i = 1; i <= family; ++i) {
        if (latex)
            out << "K^{(" << i << ")} &= " << render_series_latex(fam.at(i)) << " \\\\\n";
        else
            out << "K^(" << i << ") = " << render_series_text(fam.at(i)) << '\n';
    }
    for (int i = 1; i + 2 <= family; ++i)
        for (int jj = 2; i + jj <= family; ++jj) {
            CSRhs rhs = cs_rhs_projection(i, jj, fam);
            for (const auto& [l, p] : rhs.dK) {
                const std::string name = fam.alph->spec(cs_gen(fam, i, l)).name;
                if (latex)
                    out << "\\partial_{t_{" << jj << "}} \\mathrm{" << name << "} &= "
                        << render_latex(p) << " \\\\\n";
                else
                    out << "d " << name << " / d t_" << jj << " = " << render_text(p) << '\n';
            }
        }
    if (latex)
        out << "\\end{aligned}\n";
    return out.str();
}

std::string render_simulate(const SimulateRequest& req, OutputFormat f) {
    if (req.dt < 0.0)
        throw DomainError("simulate needs dt >= 0 (0 picks the stability rule)");
    if (req.steps < 0)
        throw DomainError("simulate needs steps >= 0 (0 runs to t = 0.01)");
    std::mt19937_64 rng(req.seed);
    const double phase =
        std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
    GridField u0 =
        make_grid(req.n, [phase](double x) { return 1.0 + 0.1 * std::sin(x + phase); });
    const double dt = req.dt > 0.0 ? req.dt : hd_stable_dt(u0);
    const long steps = req.steps > 0 ? req.steps : std::max(1L, std::lround(0.01 / dt));

    RiccatiSolution rs = solve_riccati_hd(6);
    std::vector<Monitor> mons{{"int_sqrt_u", compile_density(rs.coeff(-1))},
                              {"int_2k1", compile_density(rs.coeff(1).scale(rat(2)))},
                              {"int_2k3", compile_density(rs.coeff(3).scale(rat(2)))}};
    SimReport rep = simulate_hd(u0, dt, steps, mons, {.sample_every = req.sample_every});

    if (f == OutputFormat::csv)
        return rep.to_csv();
    if (f == OutputFormat::json) {
        nlohmann::json j;
        j["n"] = req.n;
        j["dt"] = dt;
        j["steps"] = steps;
        j["seed"] = req.seed;
        j["report"] = nlohmann::json::parse(rep.to_json());
        return j.dump(2) + "\n";
    }
    if (f == OutputFormat::latex)
        throw DomainError("latex output is not available for simulate");

    std::ostringstream out;
    out << std::setprecision(6) << std::scientific;
    out << "n " << req.n << "  dt " << dt << "  steps " << steps << "  t_end " << steps * dt
        << '\n';
    const auto& first = rep.rows.front();
    const auto& last = rep.rows.back();
    for (std::size_t m = 0; m < mons.size(); ++m)
        out << mons[m].name << "  first " << first[2 + m] << "  last " << last[2 + m]
            << "  drift " << rep.drift[m] << '\n';
    return out.str();
}

std::string render_verify(const std::string& suite, int order, int family,
                          std::uint64_t seed, OutputFormat f, bool& all_passed) {
    std::vector<SuiteResult> results;
    if (suite == "all")
        results = run_all_suites(order, family, seed);
    else
        results.push_back(run_suite(suite, order, family, seed));
    all_passed = true;
    for (const auto& r : results)
        all_passed = all_passed && r.passed;

    if (f == OutputFormat::json) {
        nlohmann::json j;
        j["passed"] = all_passed;
        auto& arr = j["results"] = nlohmann::json::array();
        for (const auto& r : results)
            arr.push_back({{"name", r.name},
                           {"passed", r.passed},
                           {"checks", r.checks},
                           {"detail", r.detail}});
        return j.dump(2) + "\n";
    }
    if (f != OutputFormat::text)
        throw DomainError("verify renders as text or json");
    return render_suite_report(results);
}

} // namespace dymforge
