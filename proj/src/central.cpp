#include "central.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace dymforge {

const LaurentSeries& CurrentFamily::at(int i) const {
    if (i < 1 || i > M)
        throw InsufficientFamilyError("current K^(" + std::to_string(i) +
                                      ") outside the family 1.." + std::to_string(M));
    return K[static_cast<size_t>(i - 1)];
}

DiffPoly CurrentFamily::coeff(int i, int l) const {
    return at(i).coeff_at(l == -1 ? 1 : -l);
}

static std::string slot_name(int i, int l) {
    return "K" + std::to_string(i) + "_" + (l == -1 ? "m1" : std::to_string(l));
}

CurrentFamily free_family(int M, int N) {
    if (M < 2 || N < 0)
        throw DomainError("free family needs M >= 2 and N >= 0");
    std::vector<GeneratorSpec> gens;
    gens.reserve(static_cast<size_t>(M * (N + 2)));
    for (int i = 1; i <= M; ++i)
        for (int l = -1; l <= N; ++l)
            gens.push_back({slot_name(i, l), GeneratorKind::Plain});
    CurrentFamily fam;
    fam.M = M;
    fam.N = N;
    fam.alph = make_alphabet(std::move(gens));
    fam.symbolic = true;
    for (int i = 1; i <= M; ++i) {
        std::map<int, DiffPoly> c;
        if (i >= 2)
            c.emplace(i, DiffPoly::constant(fam.alph, Rational(1)));
        c.emplace(1, DiffPoly::generator(fam.alph, cs_gen(fam, i, -1)));
        for (int l = 0; l <= N; ++l)
            c.emplace(-l, DiffPoly::generator(fam.alph, cs_gen(fam, i, l)));
        fam.K.push_back(LaurentSeries::from_coeffs(fam.alph, std::move(c), std::max(i, 1), -N));
    }
    return fam;
}

CurrentFamily family_from_k(const FdBBasis& basis, int M, int tail_depth) {
    if (M < 2)
        throw DomainError("family needs M >= 2");
    CurrentFamily fam;
    fam.M = M;
    fam.alph = basis.k.alphabet();
    fam.symbolic = false;
    fam.K.push_back(basis.at(1));
    for (int i = 2; i <= M; ++i)
        fam.K.push_back(current(basis, i).series);
    if (tail_depth >= 0)
        fam.N = tail_depth;
    else if (auto f = basis.k.floor())
        fam.N = -*f;
    else
        fam.N = M;
    return fam;
}

int cs_gen(const CurrentFamily& fam, int i, int l) {
    if (!fam.symbolic)
        throw DomainError("symbol slots exist only in the free-symbolic family");
    if (i < 1 || i > fam.M || l < -1 || l > fam.N)
        throw DomainError("no slot " + slot_name(i, l) + " in this family");
    return (i - 1) * (fam.N + 2) + (l + 1);
}

std::pair<int, int> cs_index(const CurrentFamily& fam, int gen) {
    if (!fam.symbolic || gen < 0 || gen >= fam.M * (fam.N + 2))
        throw DomainError("generator outside the family layout");
    return {gen / (fam.N + 2) + 1, gen % (fam.N + 2) - 1};
}

PiSplit pi_split(const LaurentSeries& s, const CurrentFamily& fam) {
    if (s.top() > fam.M)
        throw InsufficientFamilyError("series reaches z^" + std::to_string(s.top()) +
                                      " but the family stops at K^(" + std::to_string(fam.M) +
                                      ")");
    PiSplit out;
    out.plus = LaurentSeries::zero(s.alphabet());
    for (int d = 2; d <= s.top(); ++d) {
        DiffPoly sd = s.coeff_at(d);
        if (sd.is_zero())
            continue;
        out.plus_coords.emplace(d, sd);
        out.plus = out.plus + fam.at(d).times(sd);
    }
    out.minus = s - out.plus;
    return out;
}

static void require_pair(int i, int j, const CurrentFamily& fam) {
    if (i < 1 || j < 1)
        throw DomainError("current and flow indices start at 1");
    if (i + j > fam.M)
        throw InsufficientFamilyError("flow t_" + std::to_string(j) + " on K^(" +
                                      std::to_string(i) + ") needs K^(" + std::to_string(i + j) +
                                      "); family stops at K^(" + std::to_string(fam.M) + ")");
}

// Tail coefficients of the right-hand side: every degree <= 1 known at this
// truncation, keyed by l (degree 1 <-> l = -1).
static void fill_dK(CSRhs& r, const CurrentFamily& fam) {
    int lowest = -fam.N;
    if (auto f = r.series.floor(); f && *f > lowest)
        lowest = *f;
    for (int d = 1; d >= lowest; --d)
        r.dK.emplace(d == 1 ? -1 : -d, r.series.coeff_at(d));
}

CSRhs cs_rhs_projection(int i, int j, const CurrentFamily& fam) {
    require_pair(i, j, fam);
    CSRhs out;
    out.i = i;
    out.j = j;
    out.series = -pi_split(fam.at(j) * fam.at(i), fam).minus;
    fill_dK(out, fam);
    return out;
}

CSRhs cs_rhs_explicit(int i, int j, const CurrentFamily& fam) {
    if (j < 2)
        throw DomainError("the explicit form is printed for j >= 2 only");
    require_pair(i, j, fam);
    LaurentSeries rhs = -(fam.at(i) * fam.at(j));
    if (i >= 2) {
        rhs = rhs + fam.at(i + j);
        rhs = rhs + fam.at(j + 1).times(fam.coeff(i, -1));
        rhs = rhs + fam.at(i + 1).times(fam.coeff(j, -1));
        rhs = rhs + fam.at(2).times(fam.coeff(i, -1) * fam.coeff(j, -1));
        rhs = rhs + fam.at(j).times(fam.coeff(i, 0));
        rhs = rhs + fam.at(i).times(fam.coeff(j, 0));
        for (int l = 1; l <= i - 2; ++l)
            rhs = rhs + fam.at(i - l).times(fam.coeff(j, l));
        for (int l = 1; l <= j - 2; ++l)
            rhs = rhs + fam.at(j - l).times(fam.coeff(i, l));
    } else {
        rhs = rhs + fam.at(j + 1).times(fam.coeff(1, -1));
        rhs = rhs + fam.at(j).times(fam.coeff(1, 0));
        rhs = rhs + fam.at(2).times(fam.coeff(j, -1) * fam.coeff(1, -1));
        for (int l = 1; l <= j - 2; ++l)
            rhs = rhs + fam.at(j - l).times(fam.coeff(1, l));
    }
    CSRhs out;
    out.i = i;
    out.j = j;
    out.series = rhs;
    fill_dK(out, fam);
    return out;
}

// Chain rule over the free symbols; nullopt when some needed symbol has no
// assignment at this truncation.
static std::optional<DiffPoly> lie_cs(const DiffPoly& p, const std::map<int, DiffPoly>& assign) {
    DiffPoly acc = DiffPoly::zero(p.alphabet());
    for (int g : p.generators_present()) {
        DiffPoly d = p.partial(JetVar{g, 0});
        if (d.is_zero())
            continue;
        auto it = assign.find(g);
        if (it == assign.end())
            return std::nullopt;
        acc += d * it->second;
    }
    return acc;
}

CommuteReport cs_commute_residual(int i, int j, const CurrentFamily& fam, int depth) {
    if (i < 1 || j < 1)
        throw DomainError("flow indices start at 1");
    if (i + j + std::max(i, j) > fam.M)
        throw InsufficientFamilyError("second derivatives of the (" + std::to_string(i) + "," +
                                      std::to_string(j) + ") pair need K^(" +
                                      std::to_string(i + j + std::max(i, j)) + ")");
    CommuteReport rep;
    if (!fam.symbolic) {
        // only the degenerate case is decidable here: every flow identically
        // zero means the commutator is zero without any chain rule
        for (int m = 1; m + std::max(i, j) <= fam.M; ++m) {
            for (int jj : {i, j}) {
                CSRhs r = cs_rhs_projection(m, jj, fam);
                if (!r.series.known_zero())
                    throw DomainError("commutator check needs the free-symbolic family");
            }
            ++rep.checked;
            rep.max_checked = m;
        }
        return rep;
    }
    auto flow = [&](int jj) {
        std::map<int, DiffPoly> assign;
        for (int m = 1; m + jj <= fam.M; ++m) {
            CSRhs r = cs_rhs_projection(m, jj, fam);
            for (const auto& [l, p] : r.dK)
                assign.emplace(cs_gen(fam, m, l), p);
        }
        return assign;
    };
    std::map<int, DiffPoly> fi = flow(i);
    std::map<int, DiffPoly> fj = flow(j);
    for (int m = 1; m + std::max(i, j) <= fam.M; ++m) {
        CSRhs rj = cs_rhs_projection(m, j, fam);
        CSRhs ri = cs_rhs_projection(m, i, fam);
        for (const auto& [l, pj] : rj.dK) {
            if (l > depth)
                continue;
            auto pi = ri.dK.find(l);
            if (pi == ri.dK.end())
                continue;
            std::optional<DiffPoly> a = lie_cs(pj, fi);
            std::optional<DiffPoly> b = lie_cs(pi->second, fj);
            if (!a || !b)
                continue;
            ++rep.checked;
            rep.max_checked = std::max(rep.max_checked, m);
            if (!(*a - *b).is_zero())
                rep.zero = false;
        }
    }
    return rep;
}

bool spatialization_check(const FdBBasis& basis, int M) {
    CurrentFamily fam = family_from_k(basis, M);
    const LaurentSeries& k = fam.at(1);
    DiffPoly km1 = fam.coeff(1, -1);
    LaurentSeries r7 = l_diff_x(k) + k * k - fam.at(2).times(km1 * km1);
    if (!r7.known_zero())
        return false;
    for (int j = 2; j + 1 <= M; ++j) {
        LaurentSeries lhs = l_diff_x(fam.at(j)) + k * fam.at(j);
        LaurentSeries rhs = fam.at(j + 1).times(km1) + fam.at(j).times(fam.coeff(1, 0)) +
                            fam.at(2).times(fam.coeff(j, -1) * km1);
        for (int l = 1; l <= j - 2; ++l)
            rhs = rhs + fam.at(j - l).times(fam.coeff(1, l));
        if (!(lhs - rhs).known_zero())
            return false;
    }
    for (int j = 1; j + 1 <= M; ++j) {
        CSRhs t1 = cs_rhs_projection(j, 1, fam);
        if (!(t1.series - l_diff_x(fam.at(j))).known_zero())
            return false;
    }
    return true;
}

static int slot_of(int i, int l, int N) { return (i - 1) * (N + 2) + (l + 1); }

double& CSState::at(int i, int l) {
    return v.at(static_cast<size_t>(slot_of(i, l, N)));
}

double CSState::at(int i, int l) const {
    return v.at(static_cast<size_t>(slot_of(i, l, N)));
}

CSState cs_state_zero(int M, int N) {
    CSState st;
    st.M = M;
    st.N = N;
    st.v.assign(static_cast<size_t>(M * (N + 2)), 0.0);
    return st;
}

CSState cs_sample(const CurrentFamily& fam, int M, int N,
                  const std::function<double(JetVar)>& point) {
    if (M > fam.M)
        throw InsufficientFamilyError("sampling K^(" + std::to_string(M) +
                                      ") from a family of size " + std::to_string(fam.M));
    CSState st = cs_state_zero(M, N);
    for (int i = 1; i <= M; ++i)
        for (int l = -1; l <= N; ++l)
            st.at(i, l) = fam.coeff(i, l).eval(point);
    return st;
}

std::string CSTrajectory::to_csv() const {
    std::ostringstream out;
    out << std::setprecision(17);
    for (size_t c = 0; c < columns.size(); ++c)
        out << (c ? "," : "") << columns[c];
    out << "\n";
    for (const auto& row : rows) {
        for (size_t c = 0; c < row.size(); ++c)
            out << (c ? "," : "") << row[c];
        out << "\n";
    }
    return out.str();
}

std::string CSTrajectory::to_json() const {
    nlohmann::json j;
    j["columns"] = columns;
    j["rows"] = rows;
    return j.dump();
}

namespace {

// evaluation plan for one polynomial over the slot vector: plain products of
// integer powers, coefficients pre-converted to double
struct SlotTerm {
    double c = 0.0;
    std::vector<std::pair<int, int>> pows; // slot, exponent
};

struct SlotPoly {
    std::vector<SlotTerm> terms;

    double eval(const std::vector<double>& v) const {
        double acc = 0.0;
        for (const SlotTerm& t : terms) {
            double p = t.c;
            for (auto [slot, e] : t.pows)
                for (int r = 0; r < e; ++r)
                    p *= v[static_cast<size_t>(slot)];
            acc += p;
        }
        return acc;
    }
};

SlotPoly compile_slot_poly(const DiffPoly& p) {
    SlotPoly out;
    for (const DiffMono& m : p.terms()) {
        SlotTerm t;
        t.c = to_double(m.coeff);
        for (const auto& [jv, e2] : m.exps) {
            if (jv.order != 0 || e2 <= 0 || e2 % 2 != 0)
                throw DomainError("central equations must be polynomial in the plain symbols");
            t.pows.emplace_back(jv.gen, e2 / 2);
        }
        out.terms.push_back(std::move(t));
    }
    return out;
}

} // namespace

CSTrajectory cs_integrate(const CSState& start, const std::vector<CSFlowSpec>& flows, int track) {
    const int M = start.M;
    const int N = start.N;
    const int nslots = M * (N + 2);
    if (track < 1 || track > M)
        throw DomainError("track must name a stored current");
    if (static_cast<int>(start.v.size()) != nslots)
        throw DomainError("state vector does not match its declared shape");
    CurrentFamily fam = free_family(M, N);

    CSTrajectory traj;
    traj.columns.push_back("t");
    for (int g = 0; g < nslots; ++g)
        traj.columns.push_back(fam.alph->spec(g).name);
    traj.columns.push_back("closure");

    std::vector<double> v = start.v;
    double t = start.elapsed;
    auto emit = [&](double closure) {
        std::vector<double> row;
        row.reserve(static_cast<size_t>(nslots) + 2);
        row.push_back(t);
        row.insert(row.end(), v.begin(), v.end());
        row.push_back(closure);
        traj.rows.push_back(std::move(row));
    };

    for (const CSFlowSpec& fl : flows) {
        if (fl.j < 1)
            throw DomainError("flow index must be >= 1");
        if (fl.step <= 0 || fl.duration <= 0)
            throw DomainError("flow needs positive duration and step");
        if (track + fl.j > M)
            throw InsufficientFamilyError("flow t_" + std::to_string(fl.j) + " on K^(" +
                                          std::to_string(track) + ") needs K^(" +
                                          std::to_string(track + fl.j) +
                                          "); family stops at K^(" + std::to_string(M) + ")");

        std::vector<std::pair<int, SlotPoly>> eqs;
        std::vector<char> active(static_cast<size_t>(nslots), 0);
        std::vector<char> watched(static_cast<size_t>(nslots), 0);
        for (int i = 1; i + fl.j <= M; ++i) {
            CSRhs r = cs_rhs_projection(i, fl.j, fam);
            for (const auto& [l, p] : r.dK) {
                int g = cs_gen(fam, i, l);
                eqs.emplace_back(g, compile_slot_poly(p));
                active[static_cast<size_t>(g)] = 1;
                for (int gg : p.generators_present())
                    watched[static_cast<size_t>(gg)] = 1;
            }
        }
        for (int g = 0; g < nslots; ++g)
            if (active[static_cast<size_t>(g)])
                watched[static_cast<size_t>(g)] = 0;
        auto closure_of = [&]() {
            double worst = 0.0;
            for (int g = 0; g < nslots; ++g)
                if (watched[static_cast<size_t>(g)])
                    worst = std::max(worst, std::abs(v[static_cast<size_t>(g)]));
            return worst;
        };
        auto deriv = [&](const std::vector<double>& y, std::vector<double>& dy) {
            std::fill(dy.begin(), dy.end(), 0.0);
            for (const auto& [g, p] : eqs)
                dy[static_cast<size_t>(g)] = p.eval(y);
        };

        if (traj.rows.empty())
            emit(closure_of());
        long nsteps = std::max(1L, std::lround(fl.duration / fl.step));
        double dt = fl.duration / static_cast<double>(nsteps);
        std::vector<double> k1(v.size()), k2(v.size()), k3(v.size()), k4(v.size()), y(v.size());
        for (long s = 0; s < nsteps; ++s) {
            deriv(v, k1);
            for (size_t g = 0; g < v.size(); ++g)
                y[g] = v[g] + 0.5 * dt * k1[g];
            deriv(y, k2);
            for (size_t g = 0; g < v.size(); ++g)
                y[g] = v[g] + 0.5 * dt * k2[g];
            deriv(y, k3);
            for (size_t g = 0; g < v.size(); ++g)
                y[g] = v[g] + dt * k3[g];
            deriv(y, k4);
            for (size_t g = 0; g < v.size(); ++g)
                v[g] += dt / 6.0 * (k1[g] + 2.0 * k2[g] + 2.0 * k3[g] + k4[g]);
            t += dt;
            for (double x : v)
                if (!std::isfinite(x))
                    throw NonFiniteStateError("state left the finite range at t = " +
                                              std::to_string(t));
            emit(closure_of());
        }
    }
    return traj;
}

} // namespace dymforge
