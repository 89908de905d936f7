#include "hdkp.hpp"

#include "expr_io.hpp"

#include <json.hpp>

#include <set>

namespace dymforge {

AlphabetPtr k_ring(int N) {
    std::vector<GeneratorSpec> gens;
    gens.push_back({"k_m1", GeneratorKind::Invertible});
    for (int i = 0; i <= N; ++i)
        gens.push_back({"k" + std::to_string(i), GeneratorKind::Plain});
    return make_alphabet(std::move(gens));
}

LaurentSeries free_k(const AlphabetPtr& alph, int N) {
    std::map<int, DiffPoly> coeffs;
    coeffs.emplace(1, DiffPoly::generator(alph, 0, 0));
    for (int j = 0; j <= N; ++j)
        coeffs.emplace(-j, DiffPoly::generator(alph, gen_of_k_index(j), 0));
    return LaurentSeries::from_coeffs(alph, std::move(coeffs), 1, -N);
}

const LaurentSeries& FdBBasis::at(int j) const {
    auto it = elems.find(j);
    if (it == elems.end())
        throw Error("faa di bruno element " + std::to_string(j) + " not computed");
    return it->second;
}

FdBBasis fdb(const LaurentSeries& k, int jmax) {
    FdBBasis b;
    b.k = k;
    LaurentSeries cur =
        LaurentSeries::monomial_z(DiffPoly::constant(k.alphabet(), Rational(1)), 0);
    b.elems.emplace(0, cur);
    for (int j = 1; j <= jmax; ++j) {
        cur = l_diff_x(cur) + k * cur;
        b.elems.emplace(j, cur);
    }
    return b;
}

void fdb_negative(FdBBasis& basis, int jmin, int N) {
    if (basis.k.floor() && -*basis.k.floor() < N)
        throw BelowPrecisionError("k is not known down to z^-" + std::to_string(N));
    DiffPoly km1_inv = basis.k.coeff_at(1).mono_pow(-1);
    for (int j = -1; j >= jmin; --j) {
        if (basis.elems.count(j))
            continue;
        const LaurentSeries& T = basis.at(j + 1);
        const int top_s = j, floor_s = j - N - 1;
        std::map<int, DiffPoly> s;
        for (int d = top_s; d >= floor_s; --d) {
            // coefficient of z^{d+1} in d_x k^(j) + k k^(j) = k^(j+1):
            // s_{d+1,x} + k_{-1} s_d + sum_{i<=0} k-coeff_i s_{d+1-i} = T_{d+1}
            DiffPoly num = T.coeff_at(d + 1);
            auto prev = s.find(d + 1);
            if (prev != s.end())
                num -= prev->second.diff_x();
            for (const auto& [i, ci] : basis.k.coeffs()) {
                if (i == 1)
                    continue;
                auto it = s.find(d + 1 - i);
                if (it != s.end())
                    num -= ci * it->second;
            }
            DiffPoly sd = num * km1_inv;
            if (!sd.is_zero())
                s.emplace(d, std::move(sd));
        }
        basis.elems.emplace(
            j, LaurentSeries::from_coeffs(basis.k.alphabet(), std::move(s), top_s, floor_s));
    }
}

Current current(const FdBBasis& basis, int l) {
    if (l < 2)
        throw DomainError("current index must be at least 2");
    Current c;
    c.index = l;
    // top-down triangular solve; the pivot at degree m is the leading
    // coefficient k_{-1}^m of k^(m)
    c.combo[l] = basis.at(l).coeff_at(l).mono_pow(-1);
    for (int m = l - 1; m >= 2; --m) {
        DiffPoly acc = DiffPoly::zero(basis.k.alphabet());
        for (int j = m + 1; j <= l; ++j)
            acc += c.combo[j] * basis.at(j).coeff_at(m);
        c.combo[m] = -acc * basis.at(m).coeff_at(m).mono_pow(-1);
    }
    bool first = true;
    for (const auto& [j, cj] : c.combo) {
        LaurentSeries part = basis.at(j).times(cj);
        c.series = first ? part : c.series + part;
        first = false;
    }
    return c;
}

FlowDerivation hdkp_flow(const FdBBasis& basis, int j) {
    if (j < 1)
        throw DomainError("flow index must be at least 1");
    FlowDerivation f;
    f.time_index = j;
    LaurentSeries dk = j == 1 ? l_diff_x(basis.k) : l_diff_x(current(basis, j).series);
    int mmax = 0;
    if (dk.floor()) {
        mmax = -*dk.floor();
    } else {
        for (const auto& [d, c] : dk.coeffs())
            mmax = std::max(mmax, -d);
    }
    if (dk.known_at(1))
        f.assign[-1] = dk.coeff_at(1);
    for (int m = 0; m <= mmax; ++m)
        if (dk.known_at(-m))
            f.assign[m] = dk.coeff_at(-m);
    return f;
}

std::optional<DiffPoly> lie_derivative(const DiffPoly& p, const FlowDerivation& flow,
                                       int depth) {
    std::set<JetVar> jets;
    for (const auto& t : p.terms())
        for (const auto& [v, e2] : t.exps)
            jets.insert(v);
    DiffPoly acc = DiffPoly::zero(p.alphabet());
    for (const JetVar& v : jets) {
        auto it = flow.assign.find(k_index_of_gen(v.gen));
        if (it == flow.assign.end() || v.order > depth)
            return std::nullopt;
        acc += p.partial(v) * it->second.diff_x(v.order);
    }
    return acc;
}

bool conservation_consistency(int j, int N) {
    if (j < 1)
        throw DomainError("flow index must be at least 1");
    RiccatiSolution rs = solve_riccati_hd(N);
    LaurentSeries S;
    if (j == 1) {
        S = l_diff_x(rs.k);
    } else {
        FdBBasis basis = fdb(rs.k, j);
        S = l_diff_x(current(basis, j).series);
    }
    LaurentSeries lhs = l_diff_x(S) + (rs.k * S).scale(rat(2));
    LaurentSeries rhs = LaurentSeries::zero(u_ring());
    if (j == 1) {
        rhs = LaurentSeries::monomial_z(DiffPoly::generator(u_ring(), 0, 1), 2);
    } else if (j % 2 == 1) {
        HamiltonianLadder ladder = lenard_ladder((j - 3) / 2);
        rhs = LaurentSeries::monomial_z(ladder.fields.back(), 2);
    }
    return (lhs - rhs).known_zero();
}

CommuteReport commute_check(const FdBBasis& basis, int i, int j, int depth) {
    if (i < 2 || j < 2)
        throw DomainError("commute_check needs flow indices >= 2");
    FlowDerivation fi = hdkp_flow(basis, i);
    FlowDerivation fj = hdkp_flow(basis, j);
    CommuteReport rep;
    for (const auto& [m, pj] : fj.assign) {
        auto it = fi.assign.find(m);
        if (it == fi.assign.end())
            continue;
        std::optional<DiffPoly> a = lie_derivative(pj, fi, depth);
        std::optional<DiffPoly> b = lie_derivative(it->second, fj, depth);
        if (!a || !b)
            continue;
        ++rep.checked;
        rep.max_checked = std::max(rep.max_checked, m);
        if (!(*a - *b).is_zero())
            rep.zero = false;
    }
    return rep;
}

CommuteReport commute_check(int i, int j, int N, int depth) {
    AlphabetPtr alph = k_ring(N);
    return commute_check(fdb(free_k(alph, N), std::max(i, j)), i, j, depth);
}

QChange q_change(const LaurentSeries& k, int jmax) {
    const int N = k.floor() ? -*k.floor() : jmax;
    if (jmax > N)
        throw BelowPrecisionError("q-change to depth " + std::to_string(jmax) +
                                  " needs k known down to z^-" + std::to_string(jmax));
    FdBBasis basis = fdb(k, 0);
    fdb_negative(basis, -jmax, N);
    DiffPoly km1 = k.coeff_at(1);

    QChange out;
    out.q[-1] = km1.mono_pow(-1);
    LaurentSeries R = LaurentSeries::z_pow(k.alphabet(), 1) - k.times(out.q[-1]);
    for (int jj = 0; jj <= jmax; ++jj) {
        if (!R.known_at(-jj))
            break;
        const LaurentSeries& base = basis.at(-jj);
        DiffPoly qj = R.coeff_at(-jj) * base.coeff_at(-jj).mono_pow(-1);
        R = R - base.times(qj);
        out.q[jj] = std::move(qj);
    }
    out.residual = R;
    return out;
}

std::string Current::to_json() const {
    nlohmann::json j;
    j["index"] = index;
    j["series"] = nlohmann::json::parse(series.to_json());
    j["combo"] = nlohmann::json::object();
    for (const auto& [jj, cj] : combo)
        j["combo"][std::to_string(jj)] = render_text(cj);
    return j.dump();
}

std::string FlowDerivation::to_json(const Alphabet& alph) const {
    nlohmann::json j;
    j["time"] = time_index;
    j["assign"] = nlohmann::json::object();
    for (const auto& [m, p] : assign)
        j["assign"][jet_name(alph, JetVar{gen_of_k_index(m), 0})] = render_text(p);
    return j.dump();
}

} // namespace dymforge
