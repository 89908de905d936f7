#include "hdcore.hpp"

namespace dymforge {

AlphabetPtr u_ring() {
    static const AlphabetPtr a = make_alphabet({{"u", GeneratorKind::Radical}});
    return a;
}

AlphabetPtr u_plain_ring() {
    static const AlphabetPtr a = make_alphabet({{"u", GeneratorKind::Plain}});
    return a;
}

RiccatiSolution solve_riccati_hd(int N) {
    return solve_riccati_hd(N, u_ring(), 0);
}

RiccatiSolution solve_riccati_hd(int N, AlphabetPtr alph, int ugen) {
    if (N < 0)
        throw DomainError("riccati order must be non-negative");
    DiffPoly u = DiffPoly::generator(alph, ugen, 0);
    DiffPoly km1 = u.mono_root(2);
    // (2 k_{-1})^{-1}, the pivot of every row
    DiffPoly pivot = km1.mono_pow(-1).scale(rat(1, 2));

    std::vector<DiffPoly> ks; // ks[j] = k_j for j >= 0
    ks.reserve(static_cast<size_t>(N) + 1);
    ks.push_back(-km1.diff_x() * pivot); // row z^1: 2 k_{-1} k_0 + k_{-1,x} = 0
    for (int j = 0; j < N; ++j) {
        // row z^{-j}: 2 k_{-1} k_{j+1} + sum_{a+b=j} k_a k_b + k_{j,x} = 0
        DiffPoly rhs = ks[static_cast<size_t>(j)].diff_x();
        for (int a = 0; a <= j; ++a)
            rhs += ks[static_cast<size_t>(a)] * ks[static_cast<size_t>(j - a)];
        ks.push_back(-rhs * pivot);
    }

    std::map<int, DiffPoly> coeffs;
    coeffs.emplace(1, km1);
    for (int j = 0; j <= N; ++j)
        coeffs.emplace(-j, ks[static_cast<size_t>(j)]);
    RiccatiSolution rs;
    rs.k = LaurentSeries::from_coeffs(alph, std::move(coeffs), 1, -N);
    rs.order = N;
    rs.ugen = ugen;
    return rs;
}

LaurentSeries riccati_residual(const RiccatiSolution& rs) {
    const AlphabetPtr& alph = rs.k.alphabet();
    DiffPoly u = DiffPoly::generator(alph, rs.ugen, 0);
    return l_diff_x(rs.k) + rs.k * rs.k - LaurentSeries::monomial_z(u, 2);
}

CasimirSeries solve_casimir_w(int N) {
    return solve_casimir_w(N, u_ring(), 0);
}

CasimirSeries solve_casimir_w(int N, AlphabetPtr alph, int ugen) {
    if (N < 0)
        throw DomainError("casimir order must be non-negative");
    DiffPoly u = DiffPoly::generator(alph, ugen, 0);
    // lambda^1 row: u w_0^2 = 1, positive branch
    DiffPoly w0 = u.mono_pow(-1, 2);
    // (2 u w_0)^{-1} = (2 u^{1/2})^{-1}
    DiffPoly pivot = u.mono_pow(-1, 2).scale(rat(1, 2));

    std::vector<DiffPoly> ws{w0};
    std::vector<DiffPoly> wx{w0.diff_x()};
    std::vector<DiffPoly> wxx{wx[0].diff_x()};
    for (int i = 1; i <= N; ++i) {
        // lambda^{1-i} row:
        //   2 u w_0 w_i + u sum_{a+b=i, a,b>=1} w_a w_b
        //   + 1/4 sum_{a+b=i-1} w_{a,x} w_{b,x} - 1/2 sum_{a+b=i-1} w_a w_{b,xx} = 0
        DiffPoly rhs = DiffPoly::zero(alph);
        for (int a = 1; a <= i - 1; ++a)
            rhs += u * (ws[static_cast<size_t>(a)] * ws[static_cast<size_t>(i - a)]);
        for (int a = 0; a <= i - 1; ++a) {
            const size_t b = static_cast<size_t>(i - 1 - a);
            rhs += rat(1, 4) * (wx[static_cast<size_t>(a)] * wx[b]);
            rhs -= rat(1, 2) * (ws[static_cast<size_t>(a)] * wxx[b]);
        }
        DiffPoly wi = -rhs * pivot;
        wx.push_back(wi.diff_x());
        wxx.push_back(wx.back().diff_x());
        ws.push_back(std::move(wi));
    }

    std::map<int, DiffPoly> coeffs;
    for (int i = 0; i <= N; ++i)
        coeffs.emplace(-2 * i, ws[static_cast<size_t>(i)]);
    CasimirSeries cs;
    cs.w = LaurentSeries::from_coeffs(alph, std::move(coeffs), 0, -2 * N);
    cs.order = N;
    cs.ugen = ugen;
    return cs;
}

LaurentSeries casimir_equation_residual(const CasimirSeries& cs) {
    const AlphabetPtr& alph = cs.w.alphabet();
    DiffPoly u = DiffPoly::generator(alph, cs.ugen, 0);
    LaurentSeries wx = l_diff_x(cs.w);
    LaurentSeries lam = LaurentSeries::z_pow(alph, 2);
    return (wx * wx).scale(rat(1, 4)) - (cs.w * l_diff_x(wx)).scale(rat(1, 2)) +
           (cs.w * cs.w).times(u).shift(2) - lam;
}

LaurentSeries casimir_riccati_link(const RiccatiSolution& rs, const CasimirSeries& cs) {
    return l_diff_x(cs.w).scale(rat(-1, 2)) + rs.k * cs.w -
           LaurentSeries::z_pow(cs.w.alphabet(), 1);
}

DiffPoly apply_p0(const DiffPoly& v) {
    return rat(-1, 2) * v.diff_x(3);
}

DiffPoly apply_p1(const DiffPoly& v, int ugen) {
    const AlphabetPtr& alph = v.alphabet();
    if (!alph)
        return DiffPoly();
    DiffPoly u = DiffPoly::generator(alph, ugen, 0);
    return rat(-2) * (u * v.diff_x()) - u.diff_x() * v;
}

namespace {

LaurentSeries map_coeffs(const LaurentSeries& v, const std::function<DiffPoly(const DiffPoly&)>& f) {
    std::map<int, DiffPoly> out;
    for (const auto& [d, c] : v.coeffs()) {
        DiffPoly fc = f(c);
        if (!fc.is_zero())
            out.emplace(d, std::move(fc));
    }
    return LaurentSeries::from_coeffs(v.alphabet(), std::move(out), v.top(), v.floor());
}

} // namespace

LaurentSeries apply_p0(const LaurentSeries& v) {
    return map_coeffs(v, [](const DiffPoly& c) { return apply_p0(c); });
}

LaurentSeries apply_p1(const LaurentSeries& v, int ugen) {
    return map_coeffs(v, [ugen](const DiffPoly& c) { return apply_p1(c, ugen); });
}

LaurentSeries apply_pencil(const LaurentSeries& v, int ugen) {
    return apply_p0(v) - apply_p1(v, ugen).shift(2);
}

LaurentSeries casimir_residual(int N) {
    return apply_pencil(solve_casimir_w(N).w);
}

HamiltonianLadder lenard_ladder(int N) {
    if (N < 0)
        throw DomainError("ladder order must be non-negative");
    RiccatiSolution rs = solve_riccati_hd(std::max(2 * N - 1, 0));
    CasimirSeries cs = solve_casimir_w(N);

    HamiltonianLadder ladder;
    for (int j = 0; j <= N; ++j) {
        DiffPoly density = rat(2) * rs.coeff(2 * j - 1);
        DiffPoly gradient = density.euler(rs.ugen);
        if (!(gradient == cs.wi(j)))
            throw LenardChainBrokenError("gradient of density " + std::to_string(j) +
                                         " does not match the Casimir coefficient");
        ladder.densities.push_back(std::move(density));
        ladder.fields.push_back(apply_p0(gradient));
        ladder.gradients.push_back(std::move(gradient));
    }
    if (!apply_p1(ladder.gradients[0]).is_zero())
        throw LenardChainBrokenError("P1 w_0 != 0");
    for (int j = 0; j + 1 <= N; ++j)
        if (!(apply_p0(ladder.gradients[static_cast<size_t>(j)]) ==
              apply_p1(ladder.gradients[static_cast<size_t>(j + 1)])))
            throw LenardChainBrokenError("P0 w_" + std::to_string(j) + " != P1 w_" +
                                         std::to_string(j + 1));
    return ladder;
}

LaurentSeries factorization_apply(const RiccatiSolution& rs, const LaurentSeries& v) {
    LaurentSeries s1 = (rs.k * v).scale(rat(2)) - l_diff_x(v);
    LaurentSeries s2 = l_diff_x(s1).scale(rat(1, 2));
    return l_diff_x(s2) + (rs.k * s2).scale(rat(2));
}

LaurentSeries factorization_apply(const RiccatiSolution& rs, const DiffPoly& v) {
    return factorization_apply(rs, LaurentSeries::monomial_z(v, 0));
}

bool factorization_check(int N) {
    auto alph = make_alphabet({{"u", GeneratorKind::Radical}, {"v", GeneratorKind::Plain}});
    RiccatiSolution rs = solve_riccati_hd(N, alph, 0);
    DiffPoly u = DiffPoly::generator(alph, 0, 0);
    DiffPoly v = DiffPoly::generator(alph, 1, 0);
    LaurentSeries lhs = factorization_apply(rs, v);
    LaurentSeries rhs =
        LaurentSeries::monomial_z(rat(-1, 2) * v.diff_x(3), 0) +
        LaurentSeries::monomial_z(rat(2) * (u * v.diff_x()) + u.diff_x() * v, 2);
    return (lhs - rhs).known_zero();
}

Rational proportionality_constant(const DiffPoly& a, const DiffPoly& b) {
    if (b.is_zero()) {
        if (a.is_zero())
            return Rational(0);
        throw NotProportionalError("nonzero element against zero");
    }
    if (a.is_zero())
        return Rational(0);
    const DiffMono& lead = b.terms()[0];
    Rational c;
    bool found = false;
    for (const auto& t : a.terms()) {
        if (t.exps == lead.exps) {
            c = t.coeff / lead.coeff;
            found = true;
            break;
        }
    }
    if (!found || !(a == b.scale(c)))
        throw NotProportionalError("elements are not proportional");
    return c;
}

Rational hd_classical_match() {
    DiffPoly w0 = DiffPoly::generator(u_ring(), 0, 0).mono_pow(-1, 2);
    DiffPoly x0 = apply_p0(w0);
    DiffPoly classical = rat(2) * w0.diff_x(3);
    return proportionality_constant(x0, classical);
}

Rational hd_rho_form_match() {
    DiffPoly u = DiffPoly::generator(u_ring(), 0, 0);
    DiffPoly w0 = u.mono_pow(-1, 2);
    // rho = -u^{-1/2}: rho_t = (1/2) u^{-3/2} u_t with u_t = X_0
    DiffPoly lhs = u.mono_pow(-3, 2).scale(rat(1, 2)) * apply_p0(w0);
    // rho^3 rho_xxx = u^{-3/2} (u^{-1/2})_xxx
    DiffPoly rhs = u.mono_pow(-3, 2) * w0.diff_x(3);
    return proportionality_constant(lhs, rhs);
}

LaurentSeries solve_riccati_kdv(int N) {
    if (N < 0)
        throw DomainError("riccati order must be non-negative");
    AlphabetPtr alph = u_plain_ring();
    DiffPoly u = DiffPoly::generator(alph, 0, 0);

    std::vector<DiffPoly> hs{DiffPoly::zero(alph)}; // hs[j] = h_j, h_0 = 0
    if (N >= 1)
        hs.push_back(u.scale(rat(1, 2))); // row z^0: 2 h_1 = u
    for (int j = 1; j + 1 <= N; ++j) {
        // row z^{-j}: h_{j,x} + 2 h_{j+1} + sum_{a+b=j, a,b>=1} h_a h_b = 0
        DiffPoly rhs = hs[static_cast<size_t>(j)].diff_x();
        for (int a = 1; a <= j - 1; ++a)
            rhs += hs[static_cast<size_t>(a)] * hs[static_cast<size_t>(j - a)];
        hs.push_back(rhs.scale(rat(-1, 2)));
    }

    std::map<int, DiffPoly> coeffs;
    coeffs.emplace(1, DiffPoly::constant(alph, Rational(1)));
    for (int j = 1; j <= N; ++j)
        coeffs.emplace(-j, hs[static_cast<size_t>(j)]);
    return LaurentSeries::from_coeffs(alph, std::move(coeffs), 1, -N);
}

} // namespace dymforge
