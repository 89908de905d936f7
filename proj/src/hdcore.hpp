#pragma once

#include "laurent.hpp"

#include <vector>

namespace dymforge {

// Shared alphabets: the radical u-ring used by the hierarchy, and a plain
// u-ring for the side computations that never take roots.
AlphabetPtr u_ring();
AlphabetPtr u_plain_ring();

// Solution of k_x + k^2 = u z^2 of shape k = k_{-1} z + sum_{j>=0} k_j z^{-j}.
// The series stores k_j at degree -j (and k_{-1} at degree 1).
struct RiccatiSolution {
    LaurentSeries k;
    int order = 0; // highest computed j
    int ugen = 0;  // index of u in the alphabet

    DiffPoly coeff(int j) const { return k.coeff_at(-j); }
};

RiccatiSolution solve_riccati_hd(int N);
RiccatiSolution solve_riccati_hd(int N, AlphabetPtr alph, int ugen);

// l_diff_x(k) + k*k - u z^2; known-zero on its window for a correct solution.
LaurentSeries riccati_residual(const RiccatiSolution& rs);

// Casimir series w = w_0 + sum_{i>=1} w_i lambda^{-i} with lambda = z^2,
// solving (1/4) w_x^2 - (1/2) w w_xx + lambda u w^2 = lambda. w_i sits at
// z-degree -2i.
struct CasimirSeries {
    LaurentSeries w;
    int order = 0; // highest computed i
    int ugen = 0;

    DiffPoly wi(int i) const { return w.coeff_at(-2 * i); }
};

CasimirSeries solve_casimir_w(int N);
CasimirSeries solve_casimir_w(int N, AlphabetPtr alph, int ugen);

// Residual of the defining equation, known-zero on its window.
LaurentSeries casimir_equation_residual(const CasimirSeries& cs);

// -(1/2) w_x + k w - z; ties the two solvers together (independent routes).
LaurentSeries casimir_riccati_link(const RiccatiSolution& rs, const CasimirSeries& cs);

// Poisson tensors P0 v = -(1/2) v_xxx and P1 v = -2 u v_x - u_x v, and the
// pencil P_lambda v = P0 v - lambda P1 v (lambda = z^2 shifts degree by 2).
DiffPoly apply_p0(const DiffPoly& v);
DiffPoly apply_p1(const DiffPoly& v, int ugen = 0);
LaurentSeries apply_p0(const LaurentSeries& v);
LaurentSeries apply_p1(const LaurentSeries& v, int ugen = 0);
LaurentSeries apply_pencil(const LaurentSeries& v, int ugen = 0);

// P_lambda w(lambda) for the order-N Casimir series; every coefficient in the
// returned window is zero when the chain closes.
LaurentSeries casimir_residual(int N);

// Conserved densities 2 k_{2j-1}, their variational gradients w_j, and the
// vector fields X_j = P0 w_j, for j = 0..N. Construction re-derives the
// gradients from the Casimir series and verifies the Lenard recursion
// P1 w_0 = 0, P0 w_j = P1 w_{j+1}; any mismatch throws LenardChainBrokenError.
struct HamiltonianLadder {
    std::vector<DiffPoly> densities;
    std::vector<DiffPoly> gradients;
    std::vector<DiffPoly> fields;
};

HamiltonianLadder lenard_ladder(int N);

// (d_x + 2k) (1/2 d_x) (-d_x + 2k) applied to a series (or a single ring
// element at degree 0).
LaurentSeries factorization_apply(const RiccatiSolution& rs, const LaurentSeries& v);
LaurentSeries factorization_apply(const RiccatiSolution& rs, const DiffPoly& v);

// Checks the factorization against -(1/2) v_xxx + z^2 (2 u v_x + u_x v) for a
// symbolic indeterminate v, with k solved to order N.
bool factorization_check(int N);

// X_0 as a multiple of 2 (u^{-1/2})_xxx; the classical normalization constant.
Rational hd_classical_match();
// The same flow written for rho = -u^{-1/2}: rho_t as a multiple of
// rho^3 rho_xxx, both sides expanded in the u-ring.
Rational hd_rho_form_match();

// KdV-side Riccati h_x + h^2 = u + z^2, h = z + sum_{j>=1} h_j z^{-j}, used
// for cross-framework comparisons only.
LaurentSeries solve_riccati_kdv(int N);

// The unique c with a = c*b, or NotProportionalError.
Rational proportionality_constant(const DiffPoly& a, const DiffPoly& b);

} // namespace dymforge
