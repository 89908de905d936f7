#pragma once

#include "hdcore.hpp"

#include <optional>

namespace dymforge {

// Free k-ring: k_m1 invertible, k0..kN plain, all with x-derivatives.
// Generator index g maps to coefficient index m = g - 1 (so g = 0 is k_{-1}).
AlphabetPtr k_ring(int N);
inline int gen_of_k_index(int m) { return m + 1; }
inline int k_index_of_gen(int g) { return g - 1; }

// k = k_{-1} z + sum_{j=0}^{N} k_j z^{-j} with free coefficients, floor -N.
LaurentSeries free_k(const AlphabetPtr& alph, int N);

// Faa di Bruno polynomials k^(j) = (d_x + k)^j 1 for a generic series k,
// extended to negative j by solving k^(j+1) = d_x k^(j) + k k^(j) backwards
// (divisions by the invertible leading coefficient k_{-1} only).
struct FdBBasis {
    LaurentSeries k;
    std::map<int, LaurentSeries> elems;

    const LaurentSeries& at(int j) const;
};

FdBBasis fdb(const LaurentSeries& k, int jmax);
// N is the z-precision assumed for k (treat k as known down to z^{-N});
// k^(j) for j < 0 comes out with floor j - N - 1.
void fdb_negative(FdBBasis& basis, int jmin, int N);

// Current K^(l) = z^l + K^l_{-1} z + sum_{m>=0} K^l_m z^{-m}: the unique
// element of span<k^(2), k^(3), ...> with unit coefficient at z^l and none at
// z^m for 2 <= m < l. combo holds the span coordinates c_2..c_l.
struct Current {
    int index = 0;
    LaurentSeries series;
    std::map<int, DiffPoly> combo;

    std::string to_json() const;
};

Current current(const FdBBasis& basis, int l);

// d k_m / d t_j: the z^{-m} coefficient of d_x K^(j) (degree 1 for m = -1),
// for every m inside the valid window. t_1 is spatial translation, d_x k.
struct FlowDerivation {
    int time_index = 0;
    std::map<int, DiffPoly> assign;

    std::string to_json(const Alphabet& alph) const;
};

FlowDerivation hdkp_flow(const FdBBasis& basis, int j);

// Lie derivative of p along the flow: sum over jets (k_m)_n of
// dp/d(k_m)_n * d_x^n(assign[m]). nullopt when p needs an assignment the
// flow's window does not cover, or a jet order beyond depth.
std::optional<DiffPoly> lie_derivative(const DiffPoly& p, const FlowDerivation& flow,
                                       int depth);

// Conservation-form consistency under the HD constraint: with k from the
// Riccati solution at order N, (d_x + 2k)(d k/d t_j) = z^2 du/dt_j, where
// du/dt_j is the matching ladder field (zero for even j, u_x for j = 1).
bool conservation_consistency(int j, int N);

// d_{t_i} d_{t_j} k - d_{t_j} d_{t_i} k in the free ring, coefficient by
// coefficient; each checkable coefficient must vanish identically.
struct CommuteReport {
    int max_checked = -2; // largest coefficient index m that was verified
    int checked = 0;
    bool zero = true;
};

CommuteReport commute_check(const FdBBasis& basis, int i, int j, int depth = 8);
CommuteReport commute_check(int i, int j, int N, int depth = 8);

// Inverse coordinate change z = q_{-1} k + sum_{j>=0} q_j k^(-j); residual is
// the defining identity minus z, zero on its window.
struct QChange {
    std::map<int, DiffPoly> q; // keyed by j, q_{-1} at key -1
    LaurentSeries residual;
};

QChange q_change(const LaurentSeries& k, int jmax);

} // namespace dymforge
