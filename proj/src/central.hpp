#pragma once

#include "hdkp.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dymforge {

// Truncated family of currents K^(1)..K^(M). K^(1) = K^1_{-1} z + sum_{l>=0}
// K^1_l z^{-l}; for i >= 2, K^(i) = z^i + K^i_{-1} z + sum_{l>=0} K^i_l z^{-l}
// with nothing at degrees 2..i-1. Tail depth N: coefficients K^i_l are kept
// for l = -1..N, below that the series are floored. In free-symbolic mode
// every K^i_l is its own scalar generator (jet order 0, never differentiated
// in x); a family can also be built over a k-ring through the currents.
struct CurrentFamily {
    int M = 0;
    int N = 0;
    AlphabetPtr alph;
    std::vector<LaurentSeries> K; // K[i-1] = K^(i)
    bool symbolic = false;

    const LaurentSeries& at(int i) const;
    // K^i_l as a ring element (the generator itself in free-symbolic mode)
    DiffPoly coeff(int i, int l) const;
};

CurrentFamily free_family(int M, int N);
// Family over an existing Faa di Bruno basis: K^(1) = k, K^(i) = current(i).
// tail_depth < 0 means "use the k window".
CurrentFamily family_from_k(const FdBBasis& basis, int M, int tail_depth = -1);

// Generator index of the symbol K^i_l in a free-symbolic family, and back.
int cs_gen(const CurrentFamily& fam, int i, int l);
std::pair<int, int> cs_index(const CurrentFamily& fam, int gen);

// L = <K^(2), K^(3), ...> + <z, 1, z^-1, ...>. Because each K^(i) is z^i plus
// degrees <= 1, the plus coordinates are read directly off the coefficients
// at degrees >= 2; no triangular solve is involved.
struct PiSplit {
    std::map<int, DiffPoly> plus_coords; // i >= 2 -> s_i
    LaurentSeries plus;                  // sum s_i K^(i)
    LaurentSeries minus;                 // s - plus, supported at degrees <= 1
};
PiSplit pi_split(const LaurentSeries& s, const CurrentFamily& fam);

// d K^(i) / d t_j. series is the full right-hand side (supported at degrees
// <= 1); dK maps the tail index l to the derivative of K^i_l, for every l
// known at this truncation (degree 1 <-> l = -1).
struct CSRhs {
    int i = 0;
    int j = 0;
    LaurentSeries series;
    std::map<int, DiffPoly> dK;
};

// Projection form: d K^(i)/d t_j = -pi_minus(K^(j) K^(i)).
CSRhs cs_rhs_projection(int i, int j, const CurrentFamily& fam);
// Explicit quadratic form, assembled term by term (separate route from the
// projection; j >= 2, the i = 1 equation has its own shape).
CSRhs cs_rhs_explicit(int i, int j, const CurrentFamily& fam);

// Mixed second derivatives d_{t_i} d_{t_j} K^m_l - d_{t_j} d_{t_i} K^m_l over
// the free symbols, for every slot whose chain rule closes inside the family.
CommuteReport cs_commute_residual(int i, int j, const CurrentFamily& fam, int depth = 1 << 20);

// For a family built over a free k: d_x K^(j) + k K^(j) expands on the
// currents with the printed coefficients, d_x k + k^2 = k_{-1}^2 K^(2), and
// the t_1 flow of the central system is the x-derivative.
bool spatialization_check(const FdBBasis& basis, int M);

// Numeric snapshot: values for every K^i_l, i = 1..M, l = -1..N, explicit
// slot layout (i-1)*(N+2) + (l+1).
struct CSState {
    int M = 0;
    int N = 0;
    std::vector<double> v;
    double elapsed = 0.0;

    double& at(int i, int l);
    double at(int i, int l) const;
};

CSState cs_state_zero(int M, int N);
// Evaluate a concrete family (typically built from a Riccati k) at a point;
// the callback supplies the jet values of the underlying ring.
CSState cs_sample(const CurrentFamily& fam, int M, int N,
                  const std::function<double(JetVar)>& point);

struct CSFlowSpec {
    int j = 2;
    double duration = 0.0;
    double step = 1e-3;
};

struct CSTrajectory {
    std::vector<std::string> columns; // t, every K^i_l, closure
    std::vector<std::vector<double>> rows;

    std::string to_csv() const;
    std::string to_json() const;
};

// Classical 4th-order stepping of the truncated system. Every slot with a
// defining equation at this truncation evolves; the remaining slots stay
// frozen, and the closure column reports the largest magnitude among frozen
// slots that feed an active equation (the coefficients whose dynamics the
// truncation drops). Currents 1..track must be fully active: a flow t_j with
// track + j > M is refused instead of being zero-padded.
CSTrajectory cs_integrate(const CSState& start, const std::vector<CSFlowSpec>& flows, int track);

} // namespace dymforge
