#pragma once

#include "algebra.hpp"

#include <map>
#include <optional>
#include <string>

namespace dymforge {

// Truncated Laurent series in z with DiffPoly coefficients.
//
// top is the highest possibly-nonzero degree: above it the series is exactly
// zero. floor, when present, is the lowest degree at which the series is
// known; below it coefficients are unknown, not zero. floor == nullopt means
// the series is exact (known everywhere). Absent degrees inside the known
// window are exactly zero.
class LaurentSeries {
public:
    LaurentSeries() = default; // exact zero, top 0

    static LaurentSeries zero(AlphabetPtr alph, std::optional<int> floor = std::nullopt,
                              int top = 0);
    static LaurentSeries from_coeffs(AlphabetPtr alph, std::map<int, DiffPoly> coeffs, int top,
                                     std::optional<int> floor = std::nullopt);
    // coeff * z^deg, exact
    static LaurentSeries monomial_z(DiffPoly coeff, int deg);
    static LaurentSeries z_pow(AlphabetPtr alph, int deg);

    int top() const { return top_; }
    std::optional<int> floor() const { return floor_; }
    bool exact() const { return !floor_.has_value(); }
    const AlphabetPtr& alphabet() const { return alph_; }
    const std::map<int, DiffPoly>& coeffs() const { return coeffs_; }

    bool known_at(int d) const { return !floor_ || d >= *floor_; }
    // Exact coefficient; throws BelowPrecisionError when d < floor.
    DiffPoly coeff_at(int d) const;
    // True when the series is zero on its known window.
    bool known_zero() const { return coeffs_.empty(); }
    // Only even degrees present (lambda = z^2 bookkeeping).
    bool is_even() const;

    LaurentSeries operator-() const;
    LaurentSeries operator+(const LaurentSeries& rhs) const;
    LaurentSeries operator-(const LaurentSeries& rhs) const;
    // Precision contamination: top = ta + tb, floor = max(fa + tb, fb + ta).
    LaurentSeries operator*(const LaurentSeries& rhs) const;
    bool operator==(const LaurentSeries& rhs) const;

    LaurentSeries scale(const Rational& c) const;
    LaurentSeries times(const DiffPoly& p) const;
    // Multiply by z^d: shifts window and degrees.
    LaurentSeries shift(int d) const;
    // Restrict knowledge to degrees >= f (f must not exceed top).
    LaurentSeries with_floor(int f) const;
    // Drop degrees above new_top.
    LaurentSeries with_top(int new_top) const;

    // Coefficient-wise d/dx; window unchanged.
    LaurentSeries diff_x() const;

    // Non-negative-degree part. Requires floor <= 0 (or exact); the result is
    // exact since everything at degree >= 0 is known and below 0 it is zero
    // by construction.
    LaurentSeries project_plus() const;
    // Strictly negative part; requires knowledge below 0 (floor <= -1 or
    // exact). Keeps the input floor.
    LaurentSeries project_minus() const;

    std::string to_json() const;
    static LaurentSeries from_json(const std::string& text, AlphabetPtr alph);

private:
    AlphabetPtr alph_;
    std::map<int, DiffPoly> coeffs_;
    int top_ = 0;
    std::optional<int> floor_;

    void validate();
};

// Free-function spellings used throughout the identity checks.
inline LaurentSeries l_add(const LaurentSeries& a, const LaurentSeries& b) { return a + b; }
inline LaurentSeries l_mul(const LaurentSeries& a, const LaurentSeries& b) { return a * b; }
inline LaurentSeries l_diff_x(const LaurentSeries& a) { return a.diff_x(); }
inline LaurentSeries project_plus(const LaurentSeries& a) { return a.project_plus(); }
inline LaurentSeries project_minus(const LaurentSeries& a) { return a.project_minus(); }
inline DiffPoly coeff_at(const LaurentSeries& a, int d) { return a.coeff_at(d); }

// Coefficients agree at every degree known to both sides.
bool agree_within(const LaurentSeries& a, const LaurentSeries& b);

} // namespace dymforge
