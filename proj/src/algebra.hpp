#pragma once

#include "errors.hpp"
#include "rational.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dymforge {

// A generator's kind fixes which exponents its jet variables may carry:
//   Plain       non-negative integers
//   Radical     half-integers of any sign at jet order 0 (u^(-5/2), u^(1/2))
//   Invertible  integers of any sign at jet order 0 (k_{-1}^{-l})
// Derivatives (jet order >= 1) always carry non-negative integers.
enum class GeneratorKind { Plain, Radical, Invertible };

struct GeneratorSpec {
    std::string name;
    GeneratorKind kind = GeneratorKind::Plain;
};

// Immutable generator alphabet. Names are unique; kinds never change after
// construction.
class Alphabet {
public:
    explicit Alphabet(std::vector<GeneratorSpec> gens);

    int size() const { return static_cast<int>(gens_.size()); }
    const GeneratorSpec& spec(int idx) const { return gens_.at(static_cast<size_t>(idx)); }
    int find(std::string_view name) const;
    int require(std::string_view name) const;
    bool same_content(const Alphabet& other) const;

private:
    std::vector<GeneratorSpec> gens_;
};

using AlphabetPtr = std::shared_ptr<const Alphabet>;

AlphabetPtr make_alphabet(std::vector<GeneratorSpec> gens);

// Jet variable: the order-th x-derivative of generator gen.
struct JetVar {
    std::int32_t gen = 0;
    std::int32_t order = 0;
    friend auto operator<=>(const JetVar&, const JetVar&) = default;
};

// Exponents are stored as twice their value so that half-integers stay exact.
using MonoExps = std::vector<std::pair<JetVar, std::int32_t>>;

struct DiffMono {
    Rational coeff;
    MonoExps exps; // sorted by JetVar, no zero entries
};

// Exact differential polynomial: a normalized term list in canonical order
// (graded lexicographic over (generator index, jet order), ties by exponent,
// leading term first). Values are immutable; all operations are pure.
class DiffPoly {
public:
    DiffPoly() = default; // zero with no alphabet attached

    static DiffPoly zero(AlphabetPtr alph);
    static DiffPoly constant(AlphabetPtr alph, Rational value);
    static DiffPoly generator(AlphabetPtr alph, int gen, int order = 0);
    static DiffPoly generator(AlphabetPtr alph, std::string_view name, int order = 0);
    static DiffPoly monomial(AlphabetPtr alph, Rational coeff, MonoExps exps);
    static DiffPoly from_terms(AlphabetPtr alph, std::vector<DiffMono> terms);

    const AlphabetPtr& alphabet() const { return alph_; }
    const std::vector<DiffMono>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    bool is_monomial() const { return terms_.size() == 1; }
    // Constant term value (zero if none).
    Rational constant_value() const;

    DiffPoly operator-() const;
    DiffPoly operator+(const DiffPoly& rhs) const;
    DiffPoly operator-(const DiffPoly& rhs) const;
    DiffPoly operator*(const DiffPoly& rhs) const;
    DiffPoly& operator+=(const DiffPoly& rhs) { return *this = *this + rhs; }
    DiffPoly& operator-=(const DiffPoly& rhs) { return *this = *this - rhs; }
    DiffPoly& operator*=(const DiffPoly& rhs) { return *this = *this * rhs; }
    bool operator==(const DiffPoly& rhs) const;

    DiffPoly scale(const Rational& c) const;
    DiffPoly pow(unsigned n) const;

    // Total x-derivative (jet shift + Leibniz + chain rule on fractional powers).
    DiffPoly diff_x() const;
    DiffPoly diff_x(int n) const;

    // Partial derivative with respect to one jet variable.
    DiffPoly partial(JetVar v) const;

    // Variational (Euler) derivative with respect to generator g:
    // sum over n of (-d/dx)^n (dp / d g_n).
    DiffPoly euler(int gen) const;

    // Highest jet order of g present, or nullopt if g does not occur.
    std::optional<int> max_order(int gen) const;
    bool contains(int gen) const;
    std::vector<int> generators_present() const;

    // Replace bound generators (and all their jets) by diff_x-iterates of the
    // bindings; unbound generators pass through by name into the target
    // alphabet. Throws ExponentConstraintError when a fractional or negative
    // use site cannot be honored by the binding.
    DiffPoly substitute(const std::map<int, DiffPoly>& bindings,
                        AlphabetPtr target = nullptr) const;

    // r-th root of a single monomial; positive branch for even r.
    DiffPoly mono_root(int r) const;

    // Monomial power with exponent num/den (den is 1 or 2). Positive integer
    // exponents are allowed on arbitrary polynomials.
    DiffPoly mono_pow(long num, long den = 1) const;

    // Pointwise numeric evaluation; jets looked up through the callback.
    double eval(const std::function<double(JetVar)>& value_of) const;

    friend DiffPoly operator*(const Rational& c, const DiffPoly& p) { return p.scale(c); }

private:
    AlphabetPtr alph_;
    std::vector<DiffMono> terms_;

    static const AlphabetPtr& merged_alphabet(const DiffPoly& a, const DiffPoly& b);
    void validate_and_set(AlphabetPtr alph, std::vector<DiffMono> terms);
};

// Canonical monomial order (graded lex); exposed for tests.
std::strong_ordering compare_mono(const MonoExps& a, const MonoExps& b);

// True iff the Euler derivative with respect to g vanishes.
bool is_total_derivative(const DiffPoly& p, int gen);
// True iff the Euler derivative vanishes for every generator present.
bool is_total_derivative(const DiffPoly& p);

// Exact rational q^(num/den); throws NotAPerfectPowerError when inexact.
Rational rational_pow(const Rational& q, long num, long den);

} // namespace dymforge
