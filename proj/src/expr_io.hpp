#pragma once

#include "algebra.hpp"

#include <string>
#include <string_view>

namespace dymforge {

// Text name of a jet variable: "u", "u3", "k0", "k0_2", "k_m1_1".
// Single-letter bases take the order directly; longer names use "_order".
std::string jet_name(const Alphabet& alph, JetVar v);

// Canonical text form: terms in canonical order, "p/q" coefficients,
// "*" products, "^" powers with parentheses around negative or half
// exponents. The zero polynomial renders as "0".
std::string render_text(const DiffPoly& p);

// LaTeX fragment with balanced braces. Trailing digits of a generator name
// become a subscript ("k0" -> k_{0}) unless the name also has an explicit
// "_sub" part, in which case they become a superscript ("K2_m1" -> K^{2}_{-1});
// an "m" prefix in the subscript reads as a minus sign. Derivatives append
// x's to the subscript.
std::string render_latex(const DiffPoly& p);

// Inverse of render_text over the given alphabet. Grammar:
//   sum     := product (('+'|'-') product)*
//   product := power ('*' power)*
//   power   := '-' power | atom ('^' exponent)?
//   atom    := rational | ident | '(' sum ')'
//   exponent:= integer | '(' '-'? digits ('/' '2')? ')'
// Identifiers resolve to the longest alphabet name that prefixes them; the
// remainder must encode a jet order as described for jet_name.
DiffPoly parse_expr(std::string_view text, AlphabetPtr alph);

} // namespace dymforge
