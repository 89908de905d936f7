#pragma once

#include <gmpxx.h>

#include <string>

namespace dymforge {

// Exact rational scalar. GMP keeps results canonical as long as inputs are,
// so the only care point is two-argument construction.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline std::string to_string(const Rational& q) {
    return q.get_str();
}

inline double to_double(const Rational& q) {
    return q.get_d();
}

inline bool is_integer(const Rational& q) {
    return q.get_den() == 1;
}

} // namespace dymforge
