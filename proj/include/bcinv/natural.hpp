#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <limits>
#include <set>
#include <string>

#include "bcinv/errors.hpp"

namespace bcinv {

/// Arbitrary-precision signed integer (matrix entries, numerators).
using Int = boost::multiprecision::cpp_int;

/// Arbitrary-precision integer used where values are nonnegative by
/// contract (moduli, residues, orders, counts).  Operations validate the
/// nonnegativity of their inputs rather than encoding it in the type.
using Natural = Int;

using PrimeSet = std::set<Natural>;

inline void require_nonnegative(const Int& n, const char* what) {
    if (n < 0) fail(errc::invalid_argument, std::string(what) + " must be nonnegative");
}

/// Checked narrowing for table indexing; callers guarantee n fits because a
/// cap was enforced first.
inline std::size_t to_index(const Natural& n) {
    if (n < 0 || n > std::numeric_limits<std::size_t>::max())
        bug("value does not fit in an index: " + n.str());
    return static_cast<std::size_t>(n);
}

inline Natural parse_natural(const std::string& text) {
    if (text.empty()) fail(errc::invalid_argument, "empty integer literal");
    for (char c : text)
        if (c < '0' || c > '9')
            fail(errc::invalid_argument, "not a decimal natural number: " + text);
    return Natural(text);
}

}  // namespace bcinv
