#pragma once

#include <deque>
#include <set>
#include <vector>

#include "bcinv/arith.hpp"
#include "bcinv/errors.hpp"
#include "bcinv/natural.hpp"

namespace bcinv {

/// Ceiling on the size of any exhaustively enumerated unit group.  Runtime
/// configuration; the CLI honors the BCINV_ENUM_CAP environment override.
inline const Natural kDefaultEnumerationCap{10000000};

/// All residues coprime to the modulus, ascending.
struct UnitGroupTable {
    Natural modulus;
    std::vector<Natural> elements;
};

namespace detail {

inline Natural reduce_unit(const Natural& m, const Natural& modulus) {
    require_nonnegative(m, "unit");
    Natural r = m % modulus;
    if (gcd(r, modulus) != 1)
        fail(errc::not_a_unit, m.str() + " is not a unit mod " + modulus.str());
    return r;
}

inline void check_cap(const Natural& modulus, const Natural& cap) {
    if (modulus > cap)
        fail(errc::oracle_too_large,
             "modulus " + modulus.str() + " exceeds the enumeration cap " + cap.str());
}

}  // namespace detail

/// Exhaustive gcd scan.  The oracle substrate: no structure theory used.
inline UnitGroupTable enumerate_units(const Natural& modulus,
                                      const Natural& cap = kDefaultEnumerationCap) {
    if (modulus < 2) fail(errc::invalid_modulus, "modulus must be >= 2, got " + modulus.str());
    detail::check_cap(modulus, cap);
    UnitGroupTable table{modulus, {}};
    for (Natural r = 1; r < modulus; ++r)
        if (gcd(r, modulus) == 1) table.elements.push_back(r);
    return table;
}

/// phi(modulus) by gcd scan (no factorization).
inline Natural totient_bruteforce(const Natural& modulus,
                                  const Natural& cap = kDefaultEnumerationCap) {
    if (modulus < 2) fail(errc::invalid_modulus, "modulus must be >= 2, got " + modulus.str());
    detail::check_cap(modulus, cap);
    Natural count = 0;
    for (Natural r = 1; r < modulus; ++r)
        if (gcd(r, modulus) == 1) ++count;
    return count;
}

/// Least k >= 1 with m^k ≡ 1, found by successive multiplication.  This is
/// the independent oracle every closed-form order law is checked against.
inline Natural order_bruteforce(const Natural& m, const Natural& modulus) {
    if (modulus < 1) fail(errc::invalid_modulus, "modulus must be >= 1, got " + modulus.str());
    if (modulus == 1) return 1;
    Natural r = detail::reduce_unit(m, modulus);
    Natural power = r;
    Natural k = 1;
    while (power != 1) {
        power = power * r % modulus;
        ++k;
    }
    return k;
}

namespace detail {

/// Carmichael exponent of the unit group, with its prime support.
inline std::pair<Natural, std::set<Natural>> group_exponent(const Factorization& fact) {
    Natural lambda = 1;
    std::set<Natural> primes;
    for (const auto& [p, e] : fact.factors) {
        Natural lp;
        if (p == 2) {
            lp = (e == 1) ? Natural(1) : (e == 2) ? Natural(2) : pow_natural(2, e - 2);
            if (e >= 2) primes.insert(2);
        } else {
            lp = (p - 1) * pow_natural(p, e - 1);
            for (const auto& [q, qe] : factorize(p - 1).factors) primes.insert(q);
            if (e >= 2) primes.insert(p);
        }
        lambda = lcm(lambda, lp);
    }
    return {lambda, primes};
}

}  // namespace detail

/// Order via divisor descent from the group exponent.  Agrees with
/// order_bruteforce everywhere; exists so closed-form work is not gated on
/// the oracle's linear scan.
inline Natural order_fast(const Natural& m, const Factorization& modulus_factorization) {
    Natural modulus = modulus_factorization.value();
    if (modulus == 1) return 1;
    Natural r = detail::reduce_unit(m, modulus);
    if (r == 1) return 1;
    auto [t, primes] = detail::group_exponent(modulus_factorization);
    for (const Natural& q : primes) {
        while (t % q == 0 && pow_mod(r, t / q, modulus) == 1) t /= q;
    }
    if (pow_mod(r, t, modulus) != 1) bug("order descent left a non-annihilating exponent");
    return t;
}

/// Multiplicative closure of the generators mod modulus, ascending.
/// Breadth-first multiplication until stable.
inline std::vector<Natural> closure_bruteforce(const std::set<Natural>& generators,
                                               const Natural& modulus,
                                               const Natural& cap = kDefaultEnumerationCap) {
    if (modulus < 2) fail(errc::invalid_modulus, "modulus must be >= 2, got " + modulus.str());
    detail::check_cap(modulus, cap);
    std::vector<Natural> gens;
    gens.reserve(generators.size());
    for (const Natural& g : generators) gens.push_back(detail::reduce_unit(g, modulus));

    std::vector<bool> seen(to_index(modulus), false);
    std::deque<Natural> queue;
    seen[1] = true;
    queue.push_back(1);
    std::vector<Natural> members{1};
    while (!queue.empty()) {
        Natural x = queue.front();
        queue.pop_front();
        for (const Natural& g : gens) {
            Natural y = x * g % modulus;
            std::size_t idx = to_index(y);
            if (!seen[idx]) {
                seen[idx] = true;
                members.push_back(y);
                queue.push_back(y);
            }
        }
    }
    std::sort(members.begin(), members.end());
    return members;
}

/// |<generators>| mod modulus by the same breadth-first walk, counting
/// only (no member table), so large closures cost one visited bit each.
inline Natural closure_size_bruteforce(const std::set<Natural>& generators,
                                       const Natural& modulus,
                                       const Natural& cap = kDefaultEnumerationCap) {
    if (modulus < 2) fail(errc::invalid_modulus, "modulus must be >= 2, got " + modulus.str());
    detail::check_cap(modulus, cap);
    std::vector<Natural> gens;
    gens.reserve(generators.size());
    for (const Natural& g : generators) gens.push_back(detail::reduce_unit(g, modulus));

    std::vector<bool> seen(to_index(modulus), false);
    std::deque<Natural> queue;
    seen[1] = true;
    queue.push_back(1);
    Natural count = 1;
    while (!queue.empty()) {
        Natural x = queue.front();
        queue.pop_front();
        for (const Natural& g : gens) {
            Natural y = x * g % modulus;
            std::size_t idx = to_index(y);
            if (!seen[idx]) {
                seen[idx] = true;
                ++count;
                queue.push_back(y);
            }
        }
    }
    return count;
}

/// phi(modulus) / |<generators>|, both sides exhaustive.
inline Natural subgroup_index_bruteforce(const std::set<Natural>& generators,
                                         const Natural& modulus,
                                         const Natural& cap = kDefaultEnumerationCap) {
    Natural order = closure_size_bruteforce(generators, modulus, cap);
    Natural phi = totient_bruteforce(modulus, cap);
    if (phi % order != 0) bug("closure size does not divide the group order");
    return phi / order;
}

/// Same index with the totient taken from the (always known) factorization
/// of the modulus; the closure side stays exhaustive.
inline Natural subgroup_index_bruteforce(const std::set<Natural>& generators,
                                         const Factorization& modulus_factorization,
                                         const Natural& cap = kDefaultEnumerationCap) {
    Natural modulus = modulus_factorization.value();
    Natural order = closure_size_bruteforce(generators, modulus, cap);
    Natural phi = modulus_factorization.totient();
    if (phi % order != 0) bug("closure size does not divide the group order");
    return phi / order;
}

}  // namespace bcinv
