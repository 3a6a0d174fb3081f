#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bcinv/arith.hpp"
#include "bcinv/errors.hpp"
#include "bcinv/natural.hpp"
#include "bcinv/order_profiles.hpp"
#include "bcinv/units.hpp"

namespace bcinv {

/// Formal product prod p^{n_p} with n_p in N union {infinity}.  Canonical
/// form: finite exponents are positive and their primes are disjoint from
/// the infinite set (a finite exponent on an infinite prime is absorbed).
struct SupernaturalNumber {
    std::map<Natural, Natural> finite;
    PrimeSet infinite;
};

inline SupernaturalNumber make_supernatural(std::map<Natural, Natural> finite,
                                            PrimeSet infinite) {
    for (const auto& [p, e] : finite) {
        if (!is_prime(p)) fail(errc::not_prime, p.str() + " is not prime");
        require_nonnegative(e, "exponent");
    }
    for (const Natural& p : infinite)
        if (!is_prime(p)) fail(errc::not_prime, p.str() + " is not prime");
    for (const Natural& p : infinite) finite.erase(p);
    std::erase_if(finite, [](const auto& entry) { return entry.second == 0; });
    return {std::move(finite), std::move(infinite)};
}

inline SupernaturalNumber supernatural_from_natural(const Natural& n) {
    if (n < 1) fail(errc::invalid_argument, "supernatural numbers come from positive integers");
    std::map<Natural, Natural> finite;
    for (const auto& [p, e] : factorize(n).factors) finite[p] = e;
    return make_supernatural(std::move(finite), {});
}

/// Exponentwise product; infinity absorbs.
inline SupernaturalNumber supernatural_product(const SupernaturalNumber& a,
                                               const SupernaturalNumber& b) {
    std::map<Natural, Natural> finite = a.finite;
    for (const auto& [p, e] : b.finite) finite[p] += e;
    PrimeSet infinite = a.infinite;
    infinite.insert(b.infinite.begin(), b.infinite.end());
    return make_supernatural(std::move(finite), std::move(infinite));
}

inline SupernaturalNumber with_infinite_primes(const SupernaturalNumber& sn, const PrimeSet& F) {
    PrimeSet infinite = sn.infinite;
    infinite.insert(F.begin(), F.end());
    return make_supernatural(sn.finite, std::move(infinite));
}

/// Equality of the full exponent functions p -> n_p.
inline bool sn_equal(const SupernaturalNumber& a, const SupernaturalNumber& b) {
    return a.finite == b.finite && a.infinite == b.infinite;
}

struct SupernaturalExponent {
    bool infinite = false;
    Natural value = 0;  // meaningful only when finite
};

inline SupernaturalExponent exponent_of(const SupernaturalNumber& n, const Natural& p) {
    if (n.infinite.count(p)) return {true, 0};
    auto it = n.finite.find(p);
    return {false, it == n.finite.end() ? Natural(0) : it->second};
}

/// Digit sizes (d_0, ..., d_L) of a truncated odometer.
struct OdometerSpec {
    std::vector<Natural> digit_sizes;
};

inline void validate_spec(const OdometerSpec& spec) {
    if (spec.digit_sizes.empty()) fail(errc::invalid_argument, "odometer spec has no digits");
    for (const Natural& d : spec.digit_sizes)
        if (d < 1) fail(errc::invalid_argument, "digit sizes must be >= 1");
}

struct OdometerState {
    std::vector<Natural> digits;
};

inline void validate_state(const OdometerState& state, const OdometerSpec& spec) {
    validate_spec(spec);
    if (state.digits.size() != spec.digit_sizes.size())
        fail(errc::invalid_argument, "state length does not match the spec");
    for (std::size_t i = 0; i < state.digits.size(); ++i) {
        if (state.digits[i] < 0 || state.digits[i] >= spec.digit_sizes[i])
            fail(errc::invalid_argument, "digit out of range at position " + std::to_string(i));
    }
}

/// Addition of 1 with carry over; the all-max state wraps to all zeros.
inline OdometerState odometer_succ(const OdometerState& state, const OdometerSpec& spec) {
    validate_state(state, spec);
    OdometerState next = state;
    for (std::size_t i = 0; i < next.digits.size(); ++i) {
        next.digits[i] += 1;
        if (next.digits[i] < spec.digit_sizes[i]) return next;
        next.digits[i] = 0;  // carry
    }
    return next;  // full wrap
}

/// The tower of finite unit groups G_l = U(Z/ prod_{p in F} p^{K_p + l} Z)
/// together with the acting prime q, truncated at `levels`.  Carries the
/// per-prime order profiles so level queries stay arithmetic.
struct InverseSystemSpec {
    PrimeSet F;
    Natural q;
    MultiIndex K;
    int levels = 0;
    std::map<Natural, OrderProfile> profiles;
    std::vector<Natural> level_digits;  // cached d_0 .. d_levels

    Natural modulus_at(int level) const {
        if (level < 0 || level > levels) fail(errc::invalid_argument, "level out of range");
        Natural m = 1;
        for (const Natural& p : F)
            m *= pow_natural(p, static_cast<unsigned>(K.at(p) + level));
        return m;
    }

    Natural order_at_level(int level) const {
        if (level < 0 || level > levels) fail(errc::invalid_argument, "level out of range");
        Natural result = 1;
        for (const Natural& p : F) result = lcm(result, order_at(profiles.at(p), K.at(p) + level));
        return result;
    }
};

inline InverseSystemSpec make_inverse_system(const PrimeSet& F, const Natural& q,
                                             const MultiIndex& K, int levels) {
    if (levels < 0) fail(errc::invalid_argument, "levels must be >= 0");
    if (K.primes() != F) fail(errc::invalid_argument, "multi-index primes must match F");
    InverseSystemSpec sys{F, q, K, levels, {}, {}};
    for (const Natural& p : F) sys.profiles.emplace(p, profile(p, q));
    Natural previous = 1;
    for (int l = 0; l <= levels; ++l) {
        Natural current = sys.order_at_level(l);
        if (current % previous != 0)
            bug("order ratio is non-integral at level " + std::to_string(l));
        sys.level_digits.push_back(current / previous);
        previous = current;
    }
    return sys;
}

inline InverseSystemSpec make_inverse_system(const PrimeSet& F, const Natural& q, int levels) {
    return make_inverse_system(F, q, stabilization_data(F, q).K, levels);
}

/// Successive order ratios: d_0 = o_0(q), d_l = o_l(q)/o_{l-1}(q).
inline OdometerSpec d_sequence(const InverseSystemSpec& sys) {
    return OdometerSpec{sys.level_digits};
}

/// Supernatural number of the odometer: the product of the listed digits,
/// with every prime of `tail_primes` promoted to an infinite exponent (the
/// declared tail rule d_l = prod_{p in F} p beyond the truncation).  Without
/// a tail rule the result is the truncated, finite product.
inline SupernaturalNumber supernatural_of_spec(const OdometerSpec& spec,
                                               const std::optional<PrimeSet>& tail_primes) {
    validate_spec(spec);
    Natural product = 1;
    for (const Natural& d : spec.digit_sizes) product *= d;
    SupernaturalNumber sn = supernatural_from_natural(product);
    if (tail_primes) sn = with_infinite_primes(sn, *tail_primes);
    return sn;
}

namespace detail {

/// Exponent a_0 + a_1 d_0 + ... + a_l d_0 d_1 ... d_{l-1} of the coding map.
inline Natural coded_exponent(const std::vector<Natural>& digits,
                              const std::vector<Natural>& sizes, int level) {
    Natural exponent = 0;
    Natural weight = 1;
    for (int j = 0; j <= level; ++j) {
        exponent += digits[static_cast<std::size_t>(j)] * weight;
        weight *= sizes[static_cast<std::size_t>(j)];
    }
    return exponent;
}

}  // namespace detail

/// The equivariant coding map h_l: digit strings to residues,
///   h_l(a) = q^{a_0 + a_1 d_0 + ... + a_l d_0...d_{l-1}}  mod M_l.
inline Natural h_map(const InverseSystemSpec& sys, const OdometerState& state, int level) {
    if (level < 0 || level > sys.levels) fail(errc::invalid_argument, "level out of range");
    if (state.digits.size() < static_cast<std::size_t>(level) + 1)
        fail(errc::invalid_argument, "state is shorter than the requested level");
    for (int j = 0; j <= level; ++j) {
        const Natural& a = state.digits[static_cast<std::size_t>(j)];
        if (a < 0 || a >= sys.level_digits[static_cast<std::size_t>(j)])
            fail(errc::invalid_argument, "digit out of range at position " + std::to_string(j));
    }
    Natural exponent = detail::coded_exponent(state.digits, sys.level_digits, level);
    return pow_mod(sys.q, exponent, sys.modulus_at(level));
}

/// Multiplication by r transported through h: state -> h^{-1}(r h(state)) at
/// the given level, via a precomputed residue -> index table.  Fails with
/// not-in-closure when r h(state) falls outside the image of h.
inline OdometerState second_generator_action(const InverseSystemSpec& sys, const Natural& r,
                                             const OdometerState& state, int level,
                                             const Natural& cap = kDefaultEnumerationCap) {
    if (level < 0 || level > sys.levels) fail(errc::invalid_argument, "level out of range");
    Natural modulus = sys.modulus_at(level);
    if (gcd(r % modulus, modulus) != 1)
        fail(errc::not_a_unit, r.str() + " is not a unit mod " + modulus.str());

    OdometerSpec spec = d_sequence(sys);
    Natural state_count = 1;
    for (int j = 0; j <= level; ++j) state_count *= spec.digit_sizes[static_cast<std::size_t>(j)];
    if (state_count > cap)
        fail(errc::oracle_too_large, "state space exceeds the enumeration cap");

    // h sends the index i (counted in odometer order from all-zeros) to q^i,
    // so the lookup table is the power trail of q.
    std::map<Natural, Natural> index_of_residue;
    Natural power = 1;
    for (Natural i = 0; i < state_count; ++i) {
        index_of_residue.emplace(power, i);
        power = power * sys.q % modulus;
    }

    Natural target = r % modulus * h_map(sys, state, level) % modulus;
    auto it = index_of_residue.find(target);
    if (it == index_of_residue.end())
        fail(errc::not_in_closure,
             r.str() + " does not lie in the closure of the acting prime at level " +
                 std::to_string(level));

    OdometerState result;
    Natural index = it->second;
    for (int j = 0; j <= level; ++j) {
        const Natural& d = spec.digit_sizes[static_cast<std::size_t>(j)];
        result.digits.push_back(index % d);
        index /= d;
    }
    return result;
}

/// K-theory of the Bunce-Deddens algebra with supernatural number n:
/// K0 = Z[n^{-1}] ordered with order unit the class of 1, K1 = Z.
/// Symbolic tags plus the executable membership test z_inv_contains.
struct BdKTheoryDescriptor {
    SupernaturalNumber n;
    std::string k0_tag = "Z[n^-1]";
    Natural k0_order_unit_class = 1;
    std::string k1_tag = "Z";
};

inline BdKTheoryDescriptor bd_k_theory(const SupernaturalNumber& n) { return {n}; }

/// Class of a length-(k+1) cylinder set in K0: 1/N_k with N_k = d_0...d_k.
inline Rational cylinder_class(const OdometerSpec& spec, int k) {
    validate_spec(spec);
    if (k < 0 || static_cast<std::size_t>(k) >= spec.digit_sizes.size())
        fail(errc::invalid_argument, "cylinder length exceeds the spec");
    Natural N = 1;
    for (int j = 0; j <= k; ++j) N *= spec.digit_sizes[static_cast<std::size_t>(j)];
    return Rational(1, N);
}

/// Membership of num/den in Z[n^{-1}]: every prime power p^e of the
/// denominator must satisfy e <= n_p.
inline bool z_inv_contains(const SupernaturalNumber& n, const Int& num, const Natural& den) {
    if (den < 1) fail(errc::invalid_argument, "denominator must be positive");
    if (gcd(abs(num), den) != 1)
        fail(errc::invalid_argument, "num/den must be in lowest terms");
    for (const auto& [p, e] : factorize(den).factors) {
        SupernaturalExponent np = exponent_of(n, p);
        if (np.infinite) continue;
        if (Natural(e) > np.value) return false;
    }
    return true;
}

}  // namespace bcinv
