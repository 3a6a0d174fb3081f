#pragma once

#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "bcinv/arith.hpp"
#include "bcinv/errors.hpp"
#include "bcinv/natural.hpp"
#include "bcinv/units.hpp"

namespace bcinv {

/// Levels scanned when locating or cross-checking a stabilization constant.
/// Degenerate profiles (m = 1, whose order never jumps) report this value
/// as their L.
inline constexpr int kDefaultScanLevels = 64;

/// Exponent assignment p -> l_p over a fixed finite prime set.
struct MultiIndex {
    std::map<Natural, int> entries;

    MultiIndex() = default;
    explicit MultiIndex(std::map<Natural, int> e) : entries(std::move(e)) {}

    static MultiIndex uniform(const PrimeSet& primes, int level) {
        MultiIndex mi;
        for (const Natural& p : primes) mi.entries[p] = level;
        return mi;
    }

    PrimeSet primes() const {
        PrimeSet s;
        for (const auto& [p, l] : entries) s.insert(p);
        return s;
    }

    int at(const Natural& p) const {
        auto it = entries.find(p);
        if (it == entries.end())
            fail(errc::invalid_argument, "multi-index has no entry for prime " + p.str());
        return it->second;
    }

    MultiIndex operator+(const MultiIndex& other) const {
        if (primes() != other.primes())
            fail(errc::invalid_argument, "multi-index addition requires identical prime sets");
        MultiIndex sum = *this;
        for (auto& [p, l] : sum.entries) l += other.entries.at(p);
        return sum;
    }

    bool operator==(const MultiIndex& other) const { return entries == other.entries; }
};

enum class Branch { OddPrime, TwoMod1, TwoMod3 };

inline std::string branch_name(Branch b) {
    switch (b) {
        case Branch::OddPrime: return "odd-prime";
        case Branch::TwoMod1: return "two-1mod4";
        case Branch::TwoMod3: return "two-3mod4";
    }
    bug("unreachable branch tag");
}

/// The data governing the order of m in U(Z/p^l Z) for every l at once:
/// a base order, the level L past which the order grows by a factor of p
/// per level, and the branch tag selecting the piecewise law.
struct OrderProfile {
    Natural p;
    Natural m;
    Branch branch = Branch::OddPrime;
    Natural base_order = 1;
    int L = 1;
    /// True when the order never jumps (m = 1); L then holds the scan cap
    /// and the order is base_order at every level.
    bool degenerate = false;
};

/// Closed-form order of m in U(Z/p^l Z) read off the profile.
inline Natural order_at(const OrderProfile& profile, int l) {
    if (l < 1) fail(errc::invalid_argument, "level must be >= 1");
    if (profile.degenerate) return profile.base_order;
    switch (profile.branch) {
        case Branch::OddPrime:
            if (l <= profile.L) return profile.base_order;
            return profile.base_order * pow_natural(profile.p, static_cast<unsigned>(l - profile.L));
        case Branch::TwoMod1:
            if (l <= profile.L) return 1;
            return pow_natural(2, static_cast<unsigned>(l - profile.L));
        case Branch::TwoMod3:
            if (l == 1) return 1;
            if (l <= profile.L) return 2;
            return pow_natural(2, static_cast<unsigned>(l - (profile.L - 1)));
    }
    bug("unreachable branch tag");
}

namespace detail {

/// Largest v with m^e ≡ 1 (mod p^v), i.e. the p-adic valuation of m^e - 1,
/// computed by modular probes so m^e is never materialized.
inline int valuation_of_power_minus_one(const Natural& m, const Natural& e, const Natural& p) {
    if (m == 1) bug("valuation probe called with m = 1");
    int v = 0;
    while (pow_mod(m, e, pow_natural(p, static_cast<unsigned>(v + 1))) == 1) ++v;
    if (v < 1) bug("expected at least one dividing power in valuation probe");
    return v;
}

inline void check_scan_agreement(const OrderProfile& profile, int scan_levels) {
    int limit = std::min(profile.L + 1, scan_levels);
    for (int l = 1; l <= limit; ++l) {
        Natural modulus = pow_natural(profile.p, static_cast<unsigned>(l));
        if (order_bruteforce(profile.m, modulus) != order_at(profile, l))
            bug("stabilization scan disagrees with the closed form at p=" + profile.p.str() +
                " m=" + profile.m.str() + " l=" + std::to_string(l));
    }
}

}  // namespace detail

/// Profile of m in the cyclic groups U(Z/p^l Z), p odd: base order o_p(m)
/// and the stabilization constant L located as the p-adic valuation of
/// m^{o_p(m)} - 1, then confirmed against the brute-force order scan.
inline OrderProfile profile_odd(const Natural& p, const Natural& m,
                                int scan_levels = kDefaultScanLevels) {
    if (p == 2) fail(errc::wrong_branch, "p = 2 requires the two-branch profile");
    if (!is_prime(p)) fail(errc::not_prime, p.str() + " is not prime");
    if (gcd(m % p, p) != 1) fail(errc::not_a_unit, m.str() + " is not a unit mod " + p.str());
    if (m == 1) return {p, m, Branch::OddPrime, 1, scan_levels, true};

    Natural base = order_fast(m, Factorization({{p, 1}}));
    int L = detail::valuation_of_power_minus_one(m, base, p);
    OrderProfile profile{p, m, Branch::OddPrime, base, L, false};
    detail::check_scan_agreement(profile, scan_levels);
    return profile;
}

/// Profile of odd m in the (non-cyclic for l >= 3) groups U(Z/2^l Z).
/// For m ≡ 1 (mod 4) the constant is the 2-adic valuation of m - 1; for
/// m ≡ 3 (mod 4) it is located by scanning for the first jump in the order
/// of m^2, with the valuation of m^2 - 1 as a cross-check.
inline OrderProfile profile_two(const Natural& m, int scan_levels = kDefaultScanLevels) {
    if (m % 2 == 0) fail(errc::not_a_unit, m.str() + " is even");
    if (m == 1) return {2, m, Branch::TwoMod1, 1, scan_levels, true};

    OrderProfile profile;
    if (m % 4 == 1) {
        int K = p_adic_valuation(m - 1, 2);
        profile = {2, m, Branch::TwoMod1, 1, K, false};
    } else {
        Natural msq = m * m;
        int L = 0;
        for (int l = 1; l < scan_levels; ++l) {
            Natural low = order_bruteforce(msq, pow_natural(2, static_cast<unsigned>(l)));
            Natural high = order_bruteforce(msq, pow_natural(2, static_cast<unsigned>(l + 1)));
            if (low < high) {
                L = l;
                break;
            }
        }
        if (L == 0) L = p_adic_valuation(msq - 1, 2);  // jump beyond the scan window
        else if (L != p_adic_valuation(msq - 1, 2))
            bug("two-branch scan disagrees with the valuation of m^2 - 1 at m=" + m.str());
        profile = {2, m, Branch::TwoMod3, 2, L, false};
    }
    detail::check_scan_agreement(profile, scan_levels);
    return profile;
}

inline OrderProfile profile(const Natural& p, const Natural& m,
                            int scan_levels = kDefaultScanLevels) {
    return p == 2 ? profile_two(m, scan_levels) : profile_odd(p, m, scan_levels);
}

/// Order of q in the product group over p in F of U(Z/p^{l_p} Z): the lcm
/// of the per-factor orders.
inline Natural multi_order(const PrimeSet& F, const Natural& q, const MultiIndex& l) {
    if (!is_prime(q)) fail(errc::not_prime, q.str() + " is not prime");
    if (F.count(q)) fail(errc::not_coprime, q.str() + " lies in the prime set");
    if (l.primes() != F)
        fail(errc::invalid_argument, "multi-index primes must match the prime set");
    Natural result = 1;
    for (const Natural& p : F) {
        int lp = l.at(p);
        if (lp < 1) fail(errc::invalid_argument, "multi-index entries must be >= 1");
        result = lcm(result, order_at(profile(p, q), lp));
    }
    return result;
}

/// The (K, d) of the multi-prime stabilization law together with the
/// auxiliary offsets z: for every l in N^F,
///   o_{K+l}(q) = d * prod_{p in F} p^{l_p}.
struct StabilizationData {
    PrimeSet F;
    Natural q;
    MultiIndex K;
    Natural d = 1;
    MultiIndex z;
};

inline StabilizationData stabilization_data(const PrimeSet& F, const Natural& q) {
    if (F.empty()) fail(errc::empty_prime_set, "prime set must be nonempty");
    if (!is_prime(q)) fail(errc::not_prime, q.str() + " is not prime");
    if (F.count(q)) fail(errc::not_coprime, q.str() + " lies in the prime set");

    std::map<Natural, OrderProfile> profiles;
    for (const Natural& p : F) profiles.emplace(p, profile(p, q));

    const bool has_two = F.count(2) > 0;
    // Base orders contributing to d and to the z offsets: every member for
    // an all-odd F, only the odd members once 2 enters the picture.
    std::vector<Natural> contributing;
    for (const Natural& p : F)
        if (!has_two || p != 2) contributing.push_back(profiles.at(p).base_order);

    StabilizationData data;
    data.F = F;
    data.q = q;

    Natural d = 1;
    for (const Natural& o : contributing) d = lcm(d, o);
    if (has_two && q % 4 == 3) d = lcm(d, Natural(2));
    data.d = d;

    for (const Natural& p : F) {
        int z = 0;
        for (const Natural& o : contributing) z = std::max(z, p_adic_valuation(o, p));
        int K;
        if (p == 2 && q % 4 == 3) {
            z = std::max(z, 1);
            K = profiles.at(p).L + z - 1;
        } else {
            K = profiles.at(p).L + z;
        }
        data.z.entries[p] = z;
        data.K.entries[p] = K;
    }

    if (multi_order(F, q, data.K) != data.d)
        bug("stabilization data rejects its own level-zero identity for q=" + q.str());
    Natural phi_K = 1;
    for (const Natural& p : F)
        phi_K *= (p - 1) * pow_natural(p, static_cast<unsigned>(data.K.at(p) - 1));
    if (phi_K % data.d != 0) bug("d does not divide the totient at level K");
    return data;
}

/// Index of the closure of q^Z in the profinite unit group over F:
///   prod_{p in F} (p-1) p^{K_p - 1} / d.
inline Natural index_closure(const PrimeSet& F, const Natural& q) {
    StabilizationData data = stabilization_data(F, q);
    Natural numerator = 1;
    for (const Natural& p : F)
        numerator *= (p - 1) * pow_natural(p, static_cast<unsigned>(data.K.at(p) - 1));
    if (numerator % data.d != 0) bug("closure index formula is non-integral");
    return numerator / data.d;
}

/// Index of the closure of q^Z r^Z in the units over the single odd prime p:
///   (p-1) p^{min(L_p(q), L_p(r)) - 1} / [o_p(q), o_p(r)].
inline Natural two_generator_index(const Natural& p, const Natural& q, const Natural& r) {
    if (p == 2) fail(errc::unsupported, "the two-generator index formula needs an odd p");
    if (q == r || p == q || p == r)
        fail(errc::not_coprime, "p, q, r must be pairwise distinct primes");
    if (!is_prime(q) || !is_prime(r)) fail(errc::not_prime, "generators must be prime");
    OrderProfile pq = profile_odd(p, q);
    OrderProfile pr = profile_odd(p, r);
    Natural numerator =
        (p - 1) * pow_natural(p, static_cast<unsigned>(std::min(pq.L, pr.L) - 1));
    Natural denominator = lcm(pq.base_order, pr.base_order);
    if (numerator % denominator != 0) bug("two-generator index formula is non-integral");
    return numerator / denominator;
}

/// A brute-force index accepted once two consecutive levels agree; the
/// stopping rule is heuristic (the formulas guarantee finiteness but give
/// no multi-generator stopping criterion).
struct BruteForcedIndex {
    Natural value;
    int stabilized_level = 0;
    bool heuristic = true;
};

/// I(q): the stabilized value of |<q, r>| / |<q>| inside U(Z/p^l Z).
inline BruteForcedIndex i_q_index(const Natural& p, const Natural& q, const Natural& r,
                                  const Natural& cap = kDefaultEnumerationCap) {
    if (!is_prime(p)) fail(errc::not_prime, p.str() + " is not prime");
    if (q == r || p == q || p == r)
        fail(errc::not_coprime, "p, q, r must be pairwise distinct primes");
    PrimeSet F{p};
    int l0 = std::max(stabilization_data(F, q).K.at(p), stabilization_data(F, r).K.at(p));

    auto ratio_at = [&](int l) -> Natural {
        Natural modulus = pow_natural(p, static_cast<unsigned>(l));
        if (modulus > cap)
            fail(errc::needs_higher_cap,
                 "index has not stabilized within the enumeration cap at p^" + std::to_string(l));
        Natural pair_size = closure_size_bruteforce({q, r}, modulus, cap);
        Natural single_size = closure_size_bruteforce({q}, modulus, cap);
        if (pair_size % single_size != 0) bug("subgroup sizes violate Lagrange");
        return pair_size / single_size;
    };

    Natural previous = ratio_at(l0);
    for (int l = l0 + 1;; ++l) {
        Natural current = ratio_at(l);
        if (current == previous) return {current, l, true};
        previous = current;
    }
}

/// Representation u ≡ ±5^k (mod 2^l) with 0 <= k < 2^{l-2}; the sign is +
/// exactly when u ≡ 1 (mod 4).
struct TwoAdicLog {
    bool negative = false;
    Natural k;
};

inline TwoAdicLog two_adic_log(const Natural& u, int l,
                               const Natural& cap = kDefaultEnumerationCap) {
    if (u % 2 == 0) fail(errc::not_a_unit, u.str() + " is even");
    if (l < 3) fail(errc::invalid_argument, "two_adic_log requires l >= 3");
    Natural modulus = pow_natural(2, static_cast<unsigned>(l));
    Natural group_order = pow_natural(2, static_cast<unsigned>(l - 2));
    Natural reduced = u % modulus;
    bool negative = reduced % 4 == 3;
    Natural target = negative ? modulus - reduced : reduced;

    if (l <= 20) {
        Natural power = 1;
        for (Natural k = 0; k < group_order; ++k) {
            if (power == target) return {negative, k};
            power = power * 5 % modulus;
        }
        bug("unit not represented as ±5^k in the odd-unit group mod 2^l");
    }

    // Baby-step giant-step in the cyclic group <5> of order 2^{l-2}.
    Natural step = 1;
    while (step * step < group_order) step <<= 1;
    if (step > cap) fail(errc::oracle_too_large, "discrete-log table exceeds the enumeration cap");
    std::unordered_map<std::string, Natural> baby;
    Natural power = 1;
    for (Natural j = 0; j < step; ++j) {
        baby.emplace(power.str(), j);
        power = power * 5 % modulus;
    }
    Natural giant = pow_mod(5, group_order - step, modulus);  // 5^{-step}
    Natural current = target;
    for (Natural i = 0; i * step < group_order; ++i) {
        auto it = baby.find(current.str());
        if (it != baby.end()) return {negative, i * step + it->second};
        current = current * giant % modulus;
    }
    bug("unit not represented as ±5^k in the odd-unit group mod 2^l");
}

}  // namespace bcinv
