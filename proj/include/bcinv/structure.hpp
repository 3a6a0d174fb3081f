#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bcinv/arith.hpp"
#include "bcinv/errors.hpp"
#include "bcinv/natural.hpp"
#include "bcinv/odometer.hpp"
#include "bcinv/order_profiles.hpp"
#include "bcinv/units.hpp"

namespace bcinv {

/// Closed vocabulary of K-groups appearing in the extension descriptors.
struct GroupTag {
    enum class Kind { Integers, PInverted } kind = Kind::Integers;
    Natural p = 0;  // recorded prime for Z[1/p]

    static GroupTag integers() { return {Kind::Integers, 0}; }
    static GroupTag p_inverted(const Natural& p) { return {Kind::PInverted, p}; }

    std::string name() const {
        return kind == Kind::Integers ? "Z" : "Z[1/" + p.str() + "]";
    }
    bool operator==(const GroupTag&) const = default;
};

/// 0 -> sub -> K_i -> quotient -> 0, with no splitting claim recorded.
struct KTheoryExtensionDescriptor {
    GroupTag sub;
    GroupTag quotient;
    bool operator==(const KTheoryExtensionDescriptor&) const = default;
};

enum class SubquotientKind { BunceDeddens, Rank2AT, HigherRankAT };

inline std::string subquotient_kind_name(SubquotientKind k) {
    switch (k) {
        case SubquotientKind::BunceDeddens: return "bunce-deddens";
        case SubquotientKind::Rank2AT: return "rank2-at";
        case SubquotientKind::HigherRankAT: return "higher-rank-at";
    }
    bug("unreachable kind tag");
}

/// One summand record of a composition-series layer.  The acting primes S
/// and the space primes F \ S are both listed explicitly, never relabeled.
struct SubquotientDescriptor {
    PrimeSet action_primes;           // S
    PrimeSet space_primes;            // F \ S
    Natural summand_count = 1;
    SubquotientKind kind = SubquotientKind::BunceDeddens;
    std::optional<SupernaturalNumber> supernatural;  // kind bunce-deddens
    std::optional<std::pair<KTheoryExtensionDescriptor, KTheoryExtensionDescriptor>> k_theory;
    std::string stabilizer_note;
    int stabilized_level = 0;  // level at which the brute-force count stabilized
};

struct CompositionSeriesReport {
    PrimeSet F;
    struct Bottom {
        PrimeSet space_primes;
        std::string note;
    } bottom;
    std::vector<std::vector<SubquotientDescriptor>> layers;  // k = 1 .. |F|-1
    struct Top {
        int torus_rank = 0;
    } top;
};

/// Stabilized brute-force count of simple summands: the index of the
/// closure of Z^S in the units over F \ S.
inline BruteForcedIndex subquotient_summands(const PrimeSet& F_minus_S, const PrimeSet& S,
                                             const Natural& cap = kDefaultEnumerationCap) {
    if (F_minus_S.empty() || S.empty()) fail(errc::empty_prime_set, "both prime sets must be nonempty");
    for (const Natural& p : S) {
        if (!is_prime(p)) fail(errc::not_prime, p.str() + " is not prime");
        if (F_minus_S.count(p)) fail(errc::not_coprime, "prime sets must be disjoint");
    }
    int start = 1;
    for (const Natural& g : S) {
        StabilizationData data = stabilization_data(F_minus_S, g);
        for (const Natural& p : F_minus_S) start = std::max(start, data.K.at(p));
    }

    auto index_at = [&](int l) {
        std::map<Natural, unsigned> powers;
        for (const Natural& p : F_minus_S) powers[p] = static_cast<unsigned>(l);
        Factorization fact = Factorization::from_prime_powers(powers);
        if (fact.value() > cap)
            fail(errc::needs_higher_cap,
                 "summand count has not stabilized within the enumeration cap");
        std::set<Natural> gens(S.begin(), S.end());
        return subgroup_index_bruteforce(gens, fact, cap);
    };

    Natural previous = index_at(start);
    for (int l = start + 1;; ++l) {
        Natural current = index_at(l);
        if (current == previous) return {current, l, true};
        previous = current;
    }
}

/// Summand count and Bunce-Deddens invariant for a single acting prime q on
/// the units over F_minus_S: count = prod (p-1)p^{K_p - 1} / d, supernatural
/// number d * prod p^infinity.
struct OnePrimeSummand {
    Natural count;
    SupernaturalNumber supernatural;
    Natural d;
    MultiIndex K;
};

inline OnePrimeSummand one_prime_summand(const PrimeSet& F_minus_S, const Natural& q) {
    StabilizationData data = stabilization_data(F_minus_S, q);
    Natural count = index_closure(F_minus_S, q);
    SupernaturalNumber sn =
        with_infinite_primes(supernatural_from_natural(data.d), F_minus_S);

    // Cross-check against the odometer route: the digit sequence of the
    // inverse system must reproduce the same supernatural number.
    InverseSystemSpec sys = make_inverse_system(F_minus_S, q, data.K, 3);
    SupernaturalNumber via_digits = supernatural_of_spec(d_sequence(sys), F_minus_S);
    if (!sn_equal(sn, via_digits))
        bug("supernatural number disagrees between the index formula and the digit sequence");
    return {count, sn, data.d, data.K};
}

/// Summand count and K-theory extension shapes for two acting primes q, r
/// on the units over the single odd prime p.
struct TwoPrimeKTheory {
    Natural count;
    KTheoryExtensionDescriptor k0;
    KTheoryExtensionDescriptor k1;
    Natural i_q;
    Natural i_r;
};

inline TwoPrimeKTheory two_prime_k_theory(const Natural& p, const Natural& q, const Natural& r,
                                          const Natural& cap = kDefaultEnumerationCap) {
    Natural count = two_generator_index(p, q, r);
    KTheoryExtensionDescriptor k0{GroupTag::p_inverted(p), GroupTag::integers()};
    KTheoryExtensionDescriptor k1{GroupTag::integers(), GroupTag::p_inverted(p)};
    Natural iq = i_q_index(p, q, r, cap).value;
    Natural ir = i_q_index(p, r, q, cap).value;
    return {count, k0, k1, iq, ir};
}

namespace detail {

inline std::vector<std::vector<Natural>> combinations(const std::vector<Natural>& items, int k) {
    std::vector<std::vector<Natural>> result;
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    const int n = static_cast<int>(items.size());
    while (true) {
        std::vector<Natural> combo;
        for (int i : idx) combo.push_back(items[static_cast<std::size_t>(i)]);
        result.push_back(std::move(combo));
        int pos = k - 1;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
        if (pos < 0) break;
        ++idx[static_cast<std::size_t>(pos)];
        for (int i = pos + 1; i < k; ++i)
            idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
    }
    return result;
}

}  // namespace detail

/// Full composition-series report: bottom type-I ideal, the middle layers
/// indexed by the acting subsets S with their summand analyses, and the
/// commutative torus quotient on top.
inline CompositionSeriesReport composition_series(const PrimeSet& F,
                                                  const Natural& cap = kDefaultEnumerationCap) {
    if (F.empty()) fail(errc::empty_prime_set, "prime set must be nonempty");
    if (F.size() > 4) fail(errc::unsupported, "composition series supported for |F| <= 4");
    for (const Natural& p : F)
        if (!is_prime(p)) fail(errc::not_prime, p.str() + " is not prime");

    CompositionSeriesReport report;
    report.F = F;
    report.bottom = {F, "C(U(Z_F), K(l^2(N^F)))"};
    report.top = {static_cast<int>(F.size())};

    std::vector<Natural> primes(F.begin(), F.end());
    for (int k = 1; k + 1 <= static_cast<int>(F.size()); ++k) {
        std::vector<SubquotientDescriptor> layer;
        for (const auto& combo : detail::combinations(primes, k)) {
            PrimeSet S(combo.begin(), combo.end());
            PrimeSet FS;
            for (const Natural& p : F)
                if (!S.count(p)) FS.insert(p);

            BruteForcedIndex brute = subquotient_summands(FS, S, cap);
            SubquotientDescriptor desc;
            desc.action_primes = S;
            desc.space_primes = FS;
            desc.summand_count = brute.value;
            desc.stabilized_level = brute.stabilized_level;
            desc.stabilizer_note = "⊗ K(l²(N^{F∖S}))";

            if (k == 1) {
                desc.kind = SubquotientKind::BunceDeddens;
                OnePrimeSummand one = one_prime_summand(FS, *S.begin());
                if (one.count != brute.value)
                    bug("closed-form summand count disagrees with brute force");
                desc.supernatural = one.supernatural;
            } else if (k == 2) {
                desc.kind = SubquotientKind::Rank2AT;
                if (FS.size() == 1 && *FS.begin() != 2) {
                    auto it = S.begin();
                    Natural q = *it++;
                    Natural r = *it;
                    TwoPrimeKTheory kt = two_prime_k_theory(*FS.begin(), q, r, cap);
                    if (kt.count != brute.value)
                        bug("two-generator index disagrees with brute force");
                    desc.k_theory = std::make_pair(kt.k0, kt.k1);
                }
            } else {
                desc.kind = SubquotientKind::HigherRankAT;
            }
            layer.push_back(std::move(desc));
        }
        report.layers.push_back(std::move(layer));
    }
    return report;
}

/// Both sides of the ideal-lattice identity instantiated in the open-set
/// model (sum = union, product = intersection), over a ground set of at
/// most 12 points encoded as bitmasks.
struct LatticeCheckResult {
    bool equal = false;
    std::uint16_t lhs = 0;
    std::uint16_t rhs = 0;
};

inline LatticeCheckResult lattice_identity_check(const std::vector<std::uint16_t>& open_sets,
                                                 int k) {
    const int n = static_cast<int>(open_sets.size());
    if (n < 2 || n > 6) fail(errc::invalid_argument, "need between 2 and 6 open sets");
    if (k < 1 || k > n) fail(errc::invalid_argument, "k must lie in 1..n");

    std::uint16_t lhs = 0xFFF;  // intersection over |S| = k of unions
    std::uint16_t rhs = 0;      // union over |R| = n-k+1 of intersections
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        int bits = __builtin_popcount(mask);
        if (bits == k) {
            std::uint16_t u = 0;
            for (int i = 0; i < n; ++i)
                if (mask & (1u << i)) u |= open_sets[static_cast<std::size_t>(i)];
            lhs &= u;
        }
        if (bits == n - k + 1) {
            std::uint16_t v = 0xFFF;
            for (int i = 0; i < n; ++i)
                if (mask & (1u << i)) v &= open_sets[static_cast<std::size_t>(i)];
            rhs |= v;
        }
    }
    return {lhs == rhs, lhs, rhs};
}

struct TransitivityResult {
    bool transitive = false;
    Natural orbit_size = 1;
};

/// Does the group generated by S act transitively on the level-l image of
/// the closure of Z^S?  The orbit of 1 under forward multiplication by the
/// generators is computed exhaustively and compared with the subgroup.
inline TransitivityResult cylinder_transitivity(const PrimeSet& F_minus_S, const PrimeSet& S,
                                                int level,
                                                const Natural& cap = kDefaultEnumerationCap) {
    if (F_minus_S.empty() || S.empty()) fail(errc::empty_prime_set, "both prime sets must be nonempty");
    for (const Natural& p : S)
        if (F_minus_S.count(p)) fail(errc::not_coprime, "prime sets must be disjoint");
    if (level < 0) fail(errc::invalid_argument, "level must be >= 0");
    if (level == 0) return {true, 1};

    Natural modulus = 1;
    for (const Natural& p : F_minus_S) modulus *= pow_natural(p, static_cast<unsigned>(level));
    if (modulus > cap)
        fail(errc::needs_higher_cap, "level modulus exceeds the enumeration cap");

    std::set<Natural> gens(S.begin(), S.end());
    std::vector<Natural> subgroup = closure_bruteforce(gens, modulus, cap);

    // Orbit of the identity under the forward dynamics.
    std::vector<bool> seen(to_index(modulus), false);
    std::vector<Natural> frontier{1};
    seen[1] = true;
    Natural orbit_size = 1;
    while (!frontier.empty()) {
        std::vector<Natural> next;
        for (const Natural& x : frontier)
            for (const Natural& g : gens) {
                Natural y = x * (g % modulus) % modulus;
                if (!seen[to_index(y)]) {
                    seen[to_index(y)] = true;
                    ++orbit_size;
                    next.push_back(y);
                }
            }
        frontier = std::move(next);
    }

    bool transitive = orbit_size == Natural(subgroup.size());
    for (const Natural& x : subgroup)
        if (!seen[to_index(x)]) transitive = false;
    return {transitive, orbit_size};
}

/// Level-n snapshot of the Bost-Connes truncation over a finite complement:
/// the finite group F_n, a generator per cyclic factor, Dirichlet primes
/// realizing the generators, the cumulative generating set E_n and the
/// dimension-growth ratio |E_n| / |F_n| with the displayed upper bound.
struct BostConnesTruncationReport {
    PrimeSet complement;
    int level = 1;
    Natural group_order;
    std::vector<Natural> generators;
    std::vector<Natural> dirichlet_primes;
    PrimeSet E_n;
    Rational growth_ratio;
    Rational paper_bound;
};

inline const Natural kDefaultPrimeSearchCap{1000000};

namespace detail {

/// Smallest positive primitive root mod p^n for odd p, by exhaustive order
/// testing.
inline Natural smallest_primitive_root(const Natural& p, unsigned n) {
    Factorization fact({{p, n}});
    Natural phi = fact.totient();
    for (Natural g = 2;; ++g) {
        if (g % p == 0) continue;
        if (order_fast(g, fact) == phi) return g;
    }
}

/// Generators of the cyclic factors of U(Z/p^n Z): a primitive root for odd
/// p; the {-1, 5} generating pair for p = 2 and n >= 3.
inline std::vector<Natural> unit_group_generators(const Natural& p, unsigned n) {
    if (p == 2) {
        if (n == 1) return {};
        if (n == 2) return {3};
        return {pow_natural(2, n) - 1, 5};
    }
    return {smallest_primitive_root(p, n)};
}

struct LevelData {
    std::vector<Natural> generators;  // CRT lifts generating F_n
    std::vector<Natural> dirichlet_primes;
};

inline LevelData bost_connes_level(const PrimeSet& complement, int n,
                                   const Natural& prime_search_cap) {
    Natural modulus = 1;
    for (const Natural& p : complement) modulus *= pow_natural(p, static_cast<unsigned>(n));

    LevelData data;
    for (const Natural& p : complement) {
        Natural pn = pow_natural(p, static_cast<unsigned>(n));
        for (const Natural& g : unit_group_generators(p, static_cast<unsigned>(n))) {
            Natural lift = modulus == pn ? g % pn : crt_pair(g, pn, 1, modulus / pn);
            data.generators.push_back(lift);

            Natural candidate = lift;
            Natural tried = 0;
            for (;;) {
                if (candidate > 1 && is_prime(candidate)) break;
                candidate += modulus;
                if (++tried > prime_search_cap)
                    fail(errc::prime_search_bound_exceeded,
                         "no prime found in the progression " + lift.str() + " + k*" +
                             modulus.str());
            }
            data.dirichlet_primes.push_back(candidate);
        }
    }
    return data;
}

}  // namespace detail

inline BostConnesTruncationReport bost_connes_truncation(
    const PrimeSet& complement, int n, const Natural& prime_search_cap = kDefaultPrimeSearchCap,
    const Natural& cap = kDefaultEnumerationCap) {
    if (complement.empty()) fail(errc::empty_prime_set, "complement must be nonempty");
    for (const Natural& p : complement)
        if (!is_prime(p)) fail(errc::not_prime, p.str() + " is not prime");
    if (n < 1) fail(errc::invalid_argument, "level must be >= 1");

    Natural modulus = 1;
    Natural group_order = 1;
    for (const Natural& p : complement) {
        modulus *= pow_natural(p, static_cast<unsigned>(n));
        group_order *= (p - 1) * pow_natural(p, static_cast<unsigned>(n - 1));
    }
    if (modulus > cap) fail(errc::needs_higher_cap, "level modulus exceeds the enumeration cap");

    BostConnesTruncationReport report;
    report.complement = complement;
    report.level = n;
    report.group_order = group_order;

    PrimeSet E;
    for (int m = 1; m <= n; ++m) {
        detail::LevelData level = detail::bost_connes_level(complement, m, prime_search_cap);
        E.insert(level.dirichlet_primes.begin(), level.dirichlet_primes.end());
        if (m == n) {
            report.generators = level.generators;
            report.dirichlet_primes = level.dirichlet_primes;
        }
    }
    if (report.generators.size() > complement.size() + 1)
        bug("more generators than cyclic factors");

    // The first n primes of S listed in ascending order.
    Natural candidate = 2;
    for (int taken = 0; taken < n; ++candidate) {
        if (!is_prime(candidate) || complement.count(candidate)) continue;
        E.insert(candidate);
        ++taken;
    }
    report.E_n = E;
    report.growth_ratio = Rational(Int(E.size()), group_order);
    report.paper_bound = Rational(Int(n) * (Int(complement.size()) + 2), group_order);

    // The Dirichlet primes must generate the full level-n group.
    std::set<Natural> gens(report.dirichlet_primes.begin(), report.dirichlet_primes.end());
    if (!gens.empty() &&
        Natural(closure_bruteforce(gens, modulus, cap).size()) != group_order)
        bug("Dirichlet primes fail to generate the truncated unit group");

    return report;
}

}  // namespace bcinv
