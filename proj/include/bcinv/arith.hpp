#pragma once

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "bcinv/errors.hpp"
#include "bcinv/natural.hpp"

namespace bcinv {

using boost::multiprecision::gcd;
using boost::multiprecision::lcm;

/// base^exp mod modulus by square-and-multiply.
inline Natural pow_mod(const Natural& base, const Natural& exp, const Natural& modulus) {
    if (modulus < 2) fail(errc::invalid_modulus, "modulus must be >= 2, got " + modulus.str());
    require_nonnegative(base, "base");
    require_nonnegative(exp, "exponent");
    Natural result = 1;
    Natural b = base % modulus;
    Natural e = exp;
    while (e > 0) {
        if (bit_test(e, 0)) result = result * b % modulus;
        b = b * b % modulus;
        e >>= 1;
    }
    return result;
}

/// Exact integer power (no modulus).
inline Natural pow_natural(const Natural& base, unsigned exp) {
    Natural result = 1;
    for (unsigned i = 0; i < exp; ++i) result *= base;
    return result;
}

inline bool is_prime(const Natural& n);

/// Largest v with p^v | n.  Undefined for n = 0.
inline int p_adic_valuation(const Natural& n, const Natural& p) {
    if (n == 0) fail(errc::undefined_valuation, "valuation of 0 is undefined");
    require_nonnegative(n, "n");
    if (p < 2 || !is_prime(p)) fail(errc::not_prime, "valuation base must be prime, got " + p.str());
    int v = 0;
    Natural m = n;
    while (m % p == 0) {
        m /= p;
        ++v;
    }
    return v;
}

namespace detail {

inline bool miller_rabin_witness(const Natural& n, const Natural& a, const Natural& d, int r) {
    Natural x = pow_mod(a % n, d, n);
    if (x == 1 || x == n - 1) return false;
    for (int i = 1; i < r; ++i) {
        x = x * x % n;
        if (x == n - 1) return false;
    }
    return true;  // a witnesses compositeness
}

}  // namespace detail

/// Deterministic primality: trial division below 10^6, Miller-Rabin with a
/// witness set proven complete for 64-bit inputs.  Larger inputs are out of
/// scope for this library.
inline bool is_prime(const Natural& n) {
    static const Natural two_pow_64 = Natural(1) << 64;
    if (n >= two_pow_64)
        fail(errc::out_of_scope, "primality testing beyond 64-bit inputs is out of scope");
    if (n < 2) return false;
    if (n < 4) return true;
    if (n % 2 == 0) return false;
    if (n < 1000000) {
        for (Natural d = 3; d * d <= n; d += 2)
            if (n % d == 0) return false;
        return true;
    }
    for (Natural d : {3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37})
        if (n % d == 0) return n == d;
    Natural d = n - 1;
    int r = 0;
    while (d % 2 == 0) {
        d /= 2;
        ++r;
    }
    for (const Natural a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37})
        if (detail::miller_rabin_witness(n, a, d, r)) return false;
    return true;
}

/// Ordered prime-power decomposition.  Moduli are always assembled from
/// prime-set inputs; this type carries them together with their totients.
struct Factorization {
    std::vector<std::pair<Natural, unsigned>> factors;  // (prime, exponent), primes ascending

    Factorization() = default;

    explicit Factorization(std::vector<std::pair<Natural, unsigned>> f) : factors(std::move(f)) {
        Natural last = 1;
        for (const auto& [p, e] : factors) {
            if (p <= last) fail(errc::invalid_argument, "factor primes must be strictly increasing");
            if (!is_prime(p)) fail(errc::not_prime, p.str() + " is not prime");
            if (e == 0) fail(errc::invalid_argument, "factor exponents must be positive");
            last = p;
        }
    }

    static Factorization from_prime_powers(const std::map<Natural, unsigned>& powers) {
        std::vector<std::pair<Natural, unsigned>> f(powers.begin(), powers.end());
        return Factorization(std::move(f));
    }

    Natural value() const {
        Natural n = 1;
        for (const auto& [p, e] : factors) n *= pow_natural(p, e);
        return n;
    }

    Natural totient() const {
        Natural t = 1;
        for (const auto& [p, e] : factors) t *= (p - 1) * pow_natural(p, e - 1);
        return t;
    }

    bool empty() const { return factors.empty(); }
};

/// Factor a small integer by trial division (with a Miller-Rabin finish).
/// Only used for desk-scale quantities: orders, denominators, p - 1.
inline Factorization factorize(const Natural& n) {
    if (n < 1) fail(errc::invalid_argument, "can only factor positive integers");
    std::vector<std::pair<Natural, unsigned>> factors;
    Natural m = n;
    auto strip = [&m, &factors](const Natural& p) {
        unsigned e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        if (e > 0) factors.emplace_back(p, e);
    };
    strip(2);
    for (Natural d = 3; d <= 999999 && d * d <= m; d += 2) strip(d);
    if (m > 1) {
        if (!is_prime(m))
            fail(errc::out_of_scope, "cofactor " + m.str() + " exceeds the trial-division range");
        factors.emplace_back(m, 1);
    }
    return Factorization(std::move(factors));
}

/// Exact rational in lowest terms with positive denominator.  Reports never
/// carry floating point; ratios travel as num/den pairs.
struct Rational {
    Int num = 0;
    Natural den = 1;

    Rational() = default;
    Rational(Int n, Natural d) {
        if (d <= 0) fail(errc::invalid_argument, "denominator must be positive");
        Natural g = gcd(abs(n), d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        num = std::move(n);
        den = std::move(d);
    }

    bool operator==(const Rational& other) const { return num == other.num && den == other.den; }
    bool operator<=(const Rational& other) const { return num * other.den <= other.num * den; }
};

/// Extended gcd: returns g = gcd(a, b) and sets x, y with a*x + b*y = g.
inline Int extended_gcd(const Int& a, const Int& b, Int& x, Int& y) {
    if (b == 0) {
        x = (a < 0) ? -1 : 1;
        y = 0;
        return abs(a);
    }
    Int x1, y1;
    Int g = extended_gcd(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return g;
}

/// Solve x ≡ r1 (mod m1), x ≡ r2 (mod m2) for coprime moduli.
inline Natural crt_pair(const Natural& r1, const Natural& m1, const Natural& r2, const Natural& m2) {
    Int u, v;
    Int g = extended_gcd(Int(m1), Int(m2), u, v);
    if (g != 1) fail(errc::not_coprime, "crt moduli are not coprime");
    Int m = Int(m1) * Int(m2);
    Int x = (Int(r1) * v % m) * Int(m2) % m + (Int(r2) * u % m) * Int(m1) % m;
    x %= m;
    if (x < 0) x += m;
    return Natural(x);
}

}  // namespace bcinv
