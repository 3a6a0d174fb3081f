#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace bcinv {

/// Error raised when an operation is called outside its domain (bad unit,
/// cap exceeded, wrong branch, ...).  `code()` is a stable identifier from a
/// closed vocabulary; the CLI maps it into structured error reports.
class DomainError : public std::runtime_error {
public:
    DomainError(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

namespace errc {
inline constexpr const char* invalid_modulus = "invalid-modulus";
inline constexpr const char* undefined_valuation = "undefined-valuation";
inline constexpr const char* not_a_unit = "not-a-unit";
inline constexpr const char* not_prime = "not-prime";
inline constexpr const char* not_coprime = "not-coprime";
inline constexpr const char* oracle_too_large = "oracle-too-large";
inline constexpr const char* needs_higher_cap = "needs-higher-cap";
inline constexpr const char* wrong_branch = "wrong-branch";
inline constexpr const char* unsupported = "unsupported";
inline constexpr const char* infinite_quotient = "infinite-quotient";
inline constexpr const char* empty_prime_set = "empty-prime-set";
inline constexpr const char* prime_search_bound_exceeded = "prime-search-bound-exceeded";
inline constexpr const char* not_in_closure = "not-in-closure";
inline constexpr const char* out_of_scope = "out-of-scope";
inline constexpr const char* invalid_argument = "invalid-argument";
}  // namespace errc

[[noreturn]] inline void fail(const char* code, const std::string& message) {
    throw DomainError(code, message);
}

/// Internal invariant violation: the mathematics guarantees the condition, so a
/// failure signals an implementation bug, not a bad input.
[[noreturn]] inline void bug(const std::string& message) {
    throw std::logic_error("internal error: " + message);
}

}  // namespace bcinv
