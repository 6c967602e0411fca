#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "phisig/util.hpp"

namespace phisig {

// Flat smallest-prime-factor sieve.  One uint32 per integer up to `limit`
// (not segmented), so factorization of any n <= limit costs O(log n) divisions
// with no further allocation.  Immutable after construction; safe to share
// across threads read-only.
struct PrimeTable {
    u64 limit = 0;                 // table answers queries for 2..limit
    std::vector<std::uint32_t> spf; // spf[n] = smallest prime factor, spf[0]=spf[1]=0

    bool is_prime(u64 n) const { return n >= 2 && n <= limit && spf[n] == n; }
    bool in_range(u64 n) const { return n >= 2 && n <= limit; }
};

// Default ceiling on sieve size; ~400 MB of spf entries.  Larger requests are
// refused as a resource error rather than attempted.
inline constexpr u64 kPrimeTableCeiling = 100'000'000;

// Builds the sieve.  limit < 2 or limit > ceiling -> resource_error.
PrimeTable build_prime_table(u64 limit, u64 ceiling = kPrimeTableCeiling);

// Prime factorization with exponents, primes ascending.  value 1 is
// represented by an empty factor list.
struct FactoredInteger {
    u64 value = 1;
    std::vector<std::pair<u64, unsigned>> factors; // (prime, exponent)
};

// Factorizes via repeated spf lookups; factorize(1) is (1, []).  n outside
// [1, table.limit] -> domain error (the sieve is the only primality
// authority used anywhere; nothing falls back to probabilistic tests).
FactoredInteger factorize(u64 n, const PrimeTable& table);

// Euler's totient from a factorization; overflow of the product is a checked
// error (std::overflow_error), never silent wraparound.  phi(1) = 1.
u64 euler_phi(const FactoredInteger& f);

// Sum of divisors from a factorization; overflow checked.  sigma(1) = 1.
u64 sigma(const FactoredInteger& f);

// Largest prime factor; returns 1 for the empty factorization (the usual
// convention P+(1) = 1).
u64 largest_prime_factor(const FactoredInteger& f);

// Number of prime factors counted with multiplicity lying in (lo, hi].
// Requires lo < hi.
u64 omega_in_range(const FactoredInteger& f, u64 lo, u64 hi);

// True iff every exponent is 1.
bool is_squarefree(const FactoredInteger& f);

// Fast in-place variants used by the bulk scans: walk the spf chain without
// materializing a FactoredInteger.  n must satisfy 1 <= n <= table.limit.
u64 euler_phi_of(u64 n, const PrimeTable& table);
u64 sigma_of(u64 n, const PrimeTable& table);

} // namespace phisig
