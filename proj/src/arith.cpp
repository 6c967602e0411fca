#include "phisig/arith.hpp"

#include <stdexcept>
#include <string>

#include "phisig/errors.hpp"

namespace phisig {

PrimeTable build_prime_table(u64 limit, u64 ceiling) {
    if (limit < 2)
        throw resource_error("prime table limit must be at least 2");
    if (limit > ceiling)
        throw resource_error("prime table limit " + std::to_string(limit) +
                             " exceeds ceiling " + std::to_string(ceiling));
    PrimeTable t;
    t.limit = limit;
    t.spf.assign(limit + 1, 0);
    for (u64 i = 2; i <= limit; ++i) t.spf[i] = static_cast<std::uint32_t>(i);
    for (u64 i = 2; i * i <= limit; ++i) {
        if (t.spf[i] != i) continue; // composite, already has a smaller factor
        for (u64 j = i * i; j <= limit; j += i)
            if (t.spf[j] == j) t.spf[j] = static_cast<std::uint32_t>(i);
    }
    return t;
}

FactoredInteger factorize(u64 n, const PrimeTable& table) {
    if (n < 1 || n > table.limit)
        throw std::domain_error("factorize: " + std::to_string(n) +
                                " outside sieve range [1, " +
                                std::to_string(table.limit) + "]");
    FactoredInteger f;
    f.value = n;
    while (n > 1) {
        u64 p = table.spf[n];
        unsigned e = 0;
        while (n % p == 0) { n /= p; ++e; }
        f.factors.emplace_back(p, e);
    }
    return f;
}

u64 euler_phi(const FactoredInteger& f) {
    u64 r = 1;
    for (auto [p, e] : f.factors) {
        r = checked_mul(r, p - 1);
        for (unsigned i = 1; i < e; ++i) r = checked_mul(r, p);
    }
    return r;
}

u64 sigma(const FactoredInteger& f) {
    u64 r = 1;
    for (auto [p, e] : f.factors) {
        u64 term = 1, pw = 1;
        for (unsigned i = 0; i < e; ++i) {
            pw = checked_mul(pw, p);
            term = checked_add(term, pw); // 1 + p + ... + p^e
        }
        r = checked_mul(r, term);
    }
    return r;
}

u64 largest_prime_factor(const FactoredInteger& f) {
    if (f.factors.empty()) return 1;
    return f.factors.back().first;
}

u64 omega_in_range(const FactoredInteger& f, u64 lo, u64 hi) {
    if (lo >= hi)
        throw std::domain_error("omega_in_range: empty interval (lo >= hi)");
    u64 count = 0;
    for (auto [p, e] : f.factors)
        if (p > lo && p <= hi) count += e;
    return count;
}

bool is_squarefree(const FactoredInteger& f) {
    for (auto [p, e] : f.factors)
        if (e > 1) return false;
    return true;
}

u64 euler_phi_of(u64 n, const PrimeTable& table) {
    if (n == 0 || n > table.limit)
        throw std::domain_error("euler_phi_of: argument outside sieve range");
    u64 r = 1;
    while (n > 1) {
        u64 p = table.spf[n];
        n /= p;
        r *= p - 1;
        while (n % p == 0) { n /= p; r *= p; }
    }
    return r;
}

u64 sigma_of(u64 n, const PrimeTable& table) {
    if (n == 0 || n > table.limit)
        throw std::domain_error("sigma_of: argument outside sieve range");
    u64 r = 1;
    while (n > 1) {
        u64 p = table.spf[n];
        u64 term = 1 + p, pw = p;
        n /= p;
        while (n % p == 0) { n /= p; pw *= p; term += pw; }
        r *= term;
    }
    return r;
}

} // namespace phisig
