#pragma once

#include <string>
#include <vector>

#include "phisig/arith.hpp"
#include "phisig/util.hpp"

namespace phisig {

// Systems of affine forms a_i n + b_i (a_i >= 1) and the standard
// simultaneous-primality heuristics: local residue counts nu(p), the singular
// series prod_p (1 - nu(p)/p) / (1 - 1/p)^h, exact counts of n <= x making all
// forms prime, and the upper-bound sieve estimate
//   x (log log(|E| + 2))^h / (log x)^h,   E = prod a_i prod_{i<j} (a_i b_j - a_j b_i),
// with clamped iterated logarithms.

struct AffineForm {
    u64 a = 1;
    long long b = 0;
};

struct FormSystem {
    std::vector<AffineForm> forms;
    unsigned h() const { return static_cast<unsigned>(forms.size()); }
};

// Checks h in [1, 8], every a_i >= 1, and that no two forms are proportional
// (a_i b_j - a_j b_i != 0, which also makes E != 0).  Throws domain_error
// naming the offending pair, e.g. "forms 0 and 2 are proportional".
void validate_system(const FormSystem& system);

// E as an exact signed 128-bit integer; throws std::overflow_error when the
// product leaves the representable range (the sieve bound below then falls
// back to log-space on its own).
__int128 discriminant_E(const FormSystem& system);

// Number of residues n mod p with prod (a_i n + b_i) = 0 (mod p).  p must be
// prime (verified by trial division).  Forms with p | a_i contribute via
// direct residue enumeration; otherwise each form contributes its single root
// -b_i a_i^{-1} mod p and duplicates are merged.
u64 nu(u64 p, const FormSystem& system);

struct SingularSeries {
    double value = 0.0;                 // exactly 0 for obstructed systems
    double last_factor_deviation = 0.0; // |final local factor - 1|
};

// Truncated Euler product over primes p <= prime_bound (enumerated from the
// table; requires table.limit >= prime_bound).
SingularSeries singular_series(const FormSystem& system, u64 prime_bound,
                               const PrimeTable& table);

// #{ 1 <= n <= x : a_i n + b_i prime for every i }.  Every form value must
// stay within the sieve (checked up front; resource_error otherwise); values
// below 2 simply fail the primality test.
u64 count_simultaneous_primes(const FormSystem& system, u64 x,
                              const PrimeTable& table, unsigned threads = 0);

struct PredictionReport {
    u64 observed = 0;
    double predicted = 0.0; // singular series * x / (log x)^h
    double ratio = 0.0;     // observed / predicted, 0 when predicted == 0
};

PredictionReport prediction_ratio(const FormSystem& system, u64 x,
                                  u64 prime_bound, const PrimeTable& table,
                                  unsigned threads = 0);

// x (log2(|E|+2))^h / (log1 x)^h with clamped iterated logs; requires x >= 2.
double sieve_upper_bound(const FormSystem& system, double x);

// Parses "a*n+b" / "a*n-b" (also bare "n+b"); throws domain_error on syntax
// errors.  Used by the CLI and handy in tests.
AffineForm parse_affine_form(const std::string& text);

} // namespace phisig
