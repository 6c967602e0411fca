#pragma once

#include <optional>
#include <vector>

#include "phisig/arith.hpp"
#include "phisig/util.hpp"

namespace phisig {

// Exhaustive checks for the probabilistic lemmas: Chebyshev-type deviation
// counts over ordered factorizations, Poisson tail bounds, dual factorization
// counts with per-part multiplicity windows, and the exponent-comparison
// inequality controlling which index sets can carry the construction.

struct DeviationReport {
    u64 total = 0;      // i^omega(N) ordered factorizations
    u64 violations = 0; // |omega(d_1) - I/i| >= delta sqrt(I/i)
    double bound = 0.0; // delta^{-2} i^I
    bool holds = false; // violations <= bound
};

// N must be squarefree with 1 <= omega(N) <= 12; i >= 1, delta > 0.
DeviationReport factorization_deviation(const FactoredInteger& n, unsigned i,
                                        double delta);

struct PoissonChebyshevReport {
    double tail = 0.0;  // sum of z^k/k! over |k - z| > delta z
    double bound = 0.0; // e^z / delta^2
    bool holds = false;
};

PoissonChebyshevReport poisson_tail_chebyshev(double z, double delta);

struct PoissonExponentialReport {
    double lower_tail = 0.0;  // sum over k <= alpha z (inclusive)
    double lower_bound = 0.0; // (e/alpha)^{alpha z}
    double upper_tail = 0.0;  // sum over k >= beta z (inclusive)
    double upper_bound = 0.0; // (e/beta)^{beta z}
    bool holds = false;       // both tails strictly below their bounds
};

// Requires z > 0 and 0 < alpha < 1 < beta.
PoissonExponentialReport poisson_tail_exponential(double z, double alpha,
                                                  double beta);

struct PartOmegaWindow {
    double lo = 0.0;
    double hi = 0.0; // inclusive bounds on each part's prime count
};

// Number of ordered pairs of i-part factorizations of squarefree t whose
// parts all have prime counts inside the window (every pair when no window).
// The two sides factor independently, so the result is a perfect square.
u64 dual_factorization_count(const FactoredInteger& t, unsigned i,
                             const std::optional<PartOmegaWindow>& window);

struct IndexInequalityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false; // lhs <= rhs
};

// matched lists the levels in {0,...,k-1} whose multiplier is forced; the
// complement carries free primes.  lhs aggregates M(i) log M(i) weights with
// M(i) = #(complement within [0, i-1]); rhs sums alpha^i over the complement.
IndexInequalityReport index_inequality_check(double alpha, unsigned k,
                                             const std::vector<unsigned>& matched);

} // namespace phisig
