#include "phisig/stat_lab.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "phisig/errors.hpp"

namespace phisig {

namespace {

constexpr u64 kEnumerationCap = 10'000'000;

unsigned squarefree_omega(const FactoredInteger& n, unsigned max_omega,
                          const char* what) {
    for (const auto& [p, e] : n.factors) {
        (void)p;
        if (e != 1) throw std::domain_error(std::string(what) + " must be squarefree");
    }
    if (n.factors.size() > max_omega)
        throw resource_error(std::string(what) + " has more than " +
                             std::to_string(max_omega) + " prime factors");
    return static_cast<unsigned>(n.factors.size());
}

} // namespace

DeviationReport factorization_deviation(const FactoredInteger& n, unsigned i,
                                        double delta) {
    unsigned omega = squarefree_omega(n, 12, "deviation argument");
    if (omega < 1)
        throw std::domain_error("deviation argument needs at least one prime factor");
    if (i < 1) throw std::domain_error("part count i must be at least 1");
    if (!(delta > 0.0)) throw std::domain_error("delta must be positive");

    u64 total = checked_pow(i, omega);
    if (total > kEnumerationCap)
        throw resource_error("factorization space too large to enumerate");

    const double mean = static_cast<double>(omega) / i;
    const double spread = delta * std::sqrt(mean);

    // Odometer over slot assignments; only the first slot's count matters.
    std::vector<unsigned> digits(omega, 0);
    u64 violations = 0;
    while (true) {
        unsigned first = 0;
        for (unsigned d : digits)
            if (d == 0) ++first;
        if (std::fabs(static_cast<double>(first) - mean) >= spread) ++violations;
        unsigned pos = 0;
        while (pos < omega && ++digits[pos] == i) digits[pos++] = 0;
        if (pos == omega) break;
    }

    DeviationReport rep;
    rep.total = total;
    rep.violations = violations;
    rep.bound = static_cast<double>(total) / (delta * delta);
    rep.holds = static_cast<double>(violations) <= rep.bound;
    return rep;
}

PoissonChebyshevReport poisson_tail_chebyshev(double z, double delta) {
    if (!(z > 0.0)) throw std::domain_error("z must be positive");
    if (!(delta > 0.0)) throw std::domain_error("delta must be positive");
    double term = 1.0; // z^0/0!
    double full = 0.0, tail = 0.0;
    for (u64 k = 0;; ++k) {
        if (k > 0) term *= z / static_cast<double>(k);
        full += term;
        if (std::fabs(static_cast<double>(k) - z) > delta * z) tail += term;
        if (static_cast<double>(k) > z && term < 1e-18 * full) break;
        if (k > 100'000'000)
            throw internal_error("poisson series failed to converge");
    }
    PoissonChebyshevReport rep;
    rep.tail = tail;
    rep.bound = std::exp(z) / (delta * delta);
    rep.holds = tail <= rep.bound;
    return rep;
}

PoissonExponentialReport poisson_tail_exponential(double z, double alpha,
                                                  double beta) {
    if (!(z > 0.0)) throw std::domain_error("z must be positive");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("alpha must lie in (0, 1)");
    if (!(beta > 1.0)) throw std::domain_error("beta must exceed 1");
    const double lo_edge = alpha * z;
    const double hi_edge = beta * z;
    double term = 1.0;
    double full = 0.0, lower = 0.0, upper = 0.0;
    for (u64 k = 0;; ++k) {
        if (k > 0) term *= z / static_cast<double>(k);
        full += term;
        if (static_cast<double>(k) <= lo_edge) lower += term;
        if (static_cast<double>(k) >= hi_edge) upper += term;
        if (static_cast<double>(k) > hi_edge && static_cast<double>(k) > z &&
            term < 1e-18 * full)
            break;
        if (k > 100'000'000)
            throw internal_error("poisson series failed to converge");
    }
    PoissonExponentialReport rep;
    rep.lower_tail = lower;
    rep.upper_tail = upper;
    rep.lower_bound = std::exp(alpha * z * (1.0 - std::log(alpha)));
    rep.upper_bound = std::exp(beta * z * (1.0 - std::log(beta)));
    rep.holds = lower < rep.lower_bound && upper < rep.upper_bound;
    return rep;
}

u64 dual_factorization_count(const FactoredInteger& t, unsigned i,
                             const std::optional<PartOmegaWindow>& window) {
    unsigned omega = squarefree_omega(t, 10, "dual factorization argument");
    if (i < 1) throw std::domain_error("part count i must be at least 1");
    u64 side_total = checked_pow(i, omega);
    if (side_total > kEnumerationCap)
        throw resource_error("factorization space too large to enumerate");

    u64 side_valid = 0;
    std::vector<unsigned> digits(omega, 0);
    std::vector<unsigned> counts(i, 0);
    while (true) {
        std::fill(counts.begin(), counts.end(), 0);
        for (unsigned d : digits) ++counts[d];
        bool ok = true;
        if (window) {
            for (unsigned slot = 0; slot < i; ++slot) {
                double c = counts[slot];
                if (c < window->lo || c > window->hi) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) ++side_valid;
        unsigned pos = 0;
        while (pos < omega && ++digits[pos] == i) digits[pos++] = 0;
        if (pos == omega) break;
    }
    return checked_mul(side_valid, side_valid);
}

IndexInequalityReport index_inequality_check(double alpha, unsigned k,
                                             const std::vector<unsigned>& matched) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("alpha must lie in (0, 1)");
    if (k < 1) throw std::domain_error("k must be at least 1");
    std::set<unsigned> matched_set;
    for (unsigned idx : matched) {
        if (idx >= k)
            throw std::domain_error("matched index " + std::to_string(idx) +
                                    " outside {0,...,k-1}");
        matched_set.insert(idx);
    }
    std::vector<unsigned> complement;
    for (unsigned idx = 0; idx < k; ++idx)
        if (!matched_set.count(idx)) complement.push_back(idx);

    IndexInequalityReport rep;
    for (unsigned i = 2; i <= k; ++i) {
        unsigned m = 0;
        for (unsigned idx : complement)
            if (idx < i) ++m;
        double weight = std::pow(alpha, i - 1) - std::pow(alpha, i);
        if (m >= 2) // 0 log 0 = 0 and 1 log 1 = 0
            rep.lhs += static_cast<double>(m) * std::log(static_cast<double>(m)) *
                       weight;
    }
    for (unsigned idx : complement) rep.rhs += std::pow(alpha, idx);
    rep.holds = rep.lhs <= rep.rhs;
    return rep;
}

} // namespace phisig
