#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "phisig/arith.hpp"
#include "phisig/structured.hpp"
#include "phisig/util.hpp"

namespace phisig {

// Descending chain construction for common values of phi and sigma.  A chain
// tuple at level i carries one partial factorization per side sharing the
// same product s; extending to level i-1 multiplies both sides by a split of
// t = t* Q and converts the diagonal components into actual primes
// p_{i-1} = s_{i-1,i-1} + 1 and q_{i-1} = s'_{i-1,i-1} - 1.  Reaching level 0
// yields n = p_0...p_{k-1}, m = q_0...q_{k-1} with phi(n) = sigma(m) = s.

struct ChainTuple {
    unsigned level = 0;
    u64 s = 1;
    std::vector<u64> phi_parts;   // size k
    std::vector<u64> sigma_parts; // size k
};

struct ChainStep {
    unsigned level = 0; // the level this step moved away from (i -> i-1)
    u64 t = 1;          // total multiplier t* Q (or t' Q at the last step)
    std::vector<u64> phi_parts;   // per-component multipliers, 1 where untouched
    std::vector<u64> sigma_parts;
    u64 q = 0;          // the distinguished prime Q of this step
};

struct SearchBudget {
    u64 max_t_candidates = 256;
    u64 max_q_candidates = 4096;
    u64 max_outputs = 1024;
    // Relaxed mode draws Q for each level from an explicit inclusive window.
    std::map<unsigned, std::pair<u64, u64>> q_window_override;
};

struct ExtendResult {
    std::vector<std::pair<ChainTuple, ChainStep>> children;
    std::vector<std::string> diagnostics;
};

struct SolutionPair {
    u64 n = 0;
    u64 m = 0;
    u64 value = 0; // phi(n) = sigma(m)
    std::vector<u64> n_primes; // decreasing
    std::vector<u64> m_primes; // decreasing
    std::vector<ChainStep> trace; // levels k, k-1, ..., 1
};

struct ConstructResult {
    std::vector<SolutionPair> solutions; // sorted by (n, m), deduplicated
    std::vector<std::string> diagnostics;
};

// Level-k start: every component 6, s = 6^k.  Throws overflow_error once 6^k
// leaves 64 bits (k > 24).
ChainTuple seed_chain(unsigned k);

// Empty string when the tuple satisfies the chain invariants against the
// given parameters (shared product, diagonal primality at and above its
// level, component bounds); otherwise a description of the first violation.
std::string tuple_invariant_violation(const ChainTuple& tuple,
                                      const StructureParams& params,
                                      const PrimeTable& table);

// One level step i -> i-1 for i >= 2.
ExtendResult extend_chain(const ChainTuple& tuple, const StructureParams& params,
                          const SearchBudget& budget, const PrimeTable& table);

// Final step 1 -> 0; emits fully assembled solutions.
ConstructResult finalize_chain(const ChainTuple& tuple,
                               const StructureParams& params,
                               const SearchBudget& budget,
                               const PrimeTable& table);

// Full search from the seed.
ConstructResult construct_solutions(const StructureParams& params,
                                    const SearchBudget& budget,
                                    const PrimeTable& table);

} // namespace phisig
