#pragma once

#include <array>
#include <string>
#include <vector>

#include "phisig/arith.hpp"
#include "phisig/util.hpp"

namespace phisig {

// Nested level ladders v_0 > v_1 > ... > v_k and the five-part membership
// test for the structured preimage sets behind the lower-bound construction.
// The phi side classifies squarefree n = p_0 ... p_{k-1} (primes decreasing)
// through the shifted primes p_i - 1; the sigma side uses q_i + 1.

enum class LevelMode { strict, relaxed };

struct StructureParams {
    double alpha = 0.54;
    unsigned k = 2;
    u64 x = 1'000'000;
    LevelMode mode = LevelMode::strict;
    // Required (size k+1, strictly decreasing, back() >= 2) in relaxed mode;
    // ignored in strict mode where the ladder is derived from alpha and x.
    std::vector<u64> relaxed_levels;
};

// Strict-mode admissibility needs 1/2 < alpha < rho (rho from the series
// machinery); relaxed mode only needs alpha in (0,1) plus an explicit ladder.
void validate_params(const StructureParams& params);

// Raw ladder formula: v_0 = x, v_i = floor(exp((log x)^{alpha^i})) for
// 1 <= i <= k, clamped at x.  Any alpha in (0,1); x >= 3.  This is the
// formula alone, without the strict-mode admissibility constraint — relaxed
// callers use it to derive default levels.
std::vector<u64> derived_ladder(double alpha, u64 x, unsigned k);

// derived_ladder under full strict-mode validation (1/2 < alpha < rho).
// Exact ties between consecutive levels raise domain_error.
std::vector<u64> nesting_levels(const StructureParams& params);

// The ladder actually in force: nesting_levels in strict mode, the caller's
// relaxed_levels otherwise.
std::vector<u64> effective_levels(const StructureParams& params);

enum class ConditionStatus { pass, fail, not_applicable };

struct ConditionResult {
    ConditionStatus status = ConditionStatus::not_applicable;
    std::string reason; // empty on pass
};

struct MembershipReport {
    u64 n = 0;
    bool member = false;
    // Conditions in order: size/value bound, largest-prime-factor bracketing,
    // prime-count windows, fixed smooth part, unit multiplicity upstairs.
    std::array<ConditionResult, 5> conditions;
};

MembershipReport phi_membership(u64 n, const StructureParams& params,
                                const PrimeTable& table);
MembershipReport sigma_membership(u64 m, const StructureParams& params,
                                  const PrimeTable& table);

} // namespace phisig
