#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "phisig/arith.hpp"
#include "phisig/util.hpp"

namespace phisig {

// Enumeration of the value sets
//   V_phi(x)       = #{ phi(n) <= x },
//   V_sigma(x)     = #{ sigma(n) <= x },
//   V_{phi,sigma}(x) = #{ v <= x : v = phi(n) = sigma(m) for some n, m },
// and the representation counts R_f(v) = #{ n : f(n) = v }.  The value 1 is a
// member of both images (phi(1) = sigma(1) = 1).
//
// phi-preimages are scanned up to the Rosser-Schoenfeld bound B(x) below;
// sigma(n) >= n, so sigma scans stop at x.  Scans are block-parallel with a
// fixed block partition and in-order merge, so results are identical for any
// worker count (threads = 0 picks a default).

// B(x) = max(6, ceil(x (e^gamma log log x' + 3 / log log x'))), x' = max(x,16):
// every n with phi(n) <= x satisfies n <= B(x).  (Checked against the extremal
// primorial radicals for x <= 10^8 and spot-asserted in tests.)
u64 phi_preimage_bound(u64 x);

// Sorted distinct values of phi (resp. sigma) that are <= x.  Requires
// table.limit >= B(x) (resp. >= x); otherwise resource_error.
std::vector<u64> phi_image_up_to(u64 x, const PrimeTable& table, unsigned threads = 0);
std::vector<u64> sigma_image_up_to(u64 x, const PrimeTable& table, unsigned threads = 0);

struct ValueSetSummary {
    u64 x = 0;
    u64 v_phi = 0;
    u64 v_sigma = 0;
    u64 v_common = 0;
};

ValueSetSummary common_value_count(u64 x, const PrimeTable& table, unsigned threads = 0);

enum class ValueFunction { phi, sigma };

struct RepresentationCounts {
    u64 x = 0;
    ValueFunction function = ValueFunction::phi;
    std::string filter_tag;   // empty when no filter was applied
    std::map<u64, u64> counts; // value -> preimage count; only values hit appear
};

// Counts preimages of every value <= x, optionally restricted to n passing
// `filter` (evaluated on the factorization; the tag is echoed in reports).
RepresentationCounts representation_counts(
    ValueFunction function, u64 x, const PrimeTable& table,
    const std::function<bool(const FactoredInteger&)>& filter = nullptr,
    const std::string& filter_tag = "", unsigned threads = 0);

// Holder's inequality with exponents (3,3,3) applied to sum R_phi R_sigma:
//   (sum_{v<=x} R_phi R_sigma)^3
//     <= V_{phi,sigma}(x) (sum R_phi^2 R_sigma)(sum R_phi R_sigma^2).
// All sums are exact 128-bit integers.
struct HolderReport {
    u64 x = 0;
    u128 lhs = 0;
    u128 rhs = 0;
    u64 v_common = 0;
    u128 sum_rr = 0;   // sum R_phi R_sigma
    u128 sum_r2r = 0;  // sum R_phi^2 R_sigma
    u128 sum_rr2 = 0;  // sum R_phi R_sigma^2
    bool holds = false;
};

HolderReport holder_check(u64 x, const PrimeTable& table, unsigned threads = 0);

// One report per x in 1..x_max from a single enumeration pass (prefix sums of
// the same exact aggregates); scan[i] equals holder_check(i+1).
std::vector<HolderReport> holder_scan(u64 x_max, const PrimeTable& table,
                                      unsigned threads = 0);

// Twin prime pairs (p, p+2), p <= x, emitted as (p, v) where the common value
// v = p + 1 satisfies sigma(p) = v = phi(p+2).  Requires table.limit >= x+2.
std::vector<std::pair<u64, u64>> twin_prime_common_values(u64 x, const PrimeTable& table);

// log(x / V_phi(x)) / log log x; the expected limit is C0 = 0.8178...
// Requires x >= 3 (log log x > 0); equal to the clamped-iterate convention on
// x >= 16.
double erdos_exponent_estimate(u64 x, const PrimeTable& table, unsigned threads = 0);

} // namespace phisig
