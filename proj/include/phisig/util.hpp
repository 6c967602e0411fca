#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace phisig {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// ---- checked integer arithmetic -------------------------------------------

// a*b with overflow detection; throws std::overflow_error on wraparound.
u64 checked_mul(u64 a, u64 b);
// a+b with overflow detection.
u64 checked_add(u64 a, u64 b);
// base^exp with overflow detection.
u64 checked_pow(u64 base, u64 exp);

// Decimal rendering for 128-bit aggregates (sums of representation-count
// products overflow 64 bits already around x = 10^4).
std::string u128_to_string(u128 v);

// Largest r with r^k <= v (integer k-th root).  k >= 1.
u64 floor_root(u64 v, unsigned k);

// Integer square root: largest r with r*r <= v.
u64 floor_sqrt(u64 v);

// ---- clamped iterated logarithms ------------------------------------------
//
// log1(x) = max(1, log x); logk is the k-th iterate of log1.  This is the
// convention used by the order-of-magnitude formulas so that deeply iterated
// logarithms never go nonpositive at small arguments.

double log1(double x);
double log2_clamped(double x);
double log3_clamped(double x);
double log4_clamped(double x);

// ---- deterministic float formatting ----------------------------------------

// Shortest fixed contract everywhere floats are printed: 15 significant
// digits, "%.15g".  Byte-identical output across runs is part of the CLI
// contract, so all serialization funnels through this.
std::string fmt_g15(double v);

// ---- block-parallel enumeration -------------------------------------------

// Splits [lo, hi) into `workers` contiguous blocks and runs fn(block_index,
// block_lo, block_hi) on one thread per block.  Workers must only write to
// per-block state; the caller merges blocks in index order, which keeps
// results byte-identical regardless of the worker count.
void parallel_for_blocks(u64 lo, u64 hi, unsigned workers,
                         const std::function<void(unsigned, u64, u64)>& fn);

// Worker count actually used: an explicit `requested` > 0 is honored as-is;
// 0 = auto picks the hardware concurrency capped at 8 (at least 1).
unsigned resolve_workers(unsigned requested);

} // namespace phisig
