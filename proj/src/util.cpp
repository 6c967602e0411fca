#include "phisig/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

namespace phisig {

u64 checked_mul(u64 a, u64 b) {
    u64 r;
    if (__builtin_mul_overflow(a, b, &r))
        throw std::overflow_error("64-bit product overflow");
    return r;
}

u64 checked_add(u64 a, u64 b) {
    u64 r;
    if (__builtin_add_overflow(a, b, &r))
        throw std::overflow_error("64-bit sum overflow");
    return r;
}

u64 checked_pow(u64 base, u64 exp) {
    u64 r = 1;
    for (u64 i = 0; i < exp; ++i) r = checked_mul(r, base);
    return r;
}

std::string u128_to_string(u128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.push_back(char('0' + int(v % 10)));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

u64 floor_sqrt(u64 v) {
    if (v == 0) return 0;
    u64 r = static_cast<u64>(std::sqrt(static_cast<double>(v)));
    while (r > 0 && r > v / r) --r;                   // pow estimate too high
    while ((r + 1) <= v / (r + 1)) ++r;               // or too low
    return r;
}

u64 floor_root(u64 v, unsigned k) {
    if (k == 0) throw std::domain_error("floor_root: k must be >= 1");
    if (k == 1 || v <= 1) return v;
    if (k == 2) return floor_sqrt(v);
    u64 r = static_cast<u64>(std::pow(static_cast<double>(v), 1.0 / k));
    // std::pow is only an estimate; fix up with exact overflow-aware powers.
    auto pow_le = [&](u64 base) {
        u64 acc = 1;
        for (unsigned i = 0; i < k; ++i) {
            if (base != 0 && acc > v / base) return false; // acc*base > v
            acc *= base;
        }
        return acc <= v;
    };
    while (r > 0 && !pow_le(r)) --r;
    while (pow_le(r + 1)) ++r;
    return r;
}

double log1(double x) { return std::max(1.0, std::log(x)); }
double log2_clamped(double x) { return log1(log1(x)); }
double log3_clamped(double x) { return log1(log2_clamped(x)); }
double log4_clamped(double x) { return log1(log3_clamped(x)); }

std::string fmt_g15(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

unsigned resolve_workers(unsigned requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    return std::min(hw, 8u);
}

void parallel_for_blocks(u64 lo, u64 hi, unsigned workers,
                         const std::function<void(unsigned, u64, u64)>& fn) {
    if (lo >= hi) return;
    u64 span = hi - lo;
    unsigned nb = workers == 0 ? 1 : workers;
    if (static_cast<u64>(nb) > span) nb = static_cast<unsigned>(span);
    if (nb == 1) {
        fn(0, lo, hi);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nb);
    u64 chunk = span / nb, rem = span % nb;
    u64 start = lo;
    for (unsigned b = 0; b < nb; ++b) {
        u64 len = chunk + (b < rem ? 1 : 0);
        u64 bl = start, bh = start + len;
        start = bh;
        pool.emplace_back([&fn, b, bl, bh] { fn(b, bl, bh); });
    }
    for (auto& t : pool) t.join();
}

} // namespace phisig
