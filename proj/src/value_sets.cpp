#include "phisig/value_sets.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "phisig/errors.hpp"

namespace phisig {

namespace {

constexpr double kExpGamma = 1.7810724179901979852; // e^gamma

// One bit per candidate value in [0, x].
struct Bitmap {
    std::vector<u64> words;
    explicit Bitmap(u64 x) : words(x / 64 + 1, 0) {}
    void set(u64 v) { words[v >> 6] |= u64(1) << (v & 63); }
    bool test(u64 v) const { return (words[v >> 6] >> (v & 63)) & 1; }
    void merge_or(const Bitmap& o) {
        for (std::size_t i = 0; i < words.size(); ++i) words[i] |= o.words[i];
    }
    u64 popcount() const {
        u64 c = 0;
        for (u64 w : words) c += static_cast<u64>(__builtin_popcountll(w));
        return c;
    }
};

// Marks f(n) <= x for n in [1, n_hi], block-parallel, merged in block order.
Bitmap image_bitmap(ValueFunction function, u64 x, u64 n_hi,
                    const PrimeTable& table, unsigned threads) {
    unsigned workers = resolve_workers(threads);
    std::vector<Bitmap> parts(workers, Bitmap(x));
    parallel_for_blocks(1, n_hi + 1, workers, [&](unsigned w, u64 lo, u64 hi) {
        Bitmap& bm = parts[w];
        for (u64 n = lo; n < hi; ++n) {
            u64 v = function == ValueFunction::phi ? euler_phi_of(n, table)
                                                   : sigma_of(n, table);
            if (v <= x) bm.set(v);
        }
    });
    for (unsigned w = 1; w < workers; ++w) parts[0].merge_or(parts[w]);
    return std::move(parts[0]);
}

std::vector<u64> bitmap_values(const Bitmap& bm, u64 x) {
    std::vector<u64> out;
    for (u64 v = 0; v <= x; ++v)
        if (bm.test(v)) out.push_back(v);
    return out;
}

void require_capacity(u64 needed, const PrimeTable& table, const char* who) {
    if (table.limit < needed)
        throw resource_error(std::string(who) + ": needs sieve up to " +
                             std::to_string(needed) + ", table stops at " +
                             std::to_string(table.limit));
}

u128 mul_u128_checked(u128 a, u128 b) {
    if (a != 0 && b > static_cast<u128>(-1) / a)
        throw std::overflow_error("128-bit product overflow");
    return a * b;
}

// Exact per-value preimage counts R_phi, R_sigma for all values <= x.
struct CountPair {
    std::vector<u64> r_phi, r_sigma;
};

CountPair representation_arrays(u64 x, const PrimeTable& table, unsigned threads) {
    u64 b = phi_preimage_bound(x);
    require_capacity(b, table, "holder aggregates");
    unsigned workers = resolve_workers(threads);

    CountPair cp;
    cp.r_phi.assign(x + 1, 0);
    cp.r_sigma.assign(x + 1, 0);

    std::vector<std::vector<u64>> phi_parts(workers), sig_parts(workers);
    parallel_for_blocks(1, b + 1, workers, [&](unsigned w, u64 lo, u64 hi) {
        auto& mine = phi_parts[w];
        mine.assign(x + 1, 0);
        for (u64 n = lo; n < hi; ++n) {
            u64 v = euler_phi_of(n, table);
            if (v <= x) ++mine[v];
        }
    });
    parallel_for_blocks(1, x + 1, workers, [&](unsigned w, u64 lo, u64 hi) {
        auto& mine = sig_parts[w];
        mine.assign(x + 1, 0);
        for (u64 n = lo; n < hi; ++n) {
            u64 v = sigma_of(n, table);
            if (v <= x) ++mine[v];
        }
    });
    for (unsigned w = 0; w < workers; ++w) {
        if (!phi_parts[w].empty())
            for (u64 v = 0; v <= x; ++v) cp.r_phi[v] += phi_parts[w][v];
        if (!sig_parts[w].empty())
            for (u64 v = 0; v <= x; ++v) cp.r_sigma[v] += sig_parts[w][v];
    }
    return cp;
}

HolderReport report_from_aggregates(u64 x, u128 s1, u128 s21, u128 s12, u64 common) {
    HolderReport r;
    r.x = x;
    r.sum_rr = s1;
    r.sum_r2r = s21;
    r.sum_rr2 = s12;
    r.v_common = common;
    r.lhs = mul_u128_checked(mul_u128_checked(s1, s1), s1);
    r.rhs = mul_u128_checked(mul_u128_checked(static_cast<u128>(common), s21), s12);
    r.holds = r.lhs <= r.rhs;
    return r;
}

} // namespace

u64 phi_preimage_bound(u64 x) {
    double xp = static_cast<double>(x < 16 ? 16 : x);
    double ll = std::log(std::log(xp));
    double b = std::ceil(static_cast<double>(x) * (kExpGamma * ll + 3.0 / ll));
    u64 bi = static_cast<u64>(b);
    return bi < 6 ? 6 : bi;
}

std::vector<u64> phi_image_up_to(u64 x, const PrimeTable& table, unsigned threads) {
    if (x < 1) throw std::domain_error("phi_image_up_to: x must be >= 1");
    u64 b = phi_preimage_bound(x);
    require_capacity(b, table, "phi_image_up_to");
    return bitmap_values(image_bitmap(ValueFunction::phi, x, b, table, threads), x);
}

std::vector<u64> sigma_image_up_to(u64 x, const PrimeTable& table, unsigned threads) {
    if (x < 1) throw std::domain_error("sigma_image_up_to: x must be >= 1");
    require_capacity(x, table, "sigma_image_up_to");
    return bitmap_values(image_bitmap(ValueFunction::sigma, x, x, table, threads), x);
}

ValueSetSummary common_value_count(u64 x, const PrimeTable& table, unsigned threads) {
    if (x < 1) throw std::domain_error("common_value_count: x must be >= 1");
    u64 b = phi_preimage_bound(x);
    require_capacity(b, table, "common_value_count");
    require_capacity(x, table, "common_value_count");
    Bitmap phi_bm = image_bitmap(ValueFunction::phi, x, b, table, threads);
    Bitmap sig_bm = image_bitmap(ValueFunction::sigma, x, x, table, threads);
    ValueSetSummary s;
    s.x = x;
    s.v_phi = phi_bm.popcount();
    s.v_sigma = sig_bm.popcount();
    u64 common = 0;
    for (std::size_t i = 0; i < phi_bm.words.size(); ++i)
        common += static_cast<u64>(__builtin_popcountll(phi_bm.words[i] & sig_bm.words[i]));
    s.v_common = common;
    return s;
}

RepresentationCounts representation_counts(
    ValueFunction function, u64 x, const PrimeTable& table,
    const std::function<bool(const FactoredInteger&)>& filter,
    const std::string& filter_tag, unsigned threads) {
    if (x < 1) throw std::domain_error("representation_counts: x must be >= 1");
    u64 n_hi = function == ValueFunction::phi ? phi_preimage_bound(x) : x;
    require_capacity(n_hi, table, "representation_counts");

    unsigned workers = resolve_workers(threads);
    std::vector<std::map<u64, u64>> parts(workers);
    parallel_for_blocks(1, n_hi + 1, workers, [&](unsigned w, u64 lo, u64 hi) {
        auto& mine = parts[w];
        for (u64 n = lo; n < hi; ++n) {
            u64 v = function == ValueFunction::phi ? euler_phi_of(n, table)
                                                   : sigma_of(n, table);
            if (v > x) continue;
            if (filter) {
                if (n == 1) {
                    if (!filter(FactoredInteger{})) continue;
                } else if (!filter(factorize(n, table))) {
                    continue;
                }
            }
            ++mine[v];
        }
    });
    RepresentationCounts rc;
    rc.x = x;
    rc.function = function;
    rc.filter_tag = filter ? filter_tag : std::string{};
    for (unsigned w = 0; w < workers; ++w)
        for (auto [v, c] : parts[w]) rc.counts[v] += c;
    return rc;
}

HolderReport holder_check(u64 x, const PrimeTable& table, unsigned threads) {
    if (x < 1) throw std::domain_error("holder_check: x must be >= 1");
    CountPair cp = representation_arrays(x, table, threads);
    u128 s1 = 0, s21 = 0, s12 = 0;
    u64 common = 0;
    for (u64 v = 1; v <= x; ++v) {
        u128 rp = cp.r_phi[v], rs = cp.r_sigma[v];
        if (rp > 0 && rs > 0) ++common;
        s1 += rp * rs;
        s21 += rp * rp * rs;
        s12 += rp * rs * rs;
    }
    return report_from_aggregates(x, s1, s21, s12, common);
}

std::vector<HolderReport> holder_scan(u64 x_max, const PrimeTable& table, unsigned threads) {
    if (x_max < 1) throw std::domain_error("holder_scan: x_max must be >= 1");
    CountPair cp = representation_arrays(x_max, table, threads);
    std::vector<HolderReport> out;
    out.reserve(x_max);
    u128 s1 = 0, s21 = 0, s12 = 0;
    u64 common = 0;
    for (u64 x = 1; x <= x_max; ++x) {
        u128 rp = cp.r_phi[x], rs = cp.r_sigma[x];
        if (rp > 0 && rs > 0) ++common;
        s1 += rp * rs;
        s21 += rp * rp * rs;
        s12 += rp * rs * rs;
        out.push_back(report_from_aggregates(x, s1, s21, s12, common));
    }
    return out;
}

std::vector<std::pair<u64, u64>> twin_prime_common_values(u64 x, const PrimeTable& table) {
    if (x < 2) throw std::domain_error("twin_prime_common_values: x must be >= 2");
    require_capacity(x + 2, table, "twin_prime_common_values");
    std::vector<std::pair<u64, u64>> out;
    for (u64 p = 3; p <= x; p += 2)
        if (table.is_prime(p) && table.is_prime(p + 2)) out.emplace_back(p, p + 1);
    return out;
}

double erdos_exponent_estimate(u64 x, const PrimeTable& table, unsigned threads) {
    if (x < 3)
        throw std::domain_error("erdos_exponent_estimate: x must be >= 3");
    u64 b = phi_preimage_bound(x);
    require_capacity(b, table, "erdos_exponent_estimate");
    u64 v_phi = image_bitmap(ValueFunction::phi, x, b, table, threads).popcount();
    double xd = static_cast<double>(x);
    return std::log(xd / static_cast<double>(v_phi)) / std::log(std::log(xd));
}

} // namespace phisig
