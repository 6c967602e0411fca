#include "phisig/chain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "phisig/errors.hpp"

namespace phisig {

namespace {

constexpr u64 kAssignmentCap = 1'000'000; // dual split pairs per t* candidate

u64 product_of(const std::vector<u64>& parts) {
    u64 p = 1;
    for (u64 v : parts) p = checked_mul(p, v);
    return p;
}

std::vector<u64> primes_between(const PrimeTable& table, u64 lo_excl,
                                u64 hi_incl) {
    std::vector<u64> out;
    if (hi_incl < 2 || hi_incl <= lo_excl) return out;
    if (!table.in_range(hi_incl))
        throw resource_error("prime window exceeds the prime table");
    for (u64 p = std::max<u64>(lo_excl + 1, 2); p <= hi_incl; ++p)
        if (table.is_prime(p)) out.push_back(p);
    return out;
}

std::pair<u64, u64> q_window_for(const StructureParams& params,
                                 const SearchBudget& budget,
                                 const std::vector<u64>& v, unsigned level,
                                 u64 strict_lo_excl, u64 strict_hi_incl) {
    (void)v;
    if (params.mode == LevelMode::strict)
        return {strict_lo_excl + 1, strict_hi_incl};
    auto it = budget.q_window_override.find(level);
    if (it == budget.q_window_override.end())
        throw std::domain_error("relaxed mode needs a Q window for level " +
                                std::to_string(level));
    if (it->second.first < 2 || it->second.second < it->second.first)
        throw std::domain_error("malformed Q window for level " +
                                std::to_string(level));
    return it->second;
}

// All squarefree products of `pool` primes with exactly `count` factors, in
// lexicographic index order, capped at `cap` products.
std::vector<u64> exact_products(const std::vector<u64>& pool, unsigned count,
                                u64 cap, bool& truncated) {
    std::vector<u64> out;
    truncated = false;
    if (count == 0) {
        out.push_back(1);
        return out;
    }
    if (pool.size() < count) return out;
    std::vector<unsigned> idx(count);
    for (unsigned i = 0; i < count; ++i) idx[i] = i;
    while (true) {
        if (out.size() >= cap) {
            truncated = true;
            break;
        }
        bool ok = true;
        u64 prod = 1;
        for (unsigned i : idx) {
            if (__builtin_mul_overflow(prod, pool[i], &prod)) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(prod);
        // next combination
        int pos = static_cast<int>(count) - 1;
        while (pos >= 0 &&
               idx[pos] == pool.size() - count + static_cast<unsigned>(pos))
            --pos;
        if (pos < 0) break;
        ++idx[pos];
        for (unsigned j = pos + 1; j < count; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

// Squarefree products of pool primes (any count) with product * scale <= cap,
// ascending DFS order.
void bounded_products(const std::vector<u64>& pool, u64 scale, u64 cap,
                      std::size_t start, u64 current, std::vector<u64>& out,
                      u64 max_outputs) {
    if (out.size() >= max_outputs) return;
    if (start == 0) out.push_back(1);
    for (std::size_t i = start; i < pool.size(); ++i) {
        u64 next;
        if (__builtin_mul_overflow(current, pool[i], &next)) break;
        u64 scaled;
        if (__builtin_mul_overflow(next, scale, &scaled) || scaled > cap) break;
        if (out.size() >= max_outputs) return;
        out.push_back(next);
        bounded_products(pool, scale, cap, i + 1, next, out, max_outputs);
    }
}

bool omega_window_ok(u64 count, double mu, double tol, bool strict_ineq) {
    double dev = std::fabs(static_cast<double>(count) - mu);
    return strict_ineq ? dev < tol : dev <= tol;
}

u64 count_factors_in(const FactoredInteger& f) {
    u64 c = 0;
    for (const auto& [p, e] : f.factors) {
        (void)p;
        c += e;
    }
    return c;
}

} // namespace

ChainTuple seed_chain(unsigned k) {
    if (k < 1) throw std::domain_error("chain length k must be at least 1");
    ChainTuple t;
    t.level = k;
    t.phi_parts.assign(k, 6);
    t.sigma_parts.assign(k, 6);
    t.s = checked_pow(6, k);
    return t;
}

std::string tuple_invariant_violation(const ChainTuple& tuple,
                                      const StructureParams& params,
                                      const PrimeTable& table) {
    const unsigned k = params.k;
    const std::vector<u64> v = effective_levels(params);
    if (tuple.level > k) return "tuple level exceeds k";
    if (tuple.phi_parts.size() != k || tuple.sigma_parts.size() != k)
        return "tuple component vectors must have length k";
    u64 pp, ps;
    try {
        pp = product_of(tuple.phi_parts);
        ps = product_of(tuple.sigma_parts);
    } catch (const std::overflow_error&) {
        return "component product overflows 64 bits";
    }
    if (pp != tuple.s || ps != tuple.s)
        return "component products disagree with the shared value s";
    for (unsigned j = 0; j < k; ++j) {
        u64 hi = std::max(tuple.phi_parts[j], tuple.sigma_parts[j]);
        if (hi > v[tuple.level])
            return "component " + std::to_string(j) +
                   " exceeds the level bound v_" + std::to_string(tuple.level);
    }
    for (unsigned j = tuple.level; j < k; ++j) {
        u64 p = tuple.phi_parts[j] + 1;
        u64 q = tuple.sigma_parts[j] - 1;
        if (!table.in_range(p) || !table.in_range(std::max<u64>(q, 2)))
            return "diagonal primality check exceeds the prime table";
        if (!table.is_prime(p))
            return "phi component " + std::to_string(j) + " + 1 is not prime";
        if (q < 2 || !table.is_prime(q))
            return "sigma component " + std::to_string(j) + " - 1 is not prime";
    }
    return "";
}

ExtendResult extend_chain(const ChainTuple& tuple, const StructureParams& params,
                          const SearchBudget& budget, const PrimeTable& table) {
    const unsigned k = params.k;
    const std::vector<u64> v = effective_levels(params);
    if (tuple.level < 2 || tuple.level > k)
        throw std::domain_error("extend_chain needs a tuple at level 2..k");
    {
        std::string bad = tuple_invariant_violation(tuple, params, table);
        if (!bad.empty()) throw std::domain_error("bad chain tuple: " + bad);
    }
    const unsigned i = tuple.level;
    ExtendResult res;

    // t* candidates and the per-slot prime budget.
    std::vector<u64> t_candidates;
    double mu = 0.0, tol = 0.0;
    unsigned n_primes = 0;
    std::vector<u64> pool;
    if (params.mode == LevelMode::strict) {
        double l2x = log2_clamped(static_cast<double>(params.x));
        mu = (std::pow(params.alpha, i - 1) - std::pow(params.alpha, i)) * l2x;
        tol = static_cast<double>(k) * std::sqrt(mu);
        n_primes = static_cast<unsigned>(std::floor(i * mu));
        long double thr_ld =
            std::exp(std::log((long double)v[i - 1]) / (12.0L * (long double)l2x));
        u64 thr = thr_ld >= 2.0L ? static_cast<u64>(std::floor(thr_ld)) : 1;
        pool = primes_between(table, v[i], thr);
        if (n_primes > 0 && pool.empty()) {
            res.diagnostics.push_back("level " + std::to_string(i) +
                                      ": prime pool (" + std::to_string(v[i]) +
                                      ", " + std::to_string(thr) + "] is empty");
            return res;
        }
        bool truncated = false;
        t_candidates =
            exact_products(pool, n_primes, budget.max_t_candidates, truncated);
        if (truncated)
            res.diagnostics.push_back("level " + std::to_string(i) +
                                      ": t candidate enumeration truncated");
        if (t_candidates.empty()) {
            res.diagnostics.push_back("level " + std::to_string(i) +
                                      ": no t candidates (pool too small)");
            return res;
        }
    } else {
        t_candidates.push_back(1);
    }

    u64 strict_lo = floor_root(v[i - 1], 12);
    u64 strict_hi = floor_root(v[i - 1], 6);
    auto [q_lo, q_hi] = q_window_for(params, budget, v, i, strict_lo, strict_hi);
    if (q_hi > table.limit)
        throw resource_error("Q window at level " + std::to_string(i) +
                             " exceeds the prime table");

    u64 q_examined = 0;
    bool q_truncated = false;
    u64 dropped_bounds = 0;

    for (u64 tstar : t_candidates) {
        // Dual splits of the t* primes over the i active slots per side.
        FactoredInteger tf;
        std::vector<u64> t_primes;
        if (tstar > 1) {
            tf = factorize(tstar, table);
            for (const auto& [p, e] : tf.factors) {
                (void)e;
                t_primes.push_back(p);
            }
        }
        const unsigned np = static_cast<unsigned>(t_primes.size());
        u64 side_count = 1;
        bool too_big = false;
        for (unsigned a = 0; a < np; ++a) {
            side_count *= i;
            if (side_count * side_count > kAssignmentCap) {
                too_big = true;
                break;
            }
        }
        if (too_big) {
            res.diagnostics.push_back("level " + std::to_string(i) +
                                      ": split enumeration too large, skipped");
            continue;
        }

        std::vector<unsigned> assign_a(np, 0), assign_b(np, 0);
        auto advance = [&](std::vector<unsigned>& digits) {
            for (unsigned pos = 0; pos < np; ++pos) {
                if (++digits[pos] < i) return true;
                digits[pos] = 0;
            }
            return false;
        };

        bool more_a = true;
        while (more_a) {
            std::vector<u64> mult_phi(i, 1);
            std::vector<u64> omega_phi(i, 0);
            for (unsigned a = 0; a < np; ++a) {
                mult_phi[assign_a[a]] = checked_mul(mult_phi[assign_a[a]], t_primes[a]);
                ++omega_phi[assign_a[a]];
            }

            bool phi_ok = true;
            if (params.mode == LevelMode::strict) {
                for (unsigned slot = 0; slot < i && phi_ok; ++slot)
                    if (!omega_window_ok(omega_phi[slot], mu, tol, true))
                        phi_ok = false;
            }

            if (phi_ok) {
                std::fill(assign_b.begin(), assign_b.end(), 0);
                bool more_b = true;
                while (more_b) {
                    std::vector<u64> mult_sig(i, 1);
                    std::vector<u64> omega_sig(i, 0);
                    for (unsigned a = 0; a < np; ++a) {
                        mult_sig[assign_b[a]] =
                            checked_mul(mult_sig[assign_b[a]], t_primes[a]);
                        ++omega_sig[assign_b[a]];
                    }

                    bool sig_ok = true;
                    if (params.mode == LevelMode::strict) {
                        for (unsigned slot = 0; slot < i && sig_ok; ++slot)
                            if (!omega_window_ok(omega_sig[slot], mu, tol, true))
                                sig_ok = false;
                    }

                    if (sig_ok) {
                        // Walk the Q window for this split.
                        for (u64 Q = q_lo; Q <= q_hi; ++Q) {
                            if (!table.is_prime(Q)) continue;
                            if (q_examined >= budget.max_q_candidates) {
                                q_truncated = true;
                                break;
                            }
                            ++q_examined;
                            u64 diag_phi =
                                checked_mul(tuple.phi_parts[i - 1], mult_phi[i - 1]);
                            u64 diag_sig =
                                checked_mul(tuple.sigma_parts[i - 1], mult_sig[i - 1]);
                            u64 p_new = checked_add(checked_mul(diag_phi, Q), 1);
                            u64 q_new = checked_mul(diag_sig, Q) - 1;
                            if (!table.in_range(p_new) || !table.in_range(q_new))
                                throw resource_error(
                                    "candidate prime exceeds the prime table");
                            if (!table.is_prime(p_new) || !table.is_prime(q_new))
                                continue;

                            ChainTuple child = tuple;
                            child.level = i - 1;
                            for (unsigned j = 0; j + 1 < i; ++j) {
                                child.phi_parts[j] =
                                    checked_mul(child.phi_parts[j], mult_phi[j]);
                                child.sigma_parts[j] =
                                    checked_mul(child.sigma_parts[j], mult_sig[j]);
                            }
                            child.phi_parts[i - 1] = checked_mul(diag_phi, Q);
                            child.sigma_parts[i - 1] = checked_mul(diag_sig, Q);
                            child.s = checked_mul(tuple.s, checked_mul(tstar, Q));

                            bool in_bounds = true;
                            for (unsigned j = 0; j < k; ++j) {
                                if (child.phi_parts[j] > v[i - 1] ||
                                    child.sigma_parts[j] > v[i - 1])
                                    in_bounds = false;
                            }
                            if (!in_bounds) {
                                ++dropped_bounds;
                                continue;
                            }

                            ChainStep step;
                            step.level = i;
                            step.t = checked_mul(tstar, Q);
                            step.phi_parts.assign(k, 1);
                            step.sigma_parts.assign(k, 1);
                            for (unsigned j = 0; j + 1 < i; ++j) {
                                step.phi_parts[j] = mult_phi[j];
                                step.sigma_parts[j] = mult_sig[j];
                            }
                            step.phi_parts[i - 1] = checked_mul(mult_phi[i - 1], Q);
                            step.sigma_parts[i - 1] = checked_mul(mult_sig[i - 1], Q);
                            step.q = Q;

                            res.children.emplace_back(std::move(child),
                                                      std::move(step));
                            if (res.children.size() >= budget.max_outputs) {
                                res.diagnostics.push_back(
                                    "level " + std::to_string(i) +
                                    ": children truncated at budget");
                                return res;
                            }
                        }
                    }
                    if (q_truncated) break;
                    more_b = advance(assign_b);
                }
            }
            if (q_truncated) break;
            more_a = advance(assign_a);
        }
        if (q_truncated) break;
    }
    if (q_truncated)
        res.diagnostics.push_back("level " + std::to_string(i) +
                                  ": Q enumeration truncated at budget");
    if (dropped_bounds > 0)
        res.diagnostics.push_back("level " + std::to_string(i) + ": dropped " +
                                  std::to_string(dropped_bounds) +
                                  " children violating level bounds");
    return res;
}

ConstructResult finalize_chain(const ChainTuple& tuple,
                               const StructureParams& params,
                               const SearchBudget& budget,
                               const PrimeTable& table) {
    const unsigned k = params.k;
    const std::vector<u64> v = effective_levels(params);
    if (tuple.level != 1)
        throw std::domain_error("finalize_chain needs a level-1 tuple");
    {
        std::string bad = tuple_invariant_violation(tuple, params, table);
        if (!bad.empty()) throw std::domain_error("bad chain tuple: " + bad);
    }
    ConstructResult res;

    std::vector<u64> t_candidates;
    u64 x3 = floor_root(params.x, 3);
    if (params.mode == LevelMode::strict) {
        double l2x = log2_clamped(static_cast<double>(params.x));
        double mu = (1.0 - params.alpha) * l2x;
        double tol = static_cast<double>(k) * std::sqrt(mu);
        u64 cap_by_cube = tuple.s <= x3 ? x3 / tuple.s : 0;
        u64 hi = std::min(v[0], cap_by_cube);
        std::vector<u64> pool = primes_between(table, v[1], hi);
        std::vector<u64> raw;
        bounded_products(pool, tuple.s, x3, 0, 1, raw, budget.max_t_candidates);
        std::sort(raw.begin(), raw.end());
        for (u64 t : raw) {
            u64 omega = 0;
            if (t > 1) {
                FactoredInteger tf = factorize(t, table);
                omega = count_factors_in(tf);
            }
            if (omega_window_ok(omega, mu, tol, false)) t_candidates.push_back(t);
        }
        if (t_candidates.size() >= budget.max_t_candidates)
            res.diagnostics.push_back("final step: t candidates truncated");
        if (t_candidates.empty()) {
            res.diagnostics.push_back(
                "final step: no t candidate satisfies the prime-count window");
            return res;
        }
    } else {
        t_candidates.push_back(1);
    }

    u64 q_examined = 0;
    bool q_truncated = false;
    u64 dropped_order = 0, dropped_bounds = 0;

    for (u64 tprime : t_candidates) {
        u64 q_lo, q_hi;
        if (params.mode == LevelMode::strict) {
            q_lo = floor_sqrt(params.x);
            if (q_lo * q_lo < params.x) ++q_lo; // Q >= sqrt(x) exactly
            u64 denom = checked_mul(tuple.s, tprime);
            q_hi = params.x / denom; // Q s_1 t' <= x exactly
        } else {
            auto it = budget.q_window_override.find(1);
            if (it == budget.q_window_override.end())
                throw std::domain_error("relaxed mode needs a Q window for level 1");
            q_lo = it->second.first;
            q_hi = it->second.second;
        }
        if (q_lo > q_hi) continue;
        if (q_hi > table.limit)
            throw resource_error("final Q window exceeds the prime table");

        for (u64 Q = q_lo; Q <= q_hi; ++Q) {
            if (!table.is_prime(Q)) continue;
            if (q_examined >= budget.max_q_candidates) {
                q_truncated = true;
                break;
            }
            ++q_examined;
            u64 mult = checked_mul(tprime, Q);
            u64 s0_phi = checked_mul(tuple.phi_parts[0], mult);
            u64 s0_sig = checked_mul(tuple.sigma_parts[0], mult);
            u64 p0 = checked_add(s0_phi, 1);
            u64 q0 = s0_sig - 1;
            if (!table.in_range(p0) || !table.in_range(q0))
                throw resource_error("candidate prime exceeds the prime table");
            if (!table.is_prime(p0) || !table.is_prime(q0)) continue;
            if (s0_phi > v[0] || s0_sig > v[0]) {
                ++dropped_bounds;
                continue;
            }

            SolutionPair sol;
            sol.n_primes.push_back(p0);
            sol.m_primes.push_back(q0);
            for (unsigned j = 1; j < k; ++j) {
                sol.n_primes.push_back(tuple.phi_parts[j] + 1);
                sol.m_primes.push_back(tuple.sigma_parts[j] - 1);
            }
            bool ordered = true;
            for (unsigned j = 0; j + 1 < k; ++j)
                if (sol.n_primes[j] <= sol.n_primes[j + 1] ||
                    sol.m_primes[j] <= sol.m_primes[j + 1])
                    ordered = false;
            if (!ordered) {
                ++dropped_order;
                continue;
            }

            u64 n = 1, m = 1, val_n = 1, val_m = 1;
            try {
                for (u64 p : sol.n_primes) {
                    n = checked_mul(n, p);
                    val_n = checked_mul(val_n, p - 1);
                }
                for (u64 q : sol.m_primes) {
                    m = checked_mul(m, q);
                    val_m = checked_mul(val_m, q + 1);
                }
            } catch (const std::overflow_error&) {
                throw resource_error("assembled solution exceeds 64 bits");
            }
            if (val_n != val_m)
                throw internal_error("chain products disagree at assembly");
            u64 s0 = checked_mul(tuple.s, mult);
            if (val_n != s0)
                throw internal_error("assembled value disagrees with chain product");
            sol.n = n;
            sol.m = m;
            sol.value = val_n;

            ChainStep step;
            step.level = 1;
            step.t = mult;
            step.phi_parts.assign(k, 1);
            step.sigma_parts.assign(k, 1);
            step.phi_parts[0] = mult;
            step.sigma_parts[0] = mult;
            step.q = Q;
            sol.trace.push_back(std::move(step));

            res.solutions.push_back(std::move(sol));
            if (res.solutions.size() >= budget.max_outputs) {
                res.diagnostics.push_back("final step: solutions truncated at budget");
                return res;
            }
        }
        if (q_truncated) break;
    }
    if (q_truncated)
        res.diagnostics.push_back("final step: Q enumeration truncated at budget");
    if (dropped_order > 0)
        res.diagnostics.push_back("final step: dropped " +
                                  std::to_string(dropped_order) +
                                  " candidates without strictly decreasing primes");
    if (dropped_bounds > 0)
        res.diagnostics.push_back("final step: dropped " +
                                  std::to_string(dropped_bounds) +
                                  " candidates violating the top level bound");
    return res;
}

ConstructResult construct_solutions(const StructureParams& params,
                                    const SearchBudget& budget,
                                    const PrimeTable& table) {
    const unsigned k = params.k;
    const std::vector<u64> v = effective_levels(params);
    ConstructResult res;

    ChainTuple seed = seed_chain(k);
    {
        std::string bad = tuple_invariant_violation(seed, params, table);
        if (!bad.empty()) {
            res.diagnostics.push_back("seed rejected: " + bad);
            return res;
        }
    }
    (void)v;

    const u64 frontier_cap = std::max<u64>(budget.max_outputs, 4096);
    std::vector<std::pair<ChainTuple, std::vector<ChainStep>>> frontier;
    frontier.emplace_back(seed, std::vector<ChainStep>{});

    for (unsigned level = k; level >= 2; --level) {
        std::vector<std::pair<ChainTuple, std::vector<ChainStep>>> next;
        for (const auto& [tuple, hist] : frontier) {
            ExtendResult er = extend_chain(tuple, params, budget, table);
            for (auto& d : er.diagnostics) res.diagnostics.push_back(std::move(d));
            for (auto& [child, step] : er.children) {
                if (next.size() >= frontier_cap) {
                    res.diagnostics.push_back("frontier truncated at level " +
                                              std::to_string(level - 1));
                    break;
                }
                std::vector<ChainStep> h = hist;
                h.push_back(std::move(step));
                next.emplace_back(std::move(child), std::move(h));
            }
        }
        frontier = std::move(next);
        if (frontier.empty()) {
            res.diagnostics.push_back("search exhausted at level " +
                                      std::to_string(level - 1));
            return res;
        }
    }

    u64 dropped_overlap = 0;
    std::vector<SolutionPair> collected;
    for (const auto& [tuple, hist] : frontier) {
        ConstructResult fr = finalize_chain(tuple, params, budget, table);
        for (auto& d : fr.diagnostics) res.diagnostics.push_back(std::move(d));
        for (auto& sol : fr.solutions) {
            std::vector<ChainStep> full = hist;
            for (auto& st : sol.trace) full.push_back(std::move(st));
            sol.trace = std::move(full);

            // Step multipliers must have pairwise disjoint prime support.
            std::vector<u64> seen;
            bool disjoint = true;
            for (const auto& st : sol.trace) {
                if (st.t <= 1) continue;
                if (!table.in_range(st.t))
                    throw resource_error("step multiplier exceeds the prime table");
                FactoredInteger tf = factorize(st.t, table);
                for (const auto& [p, e] : tf.factors) {
                    (void)e;
                    if (std::find(seen.begin(), seen.end(), p) != seen.end())
                        disjoint = false;
                    seen.push_back(p);
                }
            }
            if (!disjoint) {
                ++dropped_overlap;
                continue;
            }
            collected.push_back(std::move(sol));
        }
    }
    if (dropped_overlap > 0)
        res.diagnostics.push_back("dropped " + std::to_string(dropped_overlap) +
                                  " assemblies with overlapping step primes");

    std::stable_sort(collected.begin(), collected.end(),
                     [](const SolutionPair& a, const SolutionPair& b) {
                         return a.n != b.n ? a.n < b.n : a.m < b.m;
                     });
    for (auto& sol : collected) {
        if (!res.solutions.empty() && res.solutions.back().n == sol.n &&
            res.solutions.back().m == sol.m)
            continue;
        if (res.solutions.size() >= budget.max_outputs) {
            res.diagnostics.push_back("solutions truncated at budget");
            break;
        }
        res.solutions.push_back(std::move(sol));
    }
    if (res.solutions.empty())
        res.diagnostics.push_back("no solutions within the configured windows");
    return res;
}

} // namespace phisig
