#include "phisig/structured.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "phisig/errors.hpp"
#include "phisig/ford.hpp"

namespace phisig {

namespace {

std::string fmt_u(u64 v) { return std::to_string(v); }

// floor(exp((log x)^e)) computed in long double; the one IEEE trap is the
// identity level (e == 1 would reproduce x), handled by the caller.
u64 level_value(u64 x, long double exponent) {
    long double lx = std::log((long double)x);
    long double val = std::exp(std::pow(lx, exponent));
    if (!(val >= 1.0L))
        throw std::domain_error("level collapsed below 1");
    if (val >= (long double)x) return x; // exponent ~ 1; clamp at the top
    return static_cast<u64>(std::floor(val));
}

struct ShiftedPrime {
    u64 prime;         // p_i (phi side) or q_i (sigma side)
    u64 base;          // p_i - 1 or q_i + 1
    FactoredInteger fac; // factorization of base
};

// Common engine for both membership flavours.  side_sign = -1 for phi
// (base = p - 1), +1 for sigma (base = q + 1).
MembershipReport membership_impl(u64 n, const StructureParams& params,
                                 const PrimeTable& table, int side_sign) {
    validate_params(params);
    if (n < 2)
        throw std::domain_error("membership requires n >= 2");
    if (!table.in_range(n))
        throw resource_error("membership argument exceeds the prime table");

    const std::vector<u64> v = effective_levels(params);
    const unsigned k = params.k;
    MembershipReport rep;
    rep.n = n;

    FactoredInteger f = factorize(n, table);
    const bool structural =
        is_squarefree(f) && f.factors.size() == k;

    // Primes in decreasing order p_0 > p_1 > ... > p_{k-1}.
    std::vector<u64> primes;
    for (auto it = f.factors.rbegin(); it != f.factors.rend(); ++it)
        primes.push_back(it->first);

    const char* value_name = side_sign < 0 ? "phi(n)" : "sigma(m)";
    u64 value = side_sign < 0 ? euler_phi(f) : sigma(f);

    // Condition 1: squarefree with exactly k prime factors and value <= x.
    {
        auto& c = rep.conditions[0];
        if (!structural) {
            c.status = ConditionStatus::fail;
            c.reason = "not squarefree with exactly " + fmt_u(k) + " prime factors";
        } else if (value > params.x) {
            c.status = ConditionStatus::fail;
            c.reason = std::string(value_name) + " = " + fmt_u(value) +
                       " exceeds x = " + fmt_u(params.x);
        } else {
            c.status = ConditionStatus::pass;
        }
    }

    if (!structural) {
        for (int ci = 1; ci <= 3; ++ci) {
            rep.conditions[ci].status = ConditionStatus::not_applicable;
            rep.conditions[ci].reason = "needs exactly " + fmt_u(k) +
                                        " distinct prime factors";
        }
    }

    std::vector<ShiftedPrime> shifted;
    if (structural) {
        for (unsigned i = 0; i < k; ++i) {
            ShiftedPrime sp;
            sp.prime = primes[i];
            sp.base = side_sign < 0 ? primes[i] - 1 : primes[i] + 1;
            if (sp.base >= 2) {
                if (!table.in_range(sp.base))
                    throw resource_error("shifted prime " + fmt_u(sp.base) +
                                         " exceeds the prime table");
                sp.fac = factorize(sp.base, table);
            } // base == 1 keeps the empty factorization (value 1)
            shifted.push_back(sp);
        }
    }

    // Condition 2: v_i^{1/12} < P+(base_i) <= base_i <= v_i, and for
    // 1 <= i <= k-1 exactly one prime factor of base_i exceeds v_i^{1/12}.
    if (structural) {
        auto& c = rep.conditions[1];
        c.status = ConditionStatus::pass;
        for (unsigned i = 0; i < k && c.status == ConditionStatus::pass; ++i) {
            u64 twelfth = floor_root(v[i], 12);
            const auto& sp = shifted[i];
            if (sp.base > v[i]) {
                c.status = ConditionStatus::fail;
                c.reason = "shifted prime " + fmt_u(sp.base) + " exceeds v_" +
                           fmt_u(i) + " = " + fmt_u(v[i]);
                break;
            }
            if (largest_prime_factor(sp.fac) <= twelfth) {
                c.status = ConditionStatus::fail;
                c.reason = "largest prime factor of " + fmt_u(sp.base) +
                           " is not above v_" + fmt_u(i) + "^{1/12} = " +
                           fmt_u(twelfth);
                break;
            }
            if (i >= 1) {
                unsigned big = 0;
                for (const auto& [p, e] : sp.fac.factors) {
                    (void)e;
                    if (p > twelfth) ++big;
                }
                if (big != 1) {
                    c.status = ConditionStatus::fail;
                    c.reason = fmt_u(big) + " prime factors of " + fmt_u(sp.base) +
                               " exceed v_" + fmt_u(i) + "^{1/12}";
                    break;
                }
            }
        }
    }

    // Condition 3: for 1 <= j <= i <= k the count of prime factors of
    // base_{j-1} inside (v_i, v_{i-1}] stays within 2k sqrt(mu_i) of
    // mu_i = (alpha^{i-1} - alpha^i) loglog x.
    if (structural) {
        auto& c = rep.conditions[2];
        c.status = ConditionStatus::pass;
        double l2x = log2_clamped(static_cast<double>(params.x));
        for (unsigned i = 1; i <= k && c.status == ConditionStatus::pass; ++i) {
            double mu = (std::pow(params.alpha, i - 1) - std::pow(params.alpha, i)) * l2x;
            double tol = 2.0 * k * std::sqrt(mu);
            for (unsigned j = 1; j <= i; ++j) {
                u64 cnt = omega_in_range(shifted[j - 1].fac, v[i], v[i - 1]);
                if (std::fabs(static_cast<double>(cnt) - mu) > tol) {
                    std::ostringstream os;
                    os << "prime count " << cnt << " of " << shifted[j - 1].base
                       << " in (v_" << i << ", v_" << (i - 1)
                       << "] is outside " << fmt_g15(mu) << " +/- " << fmt_g15(tol);
                    c.status = ConditionStatus::fail;
                    c.reason = os.str();
                    break;
                }
            }
        }
    }

    // Condition 4: the v_k-smooth part of every base_i equals 6.
    if (structural) {
        auto& c = rep.conditions[3];
        c.status = ConditionStatus::pass;
        for (unsigned i = 0; i < k; ++i) {
            u64 smooth = 1;
            for (const auto& [p, e] : shifted[i].fac.factors)
                if (p <= v[k])
                    for (unsigned t = 0; t < e; ++t) smooth = checked_mul(smooth, p);
            if (smooth != 6) {
                c.status = ConditionStatus::fail;
                c.reason = "smooth part of " + fmt_u(shifted[i].base) +
                           " below v_" + fmt_u(k) + " is " + fmt_u(smooth) +
                           ", expected 6";
                break;
            }
        }
    }

    // Condition 5: every prime above v_k divides the value exactly once.
    {
        auto& c = rep.conditions[4];
        if (value == 0) {
            c.status = ConditionStatus::not_applicable;
            c.reason = "value is zero";
        } else if (value == 1) {
            c.status = ConditionStatus::pass;
        } else if (!table.in_range(value)) {
            throw resource_error(std::string(value_name) + " = " + fmt_u(value) +
                                 " exceeds the prime table");
        } else {
            FactoredInteger vf = factorize(value, table);
            c.status = ConditionStatus::pass;
            for (const auto& [p, e] : vf.factors) {
                if (p > v[k] && e != 1) {
                    c.status = ConditionStatus::fail;
                    c.reason = "prime " + fmt_u(p) + " divides " + value_name +
                               " with multiplicity " + fmt_u(e);
                    break;
                }
            }
        }
    }

    rep.member = true;
    for (const auto& c : rep.conditions)
        if (c.status != ConditionStatus::pass) rep.member = false;
    return rep;
}

} // namespace

void validate_params(const StructureParams& params) {
    if (params.k < 1 || params.k > 32)
        throw std::domain_error("k must lie in [1, 32]");
    if (params.x < 3)
        throw std::domain_error("x must be at least 3");
    if (params.mode == LevelMode::strict) {
        static const double rho = ford_constants(1e-12).rho;
        if (!(params.alpha > 0.5 && params.alpha < rho))
            throw std::domain_error(
                "strict mode requires 1/2 < alpha < rho ~= 0.5425985861");
    } else {
        if (!(params.alpha > 0.0 && params.alpha < 1.0))
            throw std::domain_error("alpha must lie in (0, 1)");
        const auto& lv = params.relaxed_levels;
        if (lv.size() != params.k + 1)
            throw std::domain_error("relaxed mode needs k+1 levels");
        for (std::size_t i = 0; i + 1 < lv.size(); ++i)
            if (lv[i] <= lv[i + 1])
                throw std::domain_error("levels must be strictly decreasing");
        if (lv.back() < 2)
            throw std::domain_error("deepest level must be at least 2");
    }
}

std::vector<u64> derived_ladder(double alpha, u64 x, unsigned k) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("alpha must lie in (0, 1)");
    if (x < 3)
        throw std::domain_error("x must be at least 3");
    if (k < 1 || k > 32)
        throw std::domain_error("k must lie in [1, 32]");
    std::vector<u64> v(k + 1);
    v[0] = x; // exponent alpha^0 = 1 reproduces x exactly
    long double e = 1.0L;
    for (unsigned i = 1; i <= k; ++i) {
        e *= (long double)alpha;
        v[i] = level_value(x, e);
    }
    return v;
}

std::vector<u64> nesting_levels(const StructureParams& params) {
    validate_params(params);
    if (params.mode != LevelMode::strict)
        throw std::domain_error("nesting levels are defined by strict mode only");
    std::vector<u64> v = derived_ladder(params.alpha, params.x, params.k);
    for (unsigned i = 0; i < params.k; ++i)
        if (v[i] <= v[i + 1])
            throw std::domain_error("level ladder degenerates at index " +
                                    std::to_string(i + 1) +
                                    "; x is too small for this alpha and k");
    return v;
}

std::vector<u64> effective_levels(const StructureParams& params) {
    validate_params(params);
    if (params.mode == LevelMode::strict) return nesting_levels(params);
    return params.relaxed_levels;
}

MembershipReport phi_membership(u64 n, const StructureParams& params,
                                const PrimeTable& table) {
    return membership_impl(n, params, table, -1);
}

MembershipReport sigma_membership(u64 m, const StructureParams& params,
                                  const PrimeTable& table) {
    return membership_impl(m, params, table, +1);
}

} // namespace phisig
