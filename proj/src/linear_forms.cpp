#include "phisig/linear_forms.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#include "phisig/errors.hpp"

namespace phisig {

namespace {

u64 mod_norm(long long b, u64 p) {
    long long r = b % static_cast<long long>(p);
    if (r < 0) r += static_cast<long long>(p);
    return static_cast<u64>(r);
}

u64 mul_mod(u64 a, u64 b, u64 p) { return static_cast<u64>((u128)a * b % p); }

u64 pow_mod(u64 base, u64 exp, u64 p) {
    u64 r = 1 % p;
    base %= p;
    while (exp) {
        if (exp & 1) r = mul_mod(r, base, p);
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    return r;
}

bool is_prime_trial(u64 p) {
    if (p < 2) return false;
    for (u64 d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

// nu(p) assuming p is already known to be prime.
u64 nu_known_prime(u64 p, const FormSystem& system) {
    bool degenerate = false;
    for (const auto& f : system.forms)
        if (f.a % p == 0) degenerate = true;
    if (degenerate) {
        // Some form is constant mod p; count residues directly.
        u64 count = 0;
        for (u64 n = 0; n < p; ++n) {
            bool zero = false;
            for (const auto& f : system.forms) {
                if ((mul_mod(f.a % p, n, p) + mod_norm(f.b, p)) % p == 0) {
                    zero = true;
                    break;
                }
            }
            if (zero) ++count;
        }
        return count;
    }
    std::vector<u64> roots;
    roots.reserve(system.forms.size());
    for (const auto& f : system.forms) {
        u64 a = f.a % p;
        u64 inv = pow_mod(a, p - 2, p);
        u64 nb = (p - mod_norm(f.b, p)) % p;
        roots.push_back(mul_mod(nb, inv, p));
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots.size();
}

long double local_log_factor(u64 p, const FormSystem& system) {
    u64 v = nu_known_prime(p, system);
    if (v >= p) return -std::numeric_limits<long double>::infinity();
    long double lf_nu = std::log1p(-(long double)v / (long double)p);
    long double lf_p = std::log1p(-1.0L / (long double)p);
    return lf_nu - (long double)system.h() * lf_p;
}

} // namespace

void validate_system(const FormSystem& system) {
    const auto h = system.forms.size();
    if (h < 1 || h > 8)
        throw std::domain_error("form system must contain between 1 and 8 forms");
    for (std::size_t i = 0; i < h; ++i)
        if (system.forms[i].a < 1)
            throw std::domain_error("form " + std::to_string(i) +
                                    " has non-positive leading coefficient");
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = i + 1; j < h; ++j) {
            __int128 det = (__int128)system.forms[i].a * system.forms[j].b -
                           (__int128)system.forms[j].a * system.forms[i].b;
            if (det == 0)
                throw std::domain_error("forms " + std::to_string(i) + " and " +
                                        std::to_string(j) + " are proportional");
        }
    }
}

__int128 discriminant_E(const FormSystem& system) {
    validate_system(system);
    const auto h = system.forms.size();
    auto mul_checked = [](__int128 x, __int128 y) {
        __int128 r;
        if (__builtin_mul_overflow(x, y, &r))
            throw std::overflow_error("discriminant does not fit in 128 bits");
        return r;
    };
    __int128 e = 1;
    for (const auto& f : system.forms) e = mul_checked(e, (__int128)f.a);
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = i + 1; j < h; ++j) {
            __int128 det = (__int128)system.forms[i].a * system.forms[j].b -
                           (__int128)system.forms[j].a * system.forms[i].b;
            e = mul_checked(e, det);
        }
    }
    return e;
}

u64 nu(u64 p, const FormSystem& system) {
    validate_system(system);
    if (!is_prime_trial(p))
        throw std::domain_error("nu requires a prime modulus");
    return nu_known_prime(p, system);
}

SingularSeries singular_series(const FormSystem& system, u64 prime_bound,
                               const PrimeTable& table) {
    validate_system(system);
    if (prime_bound < 2)
        throw std::domain_error("prime bound must be at least 2");
    if (!table.in_range(prime_bound))
        throw resource_error("prime table too small for requested bound");
    long double log_sum = 0.0L;
    long double last_factor = 1.0L;
    bool obstructed = false;
    for (u64 p = 2; p <= prime_bound; ++p) {
        if (!table.is_prime(p)) continue;
        long double term = local_log_factor(p, system);
        if (std::isinf(term)) {
            obstructed = true;
            last_factor = 0.0L;
            continue;
        }
        log_sum += term;
        last_factor = std::exp(term);
    }
    SingularSeries out;
    out.value = obstructed ? 0.0 : static_cast<double>(std::exp(log_sum));
    out.last_factor_deviation = static_cast<double>(std::fabs(last_factor - 1.0L));
    return out;
}

u64 count_simultaneous_primes(const FormSystem& system, u64 x,
                              const PrimeTable& table, unsigned threads) {
    validate_system(system);
    if (x < 1) throw std::domain_error("count range must start at x >= 1");
    for (const auto& f : system.forms) {
        __int128 top = (__int128)f.a * x + f.b;
        if (top > (__int128)table.limit)
            throw resource_error("form value a*x+b exceeds the prime table");
    }
    unsigned workers = resolve_workers(threads);
    std::vector<u64> partial(workers, 0);
    parallel_for_blocks(1, x + 1, workers, [&](unsigned w, u64 lo, u64 hi) {
        u64 count = 0;
        for (u64 n = lo; n < hi; ++n) {
            bool all = true;
            for (const auto& f : system.forms) {
                __int128 v = (__int128)f.a * n + f.b;
                if (v < 2 || !table.is_prime(static_cast<u64>(v))) {
                    all = false;
                    break;
                }
            }
            if (all) ++count;
        }
        partial[w] = count;
    });
    u64 total = 0;
    for (u64 c : partial) total += c;
    return total;
}

PredictionReport prediction_ratio(const FormSystem& system, u64 x,
                                  u64 prime_bound, const PrimeTable& table,
                                  unsigned threads) {
    if (x < 2) throw std::domain_error("prediction requires x >= 2");
    PredictionReport out;
    out.observed = count_simultaneous_primes(system, x, table, threads);
    SingularSeries s = singular_series(system, prime_bound, table);
    double logx = std::log(static_cast<double>(x));
    out.predicted =
        s.value * static_cast<double>(x) / std::pow(logx, system.h());
    out.ratio = out.predicted > 0.0
                    ? static_cast<double>(out.observed) / out.predicted
                    : 0.0;
    return out;
}

double sieve_upper_bound(const FormSystem& system, double x) {
    validate_system(system);
    if (!(x >= 2.0))
        throw std::domain_error("sieve bound requires x >= 2");
    double log_abs_e;
    try {
        __int128 e = discriminant_E(system);
        u128 mag = e < 0 ? (u128)(-(e + 1)) + 1 : (u128)e;
        // |E| fits in 128 bits: convert through long double for the log.
        log_abs_e = std::log(static_cast<double>((long double)mag));
    } catch (const std::overflow_error&) {
        // Fall back to summing logs of the factors.
        long double acc = 0.0L;
        for (const auto& f : system.forms) acc += std::log((long double)f.a);
        const auto h = system.forms.size();
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = i + 1; j < h; ++j) {
                __int128 det = (__int128)system.forms[i].a * system.forms[j].b -
                               (__int128)system.forms[j].a * system.forms[i].b;
                u128 mag = det < 0 ? (u128)(-(det + 1)) + 1 : (u128)det;
                acc += std::log((long double)mag);
            }
        log_abs_e = static_cast<double>(acc);
    }
    // log2_clamped(|E| + 2) = max(1, log(max(1, log(|E| + 2)))).
    double abs_e_plus = std::exp(log_abs_e); // may be inf; log1 clamps below
    double inner = std::isinf(abs_e_plus) ? log_abs_e + 0.0 : std::log(abs_e_plus + 2.0);
    double l2 = std::max(1.0, std::log(std::max(1.0, inner)));
    double h = static_cast<double>(system.h());
    return x * std::pow(l2, h) / std::pow(log1(x), h);
}

AffineForm parse_affine_form(const std::string& text) {
    // Accepted shapes: "a*n+b", "a*n-b", "n+b", "n-b", "a*n", "n".
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw std::domain_error("empty form");
    std::size_t npos_ = s.find('n');
    if (npos_ == std::string::npos)
        throw std::domain_error("form must mention n: '" + text + "'");
    AffineForm f;
    std::string head = s.substr(0, npos_);
    if (head.empty()) {
        f.a = 1;
    } else {
        if (head.back() != '*')
            throw std::domain_error("expected 'a*n' in form '" + text + "'");
        head.pop_back();
        char* end = nullptr;
        unsigned long long a = std::strtoull(head.c_str(), &end, 10);
        if (head.empty() || *end != '\0' || a == 0)
            throw std::domain_error("bad coefficient in form '" + text + "'");
        f.a = a;
    }
    std::string tail = s.substr(npos_ + 1);
    if (tail.empty()) {
        f.b = 0;
    } else {
        if (tail[0] != '+' && tail[0] != '-')
            throw std::domain_error("expected '+b' or '-b' in form '" + text + "'");
        char* end = nullptr;
        long long b = std::strtoll(tail.c_str(), &end, 10);
        if (*end != '\0')
            throw std::domain_error("bad offset in form '" + text + "'");
        f.b = b;
    }
    return f;
}

} // namespace phisig
