#include "phisig/ford.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "phisig/errors.hpp"

namespace phisig {

namespace {

long double a_ld(u64 n) {
    long double m = static_cast<long double>(n);
    return (m + 1) * std::log(m + 1) - m * std::log(m) - 1.0L;
}

// Sum of F at z with tail envelope log(N+2) z^(N+1) / (1-z)^2 < tol.
long double F_ld(long double z, long double tol) {
    long double sum = 0.0L, zp = 1.0L;
    for (u64 n = 1;; ++n) {
        zp *= z; // z^n
        sum += a_ld(n) * zp;
        long double envelope =
            std::log(static_cast<long double>(n) + 2) * zp * z / ((1 - z) * (1 - z));
        if (envelope < tol) return sum;
        if (n > 1'000'000)
            throw internal_error("series for F failed to converge");
    }
}

// F'(z) = sum n a_n z^(n-1); tail bounded by
// log(N+2) (N+1) (1+z) z^N / (1-z)^3 (same log(n+1) <= (n-N) log(N+2) trick
// applied to n a_n, using n(n-N) <= (N+1)(n-N)^2).
long double Fp_ld(long double z, long double tol) {
    long double sum = 0.0L, zp = 1.0L; // z^(n-1)
    for (u64 n = 1;; ++n) {
        sum += static_cast<long double>(n) * a_ld(n) * zp;
        long double envelope = std::log(static_cast<long double>(n) + 2) *
                               (static_cast<long double>(n) + 1) * (1 + z) * zp * z /
                               ((1 - z) * (1 - z) * (1 - z));
        if (envelope < tol) return sum;
        zp *= z;
        if (n > 1'000'000)
            throw internal_error("series for F' failed to converge");
    }
}

void require_unit_interval(double z, const char* who) {
    if (!(z > 0.0 && z < 1.0))
        throw std::domain_error(std::string(who) + ": argument must lie in (0, 1)");
}

} // namespace

double coefficient_a(u64 n) {
    if (n < 1) throw std::domain_error("coefficient_a: n must be >= 1");
    return static_cast<double>(a_ld(n));
}

double evaluate_F(double z, double tol) {
    require_unit_interval(z, "evaluate_F");
    if (!(tol > 0))
        throw std::domain_error("evaluate_F: tolerance must be positive");
    return static_cast<double>(F_ld(z, static_cast<long double>(tol)));
}

double evaluate_F_prime(double z, double tol) {
    require_unit_interval(z, "evaluate_F_prime");
    if (!(tol > 0))
        throw std::domain_error("evaluate_F_prime: tolerance must be positive");
    return static_cast<double>(Fp_ld(z, static_cast<long double>(tol)));
}

double solve_rho(double tol) {
    if (!(tol >= 1e-14))
        throw std::domain_error("solve_rho: tolerance must be >= 1e-14");
    const long double inner = 1e-21L; // series truncation well below root accuracy
    long double lo = 0.5L, hi = 0.6L;
    long double flo = F_ld(lo, inner) - 1, fhi = F_ld(hi, inner) - 1;
    if (!(flo < 0 && fhi > 0))
        throw internal_error("solve_rho: bracket F(0.5) < 1 < F(0.6) failed");
    while (hi - lo > 1e-18L) {
        long double mid = 0.5L * (lo + hi);
        long double fm = F_ld(mid, inner) - 1;
        if (fm < 0) { lo = mid; flo = fm; }
        else        { hi = mid; fhi = fm; }
    }
    // One secant polish over the final bracket.
    long double r = lo - flo * (hi - lo) / (fhi - flo);
    double rd = static_cast<double>(r);
    if (!(std::fabs(evaluate_F(rd, tol * 1e-3) - 1.0) < tol))
        throw internal_error("solve_rho: residual exceeds requested tolerance");
    return rd;
}

FordConstants ford_constants(double tol) {
    if (!(tol >= 1e-14))
        throw std::domain_error("ford_constants: tolerance must be >= 1e-14");
    FordConstants c{};
    c.rho = solve_rho(tol);
    c.F_prime_rho = static_cast<double>(
        Fp_ld(static_cast<long double>(c.rho), static_cast<long double>(tol) * 1e-3L));
    c.C = 1.0 / (2.0 * std::fabs(std::log(c.rho)));
    c.D = 2.0 * c.C * (1.0 + std::log(c.F_prime_rho) - std::log(2.0 * c.C)) - 1.5;
    c.tolerance = tol;
    return c;
}

double ford_order_magnitude(double x) {
    if (!(x >= 2.0))
        throw std::domain_error("ford_order_magnitude: x must be >= 2");
    static const FordConstants c = ford_constants(1e-12);
    double l3 = log3_clamped(x), l4 = log4_clamped(x);
    double expo = c.C * (l3 - l4) * (l3 - l4) + c.D * l3 - (c.D + 0.5 - 2.0 * c.C) * l4;
    return x / log1(x) * std::exp(expo);
}

ExponentForms predicted_exponent(double alpha, unsigned k) {
    require_unit_interval(alpha, "predicted_exponent");
    if (k < 1) throw std::domain_error("predicted_exponent: k must be >= 1");
    long double al = alpha;
    ExponentForms out{};

    // direct: 2 + alpha - sum_{i=2..k} ((a^(i-1)-a^i)(i + i log i) - 2 a^(i-1))
    long double direct = 2.0L + al;
    for (u64 i = 2; i <= k; ++i) {
        long double ai1 = std::pow(al, static_cast<long double>(i - 1));
        long double ii = static_cast<long double>(i);
        direct -= (ai1 - ai1 * al) * (ii + ii * std::log(ii)) - 2.0L * ai1;
    }
    out.direct = static_cast<double>(direct);

    // abel: 2 - sum_{i=1..k-1} a_i alpha^i + (k log k + k) alpha^k
    long double abel = 2.0L, ap = 1.0L;
    for (u64 i = 1; i < k; ++i) {
        ap *= al;
        abel -= a_ld(i) * ap;
    }
    long double kk = static_cast<long double>(k);
    abel += (kk * std::log(kk) + kk) * std::pow(al, kk);
    out.abel = static_cast<double>(abel);

    out.limit_form = 2.0 - evaluate_F(alpha, 1e-14);
    return out;
}

} // namespace phisig
