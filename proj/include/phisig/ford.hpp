#pragma once

#include "phisig/util.hpp"

namespace phisig {

// Machinery around the power series
//
//   F(z) = sum_{n>=1} a_n z^n,   a_n = (n+1)log(n+1) - n log n - 1,
//
// whose root F(rho) = 1 drives the constants C = 1/(2|log rho|) and
// D = 2C(1 + log F'(rho) - log 2C) - 3/2 in Ford's order-of-magnitude formula
// for the number of totient values up to x.  All logarithms are natural.

// a_n; requires n >= 1.  a_1 = 2 log 2 - 1, increasing, a_n ~ log n.
double coefficient_a(u64 n);

// Partial sum of F at z in (0,1), truncated once the tail envelope
// log(N+2) z^(N+1) / (1-z)^2 drops below tol (valid since
// a_n < log(n+1) <= (n-N) log(N+2) for n > N).
double evaluate_F(double z, double tol);

// Derivative series F'(z) = sum n a_n z^(n-1), same envelope idea.
double evaluate_F_prime(double z, double tol);

// Root of F(r) = 1 inside [0.5, 0.6], located by bisection in extended
// precision plus a final secant polish; the bracket F(0.5) < 1 < F(0.6) is
// asserted.  Requires tol >= 1e-14; guarantees |F(r) - 1| < tol.
double solve_rho(double tol);

struct FordConstants {
    double rho;
    double F_prime_rho;
    double C;
    double D;
    double tolerance; // the tol the constants were computed with
};

// All four constants at once; requires tol >= 1e-14.
FordConstants ford_constants(double tol);

// (x / log x) * exp(C(log3 x - log4 x)^2 + D log3 x - (D + 1/2 - 2C) log4 x)
// with the clamped iterated logarithms logk (log1 y = max(1, log y)), so the
// expression degrades gracefully for small x: once log3 and log4 both clamp
// to 1 the exponent collapses to the constant 2C - 1/2.  Requires x >= 2.
double ford_order_magnitude(double x);

// The same exponent computed three ways for the structured-set counting
// argument: a direct level sum, its Abel-summed form, and the k -> infinity
// limit 2 - F(alpha).  direct and abel are algebraically identical; tests pin
// them to 1e-10 of each other.
struct ExponentForms {
    double direct;
    double abel;
    double limit_form;
};

// Requires 0 < alpha < 1 and k >= 1.
ExponentForms predicted_exponent(double alpha, unsigned k);

} // namespace phisig
