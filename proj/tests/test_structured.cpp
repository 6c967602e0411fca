#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "phisig/arith.hpp"
#include "phisig/errors.hpp"
#include "phisig/structured.hpp"

#include "oracles.hpp"

using namespace phisig;

namespace {

const PrimeTable& table2k() {
    static PrimeTable t = build_prime_table(2000);
    return t;
}

StructureParams relaxed_params(u64 x, unsigned k, std::vector<u64> levels,
                               double alpha = 0.55) {
    StructureParams p;
    p.alpha = alpha;
    p.k = k;
    p.x = x;
    p.mode = LevelMode::relaxed;
    p.relaxed_levels = std::move(levels);
    return p;
}

bool is_pass(const MembershipReport& r, int i) {
    return r.conditions[static_cast<std::size_t>(i)].status ==
           ConditionStatus::pass;
}
bool is_fail(const MembershipReport& r, int i) {
    return r.conditions[static_cast<std::size_t>(i)].status ==
           ConditionStatus::fail;
}
bool is_na(const MembershipReport& r, int i) {
    return r.conditions[static_cast<std::size_t>(i)].status ==
           ConditionStatus::not_applicable;
}

} // namespace

TEST_SUITE("structured") {

TEST_CASE("derived ladder matches the closed form") {
    // v_i = floor(exp((log x)^{alpha^i})) evaluated independently.
    auto expected = [](double alpha, u64 x, unsigned k) {
        std::vector<u64> v{x};
        double e = 1.0;
        for (unsigned i = 1; i <= k; ++i) {
            e *= alpha;
            double val = std::exp(std::pow(std::log(static_cast<double>(x)), e));
            v.push_back(static_cast<u64>(std::floor(val)));
        }
        return v;
    };

    CHECK(derived_ladder(0.55, 1'000'000, 1) == std::vector<u64>{1'000'000, 69});
    CHECK(derived_ladder(0.55, 1'000'000, 3) ==
          std::vector<u64>{1'000'000, 69, 9, 4});
    CHECK(derived_ladder(0.54, 1'000'000, 2) == std::vector<u64>{1'000'000, 62, 8});
    CHECK(derived_ladder(0.5, 16, 1) == std::vector<u64>{16, 5});

    for (double a : {0.3, 0.54, 0.55, 0.7, 0.9})
        for (u64 x : {u64(3), u64(100), u64(1'000'000)})
            CHECK(derived_ladder(a, x, 4) == expected(a, x, 4));

    // The head is x itself and interior levels stay strictly below x.
    auto v = derived_ladder(0.9999, 1'000'000, 2);
    CHECK(v[0] == 1'000'000);
    CHECK(v[1] < 1'000'000);

    CHECK_THROWS_AS((void)derived_ladder(0.0, 100, 2), std::domain_error);
    CHECK_THROWS_AS((void)derived_ladder(1.0, 100, 2), std::domain_error);
    CHECK_THROWS_AS((void)derived_ladder(-0.5, 100, 2), std::domain_error);
    CHECK_THROWS_AS((void)derived_ladder(0.54, 2, 2), std::domain_error);
    CHECK_THROWS_AS((void)derived_ladder(0.54, 100, 0), std::domain_error);
    CHECK_THROWS_AS((void)derived_ladder(0.54, 100, 33), std::domain_error);
}

TEST_CASE("strict nesting levels enforce the alpha range") {
    StructureParams p;
    p.mode = LevelMode::strict;
    p.x = 1'000'000;
    p.k = 2;

    p.alpha = 0.54;
    CHECK(nesting_levels(p) == std::vector<u64>{1'000'000, 62, 8});
    CHECK(effective_levels(p) == std::vector<u64>{1'000'000, 62, 8});

    p.k = 1;
    CHECK(nesting_levels(p) == std::vector<u64>{1'000'000, 62});

    // Ladders are strictly decreasing wherever they are defined.
    p.k = 4;
    p.alpha = 0.51;
    auto v = nesting_levels(p);
    REQUIRE(v.size() == 5);
    for (std::size_t i = 0; i + 1 < v.size(); ++i) CHECK(v[i] > v[i + 1]);

    // alpha must lie strictly between 1/2 and rho ~ 0.5425985861.
    p.k = 2;
    for (double bad : {0.5, 0.55, 0.5426, 0.2, 0.9}) {
        p.alpha = bad;
        CHECK_THROWS_AS((void)nesting_levels(p), std::domain_error);
    }

    // Tiny x collapses consecutive levels into a tie.
    p.alpha = 0.54;
    p.x = 3;
    CHECK_THROWS_WITH_AS((void)nesting_levels(p),
                         doctest::Contains("degenerates"), std::domain_error);

    // nesting_levels is a strict-mode notion.
    StructureParams r = relaxed_params(1'000'000, 2, {1'000'000, 70, 6});
    CHECK_THROWS_AS((void)nesting_levels(r), std::domain_error);
    CHECK(effective_levels(r) == std::vector<u64>{1'000'000, 70, 6});
}

TEST_CASE("relaxed parameter validation") {
    CHECK_NOTHROW(validate_params(relaxed_params(1'000'000, 2, {1'000'000, 70, 6})));
    // Ladder length must be k+1.
    CHECK_THROWS_AS(validate_params(relaxed_params(1'000'000, 2, {1'000'000, 70})),
                    std::domain_error);
    // Strictly decreasing.
    CHECK_THROWS_AS(
        validate_params(relaxed_params(1'000'000, 2, {1'000'000, 70, 70})),
        std::domain_error);
    CHECK_THROWS_AS(
        validate_params(relaxed_params(1'000'000, 2, {70, 1'000'000, 6})),
        std::domain_error);
    // Deepest level at least 2.
    CHECK_THROWS_AS(validate_params(relaxed_params(1'000'000, 2, {1'000'000, 70, 1})),
                    std::domain_error);
    // alpha within (0,1), x >= 3, k within [1,32].
    CHECK_THROWS_AS(
        validate_params(relaxed_params(1'000'000, 2, {1'000'000, 70, 6}, 1.0)),
        std::domain_error);
    CHECK_THROWS_AS(validate_params(relaxed_params(2, 2, {1'000'000, 70, 6})),
                    std::domain_error);
    CHECK_THROWS_AS(validate_params(relaxed_params(1'000'000, 0, {1'000'000})),
                    std::domain_error);
}

TEST_CASE("phi membership worked examples at levels (10^6, 70, 6)") {
    StructureParams p = relaxed_params(1'000'000, 2, {1'000'000, 70, 6});

    SUBCASE("non-squarefree input fails the structural condition") {
        MembershipReport r = phi_membership(4, p, table2k());
        CHECK(r.n == 4);
        CHECK_FALSE(r.member);
        CHECK(is_fail(r, 0));
        CHECK_FALSE(r.conditions[0].reason.empty());
        CHECK(is_na(r, 1));
        CHECK(is_na(r, 2));
        CHECK(is_na(r, 3));
        // phi(4) = 2 has no prime factor above v_2 = 6, so the multiplicity
        // condition still passes on its own.
        CHECK(is_pass(r, 4));
    }

    SUBCASE("403 = 13*31 carries the wrong smooth part") {
        MembershipReport r = phi_membership(403, p, table2k());
        CHECK_FALSE(r.member);
        CHECK(is_pass(r, 0)); // squarefree, two primes, phi(403) = 360 <= x
        CHECK(is_fail(r, 3));
        // The 6-smooth part of 31 - 1 = 30 is 30 itself.
        CHECK(r.conditions[3].reason.find("30") != std::string::npos);
        CHECK(is_pass(r, 2)); // prime-count windows are generous here
    }

    SUBCASE("301 = 7*43 passes size, smooth part, and multiplicity") {
        MembershipReport r = phi_membership(301, p, table2k());
        CHECK(is_pass(r, 0));
        CHECK(r.conditions[0].reason.empty());
        CHECK(is_pass(r, 2));
        CHECK(is_pass(r, 3)); // 42 -> 6 and 6 -> 6
        CHECK(is_pass(r, 4)); // phi(301) = 252 = 2^2 3^2 7, and 7 > 6 is unital
        // At v_1 = 70 the twelfth root is 1, so both prime factors of
        // 7 - 1 = 6 sit above it and the bracketing condition cannot hold.
        CHECK(is_fail(r, 1));
        CHECK_FALSE(r.member);
    }
}

TEST_CASE("sigma membership worked examples at levels (10^6, 70, 6)") {
    StructureParams p = relaxed_params(1'000'000, 2, {1'000'000, 70, 6});

    SUBCASE("319 = 11*29 carries the wrong smooth part") {
        MembershipReport r = sigma_membership(319, p, table2k());
        CHECK_FALSE(r.member);
        CHECK(is_pass(r, 0)); // sigma(319) = 360 <= x
        CHECK(is_fail(r, 3)); // 29 + 1 = 30 is fully 6-smooth but not 6
        CHECK(r.conditions[3].reason.find("30") != std::string::npos);
    }

    SUBCASE("205 = 5*41 passes size, smooth part, and multiplicity") {
        MembershipReport r = sigma_membership(205, p, table2k());
        CHECK(is_pass(r, 0)); // sigma(205) = 252
        CHECK(is_pass(r, 3)); // 42 -> 6, 6 -> 6
        CHECK(is_pass(r, 4));
        CHECK(is_fail(r, 1)); // same twelfth-root collapse as the phi side
        CHECK_FALSE(r.member);
    }

    SUBCASE("the shared value matches the phi side") {
        MembershipReport a = phi_membership(301, p, table2k());
        MembershipReport b = sigma_membership(205, p, table2k());
        CHECK(oracle::phi(301) == 252);
        CHECK(oracle::sigma(205) == 252);
        CHECK(a.n == 301);
        CHECK(b.n == 205);
    }
}

TEST_CASE("full membership at a one-level ladder") {
    // With v = (100, 6) the twelfth root of v_0 is 1 and there is no
    // uniqueness clause (it starts at i = 1), so honest members exist.
    StructureParams p = relaxed_params(100, 1, {100, 6}, 0.5);

    MembershipReport r = phi_membership(43, p, table2k());
    for (int i = 0; i < 5; ++i) {
        CAPTURE(i);
        CHECK(is_pass(r, i));
    }
    CHECK(r.member);

    MembershipReport s = sigma_membership(41, p, table2k());
    for (int i = 0; i < 5; ++i) {
        CAPTURE(i);
        CHECK(is_pass(s, i));
    }
    CHECK(s.member);

    // A steep alpha shrinks the prime-count window mean to ~0.153 with
    // tolerance ~0.782, so the single prime 7 of 42 inside (6, 100] now
    // deviates too far.
    StructureParams steep = relaxed_params(100, 1, {100, 6}, 0.9);
    MembershipReport t = phi_membership(43, steep, table2k());
    CHECK(is_fail(t, 2));
    CHECK_FALSE(t.member);
}

TEST_CASE("strict-mode membership derives its own ladder") {
    StructureParams p;
    p.mode = LevelMode::strict;
    p.alpha = 0.54;
    p.x = 1'000'000;
    p.k = 2; // ladder (10^6, 62, 8)

    MembershipReport r = phi_membership(301, p, table2k());
    CHECK(is_pass(r, 0));
    CHECK(is_pass(r, 2));
    // At v_2 = 8 the prime 7 counts as smooth, so the smooth part of
    // 43 - 1 = 42 is 42 rather than 6.
    CHECK(is_fail(r, 3));
    CHECK(r.conditions[3].reason.find("42") != std::string::npos);
    CHECK(is_pass(r, 4)); // 252 = 2^2 3^2 7 has no prime above 8 at all
    CHECK(is_fail(r, 1)); // twelfth root of 62 is 1 again
    CHECK_FALSE(r.member);
}

TEST_CASE("membership domain and resource errors") {
    StructureParams p = relaxed_params(1'000'000, 2, {1'000'000, 70, 6});
    CHECK_THROWS_AS((void)phi_membership(0, p, table2k()), std::domain_error);
    CHECK_THROWS_AS((void)phi_membership(1, p, table2k()), std::domain_error);
    CHECK_THROWS_AS((void)sigma_membership(1, p, table2k()), std::domain_error);

    PrimeTable small = build_prime_table(50);
    StructureParams q = relaxed_params(1000, 1, {1000, 6}, 0.5);
    CHECK_THROWS_AS((void)phi_membership(101, q, small), resource_error);

    StructureParams bad = relaxed_params(1'000'000, 2, {1'000'000, 70});
    CHECK_THROWS_AS((void)phi_membership(301, bad, table2k()), std::domain_error);
}

} // TEST_SUITE
