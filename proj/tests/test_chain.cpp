#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>
#include <string>
#include <vector>

#include "phisig/arith.hpp"
#include "phisig/chain.hpp"
#include "phisig/errors.hpp"
#include "phisig/structured.hpp"

#include "oracles.hpp"

using namespace phisig;

namespace {

const PrimeTable& table20k() {
    static PrimeTable t = build_prime_table(20000);
    return t;
}

StructureParams relaxed_params(u64 x, unsigned k, std::vector<u64> levels) {
    StructureParams p;
    p.alpha = 0.54;
    p.k = k;
    p.x = x;
    p.mode = LevelMode::relaxed;
    p.relaxed_levels = std::move(levels);
    return p;
}

std::string joined(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& s : parts) {
        out += s;
        out += '\n';
    }
    return out;
}

// Replay every step multiplier on top of the all-6 seed and compare the
// accumulated components with the emitted primes and value.
void check_reconstruction(const SolutionPair& sol, unsigned k) {
    std::vector<u64> fphi(k, 6), fsig(k, 6);
    for (const auto& st : sol.trace) {
        REQUIRE(st.phi_parts.size() == k);
        REQUIRE(st.sigma_parts.size() == k);
        for (unsigned j = 0; j < k; ++j) {
            fphi[j] *= st.phi_parts[j];
            fsig[j] *= st.sigma_parts[j];
        }
    }
    REQUIRE(sol.n_primes.size() == k);
    REQUIRE(sol.m_primes.size() == k);
    u64 prod = 1;
    for (unsigned j = 0; j < k; ++j) {
        CHECK(fphi[j] + 1 == sol.n_primes[j]);
        CHECK(fsig[j] - 1 == sol.m_primes[j]);
        prod *= fphi[j];
    }
    CHECK(prod == sol.value);
}

void check_solution_arithmetic(const SolutionPair& sol) {
    u64 n = 1, m = 1;
    for (std::size_t j = 0; j + 1 < sol.n_primes.size(); ++j) {
        CHECK(sol.n_primes[j] > sol.n_primes[j + 1]);
        CHECK(sol.m_primes[j] > sol.m_primes[j + 1]);
    }
    for (u64 p : sol.n_primes) {
        CHECK(oracle::is_prime(p));
        n *= p;
    }
    for (u64 q : sol.m_primes) {
        CHECK(oracle::is_prime(q));
        m *= q;
    }
    CHECK(n == sol.n);
    CHECK(m == sol.m);
    CHECK(oracle::phi(sol.n) == sol.value);
    CHECK(oracle::sigma(sol.m) == sol.value);
}

} // namespace

TEST_SUITE("chain") {

TEST_CASE("seed tuples") {
    ChainTuple s2 = seed_chain(2);
    CHECK(s2.level == 2);
    CHECK(s2.s == 36);
    CHECK(s2.phi_parts == std::vector<u64>{6, 6});
    CHECK(s2.sigma_parts == std::vector<u64>{6, 6});

    CHECK(seed_chain(1).s == 6);
    CHECK(seed_chain(3).s == 216);
    CHECK(seed_chain(24).s == 4738381338321616896ULL);
    CHECK_THROWS_AS((void)seed_chain(25), std::overflow_error);
    CHECK_THROWS_AS((void)seed_chain(0), std::domain_error);
}

TEST_CASE("tuple invariants") {
    StructureParams p = relaxed_params(1'000'000, 2, {1'000'000, 70, 6});

    CHECK(tuple_invariant_violation(seed_chain(2), p, table20k()).empty());

    SUBCASE("shared product must match the components") {
        ChainTuple t = seed_chain(2);
        t.s = 37;
        CHECK(tuple_invariant_violation(t, p, table20k()).find("disagree") !=
              std::string::npos);
    }

    SUBCASE("components respect the bound at the tuple's level") {
        StructureParams tight = relaxed_params(1'000'000, 2, {1'000'000, 70, 5});
        CHECK(tuple_invariant_violation(seed_chain(2), tight, table20k())
                  .find("level bound") != std::string::npos);
    }

    SUBCASE("diagonal entries must be shifted primes") {
        ChainTuple t;
        t.level = 1;
        t.phi_parts = {6, 14};
        t.sigma_parts = {6, 14};
        t.s = 84;
        // 14 + 1 = 15 is composite on the phi side.
        CHECK(tuple_invariant_violation(t, p, table20k()).find("not prime") !=
              std::string::npos);

        t.phi_parts = {6, 16};
        t.sigma_parts = {6, 16};
        t.s = 96;
        // 16 + 1 = 17 is prime but 16 - 1 = 15 is not.
        std::string msg = tuple_invariant_violation(t, p, table20k());
        CHECK(msg.find("sigma") != std::string::npos);
        CHECK(msg.find("not prime") != std::string::npos);
    }

    SUBCASE("shape mismatches are reported") {
        ChainTuple t = seed_chain(3);
        CHECK(tuple_invariant_violation(t, p, table20k()).find("exceeds k") !=
              std::string::npos);
        t.level = 2;
        CHECK(tuple_invariant_violation(t, p, table20k()).find("length") !=
              std::string::npos);
    }

    SUBCASE("overflowing products are reported, not thrown") {
        ChainTuple t = seed_chain(2);
        t.phi_parts = {1ULL << 63, 4};
        CHECK(tuple_invariant_violation(t, p, table20k()).find("overflows") !=
              std::string::npos);
    }
}

TEST_CASE("extend step at level 2") {
    StructureParams p = relaxed_params(1'000'000, 2, {1'000'000, 70, 6});
    SearchBudget budget;
    budget.q_window_override[2] = {2, 10};

    ExtendResult er = extend_chain(seed_chain(2), p, budget, table20k());
    // Q in {2,3,5,7} all give primes 6Q+1 and 6Q-1.
    REQUIRE(er.children.size() == 4);
    std::vector<u64> qs;
    for (const auto& [child, step] : er.children) {
        CHECK(child.level == 1);
        CHECK(child.s == 36 * step.q);
        CHECK(child.phi_parts == std::vector<u64>{6, 6 * step.q});
        CHECK(child.sigma_parts == std::vector<u64>{6, 6 * step.q});
        CHECK(step.level == 2);
        CHECK(step.t == step.q);
        CHECK(step.phi_parts == std::vector<u64>{1, step.q});
        CHECK(step.sigma_parts == std::vector<u64>{1, step.q});
        CHECK(oracle::is_prime(6 * step.q + 1));
        CHECK(oracle::is_prime(6 * step.q - 1));
        qs.push_back(step.q);
    }
    CHECK(qs == std::vector<u64>{2, 3, 5, 7});

    SUBCASE("output budget truncates the children") {
        SearchBudget tight = budget;
        tight.max_outputs = 2;
        ExtendResult tr = extend_chain(seed_chain(2), p, tight, table20k());
        CHECK(tr.children.size() == 2);
        CHECK(joined(tr.diagnostics).find("truncated") != std::string::npos);
    }

    SUBCASE("candidate budget truncates the Q walk") {
        SearchBudget tight = budget;
        tight.max_q_candidates = 2;
        ExtendResult tr = extend_chain(seed_chain(2), p, tight, table20k());
        CHECK(tr.children.size() == 2);
        CHECK(joined(tr.diagnostics).find("Q enumeration truncated") !=
              std::string::npos);
    }

    SUBCASE("level and window errors") {
        ChainTuple level1 = er.children.front().first;
        CHECK_THROWS_AS((void)extend_chain(level1, p, budget, table20k()),
                        std::domain_error);
        CHECK_THROWS_AS((void)finalize_chain(seed_chain(2), p, budget, table20k()),
                        std::domain_error);

        SearchBudget missing;
        CHECK_THROWS_AS((void)extend_chain(seed_chain(2), p, missing, table20k()),
                        std::domain_error);

        SearchBudget malformed;
        malformed.q_window_override[2] = {1, 10};
        CHECK_THROWS_AS((void)extend_chain(seed_chain(2), p, malformed, table20k()),
                        std::domain_error);

        SearchBudget wide;
        wide.q_window_override[2] = {2, 30000};
        CHECK_THROWS_AS((void)extend_chain(seed_chain(2), p, wide, table20k()),
                        resource_error);

        ChainTuple bad = seed_chain(2);
        bad.s = 35;
        CHECK_THROWS_AS((void)extend_chain(bad, p, budget, table20k()),
                        std::domain_error);
    }
}

TEST_CASE("finalize step from the Q=2 branch") {
    StructureParams p = relaxed_params(1'000'000, 2, {1'000'000, 70, 6});
    ChainTuple t;
    t.level = 1;
    t.phi_parts = {6, 12};
    t.sigma_parts = {6, 12};
    t.s = 72;

    SearchBudget budget;
    budget.q_window_override[1] = {2, 50};
    ConstructResult fr = finalize_chain(t, p, budget, table20k());

    // Q in {3,5,7,17,23,47} turn both 6Q+1 and 6Q-1 prime; Q=2 collides
    // with the level-1 primes (13, 11) and is dropped for ordering.
    REQUIRE(fr.solutions.size() == 6);
    std::set<std::pair<u64, u64>> pairs;
    for (const auto& sol : fr.solutions) {
        check_solution_arithmetic(sol);
        CHECK(sol.n_primes[1] == 13);
        CHECK(sol.m_primes[1] == 11);
        REQUIRE(sol.trace.size() == 1);
        CHECK(sol.trace[0].level == 1);
        CHECK(sol.trace[0].t == sol.trace[0].q);
        pairs.insert({sol.n, sol.m});
    }
    CHECK(pairs.count({403, 319}) == 1);
    CHECK(pairs.count({559, 451}) == 1);
    CHECK(pairs.count({247, 187}) == 1);
    CHECK(joined(fr.diagnostics).find("strictly decreasing") != std::string::npos);

    SUBCASE("value pins for the named pairs") {
        for (const auto& sol : fr.solutions) {
            if (sol.n == 403) {
                CHECK(sol.m == 319);
                CHECK(sol.value == 360);
            }
            if (sol.n == 559) {
                CHECK(sol.m == 451);
                CHECK(sol.value == 504);
            }
        }
    }

    SUBCASE("a shallow top level drops large candidates") {
        StructureParams low = relaxed_params(1'000'000, 2, {200, 70, 6});
        ConstructResult lr = finalize_chain(t, low, budget, table20k());
        // 6*47 = 282 exceeds v_0 = 200; the other five survive.
        CHECK(lr.solutions.size() == 5);
        for (const auto& sol : lr.solutions) CHECK(sol.n_primes[0] <= 283);
        CHECK(joined(lr.diagnostics).find("top level bound") != std::string::npos);
    }

    SUBCASE("missing final window") {
        SearchBudget none;
        CHECK_THROWS_AS((void)finalize_chain(t, p, none, table20k()),
                        std::domain_error);
    }
}

TEST_CASE("full construction at k = 2") {
    StructureParams p = relaxed_params(1'000'000, 2, {1'000'000, 70, 6});
    SearchBudget budget;
    budget.q_window_override[2] = {2, 10};
    budget.q_window_override[1] = {2, 50};

    ConstructResult cr = construct_solutions(p, budget, table20k());
    REQUIRE(cr.solutions.size() == 18);

    // Sorted by (n, m), no duplicates.
    for (std::size_t i = 0; i + 1 < cr.solutions.size(); ++i) {
        const auto& a = cr.solutions[i];
        const auto& b = cr.solutions[i + 1];
        CHECK((a.n < b.n || (a.n == b.n && a.m < b.m)));
    }
    CHECK(cr.solutions.front().n == 247);
    CHECK(cr.solutions.front().m == 187);
    CHECK(cr.solutions.front().value == 216);

    std::set<std::pair<u64, u64>> pairs;
    // Q_2 branch sizes: 11 -> 6, 17 -> 5, 29 -> 4, 41 -> 3 lower primes.
    std::map<u64, int> branch;
    for (const auto& sol : cr.solutions) {
        check_solution_arithmetic(sol);
        check_reconstruction(sol, 2);
        REQUIRE(sol.trace.size() == 2);
        CHECK(sol.trace[0].level == 2);
        CHECK(sol.trace[1].level == 1);
        // The distinguished primes factor the value as 36 Q_2 Q_1.
        CHECK(36 * sol.trace[0].q * sol.trace[1].q == sol.value);
        CHECK(sol.trace[1].q > sol.trace[0].q);
        pairs.insert({sol.n, sol.m});
        branch[sol.m_primes[1]]++;
    }
    CHECK(pairs.count({403, 319}) == 1);
    CHECK(pairs.count({559, 451}) == 1);
    CHECK(branch[11] == 6);
    CHECK(branch[17] == 5);
    CHECK(branch[29] == 4);
    CHECK(branch[41] == 3);

    SUBCASE("solution budget truncates the merged list") {
        SearchBudget tight = budget;
        tight.max_outputs = 3;
        ConstructResult tr = construct_solutions(p, tight, table20k());
        CHECK(tr.solutions.size() == 3);
        CHECK(joined(tr.diagnostics).find("truncated at budget") !=
              std::string::npos);
    }
}

TEST_CASE("k = 1 construction lands on twin primes") {
    StructureParams p = relaxed_params(1000, 1, {1000, 6});
    SearchBudget budget;
    budget.q_window_override[1] = {2, 166};

    ConstructResult cr = construct_solutions(p, budget, table20k());

    // Oracle: twins (m, m+2) below 1000 whose midpoint satisfies
    // (m+1)/6 prime; the seed fixes t' = 1, so only prime Q are reachable.
    std::set<u64> expected;
    std::size_t all_twins = 0;
    for (u64 q = 3; q + 2 <= 1000; ++q) {
        if (!oracle::is_prime(q) || !oracle::is_prime(q + 2)) continue;
        ++all_twins;
        if ((q + 1) % 6 == 0 && oracle::is_prime((q + 1) / 6)) expected.insert(q);
    }
    REQUIRE(all_twins == 35);
    CHECK(expected.size() == 10);

    std::set<u64> got;
    for (const auto& sol : cr.solutions) {
        check_solution_arithmetic(sol);
        CHECK(sol.n == sol.m + 2);
        CHECK(sol.value == sol.m + 1);
        got.insert(sol.m);
    }
    CHECK(got == expected);
    CHECK(got.size() < all_twins); // a strict subset of the twin pairs
}

TEST_CASE("strict mode is honest about empty pools at desk scale") {
    StructureParams p;
    p.mode = LevelMode::strict;
    p.alpha = 0.54;
    p.x = 1'000'000;
    SearchBudget budget;

    SUBCASE("k = 2: the level-2 prime pool is empty") {
        p.k = 2;
        ConstructResult cr = construct_solutions(p, budget, table20k());
        CHECK(cr.solutions.empty());
        std::string d = joined(cr.diagnostics);
        CHECK(d.find("prime pool") != std::string::npos);
        CHECK(d.find("is empty") != std::string::npos);
        CHECK(d.find("search exhausted") != std::string::npos);
    }

    SUBCASE("k = 1: no multiplier satisfies the prime-count window") {
        p.k = 1;
        ConstructResult cr = construct_solutions(p, budget, table20k());
        CHECK(cr.solutions.empty());
        std::string d = joined(cr.diagnostics);
        CHECK(d.find("prime-count window") != std::string::npos);
        CHECK(d.find("no solutions") != std::string::npos);
    }
}

} // TEST_SUITE
