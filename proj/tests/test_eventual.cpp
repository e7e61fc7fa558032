/* SPDX-License-Identifier: Apache-2.0 */

#include "cheapreal/eventual.hpp"

#include "support/corpus.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace cheapreal;
using cheapreal::testing::alternating_sign;

TEST_CASE("eventual equality") {
    CHECK(eventually_eq(lift(5), patch(lift(5), {{0, Rat(0)}}), 100).is_true());
    CHECK(eventually_eq(omega(), omega() + lift(1), 100).is_false());
    CHECK(eventually_eq(alternating_sign(), lift(1), 100).is_false());

    auto t = eventually_eq(lift(5), patch(lift(5), {{0, Rat(0)}}), 100);
    REQUIRE(t.witness_rank.has_value());
    CHECK(*t.witness_rank == 1);
}

TEST_CASE("eventual order comparisons") {
    auto t = eventually_leq(lift(3), omega(), 100);
    CHECK(t.is_true());
    REQUIRE(t.witness_rank.has_value());
    CHECK(*t.witness_rank == 3);

    CHECK(eventually_leq(omega(), lift(3), 100).is_false());
    CHECK(eventually_leq(alternating_sign(), lift(0), 100).is_unknown());
    CHECK(eventually_lt(lift(0), lift(1) / (omega() + lift(1)), 100).is_true());
}

TEST_CASE("budget precondition") {
    CHECK_THROWS_AS(eventually_eq(omega(), omega(), 0), error);
}

TEST_CASE("agreement set cofiniteness shares the equality policy") {
    CHECK(agreement_set_cofinite(lift(1), patch(lift(1), {{2, Rat(0)}}), 100).is_true());
    auto parity = omega() - lift(2) * int_div(omega(), lift(2));  // n mod 2
    CHECK(agreement_set_cofinite(parity, lift(0), 100).is_false());
    CHECK(agreement_set_cofinite(omega(), omega(), 100).is_true());
}

TEST_CASE("true and false verdicts carry witnesses") {
    for (auto t : {eventually_eq(omega(), omega() + lift(1), 64), eventually_leq(omega(), lift(3), 64),
                   eventually_leq(lift(3), omega(), 64)}) {
        if (!t.is_unknown()) REQUIRE(t.witness_rank.has_value());
        CHECK(t.budget_used == 64);
    }
}

TEST_CASE("verdict equivalence on decided pairs") {
    auto a = patch(lift(2), {{0, Rat(7)}});
    auto b = patch(lift(2), {{3, Rat(9)}});
    auto c = lift(2);
    const Budget budget = 200;
    // reflexive, symmetric
    for (const auto& x : {a, b, c}) CHECK(eventually_eq(x, x, budget).is_true());
    CHECK(eventually_eq(a, b, budget).verdict == eventually_eq(b, a, budget).verdict);
    // transitive when all three verdicts are decided
    auto ab = eventually_eq(a, b, budget), bc = eventually_eq(b, c, budget), ac = eventually_eq(a, c, budget);
    REQUIRE((ab.is_true() && bc.is_true()));
    CHECK(ac.is_true());
}

TEST_CASE("patch invisibility for budgeted predicates") {
    cheapreal::testing::RandomExpr gen(99);
    for (int trial = 0; trial < 12; ++trial) {
        auto x = gen.value_expr();
        std::map<Budget, Rat> ov;
        Budget top = static_cast<Budget>(gen.small_int(0, 6));
        for (Budget r = 0; r <= top; ++r) ov.emplace(r, Rat(gen.small_int(-5, 5)));
        CheapNumber patched = [&] {
            if (x.sort() == ValueSort::Nat) {
                for (auto& [k, v] : ov) v = abs_rat(v);
            }
            return patch(x, ov);
        }();
        auto y = gen.value_expr();
        Budget budget = 150;  // far beyond the largest override plus the window
        CHECK(eventually_eq(x, y, budget).verdict == eventually_eq(patched, y, budget).verdict);
        CHECK(eventually_leq(x, y, budget).verdict == eventually_leq(patched, y, budget).verdict);
    }
}
