#include <doctest.h>

#include "fixtures.hpp"
#include "pfb/errors.hpp"
#include "pfb/oracle.hpp"
#include "pfb/orderings.hpp"

using namespace pfb;

TEST_CASE("erd, edd and weight orders on the examples") {
    CHECK(erd_order(fixtures::example1()).perm == std::vector<int>{0, 1, 2, 3, 4});
    CHECK(erd_order(fixtures::example1()).certificate == OrderCertificate::EarliestRelease);

    const Instance ex2 = fixtures::example2();
    CHECK(edd_order(ex2).perm == std::vector<int>{1, 0});        // d = (6,5)
    CHECK(weight_order(ex2).perm == std::vector<int>{1, 0});     // w = (1,3)
}

TEST_CASE("sorting is stable: ties keep ascending job index") {
    Instance inst;
    inst.machines = {{1, 1}};
    inst.jobs = {{3, 5, 2}, {1, 5, 2}, {3, 4, 2}, {1, 5, 7}};
    CHECK(erd_order(inst).perm == std::vector<int>{1, 3, 0, 2});
    CHECK(edd_order(inst).perm == std::vector<int>{2, 0, 1, 3});
    CHECK(weight_order(inst).perm == std::vector<int>{3, 0, 1, 2});
}

TEST_CASE("edd and weight orders require their fields") {
    CHECK_THROWS_AS(edd_order(fixtures::example1()), ConfigError);
    CHECK_THROWS_AS(weight_order(fixtures::example1()), ConfigError);
}

TEST_CASE("order_for covers exactly the certified combinations") {
    const Instance ex1 = fixtures::example1();  // nonzero release dates
    auto cmax = order_for(ex1, Objective::cmax());
    REQUIRE(cmax.has_value());
    CHECK(cmax->perm == std::vector<int>{0, 1, 2, 3, 4});
    CHECK(cmax->certificate == OrderCertificate::EarliestRelease);
    CHECK(order_for(ex1, Objective::sum_c()).has_value());

    const Instance ex2 = fixtures::example2();  // nonzero release dates, d and w present
    CHECK_FALSE(order_for(ex2, Objective::lmax()).has_value());
    CHECK_FALSE(order_for(ex2, Objective::sum_wc()).has_value());
    CHECK_FALSE(order_for(ex2, Objective::sum_u()).has_value());

    Instance zero;
    zero.machines = {{1, 2}};
    zero.jobs = {{0, 3, 1}, {0, 1, 5}, {0, 2, 5}};
    auto sum_t = order_for(zero, Objective::sum_t());
    REQUIRE(sum_t.has_value());
    CHECK(sum_t->perm == std::vector<int>{1, 2, 0});
    CHECK(sum_t->certificate == OrderCertificate::EarliestDueDate);
    auto sum_wc = order_for(zero, Objective::sum_wc());
    REQUIRE(sum_wc.has_value());
    CHECK(sum_wc->certificate == OrderCertificate::NonIncreasingWeight);
    auto sum_u = order_for(zero, Objective::sum_u());
    REQUIRE(sum_u.has_value());
    CHECK(sum_u->certificate == OrderCertificate::EarliestDueDate);

    auto custom = Objective::custom(Aggregator::Sum, [](int, Time c) { return c; });
    CHECK_FALSE(order_for(zero, custom).has_value());
}

TEST_CASE("agreeable order: simultaneous ERD+EDD+non-increasing-weight") {
    Instance inst;
    inst.machines = {{1, 1}};
    inst.jobs = {{0, 5, 9}, {1, 5, 4}, {1, 7, 4}};
    auto order = agreeable_order(inst);
    REQUIRE(order.has_value());
    CHECK(order->perm == std::vector<int>{0, 1, 2});

    inst.jobs[2].w = 8;  // now w increases along the only ERD+EDD order
    CHECK_FALSE(agreeable_order(inst).has_value());
}

TEST_CASE("EDD minimizes lmax and total tardiness over all orders (no releases)") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const Instance inst =
            fixtures::random_instance(seed, {5, 2, 3, 3, 0, /*with_due=*/true, /*with_weights=*/true});
        const auto edd = edd_order(inst).perm;
        for (const Objective& obj : {Objective::lmax(), Objective::sum_t()}) {
            const Value best = oracle_best_order(inst, obj).value;
            CHECK(oracle_permutation(inst, edd, obj).value == best);
        }
    }
}

TEST_CASE("non-increasing weights minimize sum w_j C_j over all orders (no releases)") {
    for (std::uint64_t seed = 20; seed <= 32; ++seed) {
        const Instance inst =
            fixtures::random_instance(seed, {5, 2, 3, 3, 0, false, /*with_weights=*/true});
        const Value best = oracle_best_order(inst, Objective::sum_wc()).value;
        CHECK(oracle_permutation(inst, weight_order(inst).perm, Objective::sum_wc()).value == best);
    }
}

TEST_CASE("ERD permutation schedules reach the global optimum for cmax and sumc") {
    for (std::uint64_t seed = 40; seed <= 55; ++seed) {
        const Instance inst = fixtures::random_instance(seed, {5, 2, 4, 3, 4});
        const auto erd = erd_order(inst).perm;
        for (const Objective& obj : {Objective::cmax(), Objective::sum_c()}) {
            CHECK(oracle_permutation(inst, erd, obj).value == oracle_full(inst, obj).value);
        }
    }
}
