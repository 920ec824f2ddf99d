#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "selfish_lb/core.hpp"
#include "selfish_lb/lemma_checks.hpp"
#include "support.hpp"

#include <algorithm>

using namespace slb;

TEST_CASE("potential examples") {
    CHECK(potential(Assignment{1, 1}).exact() == 0);
    CHECK(potential(Assignment{2, 1, 1}).exact() == Rational(2, 3));
    CHECK(potential(Assignment{2, 0}).exact() == 2);
    CHECK(potential(Assignment{2, 0}).n_phi == 4);
    CHECK(potential(Assignment{7}).n_phi == 0);
    CHECK(potential(Assignment{0, 0, 0}).n_phi == 0);
}

TEST_CASE("Nash at 2,1,1 attains r(1 - r/n)") {
    const Assignment x{2, 1, 1};
    CHECK(potential(x).exact() == phi_bounds(x.m(), x.n()).min_phi);
}

TEST_CASE("is_nash") {
    CHECK(is_nash(Assignment{2, 1, 1}));
    CHECK_FALSE(is_nash(Assignment{3, 1}));
    for (Load k : {0, 1, 5, 1000000})
        CHECK(is_nash(Assignment(std::vector<Load>(7, k))));
    CHECK(is_nash(Assignment{42}));
}

TEST_CASE("is_eps_nash uses the max-min gap against eps*m/n") {
    CHECK(is_eps_nash(Assignment{52, 48}, 0.1));
    CHECK_FALSE(is_eps_nash(Assignment{54, 46}, 0.1));
    CHECK(is_eps_nash(Assignment{55, 45}, 0.2));
    CHECK_FALSE(is_eps_nash(Assignment{55, 45}, 0.1));
    // Nash with m/n >= 1/eps
    CHECK(is_eps_nash(Assignment{11, 10, 10}, 0.1));
}

TEST_CASE("phi_bounds") {
    auto b = phi_bounds(4, 3);
    CHECK(b.min_phi == Rational(2, 3));
    CHECK(b.max_phi == 16);
    b = phi_bounds(6, 3);
    CHECK(b.min_phi == 0);
    CHECK(b.max_phi == 36);
    b = phi_bounds(5, 2);
    CHECK(b.min_phi == Rational(1, 2));
    CHECK(b.max_phi == 25);
    CHECK(phi_bounds(0, 1).min_phi == 0);
}

TEST_CASE("invalid assignments are rejected") {
    CHECK_THROWS_AS(Assignment(std::vector<Load>{}), std::invalid_argument);
    CHECK_THROWS_AS(Assignment({3, -1}), std::invalid_argument);
    CHECK_THROWS_AS(Assignment({kMaxLoad, 1}), OverflowError);
    CHECK_THROWS_AS(is_eps_nash(Assignment{1, 1}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(is_eps_nash(Assignment{1, 1}, 1.5), std::invalid_argument);
}

TEST_CASE("potential at 2^50 is exact") {
    const auto x = Assignment::all_on_one(kMaxLoad, 4);
    const auto p = potential(x);
    // n_phi = 4 m^2 - m^2 = 3 * 2^100
    CHECK(to_string(p.n_phi) == "3802951800684688204490109616128");
}

TEST_CASE("required exact envelope m <= 2^31, n <= 2^16") {
    const Load m = Load{1} << 31;
    const std::size_t n = std::size_t{1} << 16;
    const auto p = potential(Assignment::all_on_one(m, n));
    CHECK(p.n_phi == (static_cast<Int128>(n) - 1) * (static_cast<Int128>(1) << 62));
}

TEST_CASE("checked arithmetic throws instead of wrapping") {
    const Int128 big = static_cast<Int128>(1) << 100;
    CHECK_THROWS_AS(checked_mul(big, big), OverflowError);
    CHECK_THROWS_AS(checked_add(std::numeric_limits<Int128>::max(), 1), OverflowError);
}

TEST_CASE("exhaustive bounds and Nash characterization, m <= 8, n <= 4") {
    std::uint64_t count = 0;
    for (std::size_t n = 1; n <= 4; ++n)
        for (std::size_t m = 0; m <= 8; ++m)
            for_each_assignment(m, n, [&](const Assignment& x) {
                ++count;
                const auto b = phi_bounds(x.m(), x.n());
                const auto p = potential(x);
                REQUIRE(p.n_phi >= 0);
                REQUIRE(b.min_phi <= p.exact());
                REQUIRE(p.exact() <= b.max_phi);
                REQUIRE((p.exact() == b.min_phi) == is_nash(x));
                const Load r = x.m() % static_cast<Load>(x.n());
                REQUIRE(p.n_phi >= static_cast<Int128>(r) * (static_cast<Int128>(x.n()) - r));
            });
    CHECK(count > 0);
}

TEST_CASE("random assignments respect the potential bounds and permutation invariance") {
    RngStream rng(2024, 0, 0);
    for (int k = 0; k < 100000; ++k) {
        const auto x = test::random_assignment(rng, 1, 25, 100);
        const auto p = potential(x);
        const auto b = phi_bounds(x.m(), x.n());
        REQUIRE(p.n_phi >= 0);
        REQUIRE(b.min_phi <= p.exact());
        REQUIRE(p.exact() <= b.max_phi);
        std::vector<Load> perm(x.loads().begin(), x.loads().end());
        std::reverse(perm.begin(), perm.end());
        std::rotate(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(test::uniform_int(rng, 0, perm.size() - 1)),
                    perm.end());
        REQUIRE(potential(Assignment(perm)) == p);
        REQUIRE(potential(x.sorted_desc()) == p);
    }
}

TEST_CASE("named starts") {
    CHECK(Assignment::all_on_one(5, 3) == Assignment{5, 0, 0});
    CHECK(Assignment::two_zero_ones(4) == Assignment{2, 0, 1, 1});
    CHECK_THROWS(Assignment::two_zero_ones(1));
    CHECK(Assignment{1, 3, 2}.sorted_desc() == Assignment{3, 2, 1});
}
