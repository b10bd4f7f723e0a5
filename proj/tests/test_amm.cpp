#include "btcpm/amm.hpp"

#include "amm_oracle.hpp"

#include <catch2/catch.hpp>

#include <cmath>
#include <random>

using namespace btcpm;

namespace {
constexpr int64_t kShare = kMicroPerShare;  // 1 whole share in micro-shares
}

// ---------------------------------------------------------------------------
// LMSR
// ---------------------------------------------------------------------------

TEST_CASE("lmsr cost at the symmetric origin is b*ln2", "[amm]") {
    CHECK(lmsr_cost({1.0, 0.0, 0.0}) == Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(lmsr_cost({10.0, 0.0, 0.0}) == Approx(10.0 * std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("lmsr cost is log-sum-exp stabilized", "[amm]") {
    double c = lmsr_cost({1.0, 1000.0, 0.0});
    CHECK(std::isfinite(c));
    CHECK(c == Approx(1000.0).margin(1e-9));
}

TEST_CASE("lmsr move cost formula", "[amm]") {
    CHECK(lmsr_move_cost(0.5, 0.5, 1.0) == 0.0);
    CHECK(lmsr_move_cost(0.5, 0.75, 1.0) == Approx(std::log(2.0)).epsilon(1e-15));
    // diverges toward certainty
    CHECK(lmsr_move_cost(0.5, 1.0 - 1e-9, 1.0) > 20.0);
    CHECK_THROWS_AS(lmsr_move_cost(0.5, 1.0, 1.0), std::domain_error);
}

TEST_CASE("lmsr operator loss is bounded by b*ln2", "[amm]") {
    std::mt19937_64 rng(101);
    for (double b : {1.0, 10.0, 100.0}) {
        for (int trial = 0; trial < 200; ++trial) {
            LmsrState s{b, 0.0, 0.0};
            double collected = 0.0;
            int n = 1 + static_cast<int>(rng() % 30);
            for (int i = 0; i < n; ++i) {
                Outcome o = rng() % 2 ? Outcome::Yes : Outcome::No;
                double dq = static_cast<double>(rng() % 1'000) / 10.0;
                collected += lmsr_buy_cost(s, o, dq);
            }
            double worst_payout = std::max(s.q_yes, s.q_no);
            double loss = worst_payout - collected;
            REQUIRE(loss <= b * std::log(2.0) + 1e-9);
        }
    }
}

TEST_CASE("lmsr cost is path independent", "[amm]") {
    std::mt19937_64 rng(103);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::pair<Outcome, double>> trades;
        int n = 2 + static_cast<int>(rng() % 10);
        for (int i = 0; i < n; ++i)
            trades.push_back({rng() % 2 ? Outcome::Yes : Outcome::No,
                              static_cast<double>(rng() % 500) / 7.0});

        auto total_cost = [&](const std::vector<std::pair<Outcome, double>>& seq) {
            LmsrState s{10.0, 0.0, 0.0};
            double c = 0.0;
            for (auto& [o, dq] : seq) c += lmsr_buy_cost(s, o, dq);
            return c;
        };
        double forward = total_cost(trades);
        std::shuffle(trades.begin(), trades.end(), rng);
        double shuffled = total_cost(trades);
        REQUIRE(forward == Approx(shuffled).margin(1e-9));
    }
}

// ---------------------------------------------------------------------------
// seeding
// ---------------------------------------------------------------------------

TEST_CASE("standard seeding at prior 1/3 leaves an implicit bet", "[amm]") {
    auto [pool, lp] = seed_pool(UsdAmount{100 * kMicroPerUsd}, Prior{1, 3}, PoolMode::Standard);
    CHECK(pool.yes_reserve == 100 * kShare);
    CHECK(pool.no_reserve == 50 * kShare);  // 50 / (100 + 50) = 1/3
    CHECK(pool.prior.is_half());
    CHECK(lp.leftover_outcome == Outcome::No);
    CHECK(lp.leftover_micro == 50 * kShare);
    CHECK(implied_probability(pool) == 1.0L / 3.0L);
}

TEST_CASE("standard seeding at prior 1/2 is symmetric", "[amm]") {
    auto [pool, lp] = seed_pool(UsdAmount{100 * kMicroPerUsd}, Prior{1, 2}, PoolMode::Standard);
    CHECK(pool.yes_reserve == 100 * kShare);
    CHECK(pool.no_reserve == 100 * kShare);
    CHECK(lp.leftover_micro == 0);
    CHECK(implied_probability(pool) == 0.5L);
}

TEST_CASE("weighted seeding puts the whole subsidy in the pool", "[amm]") {
    auto [pool, lp] = seed_pool(UsdAmount{100 * kMicroPerUsd}, Prior{1, 3}, PoolMode::Weighted);
    CHECK(pool.yes_reserve == 100 * kShare);
    CHECK(pool.no_reserve == 100 * kShare);
    CHECK(pool.prior.num == 1);
    CHECK(pool.prior.den == 3);
    CHECK(lp.leftover_micro == 0);
    CHECK(implied_probability(pool) == 1.0L / 3.0L);
}

TEST_CASE("seeding at a prior above 1/2 mirrors", "[amm]") {
    auto [pool, lp] = seed_pool(UsdAmount{100 * kMicroPerUsd}, Prior{2, 3}, PoolMode::Standard);
    CHECK(pool.no_reserve == 100 * kShare);
    CHECK(pool.yes_reserve == 50 * kShare);
    CHECK(lp.leftover_outcome == Outcome::Yes);
    CHECK(lp.leftover_micro == 50 * kShare);
    CHECK(implied_probability(pool) == 2.0L / 3.0L);
}

TEST_CASE("seeding rejects degenerate priors", "[amm]") {
    CHECK_THROWS_AS(seed_pool(UsdAmount{kMicroPerUsd}, Prior{0, 3}, PoolMode::Standard),
                    std::invalid_argument);
    CHECK_THROWS_AS(seed_pool(UsdAmount{kMicroPerUsd}, Prior{3, 3}, PoolMode::Weighted),
                    std::invalid_argument);
    CHECK_THROWS_AS(seed_pool(UsdAmount{0}, Prior{1, 2}, PoolMode::Standard),
                    std::invalid_argument);
}

// ---------------------------------------------------------------------------
// betting
// ---------------------------------------------------------------------------

TEST_CASE("standard bet: $100 YES against (100,100)", "[amm]") {
    auto [pool, lp] = seed_pool(UsdAmount{100 * kMicroPerUsd}, Prior{1, 2}, PoolMode::Standard);
    BetResult res = bet(pool, UsdAmount{100 * kMicroPerUsd}, Outcome::Yes);
    // delta = x*M/(y+M) = 100*100/200 = 50; user receives 150 YES
    CHECK(res.shares_out == 150 * kShare);
    CHECK(res.pool.yes_reserve == 50 * kShare);
    CHECK(res.pool.no_reserve == 200 * kShare);
    // oracle: root-find on x'*y' = 10,000 shares^2
    int64_t oracle = testing::oracle_bet_delta(pool, 100 * kShare, Outcome::Yes);
    CHECK(res.swapped_out == oracle);
    (void)lp;
}

TEST_CASE("zero-cash bet is a no-op", "[amm]") {
    auto [pool, lp] = seed_pool(UsdAmount{100 * kMicroPerUsd}, Prior{1, 2}, PoolMode::Standard);
    BetResult res = bet(pool, UsdAmount{0}, Outcome::Yes);
    CHECK(res.shares_out == 0);
    CHECK(res.pool.yes_reserve == pool.yes_reserve);
    CHECK(res.pool.no_reserve == pool.no_reserve);
    (void)lp;
}

TEST_CASE("weighted bet: $100 YES against (100,100,p=1/3)", "[amm]") {
    auto [pool, lp] = seed_pool(UsdAmount{100 * kMicroPerUsd}, Prior{1, 3}, PoolMode::Weighted);
    BetResult res = bet(pool, UsdAmount{100 * kMicroPerUsd}, Outcome::Yes);
    // delta = 100 - 100*(100/200)^((1-p)/p) = 100*(1 - 0.25) = 75; receive 175
    CHECK(res.shares_out == 175 * kShare);
    CHECK(res.pool.yes_reserve == 25 * kShare);
    CHECK(res.pool.no_reserve == 200 * kShare);
    int64_t oracle = testing::oracle_bet_delta(pool, 100 * kShare, Outcome::Yes);
    CHECK(std::abs(res.swapped_out - oracle) <= 1);
    (void)lp;
}

TEST_CASE("implied probability matches the small-swap marginal price", "[amm]") {
    // Oracle: the marginal YES price is the cash cost of a tiny YES bet per
    // share received, evaluated on a pool large enough that integer rounding
    // is negligible. Validates the p*y/(p*y+(1-p)*x) form on the invariant
    // itself rather than by derivation.
    std::mt19937_64 rng(105);
    for (int trial = 0; trial < 200; ++trial) {
        Prior prior{1 + static_cast<int64_t>(rng() % 9), 10};
        PoolMode mode = trial % 2 ? PoolMode::Weighted : PoolMode::Standard;
        UsdAmount subsidy{static_cast<int64_t>(100'000 + rng() % 900'000) * kMicroPerUsd};
        auto [pool, lp] = seed_pool(subsidy, prior, mode);
        // drift the pool off its seed point first
        pool = bet(pool, UsdAmount{static_cast<int64_t>(1 + rng() % 50'000) * kMicroPerUsd},
                   rng() % 2 ? Outcome::Yes : Outcome::No)
                   .pool;

        const int64_t tiny = kMicroPerUsd;  // $1 against a >= $100k pool
        BetResult probe = bet(pool, UsdAmount{tiny}, Outcome::Yes);
        long double marginal = static_cast<long double>(tiny) /
                               static_cast<long double>(probe.shares_out);
        long double implied = implied_probability(pool);
        REQUIRE(std::abs(static_cast<double>(marginal - implied)) <
                static_cast<double>(implied) * 1e-3);
        (void)lp;
    }

    // the worked pair: (100,100,p=1/3) prices YES at exactly the prior
    auto [wpool, wlp] = seed_pool(UsdAmount{100'000 * kMicroPerUsd}, Prior{1, 3},
                                  PoolMode::Weighted);
    BetResult probe = bet(wpool, UsdAmount{kMicroPerUsd}, Outcome::Yes);
    long double marginal = static_cast<long double>(kMicroPerUsd) /
                           static_cast<long double>(probe.shares_out);
    CHECK(std::abs(static_cast<double>(marginal - 1.0L / 3.0L)) < 1e-4);
    (void)wlp;
}

TEST_CASE("closed-form swap matches the invariant root-find", "[amm]") {
    std::mt19937_64 rng(107);
    for (int trial = 0; trial < 2'000; ++trial) {
        Prior prior{1 + static_cast<int64_t>(rng() % 9), 10};
        PoolMode mode = trial % 2 ? PoolMode::Weighted : PoolMode::Standard;
        UsdAmount subsidy{static_cast<int64_t>(1 + rng() % 1'000) * kMicroPerUsd};
        auto [pool, lp] = seed_pool(subsidy, prior, mode);
        UsdAmount cash{static_cast<int64_t>(1 + rng() % 2'000) * 500'000};
        Outcome o = rng() % 2 ? Outcome::Yes : Outcome::No;

        BetResult res = bet(pool, cash, o);
        int64_t oracle = testing::oracle_bet_delta(pool, cash.micro, o);
        REQUIRE(std::abs(res.swapped_out - oracle) <= 1);
        (void)lp;
    }
}

TEST_CASE("invariant holds under a thousand random bets", "[amm]") {
    std::mt19937_64 rng(109);
    auto [pool, lp] = seed_pool(UsdAmount{500 * kMicroPerUsd}, Prior{2, 5}, PoolMode::Weighted);
    long double last_c = pool.invariant;
    for (int i = 0; i < 1'000; ++i) {
        UsdAmount cash{static_cast<int64_t>(1 + rng() % 50'000'000)};
        Outcome o = rng() % 2 ? Outcome::Yes : Outcome::No;
        pool = bet(pool, cash, o).pool;
        long double recomputed = pool_invariant_value(pool);
        REQUIRE(std::abs(static_cast<double>((recomputed - pool.invariant) / pool.invariant)) <
                1e-12);
        // rounding always favours the pool
        REQUIRE(pool.invariant >= last_c - last_c * 1e-15L);
        last_c = pool.invariant;
    }
    (void)lp;
}

TEST_CASE("buying YES moves the implied probability up; selling reverses", "[amm]") {
    auto [pool, lp] = seed_pool(UsdAmount{100 * kMicroPerUsd}, Prior{1, 2}, PoolMode::Standard);
    long double p0 = implied_probability(pool);
    BetResult res = bet(pool, UsdAmount{20 * kMicroPerUsd}, Outcome::Yes);
    long double p1 = implied_probability(res.pool);
    CHECK(p1 > p0);

    SellResult back = sell(res.pool, res.shares_out, Outcome::Yes);
    long double p2 = implied_probability(back.pool);
    CHECK(p2 < p1);
    // fee-free round trip returns at most the original cash
    CHECK(back.cash_out <= 20 * kShare);
    CHECK(back.cash_out >= 20 * kShare - 10);  // deficit bounded by rounding dust
    (void)lp;
}

TEST_CASE("proportional fee stays in the pool", "[amm]") {
    auto [pool, lp] = seed_pool(UsdAmount{100 * kMicroPerUsd}, Prior{1, 2}, PoolMode::Standard,
                                200);  // 2% on the swapped side
    BetResult res = bet(pool, UsdAmount{100 * kMicroPerUsd}, Outcome::Yes);
    CHECK(res.fee_shares == kShare);  // 2% of the 50-share swap
    CHECK(res.shares_out == 149 * kShare);
    CHECK(res.pool.collected_fees == kShare);
    CHECK(res.pool.yes_reserve == 51 * kShare);
    (void)lp;
}

// ---------------------------------------------------------------------------
// permanent loss
// ---------------------------------------------------------------------------

TEST_CASE("drifted pool loses 90% when YES wins", "[amm]") {
    auto [seeded, lp] = seed_pool(UsdAmount{100 * kMicroPerUsd}, Prior{1, 2}, PoolMode::Standard);
    // one $900 YES bet drives (100,100) to exactly (10,1000)
    BetResult res = bet(seeded, UsdAmount{900 * kMicroPerUsd}, Outcome::Yes);
    REQUIRE(res.pool.yes_reserve == 10 * kShare);
    REQUIRE(res.pool.no_reserve == 1000 * kShare);
    // the end state is product-consistent: 10 * 1000 = 100 * 100
    REQUIRE(static_cast<__int128>(res.pool.yes_reserve) * res.pool.no_reserve ==
            static_cast<__int128>(seeded.yes_reserve) * seeded.no_reserve);

    CHECK(permanent_loss(res.pool, lp.initial_endowment, Outcome::Yes) == 0.9L);
    // the asymmetric flip side: NO winning turns the drift into a gain
    CHECK(permanent_loss(res.pool, lp.initial_endowment, Outcome::No) == -9.0L);
}

TEST_CASE("untouched pool has zero permanent loss", "[amm]") {
    auto [pool, lp] = seed_pool(UsdAmount{100 * kMicroPerUsd}, Prior{1, 2}, PoolMode::Standard);
    CHECK(permanent_loss(pool, lp.initial_endowment, Outcome::Yes) == 0.0L);
    CHECK(permanent_loss(pool, lp.initial_endowment, Outcome::No) == 0.0L);
}

TEST_CASE("pool serialization is key-value text", "[amm]") {
    auto [pool, lp] = seed_pool(UsdAmount{100 * kMicroPerUsd}, Prior{1, 3}, PoolMode::Weighted);
    CHECK(serialize(pool) == "x=100000000 y=100000000 p=1/3 C=100000000.000000 fees=0");
    (void)lp;
}
