#pragma once
// Automated market makers for one binary market. LMSR is the theoretical
// baseline (bounded worst-case loss b*ln2, divergent boundary cost); the
// tradable mechanisms are the constant-product pool x*y = C and its
// prior-weighted generalisation x^p * y^(1-p) = C.
//
// Reserves are integer micro-shares. Invariant arithmetic runs in extended
// precision with deterministic rounding toward the pool, and the stored
// invariant constant is refreshed after every trade (it can only grow).

#include "btcpm/money.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace btcpm {

// ---------------------------------------------------------------------------
// LMSR baseline
// ---------------------------------------------------------------------------

struct LmsrState {
    double b = 1.0;       // liquidity / worst-case-loss parameter
    double q_yes = 0.0;   // outstanding YES shares
    double q_no = 0.0;
};

// C(q) = b * ln(exp(q_yes/b) + exp(q_no/b)), log-sum-exp stabilized.
inline double lmsr_cost(const LmsrState& s) {
    if (s.b <= 0) throw std::invalid_argument("lmsr_cost: b must be positive");
    double m = std::max(s.q_yes, s.q_no);
    return m + s.b * std::log(std::exp((s.q_yes - m) / s.b) + std::exp((s.q_no - m) / s.b));
}

inline double lmsr_price_yes(const LmsrState& s) {
    if (s.b <= 0) throw std::invalid_argument("lmsr_price_yes: b must be positive");
    return 1.0 / (1.0 + std::exp((s.q_no - s.q_yes) / s.b));
}

// Cash required to buy `dq` shares of `outcome`.
inline double lmsr_buy_cost(LmsrState& s, Outcome outcome, double dq) {
    double before = lmsr_cost(s);
    (outcome == Outcome::Yes ? s.q_yes : s.q_no) += dq;
    return lmsr_cost(s) - before;
}

// Cost of moving the YES price from p0 up to p1: b * ln((1-p0)/(1-p1)).
// Diverges as p1 -> 1.
inline double lmsr_move_cost(double p0, double p1, double b) {
    if (b <= 0) throw std::invalid_argument("lmsr_move_cost: b must be positive");
    if (!(p0 > 0.0 && p0 <= p1 && p1 < 1.0))
        throw std::domain_error("lmsr_move_cost: need 0 < p0 <= p1 < 1");
    return b * std::log((1.0 - p0) / (1.0 - p1));
}

// ---------------------------------------------------------------------------
// constant-product pools
// ---------------------------------------------------------------------------

// Prior probability as an exact rational so reference cases (1/3, 1/2) reproduce
// bit-for-bit.
struct Prior {
    int64_t num = 1;
    int64_t den = 2;

    long double value() const { return static_cast<long double>(num) / static_cast<long double>(den); }
    bool is_half() const { return 2 * num == den; }
};

enum class PoolMode { Standard, Weighted };

struct CpmmPool {
    int64_t yes_reserve = 0;   // x, micro-shares
    int64_t no_reserve = 0;    // y, micro-shares
    Prior prior;               // p; 1/2 for a standard pool
    long double invariant = 0; // C = x^p * y^(1-p), refreshed after each trade
    int64_t fee_bps = 0;       // optional proportional fee on the swapped side
    int64_t collected_fees = 0; // micro-shares retained by the pool
};

struct LpAccount {
    UsdAmount initial_endowment{0};
    Outcome leftover_outcome = Outcome::Yes;
    int64_t leftover_micro = 0;  // nonzero only for standard seeding at prior != 1/2
};

inline long double pool_invariant_value(int64_t x, int64_t y, Prior p) {
    if (x <= 0 || y <= 0) throw std::invalid_argument("pool invariant: empty reserve");
    long double pf = p.value();
    return expl(pf * logl(static_cast<long double>(x)) +
                (1.0L - pf) * logl(static_cast<long double>(y)));
}

inline long double pool_invariant_value(const CpmmPool& pool) {
    return pool_invariant_value(pool.yes_reserve, pool.no_reserve, pool.prior);
}

namespace detail {

// round(a*b/d) to nearest, used for the seeding split only.
inline int64_t mul_div_round(int64_t a, int64_t b, int64_t d) {
    if (d <= 0) throw std::invalid_argument("mul_div_round: non-positive divisor");
    __int128 p = static_cast<__int128>(a) * b;
    __int128 q = p >= 0 ? (p + d / 2) / d : (p - d / 2) / d;
    return narrow(q, "mul_div_round overflow");
}

} // namespace detail

// Seed a pool from a cash subsidy at a prior probability. The subsidy mints
// one micro-YES + one micro-NO per micro-USD.
//
// Standard mode deposits the largest (x, y) with y/(x+y) = prior and both
// sides <= subsidy; the unmatched remainder stays with the LP as an implicit
// bet. Weighted mode sets p = prior and deposits the whole subsidy on both
// sides, leaving nothing behind.
inline std::pair<CpmmPool, LpAccount> seed_pool(UsdAmount subsidy, Prior prior, PoolMode mode,
                                                int64_t fee_bps = 0) {
    if (subsidy.micro <= 0) throw std::invalid_argument("seed_pool: subsidy must be positive");
    if (prior.den <= 0 || prior.num <= 0 || prior.num >= prior.den)
        throw std::invalid_argument("seed_pool: prior must lie strictly inside (0,1)");

    const int64_t minted = subsidy.micro;  // of each outcome
    CpmmPool pool;
    pool.fee_bps = fee_bps;
    LpAccount lp;
    lp.initial_endowment = subsidy;

    if (mode == PoolMode::Weighted) {
        pool.prior = prior;
        pool.yes_reserve = minted;
        pool.no_reserve = minted;
    } else {
        pool.prior = Prior{1, 2};
        if (2 * prior.num == prior.den) {
            pool.yes_reserve = minted;
            pool.no_reserve = minted;
        } else if (2 * prior.num < prior.den) {
            // prior < 1/2: NO is the scarce reserve.
            pool.yes_reserve = minted;
            pool.no_reserve = detail::mul_div_round(minted, prior.num, prior.den - prior.num);
            lp.leftover_outcome = Outcome::No;
            lp.leftover_micro = minted - pool.no_reserve;
        } else {
            pool.no_reserve = minted;
            pool.yes_reserve = detail::mul_div_round(minted, prior.den - prior.num, prior.num);
            lp.leftover_outcome = Outcome::Yes;
            lp.leftover_micro = minted - pool.yes_reserve;
        }
    }
    pool.invariant = pool_invariant_value(pool);
    return {pool, lp};
}

// Marginal YES price as a probability: p*y / (p*y + (1-p)*x).
inline long double implied_probability(const CpmmPool& pool) {
    long double num = static_cast<long double>(checked_mul(pool.prior.num, pool.no_reserve));
    long double den = num + static_cast<long double>(
                                checked_mul(pool.prior.den - pool.prior.num, pool.yes_reserve));
    return num / den;
}

struct BetResult {
    CpmmPool pool;
    int64_t shares_out = 0;   // micro-shares of the chosen outcome
    int64_t minted = 0;       // bundle size M
    int64_t swapped_out = 0;  // shares withdrawn from the pool (after fee)
    int64_t fee_shares = 0;
};

// Bet cash on an outcome: mint M of each share, deposit the non-chosen side,
// withdraw the invariant-preserving amount of the chosen side. The user ends
// up holding M + delta of the outcome; the pool keeps any rounding dust.
inline BetResult bet(const CpmmPool& pool, UsdAmount cash, Outcome outcome) {
    if (cash.micro < 0) throw std::invalid_argument("bet: negative cash");
    BetResult res{pool, 0, 0, 0, 0};
    if (cash.micro == 0) return res;

    const int64_t m = cash.micro;
    res.minted = m;

    int64_t in_reserve = outcome == Outcome::Yes ? pool.no_reserve : pool.yes_reserve;
    int64_t out_reserve = outcome == Outcome::Yes ? pool.yes_reserve : pool.no_reserve;

    int64_t in_new = checked_add(in_reserve, m);
    int64_t out_new;
    if (pool.prior.is_half()) {
        // delta = out*M/(in+M) exactly; out_new = out - floor(delta).
        out_new = out_reserve - mul_div_floor(out_reserve, m, in_new);
    } else {
        // Closed form out_new = out * (in/in_new)^(e), e = (1-p)/p for a YES
        // bet and p/(1-p) for a NO bet, then snapped to the smallest integer
        // that keeps the invariant (the pool never loses to rounding).
        long double w_in = outcome == Outcome::Yes
                               ? static_cast<long double>(pool.prior.den - pool.prior.num) /
                                     static_cast<long double>(pool.prior.den)
                               : static_cast<long double>(pool.prior.num) /
                                     static_cast<long double>(pool.prior.den);
        long double w_out = 1.0L - w_in;
        long double e = w_in / w_out;
        long double out_real = static_cast<long double>(out_reserve) *
                               expl(e * (logl(static_cast<long double>(in_reserve)) -
                                         logl(static_cast<long double>(in_new))));
        long double target = w_out * logl(static_cast<long double>(out_reserve)) +
                             w_in * logl(static_cast<long double>(in_reserve));
        long double ln_in_new = logl(static_cast<long double>(in_new));
        // tie slack on the log scale, orders of magnitude below one micro-share
        auto holds = [&](int64_t cand) {
            return w_out * logl(static_cast<long double>(cand)) + w_in * ln_in_new >=
                   target - 1e-15L;
        };
        out_new = static_cast<int64_t>(floorl(out_real));
        if (out_new < 1) out_new = 1;
        while (out_new < out_reserve && !holds(out_new)) ++out_new;
    }
    if (out_new < 1) out_new = 1;
    if (out_new > out_reserve) out_new = out_reserve;

    int64_t delta = out_reserve - out_new;
    res.fee_shares = pool.fee_bps > 0 ? mul_div_ceil(delta, pool.fee_bps, 10'000) : 0;
    res.swapped_out = delta - res.fee_shares;
    res.shares_out = checked_add(m, res.swapped_out);

    res.pool.yes_reserve = outcome == Outcome::Yes ? out_new + res.fee_shares : in_new;
    res.pool.no_reserve = outcome == Outcome::Yes ? in_new : out_new + res.fee_shares;
    res.pool.collected_fees = checked_add(pool.collected_fees, res.fee_shares);
    res.pool.invariant = pool_invariant_value(res.pool);
    return res;
}

struct SellResult {
    CpmmPool pool;
    int64_t cash_out = 0;      // micro-USD from burning complete sets
    int64_t shares_swapped = 0;
};

// Inverse mint-and-swap: swap part of the holding into the other outcome so
// the result is complete sets, and burn them for cash. Deterministic binary
// search for the minimal swap; rounding favours the pool.
inline SellResult sell(const CpmmPool& pool, int64_t shares_micro, Outcome outcome) {
    if (shares_micro < 0) throw std::invalid_argument("sell: negative size");
    SellResult res{pool, 0, 0};
    if (shares_micro == 0) return res;

    const int64_t s = shares_micro;
    int64_t in_reserve = outcome == Outcome::Yes ? pool.yes_reserve : pool.no_reserve;
    int64_t out_reserve = outcome == Outcome::Yes ? pool.no_reserve : pool.yes_reserve;

    // Depositing our outcome: its invariant weight drives the swap curve.
    long double w_in = outcome == Outcome::Yes
                           ? static_cast<long double>(pool.prior.num) /
                                 static_cast<long double>(pool.prior.den)
                           : static_cast<long double>(pool.prior.den - pool.prior.num) /
                                 static_cast<long double>(pool.prior.den);
    long double w_out = 1.0L - w_in;
    long double e = w_in / w_out;
    long double target = w_out * logl(static_cast<long double>(out_reserve)) +
                         w_in * logl(static_cast<long double>(in_reserve));

    // Withdrawable units of the other outcome after depositing d of ours.
    auto withdrawable = [&](int64_t d) -> int64_t {
        int64_t in_new = checked_add(in_reserve, d);
        int64_t out_new;
        if (pool.prior.is_half()) {
            out_new = mul_div_ceil(out_reserve, in_reserve, in_new);
        } else {
            long double ln_in_new = logl(static_cast<long double>(in_new));
            long double out_real = static_cast<long double>(out_reserve) *
                                   expl(e * (logl(static_cast<long double>(in_reserve)) -
                                             ln_in_new));
            out_new = static_cast<int64_t>(floorl(out_real));
            if (out_new < 1) out_new = 1;
            while (out_new < out_reserve &&
                   w_out * logl(static_cast<long double>(out_new)) + w_in * ln_in_new <
                       target - 1e-15L)
                ++out_new;
        }
        if (out_new > out_reserve) out_new = out_reserve;
        return out_reserve - out_new;
    };

    // Minimal deposit d with withdrawable(d) >= s - d (monotone predicate).
    int64_t lo = 0, hi = s;
    while (lo < hi) {
        int64_t mid = lo + (hi - lo) / 2;
        if (withdrawable(mid) >= s - mid) hi = mid;
        else lo = mid + 1;
    }
    const int64_t d = lo;
    const int64_t k = s - d;  // complete sets burned -> cash

    res.cash_out = k;
    res.shares_swapped = d;
    // Withdraw exactly k; any excess the swap could have produced stays put.
    res.pool.yes_reserve = outcome == Outcome::Yes ? in_reserve + d : out_reserve - k;
    res.pool.no_reserve = outcome == Outcome::Yes ? out_reserve - k : in_reserve + d;
    res.pool.invariant = pool_invariant_value(res.pool);
    return res;
}

// Resolution value of the pool relative to the LP's endowment:
// loss = 1 - winning_reserve / endowment. Negative when the pool gained.
inline long double permanent_loss(const CpmmPool& pool, UsdAmount initial_endowment,
                                  Outcome winner) {
    if (initial_endowment.micro <= 0)
        throw std::invalid_argument("permanent_loss: endowment must be positive");
    int64_t value = winner == Outcome::Yes ? pool.yes_reserve : pool.no_reserve;
    return static_cast<long double>(initial_endowment.micro - value) /
           static_cast<long double>(initial_endowment.micro);
}

// Key-value text form for golden tests.
inline std::string serialize(const CpmmPool& pool) {
    std::ostringstream out;
    out << "x=" << pool.yes_reserve << " y=" << pool.no_reserve << " p=" << pool.prior.num << '/'
        << pool.prior.den << " C=";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6Lf", pool.invariant);
    out << buf << " fees=" << pool.collected_fees;
    return out.str();
}

} // namespace btcpm
