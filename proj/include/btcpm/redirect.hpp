#pragma once
// Non-custodial redirection of a BTC-denominated bet through USDC rails:
// deposit BTC -> collateralise -> borrow USDC -> buy venue shares -> keeper
// risk loop -> settle / repay / withdraw / convert. The keeper performs only
// bounded protective actions (deleverage, repay, scripted top-up, emergency
// collateral swap); if those run out inside their caps the loan is left to
// the lending engine's liquidation.

#include "btcpm/lending.hpp"
#include "btcpm/money.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

namespace btcpm {

enum class RedirectStage {
    Deposited,
    Collateralised,
    Borrowed,
    Traded,
    Monitoring,
    Settling,
    Closed,
    LiquidatedEarly,
};

inline const char* to_string(RedirectStage s) {
    switch (s) {
        case RedirectStage::Deposited: return "deposited";
        case RedirectStage::Collateralised: return "collateralised";
        case RedirectStage::Borrowed: return "borrowed";
        case RedirectStage::Traded: return "traded";
        case RedirectStage::Monitoring: return "monitoring";
        case RedirectStage::Settling: return "settling";
        case RedirectStage::Closed: return "closed";
        case RedirectStage::LiquidatedEarly: return "liquidated_early";
    }
    return "?";
}

// Per-step action budgets fixed at deposit time. Zero budgets disable the
// keeper entirely.
struct KeeperCaps {
    int64_t max_shares_per_step = 0;   // venue shares sellable per keeper step
    int64_t max_swap_sat_per_step = 0; // collateral swappable per keeper step
    int64_t slippage_bps = 50;         // haircut applied to emergency swaps
    bool topup_enabled = false;        // scripted user response to a top-up request
    bool topup_granted = false;
    BtcAmount topup_amount{0};
};

struct KeeperAction {
    enum class Kind { AutoDeleverage, RequestTopUp, PartialRepay, EmergencySwap };
    Kind kind = Kind::AutoDeleverage;
    int64_t shares_sold = 0;
    UsdAmount usd_repaid{0};
    BtcAmount sat_swapped{0};
    BtcAmount sat_topped_up{0};
    long double trigger_hf = 0.0L;
};

inline const char* to_string(KeeperAction::Kind k) {
    switch (k) {
        case KeeperAction::Kind::AutoDeleverage: return "auto_deleverage";
        case KeeperAction::Kind::RequestTopUp: return "request_top_up";
        case KeeperAction::Kind::PartialRepay: return "partial_repay";
        case KeeperAction::Kind::EmergencySwap: return "emergency_swap";
    }
    return "?";
}

struct RedirectPosition {
    RedirectStage stage = RedirectStage::Deposited;
    LoanPosition loan;
    Outcome outcome = Outcome::No;
    int64_t shares = 0;             // venue holdings
    UsdAmount entry_price{0};       // per share
    UsdAmount usdc_balance{0};      // idle USDC in the smart account
    int64_t target_ltv_bps = 4'500; // L*
    int64_t hf_guard_bps = 12'000;  // keeper trigger, 1.2
    KeeperCaps caps;
    long double hf0 = 0.0L;         // health factor right after borrowing
    BtcAmount original_collateral{0};
    bool topup_used = false;
    int64_t liquidation_count = 0;
    std::vector<RedirectStage> stage_history{RedirectStage::Deposited};

    void advance(RedirectStage next) {
        stage = next;
        stage_history.push_back(next);
    }
};

// Steps 1-4 in one shot: deposit, collateralise, borrow B = L* * V, spend all
// of B on `outcome` shares at `market_price` (floored; the unspent remainder
// stays as USDC balance), then enter the monitoring loop.
inline RedirectPosition open_position(BtcAmount btc, int64_t target_ltv_bps, BtcUsdRate rate,
                                      const LendingParams& params, UsdAmount market_price,
                                      Outcome outcome, KeeperCaps caps = {},
                                      int64_t hf_guard_bps = 12'000) {
    params.validate();
    if (target_ltv_bps <= 0 || target_ltv_bps > params.ltv_max_bps)
        throw std::invalid_argument("open_position: target LTV must lie in (0, ltv_max]");
    if (market_price.micro <= 0 || market_price.micro >= kMicroPerUsd)
        throw std::invalid_argument("open_position: share price must lie inside (0, $1)");

    RedirectPosition pos;
    pos.original_collateral = btc;
    pos.outcome = outcome;
    pos.entry_price = market_price;
    pos.target_ltv_bps = target_ltv_bps;
    pos.hf_guard_bps = hf_guard_bps;
    pos.caps = caps;

    pos.advance(RedirectStage::Collateralised);

    UsdAmount borrow{mul_div_floor(collateral_value(btc, rate).micro, target_ltv_bps, 10'000)};
    pos.loan = open_loan(btc, borrow, rate, params);
    pos.advance(RedirectStage::Borrowed);

    pos.shares = borrow.micro / market_price.micro;
    if (pos.shares <= 0) throw std::invalid_argument("open_position: borrow too small for one share");
    pos.usdc_balance = borrow - UsdAmount{checked_mul(pos.shares, market_price.micro)};
    pos.advance(RedirectStage::Traded);

    auto hf = health_factor(pos.loan, rate, params);
    pos.hf0 = hf ? *hf : 0.0L;
    pos.advance(RedirectStage::Monitoring);
    return pos;
}

struct KeeperStepResult {
    RedirectPosition position;
    std::vector<KeeperAction> actions;
    // True when HF is still below 1 and every in-cap action has been used up;
    // the loan now sits exposed to liquidation.
    bool exhausted = false;
};

namespace detail {

inline long double hf_or_inf(const LoanPosition& loan, BtcUsdRate rate,
                             const LendingParams& params) {
    auto hf = health_factor(loan, rate, params);
    return hf ? *hf : 1e30L;
}

} // namespace detail

// One keeper evaluation. Below the guard band the keeper sells the minimal
// share tranche whose proceeds restore HF >= guard, then repays from idle
// USDC, then requests a top-up (scripted response); if HF is still below 1
// it performs a minimal emergency collateral swap. Every action is bounded
// by the per-step caps set at deposit time.
inline KeeperStepResult keeper_step(const RedirectPosition& pos_in, BtcUsdRate rate,
                                    UsdAmount venue_bid, const LendingParams& params) {
    KeeperStepResult res{pos_in, {}, false};
    RedirectPosition& pos = res.position;
    if (pos.stage != RedirectStage::Monitoring)
        throw std::logic_error("keeper_step: position not monitoring");

    const long double guard =
        static_cast<long double>(pos.hf_guard_bps) / 10'000.0L;
    long double hf = detail::hf_or_inf(pos.loan, rate, params);
    if (hf >= guard) return res;

    int64_t shares_budget = pos.caps.max_shares_per_step;
    int64_t swap_budget = pos.caps.max_swap_sat_per_step;

    // --- auto-deleverage: sell shares, repay debt -------------------------
    if (venue_bid.micro > 0 && pos.shares > 0 && shares_budget > 0) {
        UsdAmount cv = collateral_value(pos.loan.collateral, rate);
        // Smallest repayment P with cv*theta >= (debt - P) * guard.
        int64_t sustainable_debt =
            mul_div_floor(cv.micro, params.liq_threshold_bps, pos.hf_guard_bps);
        int64_t needed = pos.loan.debt().micro - sustainable_debt;
        if (needed > 0) {
            int64_t shares_needed = (needed + venue_bid.micro - 1) / venue_bid.micro;
            int64_t tranche = std::min({shares_needed, pos.shares, shares_budget});
            if (tranche > 0) {
                UsdAmount proceeds{checked_mul(tranche, venue_bid.micro)};
                pos.shares -= tranche;
                shares_budget -= tranche;
                UsdAmount leftover = repay(pos.loan, proceeds);
                pos.usdc_balance += leftover;
                res.actions.push_back({KeeperAction::Kind::AutoDeleverage, tranche,
                                       proceeds - leftover, BtcAmount{0}, BtcAmount{0}, hf});
            }
        }
        hf = detail::hf_or_inf(pos.loan, rate, params);
    }

    // --- partial repay from idle USDC -------------------------------------
    if (hf < guard && pos.usdc_balance.micro > 0 && pos.loan.debt().micro > 0) {
        UsdAmount spend = pos.usdc_balance;
        UsdAmount leftover = repay(pos.loan, spend);
        pos.usdc_balance = leftover;
        res.actions.push_back({KeeperAction::Kind::PartialRepay, 0, spend - leftover,
                               BtcAmount{0}, BtcAmount{0}, hf});
        hf = detail::hf_or_inf(pos.loan, rate, params);
    }

    // --- scripted top-up request ------------------------------------------
    if (hf < guard && pos.caps.topup_enabled && !pos.topup_used) {
        pos.topup_used = true;
        BtcAmount granted = pos.caps.topup_granted ? pos.caps.topup_amount : BtcAmount{0};
        pos.loan.collateral += granted;
        res.actions.push_back({KeeperAction::Kind::RequestTopUp, 0, UsdAmount{0}, BtcAmount{0},
                               granted, hf});
        hf = detail::hf_or_inf(pos.loan, rate, params);
    }

    // --- emergency swap: last resort, only to pull HF back above 1 --------
    while (hf < 1.0L && swap_budget > 0 && pos.loan.collateral.sat > 0 &&
           pos.loan.debt().micro > 0) {
        const int64_t eta_bps = 10'000 - pos.caps.slippage_bps;  // swap haircut
        if (eta_bps <= params.liq_threshold_bps) break;  // swapping cannot help
        // Minimal s with (collateral - s)*rate*theta >= (debt - proceeds(s)) * 1e12,
        // proceeds(s) = s*rate*eta / 1e12. Working in micro-USD * bps:
        __int128 ca = static_cast<__int128>(collateral_value(pos.loan.collateral, rate).micro) *
                      params.liq_threshold_bps;
        __int128 d = static_cast<__int128>(pos.loan.debt().micro) * 10'000;
        __int128 gap = d - ca;
        if (gap <= 0) break;
        __int128 per_sat = static_cast<__int128>(rate.micro_usd_per_btc) *
                           (eta_bps - params.liq_threshold_bps) / kSatPerBtc;
        if (per_sat <= 0) break;
        int64_t s = detail::narrow((gap + per_sat - 1) / per_sat, "keeper swap overflow");
        s = std::min({s, swap_budget, pos.loan.collateral.sat});
        if (s <= 0) break;

        pos.loan.collateral -= BtcAmount{s};
        swap_budget -= s;
        UsdAmount proceeds{mul_div_floor(mul_div_floor(s, rate.micro_usd_per_btc, kSatPerBtc),
                                         eta_bps, 10'000)};
        UsdAmount leftover = repay(pos.loan, proceeds);
        pos.usdc_balance += leftover;
        res.actions.push_back({KeeperAction::Kind::EmergencySwap, 0, proceeds - leftover,
                               BtcAmount{s}, BtcAmount{0}, hf});
        long double hf_after = detail::hf_or_inf(pos.loan, rate, params);
        if (hf_after <= hf) break;  // no progress; avoid spinning
        hf = hf_after;
    }

    res.exhausted = detail::hf_or_inf(pos.loan, rate, params) < 1.0L;
    return res;
}

// Route a lending liquidation through the position's stage machine.
inline RedirectPosition apply_liquidation(RedirectPosition pos, BtcUsdRate rate,
                                          const LendingParams& params) {
    LiquidationResult liq = liquidate(pos.loan, rate, params);
    pos.loan = liq.position;
    pos.liquidation_count += 1;
    pos.advance(RedirectStage::LiquidatedEarly);
    return pos;
}

enum class ShortfallPolicy { InjectExternal, CollateralSwap };

struct SettlementReport {
    bool won = false;
    UsdAmount proceeds_usd{0};
    UsdAmount interest_paid{0};
    UsdAmount shortfall{0};          // debt not covered by proceeds
    UsdAmount external_injected{0};  // user top-up under InjectExternal
    bool liquidated = false;
    BtcAmount user_total_btc{0};
    BtcAmount btc_pnl{0};            // vs the original deposit
};

// Step 6: redeem proceeds, repay principal + interest, handle any shortfall
// per policy, withdraw collateral and convert the USDC surplus to BTC at the
// settlement rate.
inline std::pair<RedirectPosition, SettlementReport> settle(RedirectPosition pos, Outcome winner,
                                                            BtcUsdRate rate_at_settlement,
                                                            const LendingParams& params,
                                                            ShortfallPolicy policy) {
    params.validate();
    if (pos.stage != RedirectStage::Monitoring && pos.stage != RedirectStage::LiquidatedEarly)
        throw std::logic_error("settle: position not settleable");
    const bool was_liquidated = pos.stage == RedirectStage::LiquidatedEarly;
    pos.advance(RedirectStage::Settling);

    SettlementReport rep;
    rep.liquidated = was_liquidated;
    rep.won = pos.outcome == winner;
    rep.interest_paid = pos.loan.accrued_interest;

    rep.proceeds_usd = rep.won ? UsdAmount{checked_mul(pos.shares, kMicroPerUsd)} : UsdAmount{0};
    pos.shares = 0;
    UsdAmount available = rep.proceeds_usd + pos.usdc_balance;
    pos.usdc_balance = UsdAmount{0};

    UsdAmount debt = pos.loan.debt();
    if (available < debt) {
        rep.shortfall = debt - available;
        if (policy == ShortfallPolicy::InjectExternal) {
            rep.external_injected = rep.shortfall;
            available += rep.shortfall;
        } else {
            // Swap the minimal collateral (with slippage cap) to close the gap.
            int64_t eta_bps = 10'000 - pos.caps.slippage_bps;
            int64_t per_sat_value = rate_at_settlement.micro_usd_per_btc;
            __int128 num = static_cast<__int128>(rep.shortfall.micro) * kSatPerBtc * 10'000;
            __int128 den = static_cast<__int128>(per_sat_value) * eta_bps;
            int64_t s = detail::narrow((num + den - 1) / den, "settle swap overflow");
            s = std::min(s, pos.loan.collateral.sat);
            pos.loan.collateral -= BtcAmount{s};
            available += UsdAmount{mul_div_floor(
                mul_div_floor(s, per_sat_value, kSatPerBtc), eta_bps, 10'000)};
        }
    }

    UsdAmount surplus = debt.micro > 0 ? repay(pos.loan, available) : available;
    if (pos.loan.debt().micro > 0)
        throw std::logic_error("settle: debt not fully repaid");

    BtcAmount collateral_back = pos.loan.collateral.sat > 0 ? withdraw_collateral(pos.loan)
                                                            : BtcAmount{0};
    BtcAmount surplus_btc = surplus.micro > 0 ? usd_to_btc(surplus, rate_at_settlement)
                                              : BtcAmount{0};

    rep.user_total_btc = collateral_back + surplus_btc;
    rep.btc_pnl = rep.user_total_btc - pos.original_collateral;
    pos.advance(RedirectStage::Closed);
    return {pos, rep};
}

} // namespace btcpm
