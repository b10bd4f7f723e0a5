#pragma once
// Over-collateralised lending pool in the Aave style: wBTC collateral, USDC
// debt. LTV cap at origination, liquidation threshold expressed through the
// health factor HF = collateral_value * threshold / debt, simple act/365
// interest, and discounted full-close liquidation.
//
// All ratio parameters are integer basis points so the worked examples
// reproduce exactly. Prices are pushed in by the caller; the engine holds no
// oracle logic.

#include "btcpm/money.hpp"

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>

namespace btcpm {

struct LendingParams {
    int64_t ltv_max_bps = 7'200;        // max loan-to-value at origination
    int64_t liq_threshold_bps = 8'200;  // liquidation threshold
    int64_t liq_penalty_bps = 500;      // discount on seized collateral
    int64_t borrow_rate_bps = 500;      // annualized, simple interest

    void validate() const {
        if (!(ltv_max_bps > 0 && ltv_max_bps < liq_threshold_bps && liq_threshold_bps < 10'000))
            throw std::invalid_argument("lending params: need 0 < ltv_max < liq_threshold < 1");
        if (liq_penalty_bps < 0 || liq_penalty_bps >= 10'000)
            throw std::invalid_argument("lending params: penalty out of range");
        if (borrow_rate_bps < 0) throw std::invalid_argument("lending params: negative rate");
    }
};

enum class LoanStatus { Active, Liquidated, Closed };

inline const char* to_string(LoanStatus s) {
    switch (s) {
        case LoanStatus::Active: return "active";
        case LoanStatus::Liquidated: return "liquidated";
        case LoanStatus::Closed: return "closed";
    }
    return "?";
}

struct LoanPosition {
    BtcAmount collateral{0};
    UsdAmount principal{0};
    UsdAmount accrued_interest{0};
    LoanStatus status = LoanStatus::Active;
    BtcUsdRate rate_at_open{0};
    int64_t opened_day = 0;

    UsdAmount debt() const { return principal + accrued_interest; }
};

inline UsdAmount collateral_value(BtcAmount collateral, BtcUsdRate rate) {
    return btc_to_usd(collateral, rate);
}

// Maximum USDC borrowable against collateral: ltv_max * value, floored.
inline UsdAmount max_borrow(BtcAmount collateral, BtcUsdRate rate, const LendingParams& params) {
    if (collateral.sat < 0) throw std::invalid_argument("max_borrow: negative collateral");
    return UsdAmount{mul_div_floor(collateral_value(collateral, rate).micro,
                                   params.ltv_max_bps, 10'000)};
}

// HF = collateral_value * threshold / debt. Liquidation is allowed when
// HF < 1. Zero debt has no meaningful HF and returns nullopt (unbounded).
inline std::optional<long double> health_factor(const LoanPosition& pos, BtcUsdRate rate,
                                                const LendingParams& params) {
    if (pos.debt().micro <= 0) return std::nullopt;
    __int128 num = static_cast<__int128>(collateral_value(pos.collateral, rate).micro) *
                   params.liq_threshold_bps;
    __int128 den = static_cast<__int128>(pos.debt().micro) * 10'000;
    return static_cast<long double>(num) / static_cast<long double>(den);
}

inline bool liquidatable(const LoanPosition& pos, BtcUsdRate rate, const LendingParams& params) {
    auto hf = health_factor(pos, rate, params);
    return hf.has_value() && *hf < 1.0L;
}

inline LoanPosition open_loan(BtcAmount collateral, UsdAmount borrow, BtcUsdRate rate,
                              const LendingParams& params, int64_t day = 0) {
    params.validate();
    if (collateral.sat <= 0) throw std::invalid_argument("open_loan: collateral must be positive");
    if (borrow.micro <= 0) throw std::invalid_argument("open_loan: borrow must be positive");
    if (borrow > max_borrow(collateral, rate, params))
        throw std::invalid_argument("open_loan: borrow exceeds ltv_max");
    return LoanPosition{collateral, borrow, UsdAmount{0}, LoanStatus::Active, rate, day};
}

// Simple (non-compounding) interest on the principal, act/365. Repeated
// accruals sum linearly.
inline LoanPosition accrue_interest(LoanPosition pos, int64_t elapsed_days,
                                    const LendingParams& params) {
    if (pos.status != LoanStatus::Active) throw std::logic_error("accrue_interest: loan not active");
    if (elapsed_days < 0) throw std::invalid_argument("accrue_interest: negative duration");
    if (elapsed_days == 0 || params.borrow_rate_bps == 0) return pos;
    __int128 num = static_cast<__int128>(pos.principal.micro) * params.borrow_rate_bps *
                   elapsed_days;
    pos.accrued_interest += UsdAmount{detail::narrow(num / (10'000 * 365), "interest overflow")};
    return pos;
}

// Repay up to `amount`; returns the unused remainder. Debt retires interest
// first. Closing requires zero debt.
inline UsdAmount repay(LoanPosition& pos, UsdAmount amount) {
    if (pos.status != LoanStatus::Active) throw std::logic_error("repay: loan not active");
    if (amount.micro < 0) throw std::invalid_argument("repay: negative amount");
    UsdAmount left = amount;
    UsdAmount to_interest{std::min(left.micro, pos.accrued_interest.micro)};
    pos.accrued_interest -= to_interest;
    left -= to_interest;
    UsdAmount to_principal{std::min(left.micro, pos.principal.micro)};
    pos.principal -= to_principal;
    left -= to_principal;
    if (pos.debt().micro == 0) pos.status = LoanStatus::Closed;
    return left;
}

// Withdraw collateral from a closed loan.
inline BtcAmount withdraw_collateral(LoanPosition& pos) {
    if (pos.debt().micro != 0) throw std::logic_error("withdraw: outstanding debt");
    BtcAmount out = pos.collateral;
    pos.collateral = BtcAmount{0};
    if (pos.status == LoanStatus::Active) pos.status = LoanStatus::Closed;
    return out;
}

struct LiquidationResult {
    LoanPosition position;
    BtcAmount seized{0};
    UsdAmount repaid{0};
    UsdAmount bad_debt{0};  // nonzero when the whole collateral was not enough
};

// Full-close liquidation: seize the minimum collateral that repays the whole
// debt when sold at rate * (1 - penalty); rounding goes to the pool. The
// borrower keeps whatever collateral remains.
inline LiquidationResult liquidate(const LoanPosition& pos, BtcUsdRate rate,
                                   const LendingParams& params) {
    if (!liquidatable(pos, rate, params))
        throw std::logic_error("liquidate: health factor not below 1");

    UsdAmount debt = pos.debt();
    // seized = ceil(debt / (rate * (1 - penalty))) in satoshi.
    __int128 num = static_cast<__int128>(debt.micro) * kSatPerBtc * 10'000;
    __int128 den = static_cast<__int128>(rate.micro_usd_per_btc) *
                   (10'000 - params.liq_penalty_bps);
    int64_t seized_sat = detail::narrow((num + den - 1) / den, "liquidate overflow");

    LiquidationResult res;
    res.position = pos;
    if (seized_sat >= pos.collateral.sat) {
        // Whole collateral goes; any uncovered remainder is bad debt.
        seized_sat = pos.collateral.sat;
        UsdAmount recovered{mul_div_floor(
            mul_div_floor(seized_sat, rate.micro_usd_per_btc, kSatPerBtc),
            10'000 - params.liq_penalty_bps, 10'000)};
        res.repaid = UsdAmount{std::min(recovered.micro, debt.micro)};
        res.bad_debt = debt - res.repaid;
    } else {
        res.repaid = debt;
    }
    res.seized = BtcAmount{seized_sat};
    res.position.collateral -= res.seized;
    res.position.principal = UsdAmount{0};
    res.position.accrued_interest = UsdAmount{0};
    res.position.status = LoanStatus::Liquidated;
    return res;
}

// CSV ledger row: timestamp, collateral, debt, health factor, status.
inline std::string ledger_row(int64_t day, const LoanPosition& pos, BtcUsdRate rate,
                              const LendingParams& params) {
    std::ostringstream out;
    out << day << ',' << pos.collateral.sat << ',' << pos.debt().micro << ',';
    auto hf = health_factor(pos, rate, params);
    if (hf) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.6Lf", *hf);
        out << buf;
    } else {
        out << "inf";
    }
    out << ',' << to_string(pos.status);
    return out.str();
}

} // namespace btcpm
