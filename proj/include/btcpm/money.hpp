#pragma once
// Fixed-point money arithmetic shared by every module: micro-USD, satoshi
// and micro-share amounts, BTC/USD conversion at a quoted rate, and
// directional tick rounding for quoted prices.
//
// All amounts are exact 64-bit integers. Intermediate products run in
// 128-bit arithmetic; a result that does not fit 64 bits is a hard error,
// never a silent wrap.

#include <cstdint>
#include <stdexcept>
#include <string>

namespace btcpm {

inline constexpr int64_t kMicroPerUsd   = 1'000'000;    // 1 USD  = 1e6 micro-USD
inline constexpr int64_t kSatPerBtc     = 100'000'000;  // 1 BTC  = 1e8 satoshi
inline constexpr int64_t kMicroPerShare = 1'000'000;    // 1 share = 1e6 micro-shares

// Quote side. Bids round down, asks round up.
enum class Side { Bid, Ask };

// Binary-market outcome token.
enum class Outcome { Yes, No };

inline Outcome opposite(Outcome o) { return o == Outcome::Yes ? Outcome::No : Outcome::Yes; }
inline const char* to_string(Outcome o) { return o == Outcome::Yes ? "YES" : "NO"; }
inline const char* to_string(Side s) { return s == Side::Bid ? "bid" : "ask"; }

// ---------------------------------------------------------------------------
// checked 64-bit arithmetic
// ---------------------------------------------------------------------------

inline int64_t checked_add(int64_t a, int64_t b) {
    int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("int64 addition overflow");
    return r;
}

inline int64_t checked_sub(int64_t a, int64_t b) {
    int64_t r;
    if (__builtin_sub_overflow(a, b, &r)) throw std::overflow_error("int64 subtraction overflow");
    return r;
}

inline int64_t checked_mul(int64_t a, int64_t b) {
    int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("int64 multiplication overflow");
    return r;
}

namespace detail {

inline int64_t narrow(__int128 v, const char* what) {
    if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error(what);
    return static_cast<int64_t>(v);
}

} // namespace detail

// floor(a*b/d) with the quotient floored toward -inf; d must be positive.
inline int64_t mul_div_floor(int64_t a, int64_t b, int64_t d) {
    if (d <= 0) throw std::invalid_argument("mul_div_floor: non-positive divisor");
    __int128 p = static_cast<__int128>(a) * b;
    __int128 q = p / d;
    if (p % d != 0 && p < 0) --q;
    return detail::narrow(q, "mul_div_floor overflow");
}

// ceil(a*b/d) toward +inf; d must be positive.
inline int64_t mul_div_ceil(int64_t a, int64_t b, int64_t d) {
    if (d <= 0) throw std::invalid_argument("mul_div_ceil: non-positive divisor");
    __int128 p = static_cast<__int128>(a) * b;
    __int128 q = p / d;
    if (p % d != 0 && p > 0) ++q;
    return detail::narrow(q, "mul_div_ceil overflow");
}

// ---------------------------------------------------------------------------
// amount types
// ---------------------------------------------------------------------------

// USD amount in integer micro-USD (1e-6 USD). Negative values are permitted
// in PnL contexts only; constructors do not police the sign.
struct UsdAmount {
    int64_t micro = 0;

    constexpr UsdAmount() = default;
    constexpr explicit UsdAmount(int64_t m) : micro(m) {}

    friend constexpr bool operator==(UsdAmount, UsdAmount) = default;
    friend constexpr auto operator<=>(UsdAmount a, UsdAmount b) { return a.micro <=> b.micro; }

    friend UsdAmount operator+(UsdAmount a, UsdAmount b) { return UsdAmount{checked_add(a.micro, b.micro)}; }
    friend UsdAmount operator-(UsdAmount a, UsdAmount b) { return UsdAmount{checked_sub(a.micro, b.micro)}; }
    friend UsdAmount operator-(UsdAmount a) { return UsdAmount{checked_sub(0, a.micro)}; }
    UsdAmount& operator+=(UsdAmount o) { micro = checked_add(micro, o.micro); return *this; }
    UsdAmount& operator-=(UsdAmount o) { micro = checked_sub(micro, o.micro); return *this; }

    double usd() const { return static_cast<double>(micro) / kMicroPerUsd; }
};

// BTC amount in integer satoshi (1e-8 BTC).
struct BtcAmount {
    int64_t sat = 0;

    constexpr BtcAmount() = default;
    constexpr explicit BtcAmount(int64_t s) : sat(s) {}

    friend constexpr bool operator==(BtcAmount, BtcAmount) = default;
    friend constexpr auto operator<=>(BtcAmount a, BtcAmount b) { return a.sat <=> b.sat; }

    friend BtcAmount operator+(BtcAmount a, BtcAmount b) { return BtcAmount{checked_add(a.sat, b.sat)}; }
    friend BtcAmount operator-(BtcAmount a, BtcAmount b) { return BtcAmount{checked_sub(a.sat, b.sat)}; }
    friend BtcAmount operator-(BtcAmount a) { return BtcAmount{checked_sub(0, a.sat)}; }
    BtcAmount& operator+=(BtcAmount o) { sat = checked_add(sat, o.sat); return *this; }
    BtcAmount& operator-=(BtcAmount o) { sat = checked_sub(sat, o.sat); return *this; }

    double btc() const { return static_cast<double>(sat) / kSatPerBtc; }
};

// BTC/USD exchange rate as integer micro-USD per whole BTC. Strictly positive.
struct BtcUsdRate {
    int64_t micro_usd_per_btc = 0;

    constexpr BtcUsdRate() = default;
    constexpr explicit BtcUsdRate(int64_t r) : micro_usd_per_btc(r) {}

    friend constexpr bool operator==(BtcUsdRate, BtcUsdRate) = default;
    friend constexpr auto operator<=>(BtcUsdRate a, BtcUsdRate b) {
        return a.micro_usd_per_btc <=> b.micro_usd_per_btc;
    }

    double usd_per_btc() const { return static_cast<double>(micro_usd_per_btc) / kMicroPerUsd; }
};

// Convenience constructor for whole-USD rates (100'000 USD/BTC etc).
inline BtcUsdRate rate_usd(int64_t whole_usd_per_btc) {
    return BtcUsdRate{checked_mul(whole_usd_per_btc, kMicroPerUsd)};
}

// Smallest representable price increment in a venue's native unit.
struct TickSize {
    int64_t units = 1;

    constexpr TickSize() = default;
    constexpr explicit TickSize(int64_t t) : units(t) {}
};

// ---------------------------------------------------------------------------
// conversion & rounding
// ---------------------------------------------------------------------------

// USD -> BTC at `rate`, floored to whole satoshi.
inline BtcAmount usd_to_btc(UsdAmount amount, BtcUsdRate rate) {
    if (rate.micro_usd_per_btc <= 0) throw std::invalid_argument("usd_to_btc: rate must be positive");
    return BtcAmount{mul_div_floor(amount.micro, kSatPerBtc, rate.micro_usd_per_btc)};
}

// USD -> BTC, ceiled. Used when rounding against the quoting side.
inline BtcAmount usd_to_btc_ceil(UsdAmount amount, BtcUsdRate rate) {
    if (rate.micro_usd_per_btc <= 0) throw std::invalid_argument("usd_to_btc: rate must be positive");
    return BtcAmount{mul_div_ceil(amount.micro, kSatPerBtc, rate.micro_usd_per_btc)};
}

// BTC -> USD at `rate`, floored to whole micro-USD.
inline UsdAmount btc_to_usd(BtcAmount amount, BtcUsdRate rate) {
    if (rate.micro_usd_per_btc <= 0) throw std::invalid_argument("btc_to_usd: rate must be positive");
    return UsdAmount{mul_div_floor(amount.sat, rate.micro_usd_per_btc, kSatPerBtc)};
}

inline UsdAmount btc_to_usd_ceil(BtcAmount amount, BtcUsdRate rate) {
    if (rate.micro_usd_per_btc <= 0) throw std::invalid_argument("btc_to_usd: rate must be positive");
    return UsdAmount{mul_div_ceil(amount.sat, rate.micro_usd_per_btc, kSatPerBtc)};
}

// Round a raw price onto the tick grid: bids down, asks up. Idempotent on
// prices already on the grid.
inline int64_t round_price(int64_t raw, TickSize tick, Side side) {
    if (tick.units <= 0) throw std::invalid_argument("round_price: tick must be positive");
    if (raw < 0) throw std::invalid_argument("round_price: negative price");
    int64_t rem = raw % tick.units;
    if (rem == 0) return raw;
    return side == Side::Bid ? raw - rem : checked_add(raw, tick.units - rem);
}

} // namespace btcpm
