#pragma once
// Cross-exchange market making: mirror source-venue quotes onto the
// downstream BTC venue widened by fee margin and put-hedge cost, hedge
// downstream fills with market orders on the source venue (opposite outcome,
// same direction), and carry the resulting complete set to unwind or
// resolution. The BTC put premium is an exogenous per-share input.

#include "btcpm/money.hpp"
#include "btcpm/venue.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace btcpm {

// ---------------------------------------------------------------------------
// quoting
// ---------------------------------------------------------------------------

struct QuotePair {
    BtcAmount bid_d;       // downstream bid, satoshi per share
    BtcAmount ask_d;       // downstream ask, satoshi per share
    UsdAmount source_bid;  // mirrored source prices
    UsdAmount source_ask;
};

// Mirror one outcome's source quotes into downstream BTC prices:
//   bid_d = round_down((bid_s - fee)/rate - put_premium)
//   ask_d = round_up  ((ask_s + fee)/rate + put_premium)
// Returns nullopt (quote suppressed) when the bid would be non-positive.
inline std::optional<QuotePair> mirror_quotes(UsdAmount bid_s, UsdAmount ask_s, UsdAmount fee,
                                              BtcAmount put_premium, BtcUsdRate rate,
                                              TickSize tick) {
    if (bid_s >= ask_s) throw std::invalid_argument("mirror_quotes: crossed source quotes");
    UsdAmount bid_net = bid_s - fee;
    if (bid_net.micro <= 0) return std::nullopt;

    int64_t bid_raw = usd_to_btc(bid_net, rate).sat - put_premium.sat;
    if (bid_raw <= 0) return std::nullopt;
    int64_t bid_d = round_price(bid_raw, tick, Side::Bid);
    if (bid_d <= 0) return std::nullopt;

    int64_t ask_raw = checked_add(usd_to_btc_ceil(ask_s + fee, rate).sat, put_premium.sat);
    int64_t ask_d = round_price(ask_raw, tick, Side::Ask);
    return QuotePair{BtcAmount{bid_d}, BtcAmount{ask_d}, bid_s, ask_s};
}

// ---------------------------------------------------------------------------
// arbitrage condition  (YES_ask + NO_bid_d * P + c_put < 1)
// ---------------------------------------------------------------------------

struct ArbitrageCheck {
    UsdAmount edge;  // $1 minus total cost per complete set; may be negative

    bool profitable() const { return edge.micro > 0; }
};

inline ArbitrageCheck check_arbitrage(UsdAmount yes_ask_s, BtcAmount no_bid_d, BtcUsdRate rate,
                                      UsdAmount put_cost) {
    UsdAmount total = yes_ask_s + btc_to_usd_ceil(no_bid_d, rate) + put_cost;
    return ArbitrageCheck{UsdAmount{kMicroPerUsd} - total};
}

// ---------------------------------------------------------------------------
// put hedge
// ---------------------------------------------------------------------------

struct PutContract {
    BtcUsdRate strike;
    BtcAmount notional_btc;
    BtcAmount premium;
    int64_t expiry_tick = 0;
};

// Payoff at expiry in USD: notional * max(strike - spot, 0). Zero when the
// put expires at or out of the money.
inline UsdAmount put_payoff(const PutContract& put, BtcUsdRate spot_at_expiry) {
    int64_t diff = put.strike.micro_usd_per_btc - spot_at_expiry.micro_usd_per_btc;
    if (diff <= 0) return UsdAmount{0};
    return UsdAmount{mul_div_floor(put.notional_btc.sat, diff, kSatPerBtc)};
}

// Which BTC amount the put covers: the downstream leg's cost (the worked
// example's convention) or its resolution payout.
enum class HedgeNotional { Cost, Payout };

// ---------------------------------------------------------------------------
// hedge lifecycle
// ---------------------------------------------------------------------------

enum class HedgeStatus { Quoting, AwaitingHedge, Hedged, Unwinding, Flat };

inline const char* to_string(HedgeStatus s) {
    switch (s) {
        case HedgeStatus::Quoting: return "quoting";
        case HedgeStatus::AwaitingHedge: return "awaiting_hedge";
        case HedgeStatus::Hedged: return "hedged";
        case HedgeStatus::Unwinding: return "unwinding";
        case HedgeStatus::Flat: return "flat";
    }
    return "?";
}

struct HedgeLeg {
    Outcome outcome = Outcome::Yes;
    int64_t size = 0;
    int64_t price = 0;  // native units of the leg's venue
};

struct CrossMmConfig {
    UsdAmount fee_margin{0};            // per-share quote widening, USD side
    BtcAmount put_premium_per_share{0}; // exogenous c_put
    HedgeNotional hedge_notional = HedgeNotional::Cost;
    int hedge_delay_ticks = 0;          // ticks of book drift before the hedge lands
    int64_t quote_size = 1;
};

struct HedgeState {
    HedgeStatus status = HedgeStatus::Quoting;
    // Long set: bought downstream leg + bought source leg (opposite outcomes).
    // Short set: sold both. Resolution payout is outcome-independent either way.
    bool long_set = true;
    std::optional<HedgeLeg> downstream_leg;
    std::optional<HedgeLeg> source_leg;
    std::optional<PutContract> put;
    UsdAmount entry_cost{0};    // total USD at entry rates (incl. put premium); proceeds if short
    UsdAmount locked_edge{0};   // valid in Hedged / Flat
    UsdAmount realized_pnl{0};  // valid in Flat
    int64_t unhedged_size = 0;  // outstanding source size while AwaitingHedge
    bool hedge_failed = false;
};

// Entry hedge. `fill` is a downstream fill in which this strategy was the
// maker; submits the opposite-outcome market order on the source venue (the
// source book reflects any drift the scenario injected during the hedge
// delay). On a full fill the state is Hedged with the locked edge computed
// from achieved prices; on exhaustion the state carries hedge_failed and the
// caller is expected to cancel its remaining downstream quotes.
inline HedgeState on_downstream_fill(HedgeState state, const Fill& fill, const Venue& downstream,
                                     Venue& source, BtcUsdRate rate, const CrossMmConfig& cfg,
                                     OwnerId owner, int64_t expiry_tick = 0) {
    if (state.status != HedgeStatus::Quoting && state.status != HedgeStatus::AwaitingHedge)
        throw std::logic_error("on_downstream_fill: not quoting");

    // Maker bought when the taker sold into the bid.
    const bool maker_bought = fill.taker_side == Side::Ask;
    const Outcome hedge_outcome = opposite(fill.outcome);
    const Side hedge_side = maker_bought ? Side::Bid : Side::Ask;

    ExecResult hedge = source.execute_market(hedge_outcome, hedge_side, fill.size, owner);
    state.long_set = maker_bought;
    state.downstream_leg = HedgeLeg{fill.outcome, fill.size, fill.price};

    if (hedge.filled == 0) {
        state.status = HedgeStatus::AwaitingHedge;
        state.unhedged_size = fill.size;
        state.hedge_failed = true;
        return state;
    }

    // Hedge exactly the matched size; a source partial fill leaves the
    // remainder awaiting retry.
    const int64_t matched = hedge.filled;
    state.source_leg = HedgeLeg{hedge_outcome, matched, hedge.notional / matched};

    // Downstream leg cost in USD terms at the current rate.
    int64_t down_notional = checked_mul(fill.price, matched);
    UsdAmount down_usd = downstream.denom() == Denom::Btc
                             ? btc_to_usd(BtcAmount{down_notional}, rate)
                             : UsdAmount{down_notional};

    UsdAmount premium_usd{0};
    if (downstream.denom() == Denom::Btc && cfg.put_premium_per_share.sat > 0 && maker_bought) {
        int64_t premium_sat = checked_mul(cfg.put_premium_per_share.sat, matched);
        int64_t notional_sat = cfg.hedge_notional == HedgeNotional::Cost
                                   ? down_notional
                                   : checked_mul(downstream.payout_per_share(), matched);
        state.put = PutContract{rate, BtcAmount{notional_sat}, BtcAmount{premium_sat}, expiry_tick};
        premium_usd = btc_to_usd(BtcAmount{premium_sat}, rate);
    }

    UsdAmount payout_value{checked_mul(kMicroPerUsd, matched)};
    if (maker_bought) {
        state.entry_cost = UsdAmount{hedge.notional} + down_usd + premium_usd;
        state.locked_edge = payout_value - state.entry_cost - UsdAmount{hedge.fees};
    } else {
        // Short set: proceeds above the $1 resolution obligation are locked.
        state.entry_cost = UsdAmount{hedge.notional} + down_usd - premium_usd;
        state.locked_edge = state.entry_cost - payout_value - UsdAmount{hedge.fees};
    }

    if (matched < fill.size) {
        state.status = HedgeStatus::AwaitingHedge;
        state.unhedged_size = fill.size - matched;
    } else {
        state.status = HedgeStatus::Hedged;
        state.unhedged_size = 0;
    }
    return state;
}

// First half of step 4: post the downstream exit quote for the held leg. The
// set stays hedged until the quote fills; the caller routes that fill into
// on_unwind_fill.
inline std::pair<HedgeState, OrderId> request_unwind(HedgeState state, Venue& downstream,
                                                     BtcUsdRate rate, const CrossMmConfig& cfg,
                                                     OwnerId owner) {
    if (state.status != HedgeStatus::Hedged) throw std::logic_error("request_unwind: not hedged");
    if (!state.downstream_leg) throw std::logic_error("request_unwind: no downstream leg");
    const HedgeLeg& leg = *state.downstream_leg;

    // Exit price: the entry widening applied on the other side of the spread.
    int64_t exit_price;
    const Side exit_side = state.long_set ? Side::Ask : Side::Bid;
    if (downstream.denom() == Denom::Btc) {
        int64_t fee_native = usd_to_btc_ceil(cfg.fee_margin, rate).sat;
        int64_t raw = state.long_set
                          ? checked_add(checked_add(leg.price, fee_native),
                                        cfg.put_premium_per_share.sat)
                          : leg.price - fee_native - cfg.put_premium_per_share.sat;
        exit_price = round_price(std::max<int64_t>(raw, downstream.tick().units),
                                 downstream.tick(), exit_side);
    } else {
        int64_t raw = state.long_set ? checked_add(leg.price, cfg.fee_margin.micro)
                                     : leg.price - cfg.fee_margin.micro;
        exit_price = round_price(std::max<int64_t>(raw, downstream.tick().units),
                                 downstream.tick(), exit_side);
    }
    if (exit_price >= downstream.payout_per_share())
        exit_price = downstream.payout_per_share() - downstream.tick().units;

    OrderId oid = downstream.place_limit(leg.outcome, exit_side, exit_price, leg.size, owner);
    state.status = HedgeStatus::Unwinding;
    return {state, oid};
}

// Exit half of step 4: the downstream exit quote filled; immediately close
// the source leg with a market order and realize the round-trip PnL.
inline HedgeState on_unwind_fill(HedgeState state, const Fill& exit_fill, const Venue& downstream,
                                 Venue& source, BtcUsdRate rate, OwnerId owner) {
    if (state.status != HedgeStatus::Unwinding)
        throw std::logic_error("on_unwind_fill: not unwinding");
    if (!state.source_leg || !state.downstream_leg)
        throw std::logic_error("on_unwind_fill: no open legs");

    // Closing a long set sells both legs; closing a short set buys them back.
    const Side close_side = state.long_set ? Side::Ask : Side::Bid;
    ExecResult close = source.execute_market(state.source_leg->outcome, close_side,
                                             exit_fill.size, owner);
    if (close.filled < exit_fill.size) {
        state.hedge_failed = true;
        return state;
    }

    int64_t exit_notional = checked_mul(exit_fill.price, exit_fill.size);
    UsdAmount exit_down_usd = downstream.denom() == Denom::Btc
                                  ? btc_to_usd(BtcAmount{exit_notional}, rate)
                                  : UsdAmount{exit_notional};
    UsdAmount exit_total = exit_down_usd + UsdAmount{close.notional} - UsdAmount{close.fees};

    state.realized_pnl = state.long_set ? exit_total - state.entry_cost
                                        : state.entry_cost - exit_total;
    state.status = HedgeStatus::Flat;
    state.downstream_leg.reset();
    state.source_leg.reset();
    return state;
}

// USD PnL if the hedged set is held to resolution instead of unwound: the
// source leg pays $1 on its outcome, the downstream leg pays the venue's
// BTC payout unit on the other, and the put settles against the spot.
inline UsdAmount resolution_pnl(const HedgeState& state, Outcome winner, const Venue& downstream,
                                BtcUsdRate spot) {
    if (state.status != HedgeStatus::Hedged)
        throw std::logic_error("resolution_pnl: set not hedged");
    const HedgeLeg& down = *state.downstream_leg;
    const HedgeLeg& src = *state.source_leg;

    UsdAmount payout{0};
    if (src.outcome == winner) payout += UsdAmount{checked_mul(kMicroPerUsd, src.size)};
    if (down.outcome == winner) {
        int64_t pay = checked_mul(downstream.payout_per_share(), down.size);
        payout += downstream.denom() == Denom::Btc ? btc_to_usd(BtcAmount{pay}, spot)
                                                   : UsdAmount{pay};
    }
    if (state.put) payout += put_payoff(*state.put, spot);
    return state.long_set ? payout - state.entry_cost : state.entry_cost - payout;
}

// ---------------------------------------------------------------------------
// strategy driver
// ---------------------------------------------------------------------------

enum class MmEventKind { Quote, QuoteSuppressed, Fill, Hedge, HedgeFailed, Unwind, Resolution };

struct MmEvent {
    int64_t tick = 0;
    MmEventKind kind = MmEventKind::Quote;
    Outcome outcome = Outcome::Yes;
    Side side = Side::Bid;
    int64_t price = 0;
    int64_t size = 0;
    UsdAmount edge{0};
};

// Serialized quote/fill/hedge lifecycle driven one tick at a time by the
// scenario. Quotes are cancelled and re-mirrored whenever the source best
// bid/ask or the BTC/USD rate changes.
class CrossMarketMaker {
public:
    CrossMarketMaker(CrossMmConfig cfg, OwnerId owner) : cfg_(cfg), owner_(owner) {}

    OwnerId owner() const { return owner_; }
    const HedgeState& hedge_state() const { return hedge_; }
    const std::vector<HedgeState>& completed_sets() const { return completed_sets_; }
    const std::vector<MmEvent>& events() const { return events_; }
    BtcAmount put_premium_paid() const { return put_premium_paid_; }
    UsdAmount put_premium_usd_paid() const { return put_premium_usd_paid_; }  // at hedge-time rates
    UsdAmount put_payoffs() const { return put_payoffs_; }
    UsdAmount quoted_capital() const { return quoted_capital_; }
    int64_t quoted_depth_shares() const { return quoted_depth_; }

    // Re-mirror quotes for both outcomes when the source picture moved.
    void refresh_quotes(Venue& downstream, const Venue& source, BtcUsdRate rate, int64_t tick) {
        Inputs now{source.best_bid(Outcome::Yes), source.best_ask(Outcome::Yes),
                   source.best_bid(Outcome::No), source.best_ask(Outcome::No), rate};
        if (last_inputs_ && *last_inputs_ == now) return;
        last_inputs_ = now;

        cancel_all(downstream);
        // Capital metrics describe the live quote set, not cumulative history.
        quoted_capital_ = UsdAmount{0};
        quoted_depth_ = 0;
        for (Outcome o : {Outcome::Yes, Outcome::No}) quote_outcome(downstream, source, o, rate, tick);
    }

    void cancel_all(Venue& downstream) {
        for (auto& oid : live_orders_)
            if (oid != 0) downstream.cancel(oid);
        live_orders_ = {};
    }

    // Downstream fills where this strategy was maker; hedges are scheduled
    // cfg.hedge_delay_ticks later so the scenario can drift the source book.
    void on_maker_fill(const Fill& fill, int64_t tick) {
        events_.push_back({tick, MmEventKind::Fill, fill.outcome, fill.taker_side, fill.price,
                           fill.size, UsdAmount{0}});
        pending_hedges_.push_back({fill, tick + cfg_.hedge_delay_ticks});
    }

    // Execute hedges that have come due. Each downstream fill opens its own
    // set; a set already hedged is archived and a fresh one begins.
    void step(int64_t tick, const Venue& downstream, Venue& source, BtcUsdRate rate,
              int64_t expiry_tick) {
        std::vector<PendingHedge> still_pending;
        for (auto& p : pending_hedges_) {
            if (p.due_tick > tick) {
                still_pending.push_back(p);
                continue;
            }
            if (hedge_.status == HedgeStatus::Hedged || hedge_.status == HedgeStatus::Flat) {
                completed_sets_.push_back(hedge_);
                hedge_ = HedgeState{};
            }
            hedge_ = on_downstream_fill(hedge_, p.fill, downstream, source, rate, cfg_, owner_,
                                        expiry_tick);
            if (hedge_.hedge_failed) {
                events_.push_back({tick, MmEventKind::HedgeFailed, p.fill.outcome, Side::Bid, 0,
                                   hedge_.unhedged_size, UsdAmount{0}});
            } else {
                if (hedge_.put) {
                    put_premium_paid_ += hedge_.put->premium;
                    put_premium_usd_paid_ += btc_to_usd(hedge_.put->premium, rate);
                    open_puts_.push_back(*hedge_.put);
                }
                events_.push_back({tick, MmEventKind::Hedge, opposite(p.fill.outcome),
                                   p.fill.taker_side == Side::Ask ? Side::Bid : Side::Ask,
                                   hedge_.source_leg ? hedge_.source_leg->price : 0, p.fill.size,
                                   hedge_.locked_edge});
            }
        }
        pending_hedges_ = std::move(still_pending);
    }

    // Resolution: venue payouts land in venue accounts; puts settle here.
    UsdAmount on_resolution(Outcome winner, BtcUsdRate spot, int64_t tick) {
        UsdAmount total{0};
        for (const auto& put : open_puts_) total += put_payoff(put, spot);
        open_puts_.clear();
        put_payoffs_ += total;
        events_.push_back({tick, MmEventKind::Resolution, winner, Side::Bid, 0, 0, total});
        return total;
    }

    bool hedge_pending() const { return !pending_hedges_.empty(); }

private:
    struct Inputs {
        std::optional<int64_t> yes_bid, yes_ask, no_bid, no_ask;
        BtcUsdRate rate;
        friend bool operator==(const Inputs&, const Inputs&) = default;
    };
    struct PendingHedge {
        Fill fill;
        int64_t due_tick;
    };

    void quote_outcome(Venue& downstream, const Venue& source, Outcome o, BtcUsdRate rate,
                       int64_t tick) {
        auto bid_s = source.best_bid(o);
        auto ask_s = source.best_ask(o);
        if (!bid_s || !ask_s) return;

        auto pair = mirror_quotes(UsdAmount{*bid_s}, UsdAmount{*ask_s}, cfg_.fee_margin,
                                  cfg_.put_premium_per_share, rate, downstream.tick());
        if (!pair) {
            events_.push_back({tick, MmEventKind::QuoteSuppressed, o, Side::Bid, 0, 0, UsdAmount{0}});
            return;
        }

        UsdAmount put_cost = btc_to_usd_ceil(cfg_.put_premium_per_share, rate);

        // A bid fill buys `o` downstream and the hedge buys opposite(o) at the
        // source ask; never post a bid whose own fill violates the inequality.
        auto opp_ask = source.best_ask(opposite(o));
        if (opp_ask && pair->bid_d.sat < downstream.payout_per_share()) {
            ArbitrageCheck entry = check_arbitrage(UsdAmount{*opp_ask}, pair->bid_d, rate, put_cost);
            if (entry.profitable()) {
                OrderId oid = downstream.place_limit(o, Side::Bid, pair->bid_d.sat,
                                                     cfg_.quote_size, owner_);
                live_orders_[live_slot(o, Side::Bid)] = oid;
                quoted_capital_ +=
                    btc_to_usd_ceil(BtcAmount{checked_mul(pair->bid_d.sat, cfg_.quote_size)}, rate) +
                    UsdAmount{checked_mul(*opp_ask, cfg_.quote_size)} +
                    UsdAmount{checked_mul(put_cost.micro, cfg_.quote_size)};
                quoted_depth_ += cfg_.quote_size;
                events_.push_back({tick, MmEventKind::Quote, o, Side::Bid, pair->bid_d.sat,
                                   cfg_.quote_size, entry.edge});
            } else {
                events_.push_back({tick, MmEventKind::QuoteSuppressed, o, Side::Bid,
                                   pair->bid_d.sat, 0, entry.edge});
            }
        }

        // An ask fill sells `o` downstream and the hedge sells opposite(o) at
        // the source bid; the short set must collect more than the $1 payout.
        auto opp_bid = source.best_bid(opposite(o));
        if (opp_bid && pair->ask_d.sat < downstream.payout_per_share()) {
            UsdAmount proceeds = btc_to_usd(pair->ask_d, rate) + UsdAmount{*opp_bid};
            UsdAmount exit_edge = proceeds - UsdAmount{kMicroPerUsd} - put_cost;
            if (exit_edge.micro > 0) {
                OrderId oid = downstream.place_limit(o, Side::Ask, pair->ask_d.sat,
                                                     cfg_.quote_size, owner_);
                live_orders_[live_slot(o, Side::Ask)] = oid;
                events_.push_back({tick, MmEventKind::Quote, o, Side::Ask, pair->ask_d.sat,
                                   cfg_.quote_size, exit_edge});
            } else {
                events_.push_back({tick, MmEventKind::QuoteSuppressed, o, Side::Ask,
                                   pair->ask_d.sat, 0, exit_edge});
            }
        }
    }

    static size_t live_slot(Outcome o, Side s) {
        return (o == Outcome::Yes ? 0 : 2) + (s == Side::Bid ? 0 : 1);
    }

    CrossMmConfig cfg_;
    OwnerId owner_;
    HedgeState hedge_;
    std::vector<HedgeState> completed_sets_;
    std::array<OrderId, 4> live_orders_{};
    std::optional<Inputs> last_inputs_;
    std::vector<PendingHedge> pending_hedges_;
    std::vector<PutContract> open_puts_;
    std::vector<MmEvent> events_;
    BtcAmount put_premium_paid_{0};
    UsdAmount put_premium_usd_paid_{0};
    UsdAmount put_payoffs_{0};
    UsdAmount quoted_capital_{0};
    int64_t quoted_depth_ = 0;
};

} // namespace btcpm
