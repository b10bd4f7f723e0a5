#pragma once
// A prediction-market venue: one binary market with a YES book and a NO book,
// price-time-priority matching, per-fill taker fees and cash/share accounting
// per participant. Denominated either in USD (source venue) or BTC
// (downstream venue); a winning share pays exactly one payout unit of the
// venue's native currency.

#include "btcpm/money.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace btcpm {

enum class Denom { Usd, Btc };

using OwnerId = int64_t;
using OrderId = int64_t;

struct LimitOrder {
    OrderId id = 0;
    int64_t price = 0;   // native units (micro-USD or satoshi) per share
    int64_t size = 0;    // whole shares remaining
    OwnerId owner = 0;
    int64_t seq = 0;     // arrival sequence, breaks price ties
};

// Proportional taker fee as an exact fraction of notional.
struct FeeRate {
    int64_t num = 0;
    int64_t den = 1;
};

struct Fill {
    OrderId order_id = 0;  // resting order consumed
    Side taker_side = Side::Bid;
    Outcome outcome = Outcome::Yes;
    int64_t price = 0;     // native units per share
    int64_t size = 0;
    int64_t fee_paid = 0;  // native units, charged to the taker
    OwnerId maker = 0;
    OwnerId taker = 0;
};

struct ExecResult {
    std::vector<Fill> fills;
    int64_t filled = 0;
    int64_t unfilled = 0;   // remainder when the book was exhausted
    int64_t notional = 0;   // sum of price*size over fills, native units
    int64_t fees = 0;

    double average_price() const {
        return filled > 0 ? static_cast<double>(notional) / static_cast<double>(filled) : 0.0;
    }
    int64_t worst_price() const {
        int64_t w = 0;
        for (const auto& f : fills) w = std::max(w, f.price);
        return w;
    }
};

struct OrderBook {
    std::vector<LimitOrder> bids;  // price descending, seq ascending
    std::vector<LimitOrder> asks;  // price ascending, seq ascending

    std::optional<int64_t> best_bid() const {
        return bids.empty() ? std::nullopt : std::optional<int64_t>(bids.front().price);
    }
    std::optional<int64_t> best_ask() const {
        return asks.empty() ? std::nullopt : std::optional<int64_t>(asks.front().price);
    }
};

// Per-participant holdings on one venue.
struct Account {
    std::array<int64_t, 2> shares{0, 0};  // indexed by Outcome; may be negative (short)
    int64_t cash = 0;                     // native units; net of all trades and payouts
};

class Venue {
public:
    Venue(std::string id, Denom denom, int64_t payout_per_share, TickSize tick,
          FeeRate taker_fee = {})
        : id_(std::move(id)), denom_(denom), payout_per_share_(payout_per_share),
          tick_(tick), taker_fee_(taker_fee) {
        if (payout_per_share_ <= 0) throw std::invalid_argument(id_ + ": payout unit must be positive");
        if (tick_.units <= 0) throw std::invalid_argument(id_ + ": tick must be positive");
        if (taker_fee_.den <= 0 || taker_fee_.num < 0)
            throw std::invalid_argument(id_ + ": malformed fee rate");
    }

    // Source venue: $1 payout per winning share.
    static Venue usd(std::string id, TickSize tick = TickSize{10'000}, FeeRate fee = {}) {
        return Venue(std::move(id), Denom::Usd, kMicroPerUsd, tick, fee);
    }

    // Downstream venue: payout unit fixed at creation, default usd_to_btc($1, rate).
    static Venue btc(std::string id, BtcUsdRate rate_at_creation, TickSize tick = TickSize{1},
                     FeeRate fee = {}) {
        return Venue(std::move(id), Denom::Btc,
                     usd_to_btc(UsdAmount{kMicroPerUsd}, rate_at_creation).sat, tick, fee);
    }

    const std::string& id() const { return id_; }
    Denom denom() const { return denom_; }
    int64_t payout_per_share() const { return payout_per_share_; }
    TickSize tick() const { return tick_; }
    FeeRate taker_fee() const { return taker_fee_; }
    bool resolved() const { return resolved_; }
    Outcome winner() const {
        if (!resolved_) throw std::logic_error(id_ + ": market not resolved");
        return winner_;
    }

    const OrderBook& book(Outcome o) const { return books_[idx(o)]; }

    std::optional<int64_t> best_bid(Outcome o) const { return book(o).best_bid(); }
    std::optional<int64_t> best_ask(Outcome o) const { return book(o).best_ask(); }

    // Submit a limit order. A crossing limit executes as taker up to its limit
    // price; any remainder rests. Returns the order id (remainder may be zero).
    OrderId place_limit(Outcome outcome, Side side, int64_t price, int64_t size, OwnerId owner,
                        ExecResult* crossing = nullptr) {
        require_open();
        if (size <= 0) throw std::invalid_argument(id_ + ": order size must be positive");
        if (price <= 0 || price >= payout_per_share_)
            throw std::invalid_argument(id_ + ": price must lie inside (0, payout unit)");
        if (price % tick_.units != 0)
            throw std::invalid_argument(id_ + ": price off tick grid");

        ExecResult res = match(outcome, side, size, owner, price);
        if (crossing) *crossing = res;

        OrderId oid = next_order_id_++;
        if (res.unfilled > 0) {
            LimitOrder order{oid, price, res.unfilled, owner, next_seq_++};
            auto& side_levels = (side == Side::Bid) ? books_[idx(outcome)].bids : books_[idx(outcome)].asks;
            side_levels.insert(std::upper_bound(side_levels.begin(), side_levels.end(), order,
                                                [side](const LimitOrder& a, const LimitOrder& b) {
                                                    if (a.price != b.price)
                                                        return side == Side::Bid ? a.price > b.price
                                                                                 : a.price < b.price;
                                                    return a.seq < b.seq;
                                                }),
                               order);
        }
        return oid;
    }

    // Market order: consume best levels until filled or the book is exhausted.
    ExecResult execute_market(Outcome outcome, Side side, int64_t size, OwnerId owner) {
        require_open();
        if (size <= 0) throw std::invalid_argument(id_ + ": market order size must be positive");
        return match(outcome, side, size, owner, std::nullopt);
    }

    bool cancel(OrderId oid) {
        for (auto& book : books_) {
            for (auto* levels : {&book.bids, &book.asks}) {
                auto it = std::find_if(levels->begin(), levels->end(),
                                       [oid](const LimitOrder& o) { return o.id == oid; });
                if (it != levels->end()) {
                    levels->erase(it);
                    return true;
                }
            }
        }
        return false;
    }

    // Resolve the market: winning shares pay one payout unit each, losing
    // shares pay zero. Short positions fund the payouts.
    void resolve(Outcome outcome_winner) {
        require_open();
        resolved_ = true;
        winner_ = outcome_winner;
        for (auto& [owner, acct] : accounts_) {
            int64_t winning = acct.shares[idx(outcome_winner)];
            acct.cash = checked_add(acct.cash, checked_mul(winning, payout_per_share_));
        }
    }

    // Resolution value of an arbitrary holding, without touching accounts.
    int64_t payout(Outcome outcome_winner, const std::array<int64_t, 2>& holdings) const {
        return checked_mul(holdings[idx(outcome_winner)], payout_per_share_);
    }

    const Account& account(OwnerId owner) const {
        static const Account empty{};
        auto it = accounts_.find(owner);
        return it == accounts_.end() ? empty : it->second;
    }
    const std::map<OwnerId, Account>& accounts() const { return accounts_; }
    int64_t fee_pot() const { return fee_pot_; }

    // Share conservation: trading only transfers inventory.
    int64_t total_shares(Outcome o) const {
        int64_t sum = 0;
        for (const auto& [_, acct] : accounts_) sum = checked_add(sum, acct.shares[idx(o)]);
        return sum;
    }
    // Cash conservation: trades net to zero, fees accumulate in the pot.
    int64_t total_cash_plus_fees() const {
        int64_t sum = fee_pot_;
        for (const auto& [_, acct] : accounts_) sum = checked_add(sum, acct.cash);
        return sum;
    }

    // One level per line, bids (descending) then asks (ascending):
    //   "bid <price> <size>" / "ask <price> <size>"
    std::string snapshot(Outcome o) const {
        std::ostringstream out;
        for (const auto& l : book(o).bids) out << "bid " << l.price << ' ' << l.size << '\n';
        for (const auto& l : book(o).asks) out << "ask " << l.price << ' ' << l.size << '\n';
        return out.str();
    }

    // Scenario scripting: drop all resting orders for one outcome.
    void clear_book(Outcome o) {
        books_[idx(o)].bids.clear();
        books_[idx(o)].asks.clear();
    }

private:
    static size_t idx(Outcome o) { return o == Outcome::Yes ? 0 : 1; }

    void require_open() const {
        if (resolved_) throw std::logic_error(id_ + ": market already resolved");
    }

    int64_t fee_for(int64_t price, int64_t size) const {
        if (taker_fee_.num == 0) return 0;
        return mul_div_ceil(checked_mul(price, size), taker_fee_.num, taker_fee_.den);
    }

    ExecResult match(Outcome outcome, Side taker_side, int64_t size, OwnerId taker,
                     std::optional<int64_t> limit_price) {
        auto& contra = (taker_side == Side::Bid) ? books_[idx(outcome)].asks : books_[idx(outcome)].bids;

        // Reject self-trades before touching any state: the walk would reach
        // one of the taker's own resting orders within the crossing range.
        int64_t scan = size;
        for (const LimitOrder& level : contra) {
            if (scan <= 0) break;
            if (limit_price) {
                bool crosses = (taker_side == Side::Bid) ? level.price <= *limit_price
                                                         : level.price >= *limit_price;
                if (!crosses) break;
            }
            if (level.owner == taker)
                throw std::invalid_argument(id_ + ": self-trade within one strategy rejected");
            scan -= level.size;
        }

        ExecResult res;
        int64_t remaining = size;

        while (remaining > 0 && !contra.empty()) {
            LimitOrder& best = contra.front();
            if (limit_price) {
                bool crosses = (taker_side == Side::Bid) ? best.price <= *limit_price
                                                         : best.price >= *limit_price;
                if (!crosses) break;
            }

            int64_t qty = std::min(remaining, best.size);
            int64_t fee = fee_for(best.price, qty);
            res.fills.push_back({best.id, taker_side, outcome, best.price, qty, fee, best.owner, taker});
            res.filled += qty;
            res.notional = checked_add(res.notional, checked_mul(best.price, qty));
            res.fees = checked_add(res.fees, fee);
            settle_fill(outcome, taker_side, best.owner, taker, best.price, qty, fee);

            remaining -= qty;
            best.size -= qty;
            if (best.size == 0) contra.erase(contra.begin());
        }
        res.unfilled = remaining;
        return res;
    }

    void settle_fill(Outcome outcome, Side taker_side, OwnerId maker, OwnerId taker,
                     int64_t price, int64_t qty, int64_t fee) {
        OwnerId buyer = (taker_side == Side::Bid) ? taker : maker;
        OwnerId seller = (taker_side == Side::Bid) ? maker : taker;
        int64_t gross = checked_mul(price, qty);

        Account& b = accounts_[buyer];
        Account& s = accounts_[seller];
        b.shares[idx(outcome)] = checked_add(b.shares[idx(outcome)], qty);
        s.shares[idx(outcome)] = checked_sub(s.shares[idx(outcome)], qty);
        b.cash = checked_sub(b.cash, gross);
        s.cash = checked_add(s.cash, gross);

        accounts_[taker].cash = checked_sub(accounts_[taker].cash, fee);
        fee_pot_ = checked_add(fee_pot_, fee);
    }

    std::string id_;
    Denom denom_;
    int64_t payout_per_share_;
    TickSize tick_;
    FeeRate taker_fee_;
    std::array<OrderBook, 2> books_{};
    std::map<OwnerId, Account> accounts_;
    int64_t fee_pot_ = 0;
    bool resolved_ = false;
    Outcome winner_ = Outcome::Yes;
    OrderId next_order_id_ = 1;
    int64_t next_seq_ = 0;
};

} // namespace btcpm
