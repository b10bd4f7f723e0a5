#pragma once
// Deterministic scenario driver. A scenario is a tick-indexed script: a
// BTC/USD price path, source-book updates, downstream taker flow, AMM bets
// and a resolution event. The three liquidity mechanisms run side by side on
// that script and a comparison report is produced. Identical configs produce
// byte-identical output; the only randomness is the seeded price path.

#include "btcpm/amm.hpp"
#include "btcpm/crossmm.hpp"
#include "btcpm/lending.hpp"
#include "btcpm/money.hpp"
#include "btcpm/redirect.hpp"
#include "btcpm/venue.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

namespace btcpm {

// ---------------------------------------------------------------------------
// opportunity-cost fair value
// ---------------------------------------------------------------------------

// Discount a belief-probability price by the holding-period opportunity cost:
// adjusted = belief - annual_rate * years, clamped to [0, $1]. Belief and the
// result are prices of a $1-payout share in micro-USD.
inline UsdAmount fair_value_adjust(UsdAmount belief, int64_t annual_rate_bps, double years) {
    if (belief.micro < 0 || belief.micro > kMicroPerUsd)
        throw std::invalid_argument("fair_value_adjust: belief outside [0,1]");
    if (annual_rate_bps < 0 || years < 0)
        throw std::invalid_argument("fair_value_adjust: negative rate or horizon");
    int64_t discount = llround(static_cast<double>(annual_rate_bps) * years * 100.0);
    int64_t adjusted = belief.micro - discount;
    if (adjusted < 0) adjusted = 0;
    return UsdAmount{adjusted};
}

// ---------------------------------------------------------------------------
// price paths
// ---------------------------------------------------------------------------

// Counter-based 64-bit generator (splitmix64), so paths are portable.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct PricePathSpec {
    enum class Kind { Constant, PiecewiseSteps, GeometricRandomWalk };
    Kind kind = Kind::Constant;
    BtcUsdRate initial{0};
    std::vector<std::pair<int64_t, BtcUsdRate>> steps;  // (from_tick, rate), ascending
    uint64_t seed = 0;
    double drift = 0.0;  // per tick, log space
    double vol = 0.0;    // per tick

    static PricePathSpec constant(BtcUsdRate r) { return {Kind::Constant, r, {}, 0, 0, 0}; }
};

inline std::vector<BtcUsdRate> generate_path(const PricePathSpec& spec, int64_t ticks) {
    if (ticks < 1) throw std::invalid_argument("generate_path: ticks must be >= 1");
    if (spec.initial.micro_usd_per_btc <= 0)
        throw std::invalid_argument("generate_path: initial rate must be positive");
    if (spec.vol < 0) throw std::invalid_argument("generate_path: negative vol");

    std::vector<BtcUsdRate> out;
    out.reserve(static_cast<size_t>(ticks));
    switch (spec.kind) {
        case PricePathSpec::Kind::Constant:
            out.assign(static_cast<size_t>(ticks), spec.initial);
            break;
        case PricePathSpec::Kind::PiecewiseSteps: {
            BtcUsdRate cur = spec.initial;
            size_t next = 0;
            for (int64_t t = 0; t < ticks; ++t) {
                while (next < spec.steps.size() && spec.steps[next].first <= t) {
                    cur = spec.steps[next].second;
                    if (cur.micro_usd_per_btc <= 0)
                        throw std::invalid_argument("generate_path: non-positive step rate");
                    ++next;
                }
                out.push_back(cur);
            }
            break;
        }
        case PricePathSpec::Kind::GeometricRandomWalk: {
            uint64_t state = spec.seed;
            double level = static_cast<double>(spec.initial.micro_usd_per_btc);
            for (int64_t t = 0; t < ticks; ++t) {
                if (t > 0) {
                    double u1 = (static_cast<double>(splitmix64(state) >> 11) + 1.0) * 0x1.0p-53;
                    double u2 = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
                    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
                    level *= std::exp(spec.drift + spec.vol * z);
                }
                int64_t rate = llround(level);
                out.push_back(BtcUsdRate{rate < 1 ? 1 : rate});
            }
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// scenario configuration
// ---------------------------------------------------------------------------

struct BookQuote {
    int64_t bid = 0;  // native units; 0 = no level
    int64_t ask = 0;
    int64_t size = 0;
};

struct SourceBookEvent {
    int64_t tick = 0;
    Outcome outcome = Outcome::Yes;
    BookQuote quote;
};

struct SourceVenueConfig {
    TickSize tick{10'000};
    FeeRate taker_fee{};
    BookQuote yes;
    BookQuote no;
    std::vector<SourceBookEvent> script;
};

struct TakerEvent {
    int64_t tick = 0;
    Outcome outcome = Outcome::Yes;
    Side side = Side::Bid;  // taker side on the downstream venue
    int64_t size = 0;
};

struct CrossMmScenarioConfig {
    bool enabled = false;
    CrossMmConfig params;
    TickSize downstream_tick{10};
    std::vector<TakerEvent> taker_script;
};

struct AmmBetEvent {
    int64_t tick = 0;
    Outcome outcome = Outcome::Yes;
    UsdAmount cash{0};
};

struct AmmScenarioConfig {
    bool enabled = false;
    PoolMode mode = PoolMode::Standard;
    UsdAmount subsidy{0};
    Prior prior{1, 2};
    int64_t fee_bps = 0;
    std::vector<AmmBetEvent> bets;
};

struct RedirectScenarioConfig {
    bool enabled = false;
    BtcAmount deposit{0};
    int64_t target_ltv_bps = 4'500;
    int64_t hf_guard_bps = 12'000;
    KeeperCaps caps;
    Outcome outcome = Outcome::No;
    UsdAmount entry_price{0};
    UsdAmount venue_bid{0};  // bid available to the keeper for deleveraging
    ShortfallPolicy shortfall_policy = ShortfallPolicy::InjectExternal;
    LendingParams lending;
};

struct ResolutionConfig {
    int64_t tick = 0;
    Outcome winner = Outcome::Yes;
};

struct ScenarioConfig {
    std::string name;
    int64_t ticks = 1;
    int64_t days_per_tick = 1;
    PricePathSpec price_path;
    ResolutionConfig resolution;
    SourceVenueConfig source;
    CrossMmScenarioConfig crossmm;
    AmmScenarioConfig amm;
    RedirectScenarioConfig redirect;
};

// Configuration error carrying the offending field path.
struct ConfigError : std::runtime_error {
    std::string field;
    ConfigError(std::string field_path, const std::string& what)
        : std::runtime_error(field_path + ": " + what), field(std::move(field_path)) {}
};

inline void validate(const ScenarioConfig& cfg) {
    if (cfg.name.empty()) throw ConfigError("name", "must not be empty");
    if (cfg.ticks < 1) throw ConfigError("ticks", "must be >= 1");
    if (cfg.days_per_tick < 0) throw ConfigError("days_per_tick", "must be >= 0");
    if (cfg.resolution.tick < 0 || cfg.resolution.tick >= cfg.ticks)
        throw ConfigError("resolution.tick", "must lie in [0, ticks)");
    if (cfg.price_path.initial.micro_usd_per_btc <= 0)
        throw ConfigError("price_path.initial_microusd_per_btc", "must be positive");
    if (cfg.price_path.vol < 0) throw ConfigError("price_path.vol", "must be >= 0");
    for (size_t i = 0; i < cfg.price_path.steps.size(); ++i) {
        if (cfg.price_path.steps[i].second.micro_usd_per_btc <= 0)
            throw ConfigError("price_path.steps[" + std::to_string(i) + "].rate",
                              "must be positive");
        if (i > 0 && cfg.price_path.steps[i].first < cfg.price_path.steps[i - 1].first)
            throw ConfigError("price_path.steps[" + std::to_string(i) + "].tick",
                              "must be non-decreasing");
    }
    if (cfg.crossmm.enabled) {
        if (cfg.crossmm.params.quote_size < 1)
            throw ConfigError("crossmm.quote_size", "must be >= 1");
        if (cfg.crossmm.params.hedge_delay_ticks < 0)
            throw ConfigError("crossmm.hedge_delay_ticks", "must be >= 0");
        if (cfg.crossmm.params.fee_margin.micro < 0)
            throw ConfigError("crossmm.fee_margin_microusd", "must be >= 0");
        if (cfg.crossmm.params.put_premium_per_share.sat < 0)
            throw ConfigError("crossmm.put_premium_sat", "must be >= 0");
        if (cfg.source.yes.bid == 0 && cfg.source.yes.ask == 0 && cfg.source.no.bid == 0 &&
            cfg.source.no.ask == 0)
            throw ConfigError("source_venue", "crossmm needs at least one source quote");
    }
    if (cfg.amm.enabled) {
        if (cfg.amm.subsidy.micro <= 0) throw ConfigError("amm.subsidy_microusd", "must be positive");
        if (cfg.amm.prior.num <= 0 || cfg.amm.prior.num >= cfg.amm.prior.den)
            throw ConfigError("amm.prior", "must lie strictly inside (0,1)");
        if (cfg.amm.fee_bps < 0 || cfg.amm.fee_bps >= 10'000)
            throw ConfigError("amm.fee_bps", "must lie in [0, 10000)");
        for (size_t i = 0; i < cfg.amm.bets.size(); ++i)
            if (cfg.amm.bets[i].cash.micro <= 0)
                throw ConfigError("amm.bets[" + std::to_string(i) + "].cash_microusd",
                                  "must be positive");
    }
    if (cfg.redirect.enabled) {
        cfg.redirect.lending.validate();
        if (cfg.redirect.deposit.sat <= 0)
            throw ConfigError("redirect.deposit_sat", "must be positive");
        if (cfg.redirect.target_ltv_bps <= 0 ||
            cfg.redirect.target_ltv_bps > cfg.redirect.lending.ltv_max_bps)
            throw ConfigError("redirect.target_ltv_bps", "must lie in (0, ltv_max]");
        if (cfg.redirect.entry_price.micro <= 0 ||
            cfg.redirect.entry_price.micro >= kMicroPerUsd)
            throw ConfigError("redirect.entry_price_microusd", "must lie inside (0, $1)");
        if (cfg.redirect.hf_guard_bps < 10'000)
            throw ConfigError("redirect.hf_guard_bps", "guard below 1.0 is meaningless");
    }
}

// ---------------------------------------------------------------------------
// outcome of one run
// ---------------------------------------------------------------------------

struct MechanismRow {
    std::string mechanism;
    BtcAmount user_btc_pnl{0};
    UsdAmount maker_pnl{0};
    int64_t liquidation_count = 0;
    double capital_efficiency = 0.0;  // working capital per $1 of quoted depth
    bool fx_exposure = false;
};

struct ComparisonReport {
    std::vector<MechanismRow> rows;

    const MechanismRow* row(const std::string& mechanism) const {
        for (const auto& r : rows)
            if (r.mechanism == mechanism) return &r;
        return nullptr;
    }
};

struct CrossMmOutcome {
    bool enabled = false;
    UsdAmount maker_pnl{0};        // USD accounting, BTC flows converted per tick
    UsdAmount locked_edge_total{0};
    int64_t hedges = 0;
    int64_t hedge_failures = 0;
    double capital_efficiency = 0.0;
};

struct AmmOutcome {
    bool enabled = false;
    CpmmPool pool;
    LpAccount lp;
    UsdAmount lp_pnl{0};
    long double loss_fraction = 0.0L;
};

struct RedirectOutcome {
    bool enabled = false;
    SettlementReport report;
    RedirectPosition position;
};

struct ScenarioRun {
    ScenarioConfig config;
    std::vector<BtcUsdRate> path;
    ComparisonReport report;
    std::vector<std::string> events;  // newline-delimited structured records
    CrossMmOutcome crossmm;
    AmmOutcome amm;
    RedirectOutcome redirect;
};

// ---------------------------------------------------------------------------
// driver
// ---------------------------------------------------------------------------

namespace detail {

inline void set_book(Venue& venue, Outcome o, const BookQuote& q, OwnerId owner) {
    venue.clear_book(o);
    if (q.bid > 0 && q.size > 0) venue.place_limit(o, Side::Bid, q.bid, q.size, owner);
    if (q.ask > 0 && q.size > 0) venue.place_limit(o, Side::Ask, q.ask, q.size, owner);
}

inline std::string fmt_event(int64_t tick, const char* module, const char* event,
                             const std::string& fields) {
    char head[96];
    std::snprintf(head, sizeof head, "{\"tick\":%" PRId64 ",\"module\":\"%s\",\"event\":\"%s\"",
                  tick, module, event);
    std::string line(head);
    if (!fields.empty()) {
        line += ',';
        line += fields;
    }
    line += '}';
    return line;
}

inline const char* mm_event_name(MmEventKind k) {
    switch (k) {
        case MmEventKind::Quote: return "quote";
        case MmEventKind::QuoteSuppressed: return "quote_suppressed";
        case MmEventKind::Fill: return "fill";
        case MmEventKind::Hedge: return "hedge";
        case MmEventKind::HedgeFailed: return "hedge_failed";
        case MmEventKind::Unwind: return "unwind";
        case MmEventKind::Resolution: return "resolution";
    }
    return "?";
}

} // namespace detail

// Participant ids inside a scenario.
inline constexpr OwnerId kSourceLiquidity = 1;   // scripted source-book owner
inline constexpr OwnerId kMakerOwner = 2;        // cross market maker
inline constexpr OwnerId kTakerOwner = 3;        // scripted downstream takers

inline ScenarioRun run_scenario(const ScenarioConfig& cfg) {
    validate(cfg);

    ScenarioRun run;
    run.config = cfg;
    run.path = generate_path(cfg.price_path, cfg.ticks);

    const BtcUsdRate rate0 = run.path.front();

    // Venue setup.
    Venue source = Venue::usd("source", cfg.source.tick, cfg.source.taker_fee);
    detail::set_book(source, Outcome::Yes, cfg.source.yes, kSourceLiquidity);
    detail::set_book(source, Outcome::No, cfg.source.no, kSourceLiquidity);

    std::optional<Venue> downstream;
    std::optional<CrossMarketMaker> maker;
    UsdAmount maker_btc_flow_usd{0};  // downstream sat flows valued tick by tick
    size_t maker_events_logged = 0;
    if (cfg.crossmm.enabled) {
        downstream.emplace(Venue::btc("downstream", rate0, cfg.crossmm.downstream_tick));
        maker.emplace(cfg.crossmm.params, kMakerOwner);
    }

    // AMM setup.
    CpmmPool pool;
    LpAccount lp;
    if (cfg.amm.enabled) {
        auto seeded = seed_pool(cfg.amm.subsidy, cfg.amm.prior, cfg.amm.mode, cfg.amm.fee_bps);
        pool = seeded.first;
        lp = seeded.second;
        run.events.push_back(detail::fmt_event(0, "amm", "seed", "\"state\":\"" + serialize(pool) + "\""));
    }

    // Redirect setup.
    std::optional<RedirectPosition> redirect_pos;
    if (cfg.redirect.enabled) {
        redirect_pos = open_position(cfg.redirect.deposit, cfg.redirect.target_ltv_bps, rate0,
                                     cfg.redirect.lending, cfg.redirect.entry_price,
                                     cfg.redirect.outcome, cfg.redirect.caps,
                                     cfg.redirect.hf_guard_bps);
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "\"shares\":%" PRId64 ",\"borrow_microusd\":%" PRId64 ",\"hf0\":%.6Lf",
                      redirect_pos->shares, redirect_pos->loan.debt().micro, redirect_pos->hf0);
        run.events.push_back(detail::fmt_event(0, "redirect", "open", buf));
    }

    auto drain_maker_events = [&](int64_t) {
        if (!maker) return;
        const auto& evs = maker->events();
        for (; maker_events_logged < evs.size(); ++maker_events_logged) {
            const MmEvent& e = evs[maker_events_logged];
            char buf[192];
            std::snprintf(buf, sizeof buf,
                          "\"outcome\":\"%s\",\"side\":\"%s\",\"price\":%" PRId64
                          ",\"size\":%" PRId64 ",\"edge_microusd\":%" PRId64,
                          to_string(e.outcome), to_string(e.side), e.price, e.size, e.edge.micro);
            run.events.push_back(detail::fmt_event(e.tick, "crossmm",
                                                   detail::mm_event_name(e.kind), buf));
        }
    };

    bool resolved = false;
    for (int64_t t = 0; t < cfg.ticks && !resolved; ++t) {
        const BtcUsdRate rate = run.path[static_cast<size_t>(t)];

        // 1. source-book script
        for (const auto& ev : cfg.source.script)
            if (ev.tick == t) detail::set_book(source, ev.outcome, ev.quote, kSourceLiquidity);

        // 2. cross market maker: requote, take scripted flow, run due hedges
        if (maker) {
            maker->refresh_quotes(*downstream, source, rate, t);
            for (const auto& ev : cfg.crossmm.taker_script) {
                if (ev.tick != t) continue;
                ExecResult res = downstream->execute_market(ev.outcome, ev.side, ev.size,
                                                            kTakerOwner);
                for (const auto& fill : res.fills) {
                    if (fill.maker != kMakerOwner) continue;
                    maker->on_maker_fill(fill, t);
                    int64_t notional = checked_mul(fill.price, fill.size);
                    UsdAmount usd = btc_to_usd(BtcAmount{notional}, rate);
                    // Maker bought when the taker sold.
                    maker_btc_flow_usd += fill.taker_side == Side::Ask ? -usd : usd;
                }
            }
            maker->step(t, *downstream, source, rate, cfg.resolution.tick);
            if (maker->hedge_state().hedge_failed) maker->cancel_all(*downstream);
            drain_maker_events(t);
        }

        // 3. redirect keeper
        if (redirect_pos && redirect_pos->stage == RedirectStage::Monitoring) {
            // a keeper may have fully repaid the loan already
            if (t > 0 && cfg.days_per_tick > 0 &&
                redirect_pos->loan.status == LoanStatus::Active)
                redirect_pos->loan =
                    accrue_interest(redirect_pos->loan, cfg.days_per_tick, cfg.redirect.lending);
            KeeperStepResult step = keeper_step(*redirect_pos, rate, cfg.redirect.venue_bid,
                                                cfg.redirect.lending);
            *redirect_pos = step.position;
            for (const auto& a : step.actions) {
                char buf[224];
                std::snprintf(buf, sizeof buf,
                              "\"action\":\"%s\",\"shares_sold\":%" PRId64
                              ",\"usd_repaid\":%" PRId64 ",\"sat_swapped\":%" PRId64
                              ",\"trigger_hf\":%.6Lf",
                              to_string(a.kind), a.shares_sold, a.usd_repaid.micro,
                              a.sat_swapped.sat, a.trigger_hf);
                run.events.push_back(detail::fmt_event(t, "redirect", "keeper", buf));
            }
            if (step.exhausted && liquidatable(redirect_pos->loan, rate, cfg.redirect.lending)) {
                *redirect_pos = apply_liquidation(*redirect_pos, rate, cfg.redirect.lending);
                char buf[128];
                std::snprintf(buf, sizeof buf, "\"collateral_left_sat\":%" PRId64,
                              redirect_pos->loan.collateral.sat);
                run.events.push_back(detail::fmt_event(t, "redirect", "liquidation", buf));
            }
        }

        // 4. scripted AMM bets
        if (cfg.amm.enabled) {
            for (const auto& ev : cfg.amm.bets) {
                if (ev.tick != t) continue;
                BetResult res = bet(pool, ev.cash, ev.outcome);
                pool = res.pool;
                char buf[192];
                std::snprintf(buf, sizeof buf,
                              "\"outcome\":\"%s\",\"cash_microusd\":%" PRId64
                              ",\"shares_out\":%" PRId64 ",\"state\":\"%s\"",
                              to_string(ev.outcome), ev.cash.micro, res.shares_out,
                              serialize(pool).c_str());
                run.events.push_back(detail::fmt_event(t, "amm", "bet", buf));
            }
        }

        // 5. resolution
        if (t == cfg.resolution.tick) {
            resolved = true;
            const Outcome winner = cfg.resolution.winner;
            const BtcUsdRate spot = rate;

            if (maker) {
                maker->cancel_all(*downstream);
                // Downstream payout in sat, valued at the resolution spot.
                int64_t down_payout =
                    downstream->payout(winner, downstream->account(kMakerOwner).shares);
                source.resolve(winner);
                downstream->resolve(winner);
                UsdAmount put_pay = maker->on_resolution(winner, spot, t);
                drain_maker_events(t);

                UsdAmount maker_pnl = UsdAmount{source.account(kMakerOwner).cash} +
                                      maker_btc_flow_usd +
                                      btc_to_usd(BtcAmount{down_payout}, spot) + put_pay -
                                      maker->put_premium_usd_paid();

                run.crossmm.enabled = true;
                run.crossmm.maker_pnl = maker_pnl;
                run.crossmm.hedges = 0;
                run.crossmm.hedge_failures = 0;
                for (const auto& e : maker->events()) {
                    if (e.kind == MmEventKind::Hedge) {
                        run.crossmm.hedges += 1;
                        run.crossmm.locked_edge_total += e.edge;
                    }
                    if (e.kind == MmEventKind::HedgeFailed) run.crossmm.hedge_failures += 1;
                }
                if (maker->quoted_depth_shares() > 0)
                    run.crossmm.capital_efficiency =
                        static_cast<double>(maker->quoted_capital().micro) /
                        static_cast<double>(checked_mul(maker->quoted_depth_shares(),
                                                        kMicroPerUsd));

                // Trading transfers shares and cash, it never creates them.
                if (source.total_shares(Outcome::Yes) != 0 ||
                    source.total_shares(Outcome::No) != 0 ||
                    downstream->total_shares(Outcome::Yes) != 0 ||
                    downstream->total_shares(Outcome::No) != 0)
                    throw std::logic_error("scenario: share conservation violated");
                if (source.total_cash_plus_fees() != 0 ||
                    downstream->total_cash_plus_fees() != 0)
                    throw std::logic_error("scenario: cash conservation violated");
            } else {
                source.resolve(winner);
            }

            if (cfg.amm.enabled) {
                run.amm.enabled = true;
                run.amm.pool = pool;
                run.amm.lp = lp;
                run.amm.loss_fraction = permanent_loss(pool, lp.initial_endowment, winner);
                int64_t pool_value =
                    winner == Outcome::Yes ? pool.yes_reserve : pool.no_reserve;
                int64_t leftover_value =
                    lp.leftover_outcome == winner ? lp.leftover_micro : 0;
                run.amm.lp_pnl = UsdAmount{pool_value} + UsdAmount{leftover_value} -
                                 lp.initial_endowment;
                char buf[128];
                std::snprintf(buf, sizeof buf, "\"loss_fraction\":%.6Lf", run.amm.loss_fraction);
                run.events.push_back(detail::fmt_event(t, "amm", "resolution", buf));
            }

            if (redirect_pos) {
                auto settled = settle(*redirect_pos, winner, spot, cfg.redirect.lending,
                                      cfg.redirect.shortfall_policy);
                *redirect_pos = settled.first;
                run.redirect.enabled = true;
                run.redirect.report = settled.second;
                run.redirect.position = *redirect_pos;
                char buf[224];
                std::snprintf(buf, sizeof buf,
                              "\"won\":%s,\"proceeds_microusd\":%" PRId64
                              ",\"user_total_sat\":%" PRId64 ",\"btc_pnl_sat\":%" PRId64,
                              settled.second.won ? "true" : "false",
                              settled.second.proceeds_usd.micro,
                              settled.second.user_total_btc.sat, settled.second.btc_pnl.sat);
                run.events.push_back(detail::fmt_event(t, "redirect", "settle", buf));
            }
        }
    }

    // Comparison rows in fixed order.
    if (run.crossmm.enabled) {
        MechanismRow row;
        row.mechanism = "crossmm";
        row.user_btc_pnl = BtcAmount{0};  // no liquidation mechanics on venue users
        row.maker_pnl = run.crossmm.maker_pnl;
        row.liquidation_count = 0;
        row.capital_efficiency = run.crossmm.capital_efficiency;
        row.fx_exposure = false;
        run.report.rows.push_back(row);
    }
    if (run.amm.enabled) {
        MechanismRow row;
        row.mechanism = "amm";
        row.maker_pnl = run.amm.lp_pnl;
        row.liquidation_count = 0;
        int64_t depth = std::min(run.amm.pool.yes_reserve, run.amm.pool.no_reserve);
        row.capital_efficiency = depth > 0 ? static_cast<double>(run.amm.lp.initial_endowment.micro) /
                                                 static_cast<double>(depth)
                                           : 0.0;
        row.fx_exposure = false;
        run.report.rows.push_back(row);
    }
    if (run.redirect.enabled) {
        MechanismRow row;
        row.mechanism = "redirect";
        row.user_btc_pnl = run.redirect.report.btc_pnl;
        row.maker_pnl = UsdAmount{0};
        row.liquidation_count = run.redirect.position.liquidation_count;
        // Working capital is the whole collateral locked; quoted depth is the
        // share count it bought.
        int64_t shares_bought =
            mul_div_floor(collateral_value(cfg.redirect.deposit, rate0).micro,
                          cfg.redirect.target_ltv_bps, 10'000) /
            cfg.redirect.entry_price.micro;
        row.capital_efficiency =
            shares_bought > 0
                ? static_cast<double>(collateral_value(cfg.redirect.deposit, rate0).micro) /
                      static_cast<double>(checked_mul(shares_bought, kMicroPerUsd))
                : 0.0;
        row.fx_exposure = true;
        run.report.rows.push_back(row);
    }

    return run;
}

} // namespace btcpm
