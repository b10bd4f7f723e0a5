#pragma once
// Scenario configuration files: a single human-editable JSON document per
// scenario. Amounts are exact integers in their native unit (micro-USD,
// satoshi, basis points); probabilities are [num, den] rationals. Parse
// errors carry the offending field path.

#include "btcpm/scenario.hpp"

#include <json.hpp>

#include <fstream>
#include <string>

namespace btcpm {

namespace cfgdetail {

using nlohmann::json;

inline const json& field(const json& j, const std::string& path, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(path + "." + key, "missing required field");
    return *it;
}

inline int64_t get_int(const json& j, const std::string& path, const char* key) {
    const json& v = field(j, path, key);
    if (!v.is_number_integer()) throw ConfigError(path + "." + key, "expected an integer");
    return v.get<int64_t>();
}

inline int64_t get_int_or(const json& j, const std::string& path, const char* key, int64_t dflt) {
    if (!j.contains(key)) return dflt;
    return get_int(j, path, key);
}

inline double get_num_or(const json& j, const std::string& path, const char* key, double dflt) {
    if (!j.contains(key)) return dflt;
    const json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(path + "." + key, "expected a number");
    return v.get<double>();
}

inline bool get_bool_or(const json& j, const std::string& path, const char* key, bool dflt) {
    if (!j.contains(key)) return dflt;
    const json& v = j.at(key);
    if (!v.is_boolean()) throw ConfigError(path + "." + key, "expected a boolean");
    return v.get<bool>();
}

inline std::string get_str(const json& j, const std::string& path, const char* key) {
    const json& v = field(j, path, key);
    if (!v.is_string()) throw ConfigError(path + "." + key, "expected a string");
    return v.get<std::string>();
}

inline std::string get_str_or(const json& j, const std::string& path, const char* key,
                              const std::string& dflt) {
    if (!j.contains(key)) return dflt;
    return get_str(j, path, key);
}

inline Outcome parse_outcome(const std::string& s, const std::string& path) {
    if (s == "YES" || s == "yes") return Outcome::Yes;
    if (s == "NO" || s == "no") return Outcome::No;
    throw ConfigError(path, "expected \"YES\" or \"NO\"");
}

inline Side parse_side(const std::string& s, const std::string& path) {
    if (s == "bid" || s == "buy") return Side::Bid;
    if (s == "ask" || s == "sell") return Side::Ask;
    throw ConfigError(path, "expected \"bid\" or \"ask\"");
}

inline Prior parse_prior(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        throw ConfigError(path, "expected a [numerator, denominator] pair");
    return Prior{j[0].get<int64_t>(), j[1].get<int64_t>()};
}

inline BookQuote parse_quote(const json& j, const std::string& path) {
    BookQuote q;
    q.bid = get_int_or(j, path, "bid_microusd", 0);
    q.ask = get_int_or(j, path, "ask_microusd", 0);
    q.size = get_int_or(j, path, "size", 0);
    return q;
}

inline PricePathSpec parse_price_path(const json& j, const std::string& path) {
    PricePathSpec spec;
    std::string kind = get_str(j, path, "kind");
    if (kind == "constant") spec.kind = PricePathSpec::Kind::Constant;
    else if (kind == "steps") spec.kind = PricePathSpec::Kind::PiecewiseSteps;
    else if (kind == "grw") spec.kind = PricePathSpec::Kind::GeometricRandomWalk;
    else throw ConfigError(path + ".kind", "expected \"constant\", \"steps\" or \"grw\"");

    spec.initial = BtcUsdRate{get_int(j, path, "initial_microusd_per_btc")};
    if (j.contains("steps")) {
        const json& steps = j.at("steps");
        if (!steps.is_array()) throw ConfigError(path + ".steps", "expected an array");
        for (size_t i = 0; i < steps.size(); ++i) {
            std::string sp = path + ".steps[" + std::to_string(i) + "]";
            spec.steps.emplace_back(get_int(steps[i], sp, "tick"),
                                    BtcUsdRate{get_int(steps[i], sp, "rate_microusd_per_btc")});
        }
    }
    spec.seed = static_cast<uint64_t>(get_int_or(j, path, "seed", 0));
    spec.drift = get_num_or(j, path, "drift", 0.0);
    spec.vol = get_num_or(j, path, "vol", 0.0);
    return spec;
}

inline LendingParams parse_lending(const json& j, const std::string& path) {
    LendingParams p;
    p.ltv_max_bps = get_int_or(j, path, "ltv_max_bps", p.ltv_max_bps);
    p.liq_threshold_bps = get_int_or(j, path, "liq_threshold_bps", p.liq_threshold_bps);
    p.liq_penalty_bps = get_int_or(j, path, "liq_penalty_bps", p.liq_penalty_bps);
    p.borrow_rate_bps = get_int_or(j, path, "borrow_rate_bps", p.borrow_rate_bps);
    return p;
}

} // namespace cfgdetail

inline ScenarioConfig parse_scenario_config(const nlohmann::json& j) {
    using namespace cfgdetail;
    const std::string root = "$";

    ScenarioConfig cfg;
    cfg.name = get_str(j, root, "name");
    cfg.ticks = get_int(j, root, "ticks");
    cfg.days_per_tick = get_int_or(j, root, "days_per_tick", 1);
    cfg.price_path = parse_price_path(field(j, root, "price_path"), root + ".price_path");

    const json& res = field(j, root, "resolution");
    cfg.resolution.tick = get_int(res, root + ".resolution", "tick");
    cfg.resolution.winner =
        parse_outcome(get_str(res, root + ".resolution", "winner"), root + ".resolution.winner");

    if (j.contains("source_venue")) {
        const json& sv = j.at("source_venue");
        const std::string p = root + ".source_venue";
        cfg.source.tick = TickSize{get_int_or(sv, p, "tick_microusd", 10'000)};
        cfg.source.taker_fee.num = get_int_or(sv, p, "taker_fee_num", 0);
        cfg.source.taker_fee.den = get_int_or(sv, p, "taker_fee_den", 1);
        if (sv.contains("yes")) cfg.source.yes = parse_quote(sv.at("yes"), p + ".yes");
        if (sv.contains("no")) cfg.source.no = parse_quote(sv.at("no"), p + ".no");
        if (sv.contains("script")) {
            const json& script = sv.at("script");
            if (!script.is_array()) throw ConfigError(p + ".script", "expected an array");
            for (size_t i = 0; i < script.size(); ++i) {
                std::string sp = p + ".script[" + std::to_string(i) + "]";
                SourceBookEvent ev;
                ev.tick = get_int(script[i], sp, "tick");
                ev.outcome = parse_outcome(get_str(script[i], sp, "outcome"), sp + ".outcome");
                ev.quote = parse_quote(script[i], sp);
                cfg.source.script.push_back(ev);
            }
        }
    }

    if (j.contains("crossmm")) {
        const json& cm = j.at("crossmm");
        const std::string p = root + ".crossmm";
        cfg.crossmm.enabled = get_bool_or(cm, p, "enabled", false);
        cfg.crossmm.params.fee_margin = UsdAmount{get_int_or(cm, p, "fee_margin_microusd", 0)};
        cfg.crossmm.params.put_premium_per_share =
            BtcAmount{get_int_or(cm, p, "put_premium_sat", 0)};
        std::string notional = get_str_or(cm, p, "hedge_notional", "cost");
        if (notional == "cost") cfg.crossmm.params.hedge_notional = HedgeNotional::Cost;
        else if (notional == "payout") cfg.crossmm.params.hedge_notional = HedgeNotional::Payout;
        else throw ConfigError(p + ".hedge_notional", "expected \"cost\" or \"payout\"");
        cfg.crossmm.params.hedge_delay_ticks =
            static_cast<int>(get_int_or(cm, p, "hedge_delay_ticks", 0));
        cfg.crossmm.params.quote_size = get_int_or(cm, p, "quote_size", 1);
        cfg.crossmm.downstream_tick = TickSize{get_int_or(cm, p, "downstream_tick_sat", 10)};
        if (cm.contains("taker_script")) {
            const json& script = cm.at("taker_script");
            if (!script.is_array()) throw ConfigError(p + ".taker_script", "expected an array");
            for (size_t i = 0; i < script.size(); ++i) {
                std::string sp = p + ".taker_script[" + std::to_string(i) + "]";
                TakerEvent ev;
                ev.tick = get_int(script[i], sp, "tick");
                ev.outcome = parse_outcome(get_str(script[i], sp, "outcome"), sp + ".outcome");
                ev.side = parse_side(get_str(script[i], sp, "side"), sp + ".side");
                ev.size = get_int(script[i], sp, "size");
                cfg.crossmm.taker_script.push_back(ev);
            }
        }
    }

    if (j.contains("amm")) {
        const json& am = j.at("amm");
        const std::string p = root + ".amm";
        cfg.amm.enabled = get_bool_or(am, p, "enabled", false);
        std::string mode = get_str_or(am, p, "mode", "standard");
        if (mode == "standard") cfg.amm.mode = PoolMode::Standard;
        else if (mode == "weighted") cfg.amm.mode = PoolMode::Weighted;
        else throw ConfigError(p + ".mode", "expected \"standard\" or \"weighted\"");
        cfg.amm.subsidy = UsdAmount{get_int_or(am, p, "subsidy_microusd", 0)};
        if (am.contains("prior")) cfg.amm.prior = parse_prior(am.at("prior"), p + ".prior");
        cfg.amm.fee_bps = get_int_or(am, p, "fee_bps", 0);
        if (am.contains("bets")) {
            const json& bets = am.at("bets");
            if (!bets.is_array()) throw ConfigError(p + ".bets", "expected an array");
            for (size_t i = 0; i < bets.size(); ++i) {
                std::string sp = p + ".bets[" + std::to_string(i) + "]";
                AmmBetEvent ev;
                ev.tick = get_int(bets[i], sp, "tick");
                ev.outcome = parse_outcome(get_str(bets[i], sp, "outcome"), sp + ".outcome");
                ev.cash = UsdAmount{get_int(bets[i], sp, "cash_microusd")};
                cfg.amm.bets.push_back(ev);
            }
        }
    }

    if (j.contains("redirect")) {
        const json& rd = j.at("redirect");
        const std::string p = root + ".redirect";
        cfg.redirect.enabled = get_bool_or(rd, p, "enabled", false);
        cfg.redirect.deposit = BtcAmount{get_int_or(rd, p, "deposit_sat", 0)};
        cfg.redirect.target_ltv_bps = get_int_or(rd, p, "target_ltv_bps", 4'500);
        cfg.redirect.hf_guard_bps = get_int_or(rd, p, "hf_guard_bps", 12'000);
        if (rd.contains("caps")) {
            const json& caps = rd.at("caps");
            const std::string cp = p + ".caps";
            cfg.redirect.caps.max_shares_per_step = get_int_or(caps, cp, "max_shares_per_step", 0);
            cfg.redirect.caps.max_swap_sat_per_step =
                get_int_or(caps, cp, "max_swap_sat_per_step", 0);
            cfg.redirect.caps.slippage_bps = get_int_or(caps, cp, "slippage_bps", 50);
            cfg.redirect.caps.topup_enabled = get_bool_or(caps, cp, "topup_enabled", false);
            cfg.redirect.caps.topup_granted = get_bool_or(caps, cp, "topup_granted", false);
            cfg.redirect.caps.topup_amount = BtcAmount{get_int_or(caps, cp, "topup_sat", 0)};
        }
        if (rd.contains("outcome"))
            cfg.redirect.outcome = parse_outcome(get_str(rd, p, "outcome"), p + ".outcome");
        cfg.redirect.entry_price = UsdAmount{get_int_or(rd, p, "entry_price_microusd", 0)};
        cfg.redirect.venue_bid = UsdAmount{get_int_or(rd, p, "venue_bid_microusd", 0)};
        std::string policy = get_str_or(rd, p, "shortfall_policy", "inject_external");
        if (policy == "inject_external")
            cfg.redirect.shortfall_policy = ShortfallPolicy::InjectExternal;
        else if (policy == "collateral_swap")
            cfg.redirect.shortfall_policy = ShortfallPolicy::CollateralSwap;
        else throw ConfigError(p + ".shortfall_policy",
                               "expected \"inject_external\" or \"collateral_swap\"");
        if (rd.contains("lending"))
            cfg.redirect.lending = parse_lending(rd.at("lending"), p + ".lending");
    }

    validate(cfg);
    return cfg;
}

inline ScenarioConfig load_scenario_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("$", "cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("$", std::string("invalid JSON: ") + e.what());
    }
    return parse_scenario_config(j);
}

} // namespace btcpm
