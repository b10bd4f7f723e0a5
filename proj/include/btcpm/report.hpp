#pragma once
// Report writers. All output is a deterministic function of the scenario
// config: integers stay integers, ratios are formatted with fixed precision,
// and JSON key order is fixed.

#include "btcpm/scenario.hpp"

#include <json.hpp>

#include <cstdio>
#include <string>

namespace btcpm {

inline constexpr const char* kCapitalEfficiencyNote =
    "capital_efficiency = working capital locked / (quoted depth x $1); lower is better";

namespace repdetail {

inline std::string fixed6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline std::string fixed6(long double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6Lf", v);
    return buf;
}

} // namespace repdetail

inline std::string report_csv(const ScenarioRun& run) {
    std::string out;
    out += "# scenario: " + run.config.name + "\n";
    out += std::string("# ") + kCapitalEfficiencyNote + "\n";
    out += "mechanism,user_btc_pnl_sat,maker_pnl_microusd,liquidation_count,"
           "capital_efficiency,fx_exposure\n";
    for (const auto& row : run.report.rows) {
        out += row.mechanism + ',' + std::to_string(row.user_btc_pnl.sat) + ',' +
               std::to_string(row.maker_pnl.micro) + ',' +
               std::to_string(row.liquidation_count) + ',' +
               repdetail::fixed6(row.capital_efficiency) + ',' +
               (row.fx_exposure ? "true" : "false") + '\n';
    }
    return out;
}

inline nlohmann::ordered_json settlement_json(const SettlementReport& rep) {
    nlohmann::ordered_json j;
    j["outcome"] = rep.won ? "won" : "lost";
    j["proceeds_usd"] = rep.proceeds_usd.micro;
    j["interest_paid"] = rep.interest_paid.micro;
    j["shortfall"] = rep.shortfall.micro;
    j["liquidated"] = rep.liquidated;
    j["user_total_btc"] = rep.user_total_btc.sat;
    j["btc_pnl"] = rep.btc_pnl.sat;
    return j;
}

inline std::string report_json(const ScenarioRun& run) {
    nlohmann::ordered_json j;
    j["scenario"] = run.config.name;
    j["ticks"] = run.config.ticks;
    j["resolution"] = {{"tick", run.config.resolution.tick},
                       {"winner", to_string(run.config.resolution.winner)}};
    j["capital_efficiency_definition"] = kCapitalEfficiencyNote;

    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : run.report.rows) {
        nlohmann::ordered_json r;
        r["mechanism"] = row.mechanism;
        r["user_btc_pnl_sat"] = row.user_btc_pnl.sat;
        r["maker_pnl_microusd"] = row.maker_pnl.micro;
        r["liquidation_count"] = row.liquidation_count;
        r["capital_efficiency"] = repdetail::fixed6(row.capital_efficiency);
        r["fx_exposure"] = row.fx_exposure;
        rows.push_back(r);
    }
    j["mechanisms"] = rows;

    if (run.crossmm.enabled) {
        j["crossmm"] = {{"maker_pnl_microusd", run.crossmm.maker_pnl.micro},
                        {"locked_edge_total_microusd", run.crossmm.locked_edge_total.micro},
                        {"hedges", run.crossmm.hedges},
                        {"hedge_failures", run.crossmm.hedge_failures}};
    }
    if (run.amm.enabled) {
        j["amm"] = {{"pool", serialize(run.amm.pool)},
                    {"leftover_micro", run.amm.lp.leftover_micro},
                    {"leftover_outcome", to_string(run.amm.lp.leftover_outcome)},
                    {"lp_pnl_microusd", run.amm.lp_pnl.micro},
                    {"loss_fraction", repdetail::fixed6(run.amm.loss_fraction)}};
    }
    if (run.redirect.enabled) j["redirect_settlement"] = settlement_json(run.redirect.report);

    return j.dump(2) + "\n";
}

inline std::string events_ndjson(const ScenarioRun& run) {
    std::string out;
    for (const auto& line : run.events) {
        out += line;
        out += '\n';
    }
    return out;
}

} // namespace btcpm
