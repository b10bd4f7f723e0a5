// btcpm command line: validate and run scenario configs, compare mechanisms,
// list committed presets, and replay the worked examples as a checked suite.
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration error.

#include "btcpm/config.hpp"
#include "btcpm/report.hpp"
#include "btcpm/scenario.hpp"

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace btcpm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

bool log_verbose() {
    const char* v = std::getenv("BTCPM_LOG");
    return v != nullptr && std::string(v) != "" && std::string(v) != "0";
}

std::string preset_dir() {
    if (const char* v = std::getenv("BTCPM_PRESET_DIR"); v != nullptr && *v != '\0') return v;
    return BTCPM_PRESET_DIR;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

void print_summary(const ScenarioRun& run, const std::string& format) {
    if (format == "json") {
        std::cout << report_json(run);
        return;
    }
    std::cout << report_csv(run);
}

int run_config(const ScenarioConfig& cfg, const std::string& out_dir, const std::string& format) {
    ScenarioRun run = run_scenario(cfg);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / "report.csv", report_csv(run));
        write_file(fs::path(out_dir) / "report.json", report_json(run));
        write_file(fs::path(out_dir) / "events.ndjson", events_ndjson(run));
    }
    if (log_verbose())
        for (const auto& line : run.events) std::cerr << line << '\n';
    print_summary(run, format);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// paper-examples: every worked number from the source material, recomputed
// ---------------------------------------------------------------------------

struct ExampleCheck {
    std::string name;
    std::string expected;
    std::string got;
    bool pass = false;
};

class ExampleSuite {
public:
    void check(const std::string& name, const std::string& expected, const std::string& got) {
        rows_.push_back({name, expected, got, expected == got});
    }
    void check_usd(const std::string& name, int64_t expected_micro, UsdAmount got) {
        check(name, format_usd(expected_micro), format_usd(got.micro));
    }
    void check_sat(const std::string& name, int64_t expected_sat, BtcAmount got) {
        char e[48], g[48];
        std::snprintf(e, sizeof e, "%" PRId64 " sat", expected_sat);
        std::snprintf(g, sizeof g, "%" PRId64 " sat", got.sat);
        check(name, e, g);
    }
    void check_true(const std::string& name, bool got) {
        check(name, "true", got ? "true" : "false");
    }

    int report() const {
        size_t width = 0;
        for (const auto& r : rows_) width = std::max(width, r.name.size());
        int failures = 0;
        for (const auto& r : rows_) {
            std::printf("%s  %-*s  expected %-22s  got %s\n", r.pass ? "PASS" : "FAIL",
                        static_cast<int>(width), r.name.c_str(), r.expected.c_str(),
                        r.got.c_str());
            if (!r.pass) ++failures;
        }
        std::printf("%zu checks, %d failed\n", rows_.size(), failures);
        return failures == 0 ? kExitOk : kExitRuntime;
    }

private:
    static std::string format_usd(int64_t micro) {
        char buf[48];
        bool neg = micro < 0;
        int64_t abs = neg ? -micro : micro;
        std::snprintf(buf, sizeof buf, "%s$%" PRId64 ".%06" PRId64, neg ? "-" : "",
                      abs / kMicroPerUsd, abs % kMicroPerUsd);
        return buf;
    }

    std::vector<ExampleCheck> rows_;
};

int cmd_paper_examples() {
    ExampleSuite suite;
    const BtcUsdRate rate100k = rate_usd(100'000);

    // --- currency conversion ------------------------------------------------
    suite.check_sat("$0.50 at 100,000 USD/BTC", 500, usd_to_btc(UsdAmount{500'000}, rate100k));
    suite.check_sat("$0.51 at 100,000 USD/BTC", 510, usd_to_btc(UsdAmount{510'000}, rate100k));
    suite.check_usd("1 BTC at 115,910 USD/BTC", 115'910'000'000,
                    btc_to_usd(BtcAmount{kSatPerBtc}, rate_usd(115'910)));

    // --- complete sets ------------------------------------------------------
    {
        Venue v = Venue::usd("v");
        suite.check("YES+NO pays $1 at resolution, any winner", "1000000 / 1000000",
                    std::to_string(v.payout(Outcome::Yes, {1, 1})) + " / " +
                        std::to_string(v.payout(Outcome::No, {1, 1})));
        suite.check_usd("104,319 NO shares pay out", 104'319'000'000,
                        UsdAmount{v.payout(Outcome::No, {0, 104'319})});
    }

    // --- quote mirroring ----------------------------------------------------
    {
        auto q = mirror_quotes(UsdAmount{500'000}, UsdAmount{510'000}, UsdAmount{0}, BtcAmount{0},
                               rate100k, TickSize{1});
        suite.check("mirror ($0.50, $0.51) at 100k", "(500, 510) sat",
                    q ? "(" + std::to_string(q->bid_d.sat) + ", " + std::to_string(q->ask_d.sat) +
                            ") sat"
                      : "suppressed");
    }

    // --- hedged complete-set arbitrage --------------------------------------
    suite.check_usd("stablecoin hedge 0.51 + 0.48 locks", 10'000,
                    check_arbitrage(UsdAmount{510'000}, BtcAmount{480}, rate100k, UsdAmount{0})
                        .edge);
    {
        ArbitrageCheck c = check_arbitrage(UsdAmount{510'000}, BtcAmount{480}, rate100k,
                                           UsdAmount{2'000});
        suite.check_usd("put-hedged total cost 0.51+0.48+0.002", 992'000,
                        UsdAmount{kMicroPerUsd} - c.edge);
        suite.check_usd("put-hedged edge (0.992 < 1.00)", 8'000, c.edge);
    }
    {
        PutContract put{rate100k, BtcAmount{480}, BtcAmount{2}, 0};
        suite.check_usd("put at spot = strike pays", 0, put_payoff(put, rate100k));
        suite.check_usd("put expires worthless at 120k", 0, put_payoff(put, rate_usd(120'000)));
    }
    {
        // slippage risk: the source book moves past the edge before the hedge
        Venue source = Venue::usd("source", TickSize{5'000});
        source.place_limit(Outcome::Yes, Side::Ask, 525'000, 10, 1);
        Venue downstream = Venue::usd("downstream");
        HedgeState state;
        state = on_downstream_fill(state, Fill{1, Side::Ask, Outcome::No, 480'000, 1, 0, 2, 3},
                                   downstream, source, rate100k, CrossMmConfig{}, 2);
        suite.check_true("slippage past the edge goes negative", state.locked_edge.micro < 0);
    }

    // --- automated market making --------------------------------------------
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.9f", lmsr_cost({1.0, 0.0, 0.0}));
        suite.check("LMSR worst-case subsidy b*ln2 (b=1)", "0.693147181", buf);
        suite.check_true("LMSR boundary cost diverges (>20b)",
                         lmsr_move_cost(0.5, 1.0 - 1e-9, 1.0) > 20.0);
    }
    {
        auto [pool, lp] = seed_pool(UsdAmount{100 * kMicroPerUsd}, Prior{1, 3},
                                    PoolMode::Standard);
        suite.check("CPMM $100 at prior 1/3: reserves", "(100, 50)",
                    "(" + std::to_string(pool.yes_reserve / kMicroPerShare) + ", " +
                        std::to_string(pool.no_reserve / kMicroPerShare) + ")");
        suite.check("CPMM leftover implicit bet", "50 NO",
                    std::to_string(lp.leftover_micro / kMicroPerShare) + " " +
                        to_string(lp.leftover_outcome));
        suite.check_true("implied probability 50/(100+50) = 1/3",
                         implied_probability(pool) == 1.0L / 3.0L);
    }
    {
        auto [pool, lp] = seed_pool(UsdAmount{100 * kMicroPerUsd}, Prior{1, 3},
                                    PoolMode::Weighted);
        suite.check("weighted CPMM keeps the full subsidy", "(100, 100), leftover 0",
                    "(" + std::to_string(pool.yes_reserve / kMicroPerShare) + ", " +
                        std::to_string(pool.no_reserve / kMicroPerShare) + "), leftover " +
                        std::to_string(lp.leftover_micro));
        suite.check_true("weighted pool implies the 1/3 prior",
                         implied_probability(pool) == 1.0L / 3.0L);
    }
    {
        auto [seeded, lp] = seed_pool(UsdAmount{100 * kMicroPerUsd}, Prior{1, 2},
                                      PoolMode::Standard);
        BetResult drift = bet(seeded, UsdAmount{900 * kMicroPerUsd}, Outcome::Yes);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2Lf%%",
                      permanent_loss(drift.pool, lp.initial_endowment, Outcome::Yes) * 100.0L);
        suite.check("pool drifted to (10,1000): YES resolution loss", "90.00%", buf);
        suite.check_true("drift consistency 10 x 1000 = 100 x 100",
                         static_cast<__int128>(drift.pool.yes_reserve) * drift.pool.no_reserve ==
                             static_cast<__int128>(seeded.yes_reserve) * seeded.no_reserve);
    }

    // --- lending ------------------------------------------------------------
    const LendingParams params{};
    suite.check_usd("max borrow on 1 BTC at 115,910 (72% LTV)", 83'455'200'000,
                    max_borrow(BtcAmount{kSatPerBtc}, rate_usd(115'910), params));
    {
        double boundary = 1.0 - 0.72 / 0.82;
        suite.check_true("liquidation boundary inside 12-13%",
                         boundary > 0.12 && boundary < 0.13);
    }
    {
        LoanPosition pos = open_loan(BtcAmount{kSatPerBtc},
                                     max_borrow(BtcAmount{kSatPerBtc}, rate100k, params),
                                     rate100k, params);
        BtcUsdRate down{85'000'000'000};
        LiquidationResult liq = liquidate(pos, down, params);
        suite.check_true("liquidation returns less than 1 BTC",
                         liq.position.collateral.sat < kSatPerBtc &&
                             liq.position.collateral.sat > 0);
    }

    // --- redirect ------------------------------------------------------------
    const LendingParams no_interest{7'200, 8'200, 500, 0};
    {
        RedirectPosition pos = open_position(BtcAmount{kSatPerBtc}, 7'200, rate_usd(115'910),
                                             no_interest, UsdAmount{800'000}, Outcome::No);
        suite.check("redirect borrow buys NO shares at $0.80", "104319",
                    std::to_string(pos.shares));
        auto [closed, rep] = settle(pos, Outcome::No, rate_usd(115'910), no_interest,
                                    ShortfallPolicy::InjectExternal);
        suite.check_usd("winning payout", 104'319'000'000, rep.proceeds_usd);
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.3f BTC", rep.user_total_btc.btc());
        suite.check("total returned (collateral + 0.18 profit)", "1.180 BTC", buf);
        (void)closed;
    }
    {
        RedirectPosition pos = open_position(BtcAmount{kSatPerBtc}, 7'200, rate_usd(115'910),
                                             no_interest, UsdAmount{800'000}, Outcome::No);
        auto [closed, rep] = settle(pos, Outcome::Yes, rate_usd(115'910), no_interest,
                                    ShortfallPolicy::InjectExternal);
        suite.check_sat("losing bet, external repay reclaims", kSatPerBtc, rep.user_total_btc);
        (void)closed;
    }

    // --- opportunity-cost fair value -----------------------------------------
    suite.check_usd("80% belief, 4 years at 4%", 640'000,
                    fair_value_adjust(UsdAmount{800'000}, 400, 4.0));
    suite.check_usd("BTC holder, 1 year at 10%", 700'000,
                    fair_value_adjust(UsdAmount{800'000}, 1'000, 1.0));

    return suite.report();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"BTC-denominated prediction-market liquidity simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir, format = "csv", mechanisms;
    int64_t seed_override = -1;

    auto* run = app.add_subcommand("run", "run a scenario config and write reports");
    run->add_option("--config", config_path, "scenario config file")->required();
    run->add_option("--out", out_dir, "output directory for report.csv/report.json/events.ndjson");
    run->add_option("--format", format, "summary format printed to stdout")
        ->check(CLI::IsMember({"csv", "json"}));
    run->add_option("--seed-override", seed_override, "replace the price-path seed");

    auto* compare = app.add_subcommand("compare", "run with a subset of mechanisms enabled");
    compare->add_option("--config", config_path, "scenario config file")->required();
    compare->add_option("--mechanisms", mechanisms,
                        "comma-separated subset of crossmm,amm,redirect")->required();
    compare->add_option("--out", out_dir, "output directory");
    compare->add_option("--format", format, "summary format printed to stdout")
        ->check(CLI::IsMember({"csv", "json"}));
    compare->add_option("--seed-override", seed_override, "replace the price-path seed");

    auto* validate_cmd = app.add_subcommand("validate", "parse and validate a config");
    validate_cmd->add_option("--config", config_path, "scenario config file")->required();

    app.add_subcommand("paper-examples", "recompute every worked example and check it");
    app.add_subcommand("list-presets", "list committed scenario presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;  // bad flags are configuration errors
    }

    try {
        if (app.got_subcommand("validate")) {
            load_scenario_config(config_path);
            std::cout << "ok\n";
            return kExitOk;
        }
        if (app.got_subcommand("run")) {
            ScenarioConfig cfg = load_scenario_config(config_path);
            if (seed_override >= 0) cfg.price_path.seed = static_cast<uint64_t>(seed_override);
            return run_config(cfg, out_dir, format);
        }
        if (app.got_subcommand("compare")) {
            ScenarioConfig cfg = load_scenario_config(config_path);
            if (seed_override >= 0) cfg.price_path.seed = static_cast<uint64_t>(seed_override);
            bool keep_crossmm = mechanisms.find("crossmm") != std::string::npos;
            bool keep_amm = mechanisms.find("amm") != std::string::npos;
            bool keep_redirect = mechanisms.find("redirect") != std::string::npos;
            cfg.crossmm.enabled = cfg.crossmm.enabled && keep_crossmm;
            cfg.amm.enabled = cfg.amm.enabled && keep_amm;
            cfg.redirect.enabled = cfg.redirect.enabled && keep_redirect;
            return run_config(cfg, out_dir, format);
        }
        if (app.got_subcommand("paper-examples")) return cmd_paper_examples();
        if (app.got_subcommand("list-presets")) {
            std::vector<std::string> names;
            for (const auto& entry : fs::directory_iterator(preset_dir()))
                if (entry.path().extension() == ".json") names.push_back(entry.path().stem());
            std::sort(names.begin(), names.end());
            for (const auto& n : names) std::cout << n << '\n';
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitRuntime;
}
