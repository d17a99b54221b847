// Command-line front end: poll pooling, Monte Carlo event probabilities and
// density exports, with a batch mode over every poll publication date.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nowcast/nowcast.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNoData = 2;
constexpr int kExitEstimation = 3;

struct Options {
    std::string config_path;
    std::string polls_path;
    std::vector<std::string> events;
    std::string as_of;
    bool series = false;
    int n_sim = 10000;
    std::uint64_t seed = 0;
    int threads = 1;
    std::optional<int> window_days;
    std::optional<double> rho;
    std::string out_dir = ".";
    std::vector<std::string> formats{"json"};
};

nowcast::ElectionConfig load_config(const Options& opt) {
    std::ifstream in(opt.config_path);
    if (!in) throw nowcast::ConfigError("cannot open config file '" + opt.config_path + "'");
    auto config = nowcast::ElectionConfig::load(in);
    if (opt.window_days) config.pooling().window_days = *opt.window_days;
    if (opt.rho) config.pooling().rho = *opt.rho;
    config.pooling().validate();
    return config;
}

std::vector<nowcast::Poll> load_polls(const Options& opt, const nowcast::ElectionConfig& config) {
    std::ifstream in(opt.polls_path);
    if (!in) throw nowcast::ConfigError("cannot open polls file '" + opt.polls_path + "'");
    return nowcast::parse_polls(in, config);
}

// Evaluation dates: --as-of, or every distinct publication date with
// --series, or the latest publication date by default.
std::vector<nowcast::Date> evaluation_dates(const Options& opt,
                                            const std::vector<nowcast::Poll>& polls) {
    if (!opt.as_of.empty()) return {nowcast::Date::parse(opt.as_of)};
    if (polls.empty()) throw nowcast::NoDataError("no polls ingested");
    if (opt.series) {
        std::set<nowcast::Date> dates;
        for (const auto& poll : polls) dates.insert(poll.published);
        return {dates.begin(), dates.end()};
    }
    return {polls.front().published};  // parse_polls sorts newest first
}

nowcast::PooledSample pool_at(const std::vector<nowcast::Poll>& polls,
                              const nowcast::ElectionConfig& config, nowcast::Date as_of) {
    auto selected = nowcast::select_window(polls, as_of, config.pooling());
    return nowcast::pool(selected, config.pooling(), as_of);
}

std::string sanitize(std::string label) {
    for (char& c : label) {
        if (c == ':') c = '_';
        if (c == '+') c = '-';
    }
    return label;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw nowcast::Error("cannot write '" + path.string() + "'");
    out << content;
}

bool has_format(const Options& opt, const std::string& fmt) {
    return std::find(opt.formats.begin(), opt.formats.end(), fmt) != opt.formats.end();
}

int cmd_pool(const Options& opt) {
    auto config = load_config(opt);
    auto polls = load_polls(opt, config);
    auto dates = evaluation_dates(opt, polls);
    auto pooled = pool_at(polls, config, dates.front());
    std::cout << nowcast::pooled_json(pooled, config).dump(2) << "\n";
    return 0;
}

int cmd_poe(const Options& opt) {
    auto config = load_config(opt);
    auto rules = nowcast::ElectionRules::from_config(config);
    auto polls = load_polls(opt, config);
    auto dates = evaluation_dates(opt, polls);

    std::vector<nowcast::EventQuery> events;
    bool need_seats = false;
    for (const auto& expr : opt.events) {
        events.push_back(nowcast::parse_event(expr, config));
        need_seats = need_seats || nowcast::needs_seats(events.back());
    }

    const auto prior = nowcast::PriorSpec::jeffreys(config.party_count());
    std::filesystem::create_directories(opt.out_dir);

    std::vector<std::string> series_rows(events.size(), nowcast::series_csv_header() + "\n");
    for (const auto date : dates) {
        auto pooled = pool_at(polls, config, date);
        auto noise = nowcast::NoiseSpec::for_precision(pooled.rounding_precision);
        nowcast::SimulationConfig sim{opt.n_sim, opt.seed, opt.threads};
        auto run = nowcast::run_simulation(pooled, rules, prior, noise, sim, need_seats);

        for (std::size_t e = 0; e < events.size(); ++e) {
            auto poe = nowcast::poe_from_run(run, events[e], rules);
            std::string label = sanitize(nowcast::event_expr(events[e], config));
            if (opt.series) {
                series_rows[e] += nowcast::series_csv_row(poe, pooled, config, rules) + "\n";
            } else {
                if (has_format(opt, "json")) {
                    auto report = nowcast::poe_report_json(poe, pooled, config);
                    write_file(std::filesystem::path(opt.out_dir) / ("poe_" + label + ".json"),
                               report.dump(2) + "\n");
                }
                if (has_format(opt, "csv")) {
                    write_file(std::filesystem::path(opt.out_dir) / ("series_" + label + ".csv"),
                               nowcast::series_csv_header() + "\n" +
                                   nowcast::series_csv_row(poe, pooled, config, rules) + "\n");
                }
                std::cout << nowcast::event_expr(events[e], config) << " poe="
                          << nowcast::detail::fixed(poe.poe, 6)
                          << " mc_stderr=" << nowcast::detail::fixed(poe.mc_stderr, 6)
                          << " n_degenerate=" << poe.n_degenerate << "\n";
            }
        }
        if (has_format(opt, "draws")) {
            write_file(std::filesystem::path(opt.out_dir) /
                           ("draws_" + date.to_string() + ".csv"),
                       nowcast::draws_csv(run.draws, config));
        }
    }
    if (opt.series) {
        for (std::size_t e = 0; e < events.size(); ++e) {
            std::string label = sanitize(nowcast::event_expr(events[e], config));
            auto path = std::filesystem::path(opt.out_dir) / ("series_" + label + ".csv");
            write_file(path, series_rows[e]);
            std::cout << "wrote " << path.string() << "\n";
        }
    }
    return 0;
}

int cmd_densities(const Options& opt) {
    auto config = load_config(opt);
    auto rules = nowcast::ElectionRules::from_config(config);
    auto polls = load_polls(opt, config);
    auto dates = evaluation_dates(opt, polls);

    std::vector<nowcast::EventQuery> events;
    for (const auto& expr : opt.events) {
        auto event = nowcast::parse_event(expr, config);
        if (std::holds_alternative<nowcast::RankEvent>(event)) {
            throw nowcast::ParseError("density export does not support rank events");
        }
        events.push_back(std::move(event));
    }

    const auto prior = nowcast::PriorSpec::jeffreys(config.party_count());
    std::filesystem::create_directories(opt.out_dir);

    for (const auto date : dates) {
        auto pooled = pool_at(polls, config, date);
        auto noise = nowcast::NoiseSpec::for_precision(pooled.rounding_precision);
        nowcast::SimulationConfig sim{opt.n_sim, opt.seed, opt.threads};
        auto run = nowcast::run_simulation(pooled, rules, prior, noise, sim, true);
        for (const auto& event : events) {
            auto summary = nowcast::density_summary(run, event, rules, config);
            std::string label = sanitize(nowcast::event_expr(event, config));
            auto path = std::filesystem::path(opt.out_dir) /
                        ("density_" + label + "_" + date.to_string() + ".csv");
            write_file(path, nowcast::density_csv(summary));
        }
    }
    return 0;
}

void add_common_flags(CLI::App* cmd, Options& opt, bool with_events) {
    cmd->add_option("--config", opt.config_path, "Election configuration (JSON)")->required();
    cmd->add_option("--polls", opt.polls_path, "Poll file (CSV or JSON)")->required();
    cmd->add_option("--window-days", opt.window_days, "Override pooling window");
    cmd->add_option("--rho", opt.rho, "Override pairwise poll correlation");
    auto* as_of = cmd->add_option("--as-of", opt.as_of, "Evaluation date (default: latest poll)");
    if (with_events) {
        cmd->add_option("--event", opt.events, "Event expression (repeatable)")
            ->required()
            ->take_all();
        cmd->add_flag("--series", opt.series, "Evaluate at every poll publication date")
            ->excludes(as_of);
        cmd->add_option("--n-sim", opt.n_sim, "Simulations per date")->check(CLI::PositiveNumber);
        cmd->add_option("--seed", opt.seed, "Monte Carlo seed");
        cmd->add_option("--threads", opt.threads, "Worker threads (0 = auto)");
        cmd->add_option("--out-dir", opt.out_dir, "Output directory");
        cmd->add_option("--format", opt.formats, "Output formats: json, csv, draws")
            ->take_all()
            ->check(CLI::IsMember({"json", "csv", "draws"}));
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Poll-based Monte Carlo now-cast of election event probabilities"};
    app.require_subcommand(1);

    Options opt;
    auto* pool_cmd = app.add_subcommand("pool", "Aggregate polls at one date");
    add_common_flags(pool_cmd, opt, false);
    auto* poe_cmd = app.add_subcommand("poe", "Estimate event probabilities");
    add_common_flags(poe_cmd, opt, true);
    auto* dens_cmd = app.add_subcommand("densities", "Export simulated-statistic densities");
    add_common_flags(dens_cmd, opt, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (pool_cmd->parsed()) return cmd_pool(opt);
        if (poe_cmd->parsed()) return cmd_poe(opt);
        return cmd_densities(opt);
    } catch (const nowcast::NoDataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoData;
    } catch (const nowcast::EstimationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEstimation;
    } catch (const nowcast::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
