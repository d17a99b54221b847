// Minimal library walkthrough: pool two polls, simulate, query one event.

#include <iostream>
#include <sstream>

#include "nowcast/nowcast.hpp"

int main() {
    std::istringstream config_json(R"({
      "parties": [
        {"id": "red"}, {"id": "blue"}, {"id": "green"},
        {"id": "others", "others": true}
      ],
      "threshold": 0.05,
      "total_seats": 99
    })");
    auto config = nowcast::ElectionConfig::load(config_json);

    std::istringstream polls_csv(
        "date,agency,n,red,blue,green,others\n"
        "2024-03-01,alpha,1200,42,38,12,8\n"
        "2024-03-03,beta,900,44,36,13,7\n");
    auto polls = nowcast::parse_polls(polls_csv, config);

    auto as_of = nowcast::Date::parse("2024-03-05");
    auto selected = nowcast::select_window(polls, as_of, config.pooling());
    auto pooled = nowcast::pool(selected, config.pooling(), as_of);
    std::cout << "pooled red share: " << pooled.shares[0]
              << " (n_eff " << pooled.n_eff << ")\n";

    auto rules = nowcast::ElectionRules::from_config(config);
    auto prior = nowcast::PriorSpec::jeffreys(config.party_count());
    auto noise = nowcast::NoiseSpec::for_precision(pooled.rounding_precision);
    nowcast::SimulationConfig sim{20000, 42, 1};
    auto run = nowcast::run_simulation(pooled, rules, prior, noise, sim);

    auto event = nowcast::parse_event("majority:red+green", config);
    auto poe = nowcast::poe_from_run(run, event, rules);
    std::cout << "P(red+green majority) = " << poe.poe
              << " +/- " << poe.mc_stderr << "\n";
    return 0;
}
