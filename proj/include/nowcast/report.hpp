#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "nowcast/apportionment.hpp"
#include "nowcast/config.hpp"
#include "nowcast/density.hpp"
#include "nowcast/events.hpp"
#include "nowcast/polls.hpp"

namespace nowcast {

namespace detail {

inline std::string fixed(double v, int digits) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

}  // namespace detail

inline nlohmann::ordered_json pooled_json(const PooledSample& pooled,
                                          const ElectionConfig& config) {
    nlohmann::ordered_json j;
    j["as_of"] = pooled.as_of.to_string();
    nlohmann::ordered_json shares;
    for (std::size_t p = 0; p < config.party_count(); ++p) {
        shares[config.parties()[p].id] = pooled.shares[p];
    }
    j["shares"] = std::move(shares);
    j["n_eff"] = pooled.n_eff;
    j["rounding_precision"] = pooled.rounding_precision;
    nlohmann::ordered_json members = nlohmann::ordered_json::array();
    for (const auto& m : pooled.member_polls) {
        members.push_back({{"agency", m.agency},
                           {"published", m.published.to_string()},
                           {"weight", m.weight}});
    }
    j["member_polls"] = std::move(members);
    return j;
}

// POE report, one event per file. Field names are frozen; evolve additively.
inline nlohmann::ordered_json poe_report_json(const PoeResult& poe, const PooledSample& pooled,
                                              const ElectionConfig& config) {
    nlohmann::ordered_json j;
    j["as_of"] = pooled.as_of.to_string();
    j["event"] = event_expr(poe.event, config);
    j["n_sim"] = poe.n_sim_total;
    j["n_degenerate"] = poe.n_degenerate;
    j["poe"] = poe.poe;
    j["mc_stderr"] = poe.mc_stderr;
    nlohmann::ordered_json pj = pooled_json(pooled, config);
    pj.erase("as_of");
    j["pooled"] = std::move(pj);
    return j;
}

// Share column reported alongside a POE time series: the party's pooled
// share before redistribution for threshold and rank events, the coalition's
// redistributed pooled share for majority events (surviving members only).
inline double event_pooled_share(const EventQuery& event, const PooledSample& pooled,
                                 const ElectionRules& rules) {
    if (const auto* t = std::get_if<ThresholdPassEvent>(&event)) {
        return pooled.shares[t->party];
    }
    if (const auto* r = std::get_if<RankEvent>(&event)) {
        return pooled.shares[r->party];
    }
    const auto& m = std::get<MajorityEvent>(event);
    try {
        auto [surviving, redistributed] = apply_threshold(pooled.shares, rules);
        double joint = 0.0;
        for (std::size_t p : m.coalition) joint += redistributed[p];
        return joint;
    } catch (const DegenerateDrawError&) {
        return 0.0;
    }
}

inline std::string series_csv_header() {
    return "as_of,event,poe,mc_stderr,pooled_share,n_eff,skewed_poe";
}

inline std::string series_csv_row(const PoeResult& poe, const PooledSample& pooled,
                                  const ElectionConfig& config, const ElectionRules& rules) {
    std::string row = pooled.as_of.to_string();
    row += ',';
    row += event_expr(poe.event, config);
    row += ',';
    row += detail::fixed(poe.poe, 6);
    row += ',';
    row += detail::fixed(poe.mc_stderr, 6);
    row += ',';
    row += detail::fixed(event_pooled_share(poe.event, pooled, rules), 6);
    row += ',';
    row += detail::fixed(pooled.n_eff, 3);
    row += ',';
    row += detail::fixed(skew_axis(poe.poe), 6);
    return row;
}

// Density grid export: `x,density,in_event`.
inline std::string density_csv(const DensitySummary& summary) {
    std::string out = "x,density,in_event\n";
    for (std::size_t g = 0; g < summary.grid_x.size(); ++g) {
        out += detail::fixed(summary.grid_x[g], 6);
        out += ',';
        out += detail::fixed(summary.grid_density[g], 6);
        out += ',';
        out += summary.grid_in_event[g] ? '1' : '0';
        out += '\n';
    }
    return out;
}

// Raw draw dump: `sim_index,<party ids>`, six fractional digits.
inline std::string draws_csv(const std::vector<ShareDraw>& draws,
                             const ElectionConfig& config) {
    std::string out = "sim_index";
    for (const auto& party : config.parties()) {
        out += ',';
        out += party.id;
    }
    out += '\n';
    for (std::size_t i = 0; i < draws.size(); ++i) {
        out += std::to_string(i);
        for (double s : draws[i]) {
            out += ',';
            out += detail::fixed(s, 6);
        }
        out += '\n';
    }
    return out;
}

}  // namespace nowcast
