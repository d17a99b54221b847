#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "nowcast/config.hpp"
#include "nowcast/errors.hpp"
#include "nowcast/rng.hpp"

namespace nowcast {

// Seat-allocation rules for one election. `eligible` marks parties that can
// win seats; the "others" pseudo-party never does. `tie_rank` orders parties
// lexicographically by id for the deterministic tie-break mode.
struct ElectionRules {
    double threshold = 0.05;
    int total_seats = 598;
    std::vector<bool> eligible;
    bool deterministic_ties = false;
    std::vector<int> tie_rank;

    static ElectionRules from_config(const ElectionConfig& config) {
        ElectionRules rules;
        rules.threshold = config.threshold();
        rules.total_seats = config.total_seats();
        rules.eligible.assign(config.party_count(), true);
        rules.eligible[config.others_index()] = false;

        std::vector<std::size_t> order(config.party_count());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return config.parties()[a].id < config.parties()[b].id;
        });
        rules.tie_rank.assign(config.party_count(), 0);
        for (std::size_t r = 0; r < order.size(); ++r) rules.tie_rank[order[r]] = int(r);
        return rules;
    }
};

// Threshold outcome plus final seat counts for one simulated election.
// Seats are zero for everyone outside `surviving`; redistributed shares are
// normalized over the survivors and zero elsewhere.
struct SeatResult {
    std::vector<bool> surviving;
    std::vector<double> redistributed;
    std::vector<int> seats;
};

// Applies the entry threshold: eligible parties at or above it survive and
// the surviving shares are renormalized. Throws DegenerateDrawError when no
// party survives.
inline std::pair<std::vector<bool>, std::vector<double>> apply_threshold(
    std::span<const double> shares, const ElectionRules& rules) {
    std::vector<bool> surviving(shares.size(), false);
    std::vector<double> redistributed(shares.size(), 0.0);
    double surviving_mass = 0.0;
    for (std::size_t p = 0; p < shares.size(); ++p) {
        if (rules.eligible[p] && shares[p] >= rules.threshold) {
            surviving[p] = true;
            surviving_mass += shares[p];
        }
    }
    if (surviving_mass <= 0.0) {
        throw DegenerateDrawError("no party passes the threshold");
    }
    for (std::size_t p = 0; p < shares.size(); ++p) {
        if (surviving[p]) redistributed[p] = shares[p] / surviving_mass;
    }
    return {std::move(surviving), std::move(redistributed)};
}

// Sainte-Lague/Schepers highest-averages apportionment with divisors
// 1, 3, 5, ... Each seat goes to the party maximizing share / (2*seats + 1);
// exact ties are broken by lot from the supplied stream (or by lexicographic
// party id when rules.deterministic_ties is set).
inline std::vector<int> sainte_lague(std::span<const double> redistributed, int total_seats,
                                     RngStream& rng, const ElectionRules& rules) {
    const std::size_t n = redistributed.size();
    std::vector<int> seats(n, 0);
    std::vector<double> quotient(n, 0.0);
    for (std::size_t p = 0; p < n; ++p) quotient[p] = redistributed[p];

    std::vector<std::size_t> tied;
    for (int s = 0; s < total_seats; ++s) {
        double best = -1.0;
        for (std::size_t p = 0; p < n; ++p) {
            if (quotient[p] > best) best = quotient[p];
        }
        tied.clear();
        for (std::size_t p = 0; p < n; ++p) {
            if (quotient[p] == best) tied.push_back(p);
        }
        std::size_t winner = tied.front();
        if (tied.size() > 1) {
            if (rules.deterministic_ties) {
                for (std::size_t p : tied) {
                    if (rules.tie_rank[p] < rules.tie_rank[winner]) winner = p;
                }
            } else {
                winner = tied[rng.next_below(tied.size())];
            }
        }
        seats[winner] += 1;
        quotient[winner] = redistributed[winner] / double(2 * seats[winner] + 1);
    }
    return seats;
}

// Threshold filtering followed by seat apportionment.
inline SeatResult allocate(std::span<const double> shares, const ElectionRules& rules,
                           RngStream& rng) {
    auto [surviving, redistributed] = apply_threshold(shares, rules);
    SeatResult result;
    result.surviving = std::move(surviving);
    result.redistributed = std::move(redistributed);
    result.seats = sainte_lague(result.redistributed, rules.total_seats, rng, rules);
    return result;
}

}  // namespace nowcast
