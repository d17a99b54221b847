#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "nowcast/errors.hpp"
#include "nowcast/events.hpp"

namespace nowcast {

// Density of the simulated event statistic, for ridgeline-style rendering.
// `highlighted_mass` is the event's POE computed from the per-draw
// indicators, never from integrating the grid.
struct DensitySummary {
    std::string context;
    std::vector<double> statistics;  // one value per non-degenerate draw
    std::vector<double> grid_x;      // 512 points
    std::vector<double> grid_density;
    std::vector<std::uint8_t> grid_in_event;  // grid point lies beyond the event boundary
    double highlighted_mass = 0.0;
    double bandwidth = 0.0;
};

namespace detail {

inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.size() == 1) return sorted.front();
    double pos = q * double(sorted.size() - 1);
    std::size_t lo = std::size_t(pos);
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - double(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

// Silverman's rule of thumb: 0.9 * min(sd, IQR/1.34) * m^(-1/5). When the
// IQR collapses on discrete data the spread falls back to the sd alone.
inline double silverman_bandwidth(const std::vector<double>& values) {
    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    // min == max is the robust degeneracy test; a naively accumulated
    // variance of identical values can come out as a nonzero rounding crumb
    if (sorted.front() == sorted.back()) {
        throw EstimationError("all simulated statistics are identical; no density");
    }

    const double m = double(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= m;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    double sd = std::sqrt(var / (m - 1.0));

    double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);

    double spread = std::min(sd, iqr / 1.34);
    if (spread == 0.0) spread = sd;
    return 0.9 * spread * std::pow(m, -0.2);
}

}  // namespace detail

// Per-draw statistic underlying the density: coalition seat share for
// majority events, the party's pre-redistribution vote share for threshold
// events. Rank events have no one-dimensional statistic.
inline std::vector<double> collect_statistics(const SimulationRun& run, const EventQuery& event,
                                              const ElectionRules& rules) {
    if (std::holds_alternative<RankEvent>(event)) {
        throw ValidationError("rank events have no density statistic");
    }
    std::vector<double> stats;
    stats.reserve(run.draws.size());
    for (std::size_t i = 0; i < run.draws.size(); ++i) {
        if (run.degenerate[i]) continue;
        if (const auto* t = std::get_if<ThresholdPassEvent>(&event)) {
            stats.push_back(run.draws[i][t->party]);
        } else {
            const auto& m = std::get<MajorityEvent>(event);
            long coalition_seats = 0;
            for (std::size_t p : m.coalition) coalition_seats += run.seats[i].seats[p];
            stats.push_back(double(coalition_seats) / double(rules.total_seats));
        }
    }
    return stats;
}

// Gaussian KDE of the event statistic on a 512-point grid spanning
// [min - 3h, max + 3h]. Needs at least two non-degenerate draws.
inline DensitySummary density_summary(const SimulationRun& run, const EventQuery& event,
                                      const ElectionRules& rules,
                                      const ElectionConfig& config) {
    std::vector<double> stats = collect_statistics(run, event, rules);
    if (stats.size() < 2) {
        throw EstimationError("need at least two non-degenerate draws for a density");
    }
    const double h = detail::silverman_bandwidth(stats);

    DensitySummary out;
    out.context = event_expr(event, config);
    out.bandwidth = h;

    const auto [mn, mx] = std::minmax_element(stats.begin(), stats.end());
    const double lo = *mn - 3.0 * h;
    const double hi = *mx + 3.0 * h;
    constexpr std::size_t kGrid = 512;
    const double step = (hi - lo) / double(kGrid - 1);
    const double norm = 1.0 / (double(stats.size()) * h * std::sqrt(2.0 * std::numbers::pi));

    const bool is_threshold = std::holds_alternative<ThresholdPassEvent>(event);
    const double boundary = is_threshold ? rules.threshold : 0.5;

    out.grid_x.resize(kGrid);
    out.grid_density.resize(kGrid);
    out.grid_in_event.resize(kGrid);
    for (std::size_t g = 0; g < kGrid; ++g) {
        const double x = lo + step * double(g);
        double density = 0.0;
        for (double v : stats) {
            const double z = (x - v) / h;
            density += std::exp(-0.5 * z * z);
        }
        out.grid_x[g] = x;
        out.grid_density[g] = density * norm;
        // threshold events survive at the boundary, majorities are strict
        out.grid_in_event[g] = is_threshold ? (x >= boundary) : (x > boundary);
    }

    PoeResult poe = poe_from_run(run, event, rules);
    out.highlighted_mass = poe.poe;
    out.statistics = std::move(stats);
    return out;
}

// Count the modes of a density grid. Seat shares live on a lattice of
// 1/total_seats, coarser than the Silverman bandwidth, so a finite-sample
// KDE carries comb ripples (about 1e-5 of the peak in the bulk, up to 1e-2
// in sparse tails) on top of any real structure. A bare neighbour
// comparison counts every ripple, so each strict local maximum is kept
// only if its topographic prominence (drop to the key saddle toward
// higher ground, scipy-style) reaches min_prominence of the global peak.
// Real secondary modes clear that by orders of magnitude. Pass 0 for a
// strict count.
inline int count_local_maxima(const std::vector<double>& density,
                              double min_prominence = 0.01) {
    const std::size_t n = density.size();
    double peak = 0.0;
    for (double d : density) peak = std::max(peak, d);
    const double needed = peak * min_prominence;
    int count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool left_ok = (i == 0) || density[i] > density[i - 1];
        const bool right_ok = (i + 1 == n) || density[i] > density[i + 1];
        if (!left_ok || !right_ok) continue;
        double bases[2] = {density[i], density[i]};
        for (int dir = 0; dir < 2; ++dir) {
            double low = density[i];
            bool higher = false;
            for (std::size_t j = i; dir == 0 ? j-- > 0 : ++j < n;) {
                if (density[j] > density[i]) {
                    higher = true;
                    break;
                }
                low = std::min(low, density[j]);
            }
            bases[dir] = higher ? low : std::min(bases[dir], low);
        }
        // saddle toward higher ground on either side caps the prominence;
        // for the global maximum both walks run to the grid edge
        if (density[i] - std::max(bases[0], bases[1]) >= needed) ++count;
    }
    return count;
}

}  // namespace nowcast
