#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nowcast/apportionment.hpp"
#include "nowcast/config.hpp"
#include "nowcast/errors.hpp"
#include "nowcast/posterior.hpp"

namespace nowcast {

// Party's pre-redistribution share reaches the entry threshold.
struct ThresholdPassEvent {
    std::size_t party;
};

// Party holds rank k by seats among the parties in parliament; ties share
// the better rank.
struct RankEvent {
    std::size_t party;
    int k;
};

// Coalition holds strictly more than half of all seats.
struct MajorityEvent {
    std::vector<std::size_t> coalition;  // distinct party indices, input order
};

using EventQuery = std::variant<ThresholdPassEvent, RankEvent, MajorityEvent>;

// Parses `threshold:<party>` | `rank:<party>:<k>` | `majority:<party>(+<party>)*`.
inline EventQuery parse_event(std::string_view expr, const ElectionConfig& config) {
    auto resolve = [&](std::string_view token) -> std::size_t {
        auto idx = config.index_of(token);
        if (!idx) throw ParseError("unknown party '" + std::string(token) + "'");
        return *idx;
    };

    auto colon = expr.find(':');
    if (colon == std::string_view::npos || colon + 1 >= expr.size()) {
        throw ParseError("malformed event '" + std::string(expr) +
                         "' (expected threshold:<party>, rank:<party>:<k> or "
                         "majority:<party>+<party>...)");
    }
    std::string_view kind = expr.substr(0, colon);
    std::string_view rest = expr.substr(colon + 1);

    if (kind == "threshold") {
        return ThresholdPassEvent{resolve(rest)};
    }
    if (kind == "rank") {
        auto second = rest.find(':');
        if (second == std::string_view::npos || second + 1 >= rest.size()) {
            throw ParseError("malformed rank event '" + std::string(expr) + "'");
        }
        std::size_t party = resolve(rest.substr(0, second));
        std::string_view k_token = rest.substr(second + 1);
        int k = 0;
        for (char c : k_token) {
            if (c < '0' || c > '9') {
                throw ParseError("invalid rank '" + std::string(k_token) + "'");
            }
            k = k * 10 + (c - '0');
        }
        if (k < 1) throw ParseError("rank must be at least 1");
        return RankEvent{party, k};
    }
    if (kind == "majority") {
        MajorityEvent ev;
        std::size_t pos = 0;
        while (pos <= rest.size()) {
            auto plus = rest.find('+', pos);
            std::string_view token =
                rest.substr(pos, plus == std::string_view::npos ? plus : plus - pos);
            if (token.empty()) {
                throw ParseError("malformed coalition in '" + std::string(expr) + "'");
            }
            std::size_t idx = resolve(token);
            if (std::find(ev.coalition.begin(), ev.coalition.end(), idx) !=
                ev.coalition.end()) {
                throw ParseError("duplicate coalition member '" + std::string(token) + "'");
            }
            ev.coalition.push_back(idx);
            if (plus == std::string_view::npos) break;
            pos = plus + 1;
        }
        return ev;
    }
    throw ParseError("unknown event type '" + std::string(kind) + "'");
}

// Canonical expression string for reports and file names.
inline std::string event_expr(const EventQuery& event, const ElectionConfig& config) {
    const auto& parties = config.parties();
    if (const auto* t = std::get_if<ThresholdPassEvent>(&event)) {
        return "threshold:" + parties[t->party].id;
    }
    if (const auto* r = std::get_if<RankEvent>(&event)) {
        return "rank:" + parties[r->party].id + ":" + std::to_string(r->k);
    }
    const auto& m = std::get<MajorityEvent>(event);
    std::string out = "majority:";
    for (std::size_t i = 0; i < m.coalition.size(); ++i) {
        if (i > 0) out += '+';
        out += parties[m.coalition[i]].id;
    }
    return out;
}

inline bool needs_seats(const EventQuery& event) {
    return !std::holds_alternative<ThresholdPassEvent>(event);
}

// Evaluates one event on one non-degenerate simulated election.
inline bool evaluate_event(const EventQuery& event, const ShareDraw& draw,
                           const SeatResult& seats, const ElectionRules& rules) {
    if (const auto* t = std::get_if<ThresholdPassEvent>(&event)) {
        return draw[t->party] >= rules.threshold;
    }
    if (const auto* r = std::get_if<RankEvent>(&event)) {
        if (!seats.surviving[r->party]) return false;
        int ahead = 0;
        int own = seats.seats[r->party];
        for (std::size_t p = 0; p < seats.seats.size(); ++p) {
            if (seats.surviving[p] && seats.seats[p] > own) ++ahead;
        }
        return ahead == r->k - 1;
    }
    const auto& m = std::get<MajorityEvent>(event);
    long coalition_seats = 0;
    for (std::size_t p : m.coalition) coalition_seats += seats.seats[p];
    return 2 * coalition_seats > rules.total_seats;  // strict majority
}

// All per-draw state of one Monte Carlo run. Seat results are only computed
// when some requested event needs them; degenerate draws keep empty slots.
struct SimulationRun {
    std::vector<ShareDraw> draws;
    std::vector<SeatResult> seats;   // empty when has_seats is false
    std::vector<std::uint8_t> degenerate;
    int n_degenerate = 0;
    bool has_seats = false;
    SimulationConfig sim;
};

// Monte Carlo engine over an arbitrary share sampler. `sampler(i, rng)` must
// return one ShareDraw for simulation index i using only the given stream,
// which keeps the run reproducible under any thread count.
template <typename Sampler>
SimulationRun run_simulation_with(Sampler&& sampler, const ElectionRules& rules,
                                  const SimulationConfig& sim, bool need_seats) {
    sim.validate();
    SimulationRun run;
    run.sim = sim;
    run.has_seats = need_seats;
    run.draws.resize(std::size_t(sim.n_sim));
    run.degenerate.assign(std::size_t(sim.n_sim), 0);
    if (need_seats) run.seats.resize(std::size_t(sim.n_sim));

    detail::for_each_index(sim.n_sim, sim.threads, [&](int i) {
        RngStream draw_rng(sim.seed, std::uint64_t(i), RngStream::kPhaseDraw);
        run.draws[std::size_t(i)] = sampler(std::uint64_t(i), draw_rng);
        try {
            RngStream lot_rng(sim.seed, std::uint64_t(i), RngStream::kPhaseAllocate);
            if (need_seats) {
                run.seats[std::size_t(i)] = allocate(run.draws[std::size_t(i)], rules, lot_rng);
            } else {
                apply_threshold(run.draws[std::size_t(i)], rules);
            }
        } catch (const DegenerateDrawError&) {
            run.degenerate[std::size_t(i)] = 1;
        }
    });
    for (std::uint8_t d : run.degenerate) run.n_degenerate += d;
    return run;
}

// The standard pipeline: rounding noise -> posterior -> Dirichlet draw,
// then threshold and apportionment per draw.
inline SimulationRun run_simulation(const PooledSample& pooled, const ElectionRules& rules,
                                    const PriorSpec& prior, const NoiseSpec& noise,
                                    const SimulationConfig& sim, bool need_seats = true) {
    noise.validate();
    prior.validate();
    return run_simulation_with(
        [&](std::uint64_t, RngStream& rng) {
            auto adjusted = adjust_rounding(pooled.shares, noise, rng);
            auto posterior = build_posterior(pooled, adjusted, prior);
            return draw_shares(posterior, rng);
        },
        rules, sim, need_seats);
}

// Monte Carlo probability of one event with diagnostics.
struct PoeResult {
    EventQuery event;
    int n_sim_total = 0;
    int n_degenerate = 0;
    int n_event = 0;
    double poe = 0.0;
    double mc_stderr = 0.0;
    std::vector<std::uint8_t> indicators;  // per draw; 0 for degenerate draws
};

inline PoeResult poe_from_run(const SimulationRun& run, const EventQuery& event,
                              const ElectionRules& rules) {
    if (needs_seats(event) && !run.has_seats) {
        throw EstimationError("simulation run lacks seat results for this event");
    }
    PoeResult result;
    result.event = event;
    result.n_sim_total = int(run.draws.size());
    result.n_degenerate = run.n_degenerate;
    result.indicators.assign(run.draws.size(), 0);

    const int valid = result.n_sim_total - result.n_degenerate;
    if (valid == 0) {
        throw EstimationError("every simulated election was degenerate");
    }
    static const SeatResult no_seats{};
    for (std::size_t i = 0; i < run.draws.size(); ++i) {
        if (run.degenerate[i]) continue;
        const SeatResult& seats = run.has_seats ? run.seats[i] : no_seats;
        if (evaluate_event(event, run.draws[i], seats, rules)) {
            result.indicators[i] = 1;
            ++result.n_event;
        }
    }
    result.poe = double(result.n_event) / double(valid);
    result.mc_stderr = std::sqrt(result.poe * (1.0 - result.poe) / double(valid));
    return result;
}

inline PoeResult estimate_poe(const EventQuery& event, const PooledSample& pooled,
                              const ElectionRules& rules, const PriorSpec& prior,
                              const NoiseSpec& noise, const SimulationConfig& sim) {
    SimulationRun run = run_simulation(pooled, rules, prior, noise, sim, needs_seats(event));
    return poe_from_run(run, event, rules);
}

// Axis transform for probability plots: a rescaled logistic that stretches
// the region around 50% and compresses the extremes. Strictly increasing
// bijection of [0,1] with maximum slope at 1/2.
inline double skew_axis(double p) {
    if (p < 0.0 || p > 1.0) throw ValidationError("probability outside [0, 1]");
    static constexpr double scale = 0.15;
    auto logistic = [](double x) { return 1.0 / (1.0 + std::exp(-(x - 0.5) / scale)); };
    const double lo = logistic(0.0);
    const double hi = logistic(1.0);
    return (logistic(p) - lo) / (hi - lo);
}

}  // namespace nowcast
