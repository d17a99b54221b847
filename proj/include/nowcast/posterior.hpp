#pragma once

#include <cstdint>
#include <span>
#include <thread>
#include <vector>

#include "nowcast/errors.hpp"
#include "nowcast/polls.hpp"
#include "nowcast/rng.hpp"

namespace nowcast {

// Dirichlet prior concentration per party. The uninformative default puts
// 1/2 on every party.
struct PriorSpec {
    std::vector<double> alpha;

    static PriorSpec jeffreys(std::size_t n_parties) {
        return PriorSpec{std::vector<double>(n_parties, 0.5)};
    }

    void validate() const {
        if (alpha.empty()) throw ValidationError("prior has no parties");
        for (double a : alpha) {
            if (!(a > 0.0)) throw ValidationError("prior alpha must be positive");
        }
    }
};

// Dirichlet posterior parameters: share * n_eff + alpha per party.
struct PosteriorSpec {
    std::vector<double> params;
};

// Half-width of the uniform rounding correction. Published shares rounded to
// `precision` steps get gamma = precision / 2.
struct NoiseSpec {
    double gamma = 0.005;

    static NoiseSpec for_precision(double rounding_precision) {
        return NoiseSpec{rounding_precision / 2.0};
    }

    void validate() const {
        if (gamma < 0.0 || gamma > 0.01) throw ValidationError("gamma must lie in [0, 0.01]");
    }
};

struct SimulationConfig {
    int n_sim = 10000;
    std::uint64_t seed = 0;
    int threads = 1;  // 0 = hardware concurrency; results do not depend on this

    void validate() const {
        if (n_sim < 1) throw ValidationError("n_sim must be at least 1");
    }
};

// One simulated election result: a probability vector over all parties.
using ShareDraw = std::vector<double>;

// Uniform noise on [-gamma, gamma] per party, negatives clamped to zero.
// This is the pre-rescaling stage of adjust_rounding.
inline std::vector<double> perturb_shares(std::span<const double> shares, double gamma,
                                          RngStream& rng) {
    std::vector<double> out(shares.begin(), shares.end());
    for (double& s : out) {
        s += rng.uniform(-gamma, gamma);
        if (s < 0.0) s = 0.0;
    }
    return out;
}

// Rounding-noise correction: perturb each share, then rescale so the vector
// sums to one again. gamma = 0 is the identity.
inline std::vector<double> adjust_rounding(std::span<const double> shares,
                                           const NoiseSpec& noise, RngStream& rng) {
    noise.validate();
    if (noise.gamma == 0.0) return std::vector<double>(shares.begin(), shares.end());
    std::vector<double> out = perturb_shares(shares, noise.gamma, rng);
    double sum = 0.0;
    for (double s : out) sum += s;
    for (double& s : out) s /= sum;
    return out;
}

inline PosteriorSpec build_posterior(const PooledSample& pooled,
                                     std::span<const double> adjusted_shares,
                                     const PriorSpec& prior) {
    prior.validate();
    if (adjusted_shares.size() != prior.alpha.size()) {
        throw ValidationError("share vector and prior have different party counts");
    }
    PosteriorSpec spec;
    spec.params.resize(adjusted_shares.size());
    for (std::size_t p = 0; p < adjusted_shares.size(); ++p) {
        spec.params[p] = adjusted_shares[p] * pooled.n_eff + prior.alpha[p];
    }
    return spec;
}

// One exact Dirichlet sample: normalized independent Gamma(param, 1) variates.
inline ShareDraw draw_shares(const PosteriorSpec& spec, RngStream& rng) {
    ShareDraw draw(spec.params.size());
    for (;;) {
        double sum = 0.0;
        for (std::size_t p = 0; p < draw.size(); ++p) {
            draw[p] = rng.gamma(spec.params[p]);
            sum += draw[p];
        }
        if (sum > 0.0) {
            for (double& s : draw) s /= sum;
            return draw;
        }
        // all gammas underflowed to zero; redraw
    }
}

namespace detail {

template <typename Fn>
inline void for_each_index(int n, int threads, Fn&& fn) {
    if (threads == 0) threads = int(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    if (threads == 1 || n < 2) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    threads = std::min(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&fn, t, threads, n] {
            for (int i = t; i < n; i += threads) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace detail

// Runs n_sim independent simulations. Simulation i perturbs the pooled
// shares, rebuilds the posterior and draws once from it, all on an RNG
// substream keyed by (seed, i), so the output is a pure function of the
// inputs no matter how many threads execute it.
inline std::vector<ShareDraw> simulate(const PooledSample& pooled, const PriorSpec& prior,
                                       const NoiseSpec& noise, const SimulationConfig& sim) {
    sim.validate();
    noise.validate();
    std::vector<ShareDraw> draws(std::size_t(sim.n_sim));
    detail::for_each_index(sim.n_sim, sim.threads, [&](int i) {
        RngStream rng(sim.seed, std::uint64_t(i), RngStream::kPhaseDraw);
        auto adjusted = adjust_rounding(pooled.shares, noise, rng);
        auto posterior = build_posterior(pooled, adjusted, prior);
        draws[std::size_t(i)] = draw_shares(posterior, rng);
    });
    return draws;
}

}  // namespace nowcast
