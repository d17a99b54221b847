#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "helpers.hpp"
#include "nowcast/nowcast.hpp"
#include "oracles.hpp"

using namespace nowcast;

TEST_CASE("rng streams are pure functions of seed, index and phase") {
    RngStream a(42, 7, RngStream::kPhaseDraw);
    RngStream b(42, 7, RngStream::kPhaseDraw);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    RngStream c(42, 7, RngStream::kPhaseAllocate);
    RngStream d(42, 8, RngStream::kPhaseDraw);
    RngStream e(43, 7, RngStream::kPhaseDraw);
    RngStream base(42, 7, RngStream::kPhaseDraw);
    std::uint64_t first = base.next_u64();
    CHECK(c.next_u64() != first);
    CHECK(d.next_u64() != first);
    CHECK(e.next_u64() != first);
}

TEST_CASE("rng doubles are uniform on the unit interval") {
    RngStream rng(20240101, 0, RngStream::kPhaseDraw);
    const int m = 200000;
    const int bins = 20;
    std::vector<int> counts(bins, 0);
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
        double u = rng.next_double();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        counts[std::size_t(u * bins)] += 1;
    }
    CHECK(sum / m == Catch::Approx(0.5).margin(5.0 / std::sqrt(12.0 * m)));
    double expected = double(m) / bins;
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < oracle::chi2_999_df19);
}

TEST_CASE("next_below is unbiased over small ranges") {
    RngStream rng(5, 5, RngStream::kPhaseAllocate);
    const int m = 60000;
    std::vector<int> counts(3, 0);
    for (int i = 0; i < m; ++i) {
        auto v = rng.next_below(3);
        REQUIRE(v < 3);
        counts[v] += 1;
    }
    for (int c : counts) CHECK(double(c) == Catch::Approx(m / 3.0).margin(5.0 * std::sqrt(m / 3.0)));
}

TEST_CASE("normal variates have the right first moments") {
    RngStream rng(99, 0, RngStream::kPhaseDraw);
    const int m = 200000;
    double sum = 0.0, sq = 0.0;
    int within_one = 0;
    for (int i = 0; i < m; ++i) {
        double z = rng.normal();
        sum += z;
        sq += z * z;
        if (std::fabs(z) < 1.0) ++within_one;
    }
    double mean = sum / m;
    double var = sq / m - mean * mean;
    CHECK(mean == Catch::Approx(0.0).margin(5.0 / std::sqrt(double(m))));
    CHECK(var == Catch::Approx(1.0).margin(5.0 * std::sqrt(2.0 / double(m))));
    CHECK(double(within_one) / m == Catch::Approx(0.682689).margin(0.006));
}

TEST_CASE("gamma variates match analytic moments across shape regimes") {
    const int m = 200000;
    for (double shape : {0.3, 0.7, 1.0, 2.5, 100.25, 798.5}) {
        RngStream rng(1234, std::uint64_t(shape * 100), RngStream::kPhaseDraw);
        double sum = 0.0, sq = 0.0;
        for (int i = 0; i < m; ++i) {
            double g = rng.gamma(shape);
            REQUIRE(g >= 0.0);
            sum += g;
            sq += g * g;
        }
        double mean = sum / m;
        double var = sq / m - mean * mean;
        // Gamma(k): E = k, Var = k, Var of the sample variance = (2k^2 + 6k)/m
        CHECK(mean == Catch::Approx(shape).margin(6.0 * std::sqrt(shape / m)));
        CHECK(var ==
              Catch::Approx(shape).margin(6.0 * std::sqrt((2.0 * shape * shape + 6.0 * shape) / m)));
    }
    RngStream rng(1, 1, RngStream::kPhaseDraw);
    CHECK_THROWS_AS(rng.gamma(0.0), ValidationError);
    CHECK_THROWS_AS(rng.gamma(-1.0), ValidationError);
}

TEST_CASE("uniform respects its bounds") {
    RngStream rng(77, 0, RngStream::kPhaseDraw);
    for (int i = 0; i < 10000; ++i) {
        double u = rng.uniform(-0.005, 0.005);
        CHECK(u >= -0.005);
        CHECK(u < 0.005);
    }
}

TEST_CASE("noise spec construction and validation") {
    CHECK(NoiseSpec::for_precision(0.01).gamma == Catch::Approx(0.005));
    CHECK(NoiseSpec::for_precision(0.005).gamma == Catch::Approx(0.0025));
    CHECK_NOTHROW(NoiseSpec{0.0}.validate());
    CHECK_NOTHROW(NoiseSpec{0.01}.validate());
    CHECK_THROWS_AS(NoiseSpec{-0.001}.validate(), ValidationError);
    CHECK_THROWS_AS(NoiseSpec{0.0125}.validate(), ValidationError);
}

TEST_CASE("zero gamma adjustment is the exact identity") {
    std::vector<double> shares{0.40, 0.26, 0.10, 0.05, 0.09, 0.02, 0.04, 0.04};
    RngStream rng(3, 3, RngStream::kPhaseDraw);
    auto out = adjust_rounding(shares, NoiseSpec{0.0}, rng);
    REQUIRE(out.size() == shares.size());
    for (std::size_t i = 0; i < shares.size(); ++i) CHECK(out[i] == shares[i]);

    RngStream untouched(3, 3, RngStream::kPhaseDraw);
    CHECK(rng.next_u64() == untouched.next_u64());  // identity consumed no randomness
}

TEST_CASE("rounding adjustment stays within gamma before rescaling and renormalizes") {
    std::vector<double> shares{0.40, 0.26, 0.10, 0.05, 0.09, 0.02, 0.04, 0.04};
    const double gamma = 0.005;
    for (std::uint64_t i = 0; i < 200; ++i) {
        RngStream rng(11, i, RngStream::kPhaseDraw);
        auto perturbed = perturb_shares(shares, gamma, rng);
        for (std::size_t p = 0; p < shares.size(); ++p) {
            CHECK(perturbed[p] >= 0.0);
            CHECK(std::fabs(perturbed[p] - shares[p]) <= gamma + 1e-15);
        }
        RngStream rng2(11, i, RngStream::kPhaseDraw);
        auto adjusted = adjust_rounding(shares, NoiseSpec{gamma}, rng2);
        double sum = 0.0;
        for (double s : adjusted) sum += s;
        CHECK(sum == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("clamping keeps tiny shares non-negative") {
    std::vector<double> shares{0.001, 0.999};
    int clamped = 0;
    for (std::uint64_t i = 0; i < 500; ++i) {
        RngStream rng(13, i, RngStream::kPhaseDraw);
        auto out = perturb_shares(shares, 0.005, rng);
        CHECK(out[0] >= 0.0);
        if (out[0] == 0.0) ++clamped;
    }
    CHECK(clamped > 0);  // noise exceeds the share often enough to clamp
}

TEST_CASE("posterior parameters are share * n_eff + alpha") {
    auto pooled = testutil::table1_pooled();
    auto prior = PriorSpec::jeffreys(8);
    auto post = build_posterior(pooled, pooled.shares, prior);
    REQUIRE(post.params.size() == 8);
    CHECK(post.params[0] == Catch::Approx(798.5).margin(1e-9));    // union
    CHECK(post.params[3] == Catch::Approx(100.25).margin(1e-9));   // fdp
    double a0 = 0.0;
    for (double a : post.params) a0 += a;
    CHECK(a0 == Catch::Approx(1999.0).margin(1e-9));
    CHECK(post.params[0] / a0 == Catch::Approx(0.3994497).margin(1e-6));
    CHECK(post.params[3] / a0 == Catch::Approx(0.0501501).margin(1e-6));

    CHECK_THROWS_AS(build_posterior(pooled, pooled.shares, PriorSpec::jeffreys(5)),
                    ValidationError);
    CHECK_THROWS_AS(build_posterior(pooled, pooled.shares, PriorSpec{{}}), ValidationError);
    PriorSpec bad{std::vector<double>(8, 0.5)};
    bad.alpha[2] = 0.0;
    CHECK_THROWS_AS(build_posterior(pooled, pooled.shares, bad), ValidationError);
}

TEST_CASE("dirichlet draws live on the simplex") {
    PosteriorSpec post{{798.5, 520.5, 200.0, 100.25, 180.0, 40.5, 80.5, 80.5}};
    for (std::uint64_t i = 0; i < 300; ++i) {
        RngStream rng(21, i, RngStream::kPhaseDraw);
        auto draw = draw_shares(post, rng);
        double sum = 0.0;
        for (double s : draw) {
            CHECK(s >= 0.0);
            sum += s;
        }
        CHECK(sum == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("dirichlet marginal matches the beta law") {
    // X_p ~ Beta(a_p, a_0 - a_p); push draws through the oracle CDF and
    // check uniformity with a 20-bin chi-squared at the 0.999 level.
    PosteriorSpec post{{798.5, 1100.25, 100.25}};
    const double a0 = 798.5 + 1100.25 + 100.25;
    const double ap = 100.25;
    const int m = 20000;
    const int bins = 20;
    std::vector<int> counts(bins, 0);
    double sum = 0.0;
    for (std::uint64_t i = 0; i < std::uint64_t(m); ++i) {
        RngStream rng(31, i, RngStream::kPhaseDraw);
        auto draw = draw_shares(post, rng);
        double u = oracle::reg_inc_beta(ap, a0 - ap, draw[2]);
        sum += draw[2];
        int bin = std::min(bins - 1, int(u * bins));
        counts[std::size_t(bin)] += 1;
    }
    double expected = double(m) / bins;
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < oracle::chi2_999_df19);
    double beta_sd = std::sqrt(ap / a0 * (1.0 - ap / a0) / (a0 + 1.0));
    CHECK(sum / m == Catch::Approx(ap / a0).margin(5.0 * beta_sd / std::sqrt(double(m))));
}

TEST_CASE("oracle incomplete beta reproduces closed forms") {
    CHECK(oracle::reg_inc_beta(1.0, 1.0, 0.3) == Catch::Approx(0.3).margin(1e-12));
    CHECK(oracle::reg_inc_beta(2.0, 3.0, 0.3) == Catch::Approx(0.3483).margin(1e-10));
    CHECK(oracle::reg_inc_beta(2.0, 1.0, 0.7) == Catch::Approx(0.49).margin(1e-12));
    CHECK(oracle::beta_tail(2.0, 3.0, 0.3) == Catch::Approx(0.6517).margin(1e-10));
    CHECK(oracle::reg_inc_beta(5.0, 5.0, 0.5) == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("simulate is reproducible, thread-invariant and prefix-stable") {
    auto pooled = testutil::table1_pooled();
    auto prior = PriorSpec::jeffreys(8);
    NoiseSpec noise = NoiseSpec::for_precision(pooled.rounding_precision);

    auto run = simulate(pooled, prior, noise, SimulationConfig{500, 77, 1});
    auto rerun = simulate(pooled, prior, noise, SimulationConfig{500, 77, 1});
    auto threaded = simulate(pooled, prior, noise, SimulationConfig{500, 77, 4});
    auto longer = simulate(pooled, prior, noise, SimulationConfig{800, 77, 3});
    REQUIRE(run.size() == 500);
    REQUIRE(longer.size() == 800);
    for (std::size_t i = 0; i < run.size(); ++i) {
        for (std::size_t p = 0; p < run[i].size(); ++p) {
            CHECK(run[i][p] == rerun[i][p]);
            CHECK(run[i][p] == threaded[i][p]);
            CHECK(run[i][p] == longer[i][p]);  // counter-based streams: prefix property
        }
    }

    auto other_seed = simulate(pooled, prior, noise, SimulationConfig{500, 78, 1});
    CHECK(other_seed[0] != run[0]);
}

TEST_CASE("simulation config validation") {
    CHECK_THROWS_AS((SimulationConfig{0, 1, 1}.validate()), ValidationError);
    CHECK_NOTHROW((SimulationConfig{1, 0, 0}.validate()));
}
