#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rifs/stats.hpp"

using namespace rifs;

TEST_CASE("synthetic sojourn decomposition traces") {
    // in, in, out, in
    const SojournRecord rec = sojourn_from_membership({true, true, false, true});
    REQUIRE(rec.escape_times.size() == 2);
    CHECK(rec.escape_times[0] == 2);
    CHECK(rec.escape_times[1] == 3);
    REQUIRE(rec.eta.size() == 1);
    REQUIRE(rec.xi.size() == 1);
    CHECK(rec.eta[0] == 2);
    CHECK(rec.xi[0] == 1);
    CHECK(rec.eta_tilde == 1);
    CHECK(rec.xi_tilde == 0);
    CHECK(rec.raw_in_count == 3);
    CHECK(occupation_identity_residual(rec) == 0);

    const SojournRecord flat = sojourn_from_membership(std::vector<bool>(10, true));
    CHECK(flat.single_phase);
    CHECK(flat.eta.empty());
    CHECK(flat.eta_tilde == 10);
    CHECK(occupation_identity_residual(flat) == 0);
}

TEST_CASE("phase decomposition reconstructs raw membership bit for bit") {
    auto rng = make_rng(57, 0);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<bool> membership;
        const int n = 1 + static_cast<int>(uniform01(rng) * 200);
        for (int i = 0; i < n; ++i) membership.push_back(uniform01(rng) < 0.7);
        const SojournRecord rec = sojourn_from_membership(membership);
        CHECK(reconstruct_membership(rec) == membership);
        CHECK(occupation_identity_residual(rec) == 0);

        // durations are >= 1 and escape times strictly increase
        for (long long e : rec.eta) CHECK(e >= 1);
        for (long long x : rec.xi) CHECK(x >= 1);
        for (size_t i = 1; i < rec.escape_times.size(); ++i)
            CHECK(rec.escape_times[i] > rec.escape_times[i - 1]);
    }
}

TEST_CASE("monte carlo sojourn record at the reference parameters") {
    const IfsSystem sys = make_critical(Complex{0.0, 0.5}, 0.6);
    SymbolStream stream(2028, 0, 0.6);
    const SojournRecord rec = sojourn_decomposition(
        sys, SpherePoint::from(Complex{0.01, 0.005}), 0.1, 10.0, 1000000, stream);
    CHECK(rec.starts_in_w);
    CHECK(occupation_identity_residual(rec) == 0);
    REQUIRE(rec.xi.size() >= 10);
    const double mean_xi =
        static_cast<double>(std::accumulate(rec.xi.begin(), rec.xi.end(), 0LL)) /
        static_cast<double>(rec.xi.size());
    CHECK(mean_xi < 50.0);
}

TEST_CASE("occupation fraction basics") {
    // deterministic f0 only: the orbit leaves B(0, 0.1) and never returns
    const IfsSystem sys = make_critical(Complex{0.0, 0.5}, 1.0);
    const OccupationResult res = occupation_fraction(
        sys, SpherePoint::from(Complex{0.01, 0.0}), 0.1, 100000, 1, 7);
    CHECK(res.fractions[0] < 0.01);

    CHECK_THROWS_AS(occupation_fraction(sys, SpherePoint::zero(), 0.1, 10, 1, 7), Error);
    CHECK_THROWS_AS(occupation_fraction(sys, SpherePoint::infinity(), 0.1, 10, 1, 7), Error);
}

TEST_CASE("occupation concentrates for the attracting regime and is labeled") {
    // p0 = 0.1 makes the exponent negative: 0 attracts, concentration happens
    // for the attracting reason and the hypothesis report must say so
    const IfsSystem sys = make_critical(Complex{0.0, 0.5}, 0.1);
    const HypothesisReport rep = check_hypotheses(sys);
    CHECK_FALSE(rep.lyapunov_positive);
    CHECK_FALSE(rep.intermittency_theorem_applies);
    const OccupationResult res = occupation_fraction(
        sys, SpherePoint::from(Complex{0.3, 0.1}), 0.1, 100000, 5, 11);
    CHECK(res.median > 0.9);
}

TEST_CASE("kac experiment censors deterministic escapes") {
    const IfsSystem sys = make_critical(Complex{0.0, 0.5}, 1.0);
    const KacResult res = kac_return_times(sys, 1e-3, 20, 100000, 3);
    CHECK(res.censored_count == 20);
    for (double r : res.return_times) CHECK(r == 100000.0);
}

TEST_CASE("kac returns happen under the reference parameters") {
    const IfsSystem sys = make_critical(Complex{0.0, 0.5}, 0.6);
    const KacResult res = kac_return_times(sys, 1e-3, 200, 10000000, 5);
    CHECK(res.censored_count < 40);
    double max_return = 0.0;
    for (size_t i = 0; i < res.return_times.size(); ++i)
        if (!res.censored[i]) max_return = std::max(max_return, res.return_times[i]);
    CHECK(max_return > 100.0); // heavy tail shows up already at 200 samples
}

TEST_CASE("hill estimator on synthetic pareto tails") {
    auto rng = make_rng(63, 0);
    auto pareto = [&](double alpha, int n) {
        std::vector<double> out;
        out.reserve(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i)
            out.push_back(std::pow(1.0 - uniform01(rng), -1.0 / alpha));
        return out;
    };
    const TailEstimate one = hill_tail_index(pareto(1.0, 100000), 2000, 100, 17);
    CHECK(one.alpha >= 0.95);
    CHECK(one.alpha <= 1.05);
    CHECK(one.ci_low <= one.alpha);
    CHECK(one.ci_high >= one.alpha);

    const TailEstimate half = hill_tail_index(pareto(0.5, 100000), 2000, 100, 17);
    CHECK(half.alpha >= 0.45);
    CHECK(half.alpha <= 0.55);

    CHECK_THROWS_AS(hill_tail_index(std::vector<double>(1000, 3.0), 50, 50, 1), Error);
    CHECK_THROWS_AS(hill_tail_index(pareto(1.0, 100), 5, 50, 1), Error);
}

TEST_CASE("equal-area scheme geometry") {
    const EqualAreaScheme scheme = EqualAreaScheme::make(1000);
    CHECK(scheme.cells() == 1000);
    CHECK(scheme.bands == 20);
    CHECK(scheme.lons == 50);
    // equal area by construction: uniform height and longitude splits
    for (int b = 0; b < scheme.bands; ++b)
        CHECK(scheme.height_hi(b) - scheme.height_lo(b) ==
              doctest::Approx(2.0 / scheme.bands).epsilon(1e-9));

    CHECK(scheme.bin(SpherePoint::zero()) / scheme.lons == 0);
    CHECK(scheme.bin(SpherePoint::infinity()) / scheme.lons == scheme.bands - 1);
}

TEST_CASE("cesaro measure of an orbit held at zero") {
    const IfsSystem sys = make_critical(Complex{0.0, 0.5}, 0.6);
    SymbolStream stream(5, 0, 0.6);
    const CesaroResult res =
        empirical_cesaro_measure(sys, SpherePoint::zero(), 10000, 0, 1000, 0.2, stream);
    CHECK(res.mass_near_zero == 1.0);
    const EqualAreaScheme& scheme = res.hist.scheme;
    CHECK(res.hist.counts[static_cast<size_t>(scheme.bin(SpherePoint::zero()))] ==
          res.hist.total);
}

TEST_CASE("coverage probe basics") {
    const IfsSystem sys = make_critical(Complex{0.35, 0.35}, 0.5);
    const CoverageReport zero_depth =
        coverage_probe(sys, SpherePoint::from(Complex{0.3, 0.0}), 0, 1000);
    CHECK(zero_depth.cells_visited == 1);

    // real lambda traps the orbit on the real great circle
    const IfsSystem real_sys = make_critical(Complex{0.5, 0.0}, 0.5);
    const CoverageReport trapped =
        coverage_probe(real_sys, SpherePoint::from(Complex{0.3, 0.0}), 14, 1000, 2);
    CHECK(trapped.fraction <= 0.25);

    CHECK_THROWS_AS(coverage_probe(sys, SpherePoint::zero(), 3, 100), Error);
}

TEST_CASE("non-normality probe follows the cone policy") {
    const NonNormalityResult none = non_normality_probe(Complex{0.0, 0.5}, 5e-3, 0);
    CHECK(none.ratios.size() == 1);

    const NonNormalityResult run = non_normality_probe(Complex{0.0, 0.5}, 5e-3, 10);
    CHECK(run.cycles == 10);
    CHECK(run.increasing_on_g0_blocks);
    CHECK(run.growth > 1.0);
    // linear steps leave the ratio unchanged
    for (size_t i = 0; i < run.symbols.size(); ++i) {
        if (run.symbols[i] == 1) {
            const double before = run.ratios[i];
            const double after = run.ratios[i + 1];
            CHECK(std::abs(after - before) <= 1e-12 * std::max(1.0, before));
        }
    }

    CHECK_THROWS_AS(non_normality_probe(Complex{0.5, 0.0}, 5e-3, 3), Error);
    CHECK_THROWS_AS(non_normality_probe(Complex{0.0, 0.5}, 0.1, 3), Error);
}

TEST_CASE("unit circle curve and crossing counts") {
    const CurveResult half = unit_circle_curve(Complex{0.5, 0.0}, 1440);
    CHECK(half.samples[0].theta == 0.0);
    CHECK(half.samples[0].abs == 1.0);
    CHECK(half.crossings <= 3);

    const CurveResult big =
        unit_circle_curve(Complex{0.5 + 0.5 * std::sqrt(3.0), 0.0}, 1440);
    CHECK(big.crossings <= 3);

    CHECK_THROWS_AS(unit_circle_curve(Complex{0.5, 0.0}, 100), Error);
    CHECK_THROWS_AS(unit_circle_curve(Complex{1.0, 0.0}, 720), Error);
}

TEST_CASE("candidate invariant sets are never invariant") {
    // the one-element set {-1}: invariance would force 1 - 2 lambda = -1,
    // i.e. lambda = 1, which is excluded
    const auto at_half = invariant_candidate_check(Complex{0.5, 0.0});
    REQUIRE(at_half.size() == 11);
    CHECK(at_half[0].name == "{-1}");
    CHECK(std::abs(at_half[0].images[0]) <= 1e-15); // f1(-1) = 1 - 2 lambda = 0
    CHECK_FALSE(at_half[0].invariant);

    for (int i = 0; i < 100; ++i) {
        const Complex lambda =
            std::polar(0.08 + 0.009 * i, 2.0 * M_PI * (0.013 + 0.01 * i));
        for (const auto& verdict : invariant_candidate_check(lambda))
            CHECK_FALSE(verdict.invariant);
    }
}

TEST_CASE("monotone burden of p0 on the occupation fraction") {
    const std::vector<double> grid{0.55, 0.60, 0.65, 0.70, 0.75};
    int monotone_seeds = 0;
    for (std::uint64_t seed : {101ULL, 202ULL, 303ULL}) {
        std::vector<double> medians;
        for (double p0 : grid) {
            const IfsSystem sys = make_critical(Complex{0.0, 0.5}, p0);
            const OccupationResult res = occupation_fraction(
                sys, SpherePoint::from(Complex{0.3, 0.1}), 0.1, 1000000, 11, seed);
            medians.push_back(res.median);
        }
        bool non_decreasing = true;
        for (size_t i = 1; i < medians.size(); ++i)
            if (medians[i] < medians[i - 1]) non_decreasing = false;
        monotone_seeds += non_decreasing;
    }
    CHECK(monotone_seeds >= 2);
}
