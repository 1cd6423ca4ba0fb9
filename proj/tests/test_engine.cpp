#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rifs/engine.hpp"

using namespace rifs;

namespace {

struct MaxAbsObserver {
    double max_abs = 0.0;
    long long special_hits = 0;
    void visit(long long, int, const SpherePoint& z) {
        if (!z.is_infinity()) max_abs = std::max(max_abs, z.planar_abs());
        if (is_exact_special(z)) ++special_hits;
    }
};

} // namespace

TEST_CASE("symbol stream frequencies and determinism") {
    SymbolStream all_zero(1, 0, 1.0);
    SymbolStream all_one(1, 0, 0.0);
    for (int i = 0; i < 1000; ++i) {
        CHECK(all_zero.next() == 0);
        CHECK(all_one.next() == 1);
    }

    SymbolStream s(42, 3, 0.6);
    long long zeros = 0;
    const long long n = 1000000;
    for (long long i = 0; i < n; ++i) zeros += s.next() == 0;
    const double freq = static_cast<double>(zeros) / n;
    CHECK(freq >= 0.6 - 0.0015);
    CHECK(freq <= 0.6 + 0.0015);
    CHECK(s.position() == static_cast<std::uint64_t>(n));

    // same (seed, index) reproduces; different index decorrelates
    SymbolStream a(7, 1, 0.5), b(7, 1, 0.5), c(7, 2, 0.5);
    int agree_ab = 0, agree_ac = 0;
    for (int i = 0; i < 1000; ++i) {
        const int xa = a.next();
        agree_ab += xa == b.next();
        agree_ac += xa == c.next();
    }
    CHECK(agree_ab == 1000);
    CHECK(agree_ac > 400);
    CHECK(agree_ac < 600);
}

TEST_CASE("step_skew on distinguished points") {
    const IfsSystem sys = make_critical(Complex{0.0, 0.5}, 0.6);
    OrbitState at_zero;
    at_zero.point = SpherePoint::zero();
    CHECK(step_skew(sys, at_zero, 0).point.is_zero());
    CHECK(step_skew(sys, at_zero, 1).point.is_zero());

    OrbitState at_minus_one;
    at_minus_one.point = SpherePoint::from(Complex{-1.0, 0.0});
    CHECK(step_skew(sys, at_minus_one, 1).point.is_infinity());

    const IfsSystem mob = make_mobius(Complex{2.0, 0.0});
    OrbitState at_one;
    at_one.point = SpherePoint::from(Complex{1.0, 0.0});
    CHECK(step_skew(mob, at_one, 0).point.to_complex() == Complex{2.0, 0.0});
}

TEST_CASE("run_orbit basics") {
    const IfsSystem sys = make_critical(Complex{0.0, 0.5}, 0.6);
    SymbolStream s0(5, 0, 0.6);
    const RunResult idle = run_orbit(sys, SpherePoint::from(Complex{0.3, 0.1}), s0, 0, true);
    CHECK(idle.state.n == 0);
    CHECK(idle.state.log_tangent == 0.0);
    CHECK(chordal_distance(idle.state.point, SpherePoint::from(Complex{0.3, 0.1})) == 0.0);

    SymbolStream s1(5, 1, 0.6);
    const RunResult held = run_orbit(sys, SpherePoint::zero(), s1, 1000, true);
    CHECK(held.state.point.is_zero());
}

TEST_CASE("generic orbits make far-field excursions") {
    const IfsSystem sys = make_critical(Complex{0.0, 0.5}, 0.6);
    SymbolStream stream(3, 0, 0.6);
    MaxAbsObserver obs;
    const RunResult run =
        run_orbit(sys, SpherePoint::from(Complex{0.3, 0.1}), stream, 1000000, false, obs);
    CHECK(obs.max_abs > 10.0);
    // before any binary64 collapse onto the exact invariant set, the orbit
    // never touches {0, -1, inf} exactly
    if (run.collapsed_at >= 0) {
        CHECK(run.collapsed_at > 2000);
    } else {
        CHECK(obs.special_hits == 0);
    }
}

TEST_CASE("finite-time lyapunov at the common fixed point") {
    // held at 0 the cocycle is exactly the product of the |f'(0)| draws
    const IfsSystem sys = make_critical(Complex{0.0, 0.5}, 0.6);
    const long long n = 100000;
    SymbolStream stream(31, 0, 0.6);
    const RunResult run = run_orbit(sys, SpherePoint::zero(), stream, n, true);
    const double value = finite_time_lyapunov(run.state);
    const double mean = 0.2 * std::log(2.0);
    const double sd_step = std::sqrt(0.24) * 2.0 * std::log(2.0); // Bernoulli spread of ±ln 2
    CHECK(std::abs(value - mean) <= 3.0 * sd_step / std::sqrt(static_cast<double>(n)));

    const IfsSystem mob = make_mobius(std::polar(1.2, 1.0));
    SymbolStream ms(31, 1, 0.5);
    const RunResult mrun = run_orbit(mob, SpherePoint::zero(), ms, n, true);
    const double msd = std::log(1.2);
    CHECK(std::abs(finite_time_lyapunov(mrun.state)) <=
          3.0 * msd / std::sqrt(static_cast<double>(n)));

    SymbolStream det(31, 2, 1.0);
    const RunResult drun = run_orbit(sys, SpherePoint::zero(), det, 100, true);
    CHECK(finite_time_lyapunov(drun.state) == doctest::Approx(std::log(2.0)).epsilon(1e-14));

    OrbitState empty;
    CHECK_THROWS_AS(finite_time_lyapunov(empty), Error);
}

TEST_CASE("word application") {
    const IfsSystem sys = make_critical(Complex{0.0, 0.5}, 0.6);
    const SpherePoint z = SpherePoint::from(Complex{0.2, 0.0});
    CHECK(chordal_distance(word_apply(sys, {}, z), z) == 0.0);
    CHECK(word_apply(sys, {0}, SpherePoint::from(Complex{1.0, 0.0})).to_complex() ==
          Complex{3.0, 0.0});

    // non-commuting generators
    const SpherePoint ab = word_apply(sys, {0, 1}, z);
    const SpherePoint ba = word_apply(sys, {1, 0}, z);
    CHECK(chordal_distance(ab, ba) > 1e-3);
}

TEST_CASE("semigroup identity on random words") {
    const IfsSystem sys = make_critical(Complex{0.35, 0.35}, 0.5);
    auto rng = make_rng(77, 0);
    for (int i = 0; i < 60; ++i) {
        std::vector<int> u, v;
        const int lu = 1 + static_cast<int>(uniform01(rng) * 19);
        const int lv = 1 + static_cast<int>(uniform01(rng) * 19);
        for (int j = 0; j < lu; ++j) u.push_back(uniform01(rng) < 0.5 ? 0 : 1);
        for (int j = 0; j < lv; ++j) v.push_back(uniform01(rng) < 0.5 ? 0 : 1);
        std::vector<int> uv = u;
        uv.insert(uv.end(), v.begin(), v.end());
        const SpherePoint z = SpherePoint::from(Complex{0.17, 0.05});
        const SpherePoint lhs = word_apply(sys, uv, z);
        const SpherePoint rhs = word_apply(sys, v, word_apply(sys, u, z));
        CHECK(chordal_distance(lhs, rhs) <= 1e-10);
    }
}

TEST_CASE("log tangent replays from the recorded symbol window") {
    const IfsSystem sys = make_critical(Complex{0.0, 0.5}, 0.6);
    for (const long long n : {5LL, 64LL, 1000LL}) {
        SymbolStream stream(91, static_cast<std::uint64_t>(n), 0.6);
        const RunResult run =
            run_orbit(sys, SpherePoint::from(Complex{0.21, 0.13}), stream, n, true);
        const double replayed = replay_window_log_tangent(sys, run);
        const double windowed = run.state.log_tangent - run.window_start_log;
        CHECK(std::abs(replayed - windowed) <=
              1e-9 * std::max(1.0, std::abs(windowed)));
    }
}

TEST_CASE("reproducibility and merge determinism") {
    const IfsSystem sys = make_critical(Complex{0.0, 0.5}, 0.6);
    auto run_once = [&](int trials, int threads) {
        std::vector<double> out(static_cast<size_t>(trials));
        for_each_trial(trials, threads, [&](int t) {
            SymbolStream stream(123, static_cast<std::uint64_t>(t), 0.6);
            MaxAbsObserver obs;
            run_orbit(sys, SpherePoint::from(Complex{0.3, 0.1}), stream, 20000, false, obs);
            out[static_cast<size_t>(t)] = obs.max_abs;
        });
        return out;
    };
    const auto serial = run_once(8, 1);
    const auto parallel = run_once(8, 4);
    CHECK(serial == parallel);
    CHECK(serial == run_once(8, 1));
}
