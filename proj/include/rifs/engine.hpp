#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

#include "rifs/rng.hpp"
#include "rifs/systems.hpp"

namespace rifs {

/// State of one realized orbit of the skew product F(w, z) = (sw, f_{w0}(z)).
/// log_tangent accumulates ln of the spherical derivative norms along the
/// orbit, so log_tangent / n is the finite-time Lyapunov exponent.
struct OrbitState {
    long long n = 0;
    SpherePoint point;
    double log_tangent = 0.0;
    std::vector<std::uint8_t> recent_symbols; // bounded diagnostic window
};

namespace detail {

/// One fiber step: the image point and the ln derivative-norm increment.
/// Points exactly on the critical family's invariant set {0, -1, inf}
/// short-circuit through the invariance table.
struct StepOutcome {
    SpherePoint next;
    double log_increment;
};

StepOutcome advance(const IfsSystem& sys, const SpherePoint& z, int symbol,
                    bool with_tangent);

} // namespace detail

/// Pure single step of the skew product (with full bookkeeping).
OrbitState step_skew(const IfsSystem& sys, const OrbitState& state, int symbol);

/// log_tangent / n; undefined for n = 0.
double finite_time_lyapunov(const OrbitState& state);

/// Apply a finite word in orbit order: word[0] acts first.
SpherePoint word_apply(const IfsSystem& sys, const std::vector<int>& word,
                       const SpherePoint& z);

/// Everything run_orbit reports beyond the final state: the retained symbol
/// window with its entry point (for replay checks) and the first step at
/// which the orbit collapsed onto an exact distinguished point, if any.
struct RunResult {
    OrbitState state;
    SpherePoint window_start_point;
    double window_start_log = 0.0;
    long long collapsed_at = -1;
};

inline bool is_exact_special(const SpherePoint& z) {
    return z.is_zero() || z.is_infinity() || z.is_minus_one();
}

/// Iterate n_steps fiber steps from z0, feeding every (n, symbol, point)
/// event to each observer before the step is taken (so observers see
/// z_0 .. z_{n_steps-1}). Observers need visit(long long n, int symbol,
/// const SpherePoint&) and are expected to keep private mergeable state.
template <class... Obs>
RunResult run_orbit(const IfsSystem& sys, const SpherePoint& z0,
                    SymbolStream& stream, long long n_steps,
                    bool with_tangent, Obs&... obs) {
    constexpr int window_cap = 64;
    std::array<std::uint8_t, window_cap> win_sym{};
    std::array<SpherePoint, window_cap> win_point{};
    std::array<double, window_cap> win_log{};

    SpherePoint z = z0;
    double log_tangent = 0.0;
    long long collapsed_at = -1;
    bool was_special = is_exact_special(z);

    for (long long n = 0; n < n_steps; ++n) {
        const int sym = stream.next();
        (obs.visit(n, sym, z), ...);
        const int slot = static_cast<int>(n % window_cap);
        win_sym[slot] = static_cast<std::uint8_t>(sym);
        win_point[slot] = z;
        win_log[slot] = log_tangent;
        const auto step = detail::advance(sys, z, sym, with_tangent);
        z = step.next;
        log_tangent += step.log_increment;
        if (collapsed_at < 0 && !was_special && is_exact_special(z))
            collapsed_at = n + 1;
        was_special = is_exact_special(z);
    }

    RunResult out;
    out.state.n = n_steps;
    out.state.point = z;
    out.state.log_tangent = with_tangent ? log_tangent : 0.0;
    out.collapsed_at = collapsed_at;
    const long long kept = n_steps < window_cap ? n_steps : window_cap;
    const long long start = n_steps - kept;
    out.state.recent_symbols.reserve(static_cast<size_t>(kept));
    for (long long i = start; i < n_steps; ++i)
        out.state.recent_symbols.push_back(win_sym[static_cast<size_t>(i % window_cap)]);
    if (kept > 0) {
        out.window_start_point = win_point[static_cast<size_t>(start % window_cap)];
        out.window_start_log = win_log[static_cast<size_t>(start % window_cap)];
    } else {
        out.window_start_point = z0;
    }
    return out;
}

/// Recompute the tangent sum across the retained window; the run invariant
/// is that this matches state.log_tangent - window_start_log.
double replay_window_log_tangent(const IfsSystem& sys, const RunResult& run);

/// Deterministic trial-level parallelism: fn(trial) for every trial index,
/// partitioned over up to `threads` workers. Each fn call must only touch
/// its own slot; merging in index order is the caller's job.
template <class Fn>
void for_each_trial(int trials, int threads, Fn&& fn) {
    if (threads <= 1 || trials <= 1) {
        for (int t = 0; t < trials; ++t) fn(t);
        return;
    }
    std::atomic<int> next{0};
    const int workers = threads < trials ? threads : trials;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const int t = next.fetch_add(1);
                if (t >= trials) return;
                fn(t);
            }
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace rifs
