#include "rifs/engine.hpp"

#include <cmath>

namespace rifs {

namespace detail {

StepOutcome advance(const IfsSystem& sys, const SpherePoint& z, int symbol,
                    bool with_tangent) {
    const RationalMap& f = sys.map(symbol);
    SpherePoint next;
    bool short_circuited = false;
    if (sys.family == Family::critical) {
        // invariance table on {0, -1, inf}
        if (z.is_zero()) {
            next = SpherePoint::zero();
            short_circuited = true;
        } else if (z.is_infinity()) {
            next = symbol == 0 ? SpherePoint::infinity() : SpherePoint::zero();
            short_circuited = true;
        } else if (z.is_minus_one()) {
            next = symbol == 0 ? SpherePoint::from(Complex{-1.0, 0.0})
                               : SpherePoint::infinity();
            short_circuited = true;
        }
    }
    if (!short_circuited) next = f.apply(z);
    double log_inc = 0.0;
    if (with_tangent) log_inc = std::log(f.spherical_derivative_norm(z));
    return {next, log_inc};
}

} // namespace detail

OrbitState step_skew(const IfsSystem& sys, const OrbitState& state, int symbol) {
    const auto step = detail::advance(sys, state.point, symbol, true);
    OrbitState out = state;
    out.n += 1;
    out.point = step.next;
    out.log_tangent += step.log_increment;
    out.recent_symbols.push_back(static_cast<std::uint8_t>(symbol));
    if (out.recent_symbols.size() > 64)
        out.recent_symbols.erase(out.recent_symbols.begin());
    return out;
}

double finite_time_lyapunov(const OrbitState& state) {
    if (state.n < 1)
        fail(ErrorCode::undefined_value, "finite-time exponent needs n >= 1");
    return state.log_tangent / static_cast<double>(state.n);
}

SpherePoint word_apply(const IfsSystem& sys, const std::vector<int>& word,
                       const SpherePoint& z) {
    SpherePoint cur = z;
    for (int sym : word) cur = detail::advance(sys, cur, sym, false).next;
    return cur;
}

double replay_window_log_tangent(const IfsSystem& sys, const RunResult& run) {
    SpherePoint z = run.window_start_point;
    double acc = 0.0;
    for (std::uint8_t sym : run.state.recent_symbols) {
        const auto step = detail::advance(sys, z, sym, true);
        acc += step.log_increment;
        z = step.next;
    }
    return acc;
}

} // namespace rifs
