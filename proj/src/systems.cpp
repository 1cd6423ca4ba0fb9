#include "rifs/systems.hpp"

#include <cmath>
#include <limits>

namespace rifs {

const char* family_name(Family f) {
    switch (f) {
        case Family::critical: return "critical";
        case Family::mobius: return "mobius";
        case Family::logistic: return "logistic";
    }
    return "?";
}

namespace {

void check_probability(double p0) {
    if (!(p0 >= 0.0 && p0 <= 1.0))
        fail(ErrorCode::invalid_parameter, "p0 must lie in [0, 1]");
}

void require_fixes_zero(const RationalMap& m, const char* which) {
    if (!m.apply(SpherePoint::zero()).is_zero())
        fail(ErrorCode::invalid_parameter, std::string(which) + " does not fix 0");
}

void require_exact(const SpherePoint& got, const SpherePoint& want, const char* what) {
    if (chordal_distance(got, want) != 0.0)
        fail(ErrorCode::invalid_parameter, std::string("invariance table violated: ") + what);
}

} // namespace

IfsSystem make_critical(Complex lambda, double p0) {
    check_probability(p0);
    if (lambda == Complex{0.0, 0.0} || lambda == Complex{1.0, 0.0})
        fail(ErrorCode::invalid_parameter, "lambda must lie outside {0, 1}");

    RationalMap f0({Complex{1.0, 0.0}, Complex{2.0, 0.0}, Complex{0.0, 0.0}},
                   {Complex{0.0, 0.0}, Complex{0.0, 0.0}, Complex{1.0, 0.0}});
    RationalMap f1({Complex{0.0, 0.0}, lambda, Complex{0.0, 0.0}},
                   {Complex{1.0, 0.0}, Complex{2.0, 0.0}, Complex{1.0, 0.0}});

    IfsSystem sys{Family::critical, f0, f1, p0, 1.0 - p0, lambda, {}};
    sys.special_points = {
        {SpherePoint::zero(), "common fixed point"},
        {SpherePoint::infinity(), "superattracting fixed point of f0, mapped to 0 by f1"},
        {SpherePoint::from(Complex{-1.0, 0.0}), "fixed point of f0, mapped to infinity by f1"},
    };

    const SpherePoint zero = SpherePoint::zero();
    const SpherePoint inf = SpherePoint::infinity();
    const SpherePoint minus_one = SpherePoint::from(Complex{-1.0, 0.0});
    require_exact(f0.apply(zero), zero, "f0(0) = 0");
    require_exact(f1.apply(zero), zero, "f1(0) = 0");
    require_exact(f0.apply(inf), inf, "f0(inf) = inf");
    require_exact(f1.apply(inf), zero, "f1(inf) = 0");
    require_exact(f0.apply(minus_one), minus_one, "f0(-1) = -1");
    require_exact(f1.apply(minus_one), inf, "f1(-1) = inf");
    return sys;
}

IfsSystem make_mobius(Complex mu) {
    if (mu == Complex{0.0, 0.0})
        fail(ErrorCode::invalid_parameter, "mu must be nonzero");
    RationalMap f0({mu, Complex{0.0, 0.0}}, {Complex{0.0, 0.0}, Complex{1.0, 0.0}});
    RationalMap f1({Complex{1.0, 0.0}, Complex{0.0, 0.0}}, {Complex{1.0, 0.0}, mu});
    IfsSystem sys{Family::mobius, f0, f1, 0.5, 0.5, mu, {}};
    sys.special_points = {{SpherePoint::zero(), "common fixed point"}};
    require_fixes_zero(f0, "f0");
    require_fixes_zero(f1, "f1");
    return sys;
}

IfsSystem make_logistic(double p0) {
    check_probability(p0);
    // g_a(x) = a x (1-x) as [a z w - a z^2 : w^2]
    auto logistic_map = [](double a) {
        return RationalMap({Complex{-a, 0.0}, Complex{a, 0.0}, Complex{0.0, 0.0}},
                           {Complex{0.0, 0.0}, Complex{0.0, 0.0}, Complex{1.0, 0.0}});
    };
    IfsSystem sys{Family::logistic, logistic_map(2.0), logistic_map(4.0),
                  p0, 1.0 - p0, Complex{0.0, 0.0}, {}};
    sys.special_points = {
        {SpherePoint::zero(), "common fixed point"},
        {SpherePoint::from(Complex{0.5, 0.0}), "superattracting fixed point of g2"},
        {SpherePoint::from(Complex{1.0, 0.0}), "mapped to 0 by both maps"},
    };
    require_fixes_zero(sys.map0, "g2");
    require_fixes_zero(sys.map1, "g4");
    return sys;
}

LyapunovValue lyapunov_at_origin(const IfsSystem& sys) {
    require_fixes_zero(sys.map0, "map0");
    require_fixes_zero(sys.map1, "map1");
    const double m0 = std::abs(sys.map0.planar_derivative(Complex{0.0, 0.0}));
    const double m1 = std::abs(sys.map1.planar_derivative(Complex{0.0, 0.0}));
    if (m0 == 0.0 || m1 == 0.0)
        return {-std::numeric_limits<double>::infinity(), true};
    return {sys.p0 * std::log(m0) + sys.p1 * std::log(m1), false};
}

HypothesisReport check_hypotheses(const IfsSystem& sys) {
    HypothesisReport r;
    r.family = sys.family;
    r.parameter = sys.parameter;
    r.p0 = sys.p0;
    r.lyapunov = lyapunov_at_origin(sys);
    r.lyapunov_positive = !r.lyapunov.multiplier_zero && r.lyapunov.value > 0.0;
    r.p0_above_half = sys.p0 > 0.5;

    if (sys.family == Family::critical) {
        r.lambda_in_unit_disc = std::abs(sys.parameter) < 1.0;
        r.lambda_nonreal = sys.parameter.imag() != 0.0;
        r.density_theorem_applies = r.lambda_in_unit_disc && r.lambda_nonreal;
        r.intermittency_theorem_applies =
            r.density_theorem_applies && r.lyapunov_positive && r.p0_above_half;
    } else if (sys.family == Family::mobius) {
        r.mu_outside_unit_circle = std::abs(sys.parameter) > 1.0;
        r.mu_nonreal = sys.parameter.imag() != 0.0;
        r.mobius_theorem_applies =
            r.mu_outside_unit_circle && r.mu_nonreal && sys.p0 == 0.5;
    }
    return r;
}

} // namespace rifs
