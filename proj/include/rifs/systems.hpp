#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rifs/sphere.hpp"

namespace rifs {

enum class Family { critical, mobius, logistic };

const char* family_name(Family f);

/// A two-map random iterated function system with selection probabilities
/// and the distinguished points of its invariance table.
struct IfsSystem {
    Family family = Family::critical;
    RationalMap map0;
    RationalMap map1;
    double p0 = 0.5;
    double p1 = 0.5;
    Complex parameter{0.0, 0.0}; // lambda or mu; unused for logistic

    struct SpecialPoint {
        SpherePoint point;
        std::string role;
    };
    std::vector<SpecialPoint> special_points;

    const RationalMap& map(int symbol) const { return symbol == 0 ? map0 : map1; }
};

/// f0(z) = 2z + z^2, f1(z) = lambda z / (z+1)^2 with homogeneous forms
/// [2zw + z^2 : w^2] and [lambda z w : (z+w)^2]. Requires lambda outside
/// {0, 1}; verifies the forward-invariance table on {0, -1, inf}.
IfsSystem make_critical(Complex lambda, double p0);

/// f0(z) = mu z, f1(z) = z / (mu + z), both degree 1, p0 = p1 = 1/2.
/// Requires mu != 0.
IfsSystem make_mobius(Complex mu);

/// The interval system f0 = g_2, f1 = g_4 with g_a(x) = a x (1 - x),
/// embedded in the sphere along the real axis.
IfsSystem make_logistic(double p0);

struct LyapunovValue {
    double value = 0.0;
    bool multiplier_zero = false; // true means value is the -inf sentinel
};

/// p0 ln|f0'(0)| + p1 ln|f1'(0)|. Both maps must fix 0. A multiplier of
/// exactly 0 yields the -inf sentinel with the flag set.
LyapunovValue lyapunov_at_origin(const IfsSystem& sys);

/// Hypothesis flags for the intermittency and density theorems, carried with
/// every statistics report so no number circulates without its regime label.
struct HypothesisReport {
    Family family = Family::critical;
    Complex parameter{0.0, 0.0};
    double p0 = 0.0;

    bool lambda_in_unit_disc = false;
    bool lambda_nonreal = false;
    bool lyapunov_positive = false;
    bool p0_above_half = false;
    LyapunovValue lyapunov;

    // Mobius-family flags (|mu| > 1 and mu nonreal)
    bool mu_outside_unit_circle = false;
    bool mu_nonreal = false;

    bool density_theorem_applies = false;       // lambda in B(0,1) \ R
    bool intermittency_theorem_applies = false; // plus (2.2) positive and p0 > 1/2
    bool mobius_theorem_applies = false;        // |mu| > 1, mu nonreal, p0 = p1 = 1/2
};

HypothesisReport check_hypotheses(const IfsSystem& sys);

} // namespace rifs
