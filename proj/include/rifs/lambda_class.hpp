#pragma once

#include <optional>
#include <vector>

#include "rifs/sphere.hpp"

namespace rifs {

struct Rational {
    long long p = 0;
    long long q = 1;
};

/// Continued-fraction convergent p/q of x with q <= qmax and |x - p/q| <= tol,
/// in lowest terms, if one exists.
std::optional<Rational> rational_approx(double x, long long qmax, double tol);

/// Classification of S = closure{2^m lambda^n : m, n in N} into the four
/// geometric cases, driven by two rational-approximation diagnostics:
/// the angle arg(lambda)/2pi and the modulus ratio ln|lambda|/ln 2.
struct LambdaClassification {
    enum class Kind { dense_in_plane, radial_lines, concentric_circles, discrete };
    Kind kind = Kind::dense_in_plane;

    int k = 0;           // RadialLines: minimal k with lambda^k > 0
    double log_step = 0; // ConcentricCircles: log-radius spacing
    long long m = 0;     // Discrete: minimal pair with 2^m lambda^n = 1
    long long n = 0;

    std::optional<Rational> angle_rational;   // arg(lambda)/2pi
    std::optional<Rational> modulus_rational; // ln|lambda|/ln 2
    bool modulus_dependent = false;           // a sign-compatible relation 2^m |lambda|^n = 1 exists
};

const char* kind_name(LambdaClassification::Kind k);

LambdaClassification classify_lambda(Complex lambda, long long qmax = 50, double tol = 1e-9);

/// All 2^m lambda^n with 0 <= m <= mmax, 0 <= n <= nmax, skipping values of
/// modulus above 1e100 (overflow guard). Duplicates are kept.
std::vector<Complex> closure_cloud(Complex lambda, int mmax, int nmax);

/// s = v / 2^round(log2 |v|), so |s| lands in [2^-1/2, 2^1/2].
Complex fold_by_power_of_two(Complex v);

/// Geometric pattern tests on the folded cloud, one per classification case.
/// Each returns the worst observed defect; the dense test returns the
/// fraction of hit cells on the (angle, log2-modulus) torus at the given
/// linear resolution.
double cloud_radial_defect(const std::vector<Complex>& cloud, int k);
double cloud_circles_defect(const std::vector<Complex>& cloud, double log_step);
int cloud_distinct_count(const std::vector<Complex>& cloud, double tol = 1e-9);
double cloud_dense_cell_fraction(const std::vector<Complex>& cloud, double resolution);

/// Largest gaps of the folded cloud in the two torus coordinates
/// (angle/2pi and fractional log2-modulus), both measured cyclically.
/// Lines, circles and finite sets leave a macroscopic gap in at least one
/// coordinate; a dense closure drives both gaps to zero.
struct MarginalGaps {
    double angle_gap = 1.0;
    double modulus_gap = 1.0;
};
MarginalGaps cloud_marginal_gaps(const std::vector<Complex>& cloud);

} // namespace rifs
