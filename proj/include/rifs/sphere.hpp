#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "rifs/error.hpp"

namespace rifs {

using Complex = std::complex<double>;

/// A point of the Riemann sphere in homogeneous coordinates [num : den].
///
/// The representative is deterministic: the component of larger modulus is
/// exactly 1, so |num|^2 + |den|^2 lies in [1, 2] and orbits can pass through
/// infinity without overflow. Equality is projective.
struct SpherePoint {
    Complex num{0.0, 0.0};
    Complex den{1.0, 0.0};

    SpherePoint() = default;

    /// Normalizing constructor; throws invalid_point on (0, 0) or NaN input.
    SpherePoint(Complex n, Complex d);

    static SpherePoint zero() { return SpherePoint{}; }
    static SpherePoint infinity() {
        SpherePoint p;
        p.num = Complex{1.0, 0.0};
        p.den = Complex{0.0, 0.0};
        return p;
    }
    static SpherePoint from(Complex z) { return SpherePoint(z, Complex{1.0, 0.0}); }

    bool is_zero() const { return num == Complex{0.0, 0.0}; }
    bool is_infinity() const { return den == Complex{0.0, 0.0}; }
    bool is_minus_one() const { return num == -den && !is_infinity(); }

    /// |z| in the affine chart; +inf at the point at infinity.
    double planar_abs() const;

    /// Affine-chart value; throws chart error at infinity.
    Complex to_complex() const;

    /// Exact scale-free tests |z| < x and |z| > x (infinity counts as above).
    bool planar_abs_below(double x) const {
        return std::norm(num) < x * x * std::norm(den);
    }
    bool planar_abs_above(double x) const {
        return std::norm(num) > x * x * std::norm(den);
    }

    /// Height above the equator of the unit-sphere embedding, in [-1, 1].
    double stereographic_height() const {
        const double nn = std::norm(num), nd = std::norm(den);
        return (nn - nd) / (nn + nd);
    }

    /// Longitude arg(num * conj(den)) in (-pi, pi]; 0 by convention at the poles.
    double longitude() const {
        const Complex c = num * std::conj(den);
        if (c == Complex{0.0, 0.0}) return 0.0;
        return std::arg(c);
    }
};

/// Chordal distance 2|z1 w2 - z2 w1| / (sqrt(|z1|^2+|w1|^2) sqrt(|z2|^2+|w2|^2)).
/// Symmetric, zero iff projectively equal, maximum 2 (antipodal points).
double chordal_distance(const SpherePoint& p, const SpherePoint& q);

/// Projective equality up to chordal tolerance.
bool same_point(const SpherePoint& p, const SpherePoint& q, double tol = 1e-12);

/// Evaluate the homogeneous form c[0] z^d + c[1] z^{d-1} w + ... + c[d] w^d.
Complex eval_form(const std::vector<Complex>& c, Complex z, Complex w);

/// Resultant of two binary forms given by leading-first coefficient lists.
Complex resultant(const std::vector<Complex>& p, const std::vector<Complex>& q);

/// A rational map [z:w] -> [P(z,w) : Q(z,w)] of degree 1..4, given by the
/// leading-first coefficient lists of the two homogeneous degree-d forms.
/// P and Q must not share a projective root (resultant check at construction).
class RationalMap {
public:
    RationalMap(std::vector<Complex> p, std::vector<Complex> q);

    int degree() const { return degree_; }
    const std::vector<Complex>& p_coeffs() const { return p_; }
    const std::vector<Complex>& q_coeffs() const { return q_; }

    /// Image of a sphere point, exact at infinity and at poles.
    /// Throws indeterminate_evaluation if both forms vanish (common root).
    SpherePoint apply(const SpherePoint& pt) const;

    /// Derivative of the affine-chart expression at finite non-pole z.
    Complex planar_derivative(Complex z) const;

    /// Chart-free norm of the derivative cocycle,
    /// |f'(z)| (1+|z|^2) / (1+|f(z)|^2), continuous across infinity.
    /// Zero at superattracting points is a valid value.
    double spherical_derivative_norm(const SpherePoint& pt) const;

    /// Chart numerator/denominator polynomials evaluated at finite z.
    Complex chart_num(Complex z) const;
    Complex chart_den(Complex z) const;

private:
    int degree_;
    std::vector<Complex> p_, q_;
    std::vector<Complex> pz_, pw_, qz_, qw_; // partial-derivative forms, degree d-1
};

} // namespace rifs
