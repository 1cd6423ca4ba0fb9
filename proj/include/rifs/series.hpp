#pragma once

#include <vector>

#include "rifs/sphere.hpp"

namespace rifs {

/// A formal power series a_1 z + a_2 z^2 + ... + a_K z^K with zero constant
/// term. All arithmetic truncates consistently at order K.
struct TruncatedSeries {
    std::vector<Complex> a; // a[j-1] is the coefficient of z^j

    TruncatedSeries() = default;
    explicit TruncatedSeries(std::vector<Complex> coeffs);

    int order() const { return static_cast<int>(a.size()); }

    /// Coefficient of z^j, 1 <= j <= K.
    Complex coeff(int j) const { return a.at(static_cast<size_t>(j) - 1); }

    Complex evaluate(Complex z) const;
    Complex evaluate_derivative(Complex z) const;

    static TruncatedSeries identity(int K);
    static TruncatedSeries linear(Complex slope, int K);
};

/// Largest coefficient modulus (for zero-series checks).
double max_coeff_abs(const TruncatedSeries& s);

/// Taylor expansion of the affine-chart expression of f at 0, to order K.
/// Requires f(0) = 0 and no pole at 0; throws not_expandable otherwise.
TruncatedSeries taylor_at_zero(const RationalMap& f, int K);

/// Truncated product of two series.
TruncatedSeries multiply(const TruncatedSeries& f, const TruncatedSeries& g);

/// Truncated composition f(g(z)); orders must match.
TruncatedSeries compose(const TruncatedSeries& f, const TruncatedSeries& g);

/// The unique tangent-to-identity solution phi of phi∘f = a1·phi, found by
/// the forward triangular recurrence (the order-j equation only involves
/// phi_2..phi_j). Requires |a1| outside {0, 1}.
TruncatedSeries koenigs_linearizer(const TruncatedSeries& f);

/// compose(phi, g) - multiplier*phi. The zero series means phi linearizes g
/// to this order.
TruncatedSeries linearization_residual(const TruncatedSeries& phi,
                                       const TruncatedSeries& g,
                                       Complex multiplier);

/// Compositional inverse: invert(f)∘f = identity up to order K. Requires
/// a1 != 0.
TruncatedSeries invert_series(const TruncatedSeries& f);

/// Coordinate rescaling c·f(z/c): coefficient a_j becomes a_j c^{1-j}.
TruncatedSeries rescale(const TruncatedSeries& f, Complex c);

} // namespace rifs
