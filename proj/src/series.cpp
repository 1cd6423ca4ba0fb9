#include "rifs/series.hpp"

#include <algorithm>
#include <cmath>

namespace rifs {

TruncatedSeries::TruncatedSeries(std::vector<Complex> coeffs) : a(std::move(coeffs)) {
    if (a.size() < 2)
        fail(ErrorCode::invalid_parameter, "series order must be at least 2");
}

Complex TruncatedSeries::evaluate(Complex z) const {
    Complex acc{0.0, 0.0};
    for (auto it = a.rbegin(); it != a.rend(); ++it) acc = z * (*it + acc);
    return acc;
}

Complex TruncatedSeries::evaluate_derivative(Complex z) const {
    Complex acc{0.0, 0.0};
    for (int j = order(); j >= 1; --j)
        acc = acc * z + static_cast<double>(j) * a[static_cast<size_t>(j) - 1];
    return acc;
}

TruncatedSeries TruncatedSeries::identity(int K) {
    std::vector<Complex> c(static_cast<size_t>(K), Complex{0.0, 0.0});
    c[0] = Complex{1.0, 0.0};
    return TruncatedSeries(std::move(c));
}

TruncatedSeries TruncatedSeries::linear(Complex slope, int K) {
    std::vector<Complex> c(static_cast<size_t>(K), Complex{0.0, 0.0});
    c[0] = slope;
    return TruncatedSeries(std::move(c));
}

double max_coeff_abs(const TruncatedSeries& s) {
    double m = 0.0;
    for (const auto& v : s.a) m = std::max(m, std::abs(v));
    return m;
}

TruncatedSeries taylor_at_zero(const RationalMap& f, int K) {
    if (K < 2) fail(ErrorCode::invalid_parameter, "expansion order must be at least 2");
    const int d = f.degree();
    // chart polynomial coefficients by ascending power: p_k = coeff of z^k
    std::vector<Complex> p(static_cast<size_t>(K) + 1, Complex{0.0, 0.0});
    std::vector<Complex> q(static_cast<size_t>(K) + 1, Complex{0.0, 0.0});
    for (int k = 0; k <= d && k <= K; ++k) {
        p[static_cast<size_t>(k)] = f.p_coeffs()[static_cast<size_t>(d - k)];
        q[static_cast<size_t>(k)] = f.q_coeffs()[static_cast<size_t>(d - k)];
    }
    if (q[0] == Complex{0.0, 0.0})
        fail(ErrorCode::not_expandable, "pole at 0");
    if (p[0] != Complex{0.0, 0.0})
        fail(ErrorCode::not_expandable, "map does not fix 0");

    // long division p/q as a power series
    std::vector<Complex> b(static_cast<size_t>(K) + 1, Complex{0.0, 0.0});
    for (int k = 0; k <= K; ++k) {
        Complex acc = p[static_cast<size_t>(k)];
        for (int j = 1; j <= k; ++j)
            acc -= q[static_cast<size_t>(j)] * b[static_cast<size_t>(k - j)];
        b[static_cast<size_t>(k)] = acc / q[0];
    }
    return TruncatedSeries(std::vector<Complex>(b.begin() + 1, b.end()));
}

TruncatedSeries multiply(const TruncatedSeries& f, const TruncatedSeries& g) {
    if (f.order() != g.order())
        fail(ErrorCode::order_mismatch, "series orders differ");
    const int K = f.order();
    std::vector<Complex> out(static_cast<size_t>(K), Complex{0.0, 0.0});
    for (int i = 1; i <= K; ++i) {
        const Complex fi = f.a[static_cast<size_t>(i) - 1];
        if (fi == Complex{0.0, 0.0}) continue;
        for (int j = 1; i + j <= K; ++j)
            out[static_cast<size_t>(i + j) - 1] += fi * g.a[static_cast<size_t>(j) - 1];
    }
    return TruncatedSeries(std::move(out));
}

TruncatedSeries compose(const TruncatedSeries& f, const TruncatedSeries& g) {
    if (f.order() != g.order())
        fail(ErrorCode::order_mismatch, "series orders differ");
    const int K = f.order();
    std::vector<Complex> out(static_cast<size_t>(K), Complex{0.0, 0.0});
    TruncatedSeries power = g; // g^i, truncated
    for (int i = 1; i <= K; ++i) {
        const Complex fi = f.a[static_cast<size_t>(i) - 1];
        if (fi != Complex{0.0, 0.0})
            for (int j = i; j <= K; ++j)
                out[static_cast<size_t>(j) - 1] += fi * power.a[static_cast<size_t>(j) - 1];
        if (i < K) power = multiply(power, g);
    }
    return TruncatedSeries(std::move(out));
}

TruncatedSeries koenigs_linearizer(const TruncatedSeries& f) {
    const int K = f.order();
    const Complex s = f.a[0];
    const double mod = std::abs(s);
    if (mod < 1e-300 || std::abs(mod - 1.0) < 1e-14)
        fail(ErrorCode::not_in_koenigs_regime,
             "multiplier modulus in {0, 1}: neutral or superattracting fixed point");

    // powers[i] = coefficients of f^i, truncated
    std::vector<TruncatedSeries> powers;
    powers.reserve(static_cast<size_t>(K) + 1);
    powers.push_back(TruncatedSeries::identity(K)); // unused slot for i = 0
    powers.push_back(f);
    for (int i = 2; i <= K; ++i) powers.push_back(multiply(powers.back(), f));

    std::vector<Complex> phi(static_cast<size_t>(K), Complex{0.0, 0.0});
    phi[0] = Complex{1.0, 0.0};
    Complex spow = s; // s^j
    for (int j = 2; j <= K; ++j) {
        spow *= s;
        Complex acc{0.0, 0.0};
        for (int i = 1; i < j; ++i)
            acc += phi[static_cast<size_t>(i) - 1] *
                   powers[static_cast<size_t>(i)].a[static_cast<size_t>(j) - 1];
        phi[static_cast<size_t>(j) - 1] = -acc / (spow - s);
    }
    return TruncatedSeries(std::move(phi));
}

TruncatedSeries linearization_residual(const TruncatedSeries& phi,
                                       const TruncatedSeries& g,
                                       Complex multiplier) {
    if (phi.order() != g.order())
        fail(ErrorCode::order_mismatch, "series orders differ");
    TruncatedSeries out = compose(phi, g);
    for (size_t j = 0; j < out.a.size(); ++j) out.a[j] -= multiplier * phi.a[j];
    return out;
}

TruncatedSeries invert_series(const TruncatedSeries& f) {
    const int K = f.order();
    if (std::abs(f.a[0]) < 1e-300)
        fail(ErrorCode::invalid_parameter, "series with vanishing linear term has no inverse");
    // Solve f(chi(z)) = z order by order; the order-j defect is linear in chi_j.
    TruncatedSeries chi = TruncatedSeries::linear(Complex{1.0, 0.0} / f.a[0], K);
    for (int j = 2; j <= K; ++j) {
        const TruncatedSeries e = compose(f, chi);
        chi.a[static_cast<size_t>(j) - 1] -= e.a[static_cast<size_t>(j) - 1] / f.a[0];
    }
    return chi;
}

TruncatedSeries rescale(const TruncatedSeries& f, Complex c) {
    if (c == Complex{0.0, 0.0})
        fail(ErrorCode::invalid_parameter, "rescaling by zero");
    TruncatedSeries out = f;
    Complex factor{1.0, 0.0}; // c^{1-j}
    for (int j = 2; j <= f.order(); ++j) {
        factor /= c;
        out.a[static_cast<size_t>(j) - 1] *= factor;
    }
    return out;
}

} // namespace rifs
