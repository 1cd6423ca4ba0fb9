#include "rifs/sphere.hpp"

#include <algorithm>
#include <cmath>

namespace rifs {

SpherePoint::SpherePoint(Complex n, Complex d) {
    const double an = std::norm(n);
    const double ad = std::norm(d);
    // NaN comparisons are false, so NaN input also lands in the failure branch.
    if (!(an > 0.0) && !(ad > 0.0))
        fail(ErrorCode::invalid_point, "degenerate homogeneous pair (0, 0)");
    if (an > ad) {
        num = Complex{1.0, 0.0};
        den = d / n;
        if (std::isnan(den.real()) || std::isnan(den.imag())) den = Complex{0.0, 0.0};
    } else {
        num = n / d;
        den = Complex{1.0, 0.0};
        if (std::isnan(num.real()) || std::isnan(num.imag())) num = Complex{0.0, 0.0};
    }
}

double SpherePoint::planar_abs() const {
    if (is_infinity()) return std::numeric_limits<double>::infinity();
    return std::abs(num) / std::abs(den);
}

Complex SpherePoint::to_complex() const {
    if (is_infinity()) fail(ErrorCode::chart, "point at infinity has no affine value");
    return num / den;
}

double chordal_distance(const SpherePoint& p, const SpherePoint& q) {
    const Complex cross = p.num * q.den - q.num * p.den;
    const double np = std::norm(p.num) + std::norm(p.den);
    const double nq = std::norm(q.num) + std::norm(q.den);
    return 2.0 * std::abs(cross) / std::sqrt(np * nq);
}

bool same_point(const SpherePoint& p, const SpherePoint& q, double tol) {
    return chordal_distance(p, q) <= tol;
}

Complex eval_form(const std::vector<Complex>& c, Complex z, Complex w) {
    // c[i] multiplies z^{d-i} w^i
    const int d = static_cast<int>(c.size()) - 1;
    Complex acc{0.0, 0.0};
    Complex wp{1.0, 0.0};
    // accumulate from the z^d term down, multiplying by w as the z-power drops
    Complex zp[5] = {Complex{1.0, 0.0}};
    for (int j = 1; j <= d; ++j) zp[j] = zp[j - 1] * z;
    for (int i = 0; i <= d; ++i) {
        acc += c[i] * zp[d - i] * wp;
        wp *= w;
    }
    return acc;
}

namespace {

std::vector<Complex> d_dz(const std::vector<Complex>& c) {
    // c[i] ~ z^{d-i} w^i  ->  (d-i) c[i] ~ z^{d-1-i} w^i
    const int d = static_cast<int>(c.size()) - 1;
    if (d == 0) return {Complex{0.0, 0.0}};
    std::vector<Complex> out(d);
    for (int i = 0; i < d; ++i) out[i] = static_cast<double>(d - i) * c[i];
    return out;
}

std::vector<Complex> d_dw(const std::vector<Complex>& c) {
    const int d = static_cast<int>(c.size()) - 1;
    if (d == 0) return {Complex{0.0, 0.0}};
    std::vector<Complex> out(d);
    for (int i = 0; i < d; ++i) out[i] = static_cast<double>(i + 1) * c[i + 1];
    return out;
}

double max_abs(const std::vector<Complex>& c) {
    double m = 0.0;
    for (const auto& v : c) m = std::max(m, std::abs(v));
    return m;
}

} // namespace

Complex resultant(const std::vector<Complex>& p, const std::vector<Complex>& q) {
    const int dp = static_cast<int>(p.size()) - 1;
    const int dq = static_cast<int>(q.size()) - 1;
    const int n = dp + dq;
    std::vector<Complex> m(static_cast<size_t>(n) * n, Complex{0.0, 0.0});
    auto at = [&](int r, int c) -> Complex& { return m[static_cast<size_t>(r) * n + c]; };
    for (int r = 0; r < dq; ++r)
        for (int i = 0; i <= dp; ++i) at(r, r + i) = p[i];
    for (int r = 0; r < dp; ++r)
        for (int i = 0; i <= dq; ++i) at(dq + r, r + i) = q[i];

    // Gaussian elimination with partial pivoting
    Complex det{1.0, 0.0};
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(at(col, col));
        for (int r = col + 1; r < n; ++r) {
            const double v = std::abs(at(r, col));
            if (v > best) { best = v; piv = r; }
        }
        if (best == 0.0) return Complex{0.0, 0.0};
        if (piv != col) {
            for (int c = col; c < n; ++c) std::swap(at(piv, c), at(col, c));
            det = -det;
        }
        det *= at(col, col);
        for (int r = col + 1; r < n; ++r) {
            const Complex f = at(r, col) / at(col, col);
            if (f == Complex{0.0, 0.0}) continue;
            for (int c = col; c < n; ++c) at(r, c) -= f * at(col, c);
        }
    }
    return det;
}

RationalMap::RationalMap(std::vector<Complex> p, std::vector<Complex> q)
    : p_(std::move(p)), q_(std::move(q)) {
    if (p_.size() != q_.size() || p_.size() < 2)
        fail(ErrorCode::invalid_parameter, "coefficient lists must share length d+1, d >= 1");
    degree_ = static_cast<int>(p_.size()) - 1;
    if (degree_ > 4)
        fail(ErrorCode::invalid_parameter, "maps of degree > 4 are not supported");

    const double sp = max_abs(p_);
    const double sq = max_abs(q_);
    if (sp == 0.0 || sq == 0.0)
        fail(ErrorCode::invalid_parameter, "zero form");
    std::vector<Complex> pn(p_), qn(q_);
    for (auto& v : pn) v /= sp;
    for (auto& v : qn) v /= sq;
    if (std::abs(resultant(pn, qn)) <= 1e-12)
        fail(ErrorCode::invalid_parameter, "P and Q share a projective root (resultant ~ 0)");

    pz_ = d_dz(p_);
    pw_ = d_dw(p_);
    qz_ = d_dz(q_);
    qw_ = d_dw(q_);
}

SpherePoint RationalMap::apply(const SpherePoint& pt) const {
    const Complex P = eval_form(p_, pt.num, pt.den);
    const Complex Q = eval_form(q_, pt.num, pt.den);
    if (std::abs(P) < 1e-300 && std::abs(Q) < 1e-300)
        fail(ErrorCode::indeterminate_evaluation,
             "both forms vanished at the point (common root slipped past construction)");
    return SpherePoint(P, Q);
}

Complex RationalMap::chart_num(Complex z) const {
    Complex acc{0.0, 0.0};
    for (const auto& c : p_) acc = acc * z + c;
    return acc;
}

Complex RationalMap::chart_den(Complex z) const {
    Complex acc{0.0, 0.0};
    for (const auto& c : q_) acc = acc * z + c;
    return acc;
}

Complex RationalMap::planar_derivative(Complex z) const {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        fail(ErrorCode::chart, "planar derivative needs a finite point");
    // chart polynomials p(z) = P(z,1), q(z) = Q(z,1) and their z-derivatives
    Complex pv{0.0, 0.0}, pd{0.0, 0.0}, qv{0.0, 0.0}, qd{0.0, 0.0};
    for (const auto& c : p_) { pd = pd * z + pv; pv = pv * z + c; }
    for (const auto& c : q_) { qd = qd * z + qv; qv = qv * z + c; }
    const double qn = std::norm(qv);
    if (qn < 1e-280)
        fail(ErrorCode::chart, "pole: use the spherical derivative instead");
    return (pd * qv - pv * qd) / (qv * qv);
}

double RationalMap::spherical_derivative_norm(const SpherePoint& pt) const {
    const Complex pz = eval_form(pz_, pt.num, pt.den);
    const Complex pw = eval_form(pw_, pt.num, pt.den);
    const Complex qz = eval_form(qz_, pt.num, pt.den);
    const Complex qw = eval_form(qw_, pt.num, pt.den);
    const Complex W = pz * qw - pw * qz;
    const Complex P = eval_form(p_, pt.num, pt.den);
    const Complex Q = eval_form(q_, pt.num, pt.den);
    const double denom = degree_ * (std::norm(P) + std::norm(Q));
    if (denom == 0.0)
        fail(ErrorCode::indeterminate_evaluation, "derivative cocycle undefined at a common root");
    return std::abs(W) * (std::norm(pt.num) + std::norm(pt.den)) / denom;
}

} // namespace rifs
