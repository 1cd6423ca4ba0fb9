#include "rifs/lambda_class.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace rifs {

std::optional<Rational> rational_approx(double x, long long qmax, double tol) {
    if (qmax < 1 || !(tol > 0.0))
        fail(ErrorCode::invalid_parameter, "rational_approx needs qmax >= 1, tol > 0");
    const double ax = std::abs(x);
    const long long sign = x < 0.0 ? -1 : 1;

    long long p_prev = 0, q_prev = 1; // h_{-2}/k_{-2}
    long long p_cur = 1, q_cur = 0;   // h_{-1}/k_{-1}
    double y = ax;
    for (int iter = 0; iter < 64; ++iter) {
        const double fl = std::floor(y);
        if (fl > 9e17) break;
        const long long a = static_cast<long long>(fl);
        const __int128 pn = static_cast<__int128>(a) * p_cur + p_prev;
        const __int128 qn = static_cast<__int128>(a) * q_cur + q_prev;
        if (qn > qmax) break;
        p_prev = p_cur; q_prev = q_cur;
        p_cur = static_cast<long long>(pn);
        q_cur = static_cast<long long>(qn);
        if (std::abs(ax - static_cast<double>(p_cur) / static_cast<double>(q_cur)) <= tol) {
            const long long g = std::gcd(p_cur, q_cur);
            return Rational{sign * p_cur / (g ? g : 1), q_cur / (g ? g : 1)};
        }
        const double frac = y - fl;
        if (frac < 1e-18) break;
        y = 1.0 / frac;
    }
    return std::nullopt;
}

const char* kind_name(LambdaClassification::Kind k) {
    switch (k) {
        case LambdaClassification::Kind::dense_in_plane: return "DenseInPlane";
        case LambdaClassification::Kind::radial_lines: return "RadialLines";
        case LambdaClassification::Kind::concentric_circles: return "ConcentricCircles";
        case LambdaClassification::Kind::discrete: return "Discrete";
    }
    return "?";
}

LambdaClassification classify_lambda(Complex lambda, long long qmax, double tol) {
    if (lambda == Complex{0.0, 0.0})
        fail(ErrorCode::invalid_parameter, "lambda must be nonzero");

    LambdaClassification out;
    const double angle = std::arg(lambda) / (2.0 * M_PI); // in (-1/2, 1/2]
    const double ratio = std::log(std::abs(lambda)) / std::log(2.0);

    out.angle_rational = rational_approx(angle, qmax, tol);
    out.modulus_rational = rational_approx(ratio, qmax, tol);
    // A sign-compatible relation 2^m |lambda|^n = 1 with m, n >= 0 needs
    // ratio = -p/q <= 0; for |lambda| > 1 nonnegative powers never collide.
    out.modulus_dependent =
        out.modulus_rational.has_value() && out.modulus_rational->p <= 0;

    const bool angle_rat = out.angle_rational.has_value();
    const bool moduli_dense = ratio < 0.0 && !out.modulus_rational.has_value();

    if (moduli_dense) {
        if (angle_rat) {
            out.kind = LambdaClassification::Kind::radial_lines;
            out.k = static_cast<int>(out.angle_rational->q);
        } else {
            out.kind = LambdaClassification::Kind::dense_in_plane;
        }
    } else if (out.modulus_dependent) {
        const long long pm = -out.modulus_rational->p; // ratio = -pm/qm
        const long long qm = out.modulus_rational->q;
        out.log_step = std::log(2.0) / static_cast<double>(qm);
        if (angle_rat) {
            out.kind = LambdaClassification::Kind::discrete;
            const long long qa = out.angle_rational->q;
            const long long g = std::gcd(qm, qa);
            out.n = qm / g * qa; // lcm(qm, qa)
            out.m = pm * (out.n / qm);
        } else {
            out.kind = LambdaClassification::Kind::concentric_circles;
        }
    } else {
        // |lambda| >= 1 (or an unresolved positive ratio): nonnegative powers
        // march outward, so the closure is discrete with no unit relation.
        out.kind = LambdaClassification::Kind::discrete;
        out.m = 0;
        out.n = 0;
    }
    return out;
}

std::vector<Complex> closure_cloud(Complex lambda, int mmax, int nmax) {
    if (mmax < 1 || nmax < 1)
        fail(ErrorCode::invalid_parameter, "cloud bounds must be >= 1");
    std::vector<Complex> out;
    out.reserve(static_cast<size_t>(mmax + 1) * (nmax + 1));
    Complex lam_pow{1.0, 0.0};
    for (int n = 0; n <= nmax; ++n) {
        double two_pow = 1.0;
        for (int m = 0; m <= mmax; ++m) {
            const Complex v = two_pow * lam_pow;
            if (std::abs(v) <= 1e100 && std::isfinite(v.real()) && std::isfinite(v.imag()))
                out.push_back(v);
            two_pow *= 2.0;
            if (two_pow > 1e200) break;
        }
        lam_pow *= lambda;
        if (!(std::abs(lam_pow) > 1e-200) || !(std::abs(lam_pow) < 1e200)) break;
    }
    return out;
}

Complex fold_by_power_of_two(Complex v) {
    const double l2 = std::log2(std::abs(v));
    return v * std::exp2(-std::round(l2));
}

double cloud_radial_defect(const std::vector<Complex>& cloud, int k) {
    double worst = 0.0;
    for (const Complex& v : cloud) {
        if (v == Complex{0.0, 0.0}) continue;
        const Complex s = fold_by_power_of_two(v);
        const double theta = std::arg(s);
        const double sector = 2.0 * M_PI / k;
        const double delta = std::abs(theta - sector * std::round(theta / sector));
        worst = std::max(worst, std::abs(s) * std::sin(delta));
    }
    return worst;
}

double cloud_circles_defect(const std::vector<Complex>& cloud, double log_step) {
    double worst = 0.0;
    for (const Complex& v : cloud) {
        if (v == Complex{0.0, 0.0}) continue;
        const Complex s = fold_by_power_of_two(v);
        const double lr = std::log(std::abs(s));
        const double nearest = log_step * std::round(lr / log_step);
        worst = std::max(worst, std::abs(std::abs(s) - std::exp(nearest)));
    }
    return worst;
}

int cloud_distinct_count(const std::vector<Complex>& cloud, double tol) {
    std::vector<Complex> folded;
    folded.reserve(cloud.size());
    for (const Complex& v : cloud)
        if (v != Complex{0.0, 0.0}) folded.push_back(fold_by_power_of_two(v));
    std::vector<Complex> reps;
    for (const Complex& s : folded) {
        bool found = false;
        for (const Complex& r : reps)
            if (std::abs(s - r) <= tol) { found = true; break; }
        if (!found) reps.push_back(s);
    }
    return static_cast<int>(reps.size());
}

MarginalGaps cloud_marginal_gaps(const std::vector<Complex>& cloud) {
    std::vector<double> angles, moduli;
    for (const Complex& v : cloud) {
        if (v == Complex{0.0, 0.0}) continue;
        const Complex s = fold_by_power_of_two(v);
        double u = std::arg(s) / (2.0 * M_PI) + 0.5;
        double w = std::log2(std::abs(s)) + 0.5;
        angles.push_back(u - std::floor(u));
        moduli.push_back(w - std::floor(w));
    }
    auto cyclic_gap = [](std::vector<double>& xs) {
        if (xs.empty()) return 1.0;
        std::sort(xs.begin(), xs.end());
        double gap = xs.front() + 1.0 - xs.back();
        for (size_t i = 1; i < xs.size(); ++i) gap = std::max(gap, xs[i] - xs[i - 1]);
        return gap;
    };
    return {cyclic_gap(angles), cyclic_gap(moduli)};
}

double cloud_dense_cell_fraction(const std::vector<Complex>& cloud, double resolution) {
    if (!(resolution > 0.0 && resolution < 1.0))
        fail(ErrorCode::invalid_parameter, "resolution must lie in (0, 1)");
    const int cells = static_cast<int>(std::ceil(1.0 / resolution));
    std::vector<char> hit(static_cast<size_t>(cells) * cells, 0);
    for (const Complex& v : cloud) {
        if (v == Complex{0.0, 0.0}) continue;
        const Complex s = fold_by_power_of_two(v);
        double u = std::arg(s) / (2.0 * M_PI) + 0.5; // [0, 1)
        double w = std::log2(std::abs(s)) + 0.5;     // [0, 1)
        u -= std::floor(u);
        w -= std::floor(w);
        const int iu = std::min(cells - 1, static_cast<int>(u * cells));
        const int iw = std::min(cells - 1, static_cast<int>(w * cells));
        hit[static_cast<size_t>(iu) * cells + iw] = 1;
    }
    long long count = 0;
    for (char h : hit) count += h;
    return static_cast<double>(count) / (static_cast<double>(cells) * cells);
}

} // namespace rifs
