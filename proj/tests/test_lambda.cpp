#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rifs/lambda_class.hpp"
#include "rifs/rng.hpp"

using namespace rifs;
using Kind = LambdaClassification::Kind;

TEST_CASE("rational approximation by continued fractions") {
    const auto half = rational_approx(0.5, 50, 1e-9);
    REQUIRE(half.has_value());
    CHECK(half->p == 1);
    CHECK(half->q == 2);

    CHECK_FALSE(rational_approx(std::sqrt(2.0) - 1.0, 50, 1e-9).has_value());
    // known convergents 0, 1/2, 2/5, 5/12, ... show up at looser tolerance
    const auto c = rational_approx(std::sqrt(2.0) - 1.0, 12, 0.01);
    REQUIRE(c.has_value());
    CHECK(c->p == 5);
    CHECK(c->q == 12);

    const auto sevenths = rational_approx(2.0 / 7.0 + 1e-12, 50, 1e-9);
    REQUIRE(sevenths.has_value());
    CHECK(sevenths->p == 2);
    CHECK(sevenths->q == 7);

    const auto neg = rational_approx(-0.25, 50, 1e-9);
    REQUIRE(neg.has_value());
    CHECK(neg->p == -1);
    CHECK(neg->q == 4);

    const auto zero = rational_approx(0.0, 50, 1e-9);
    REQUIRE(zero.has_value());
    CHECK(zero->p == 0);
    CHECK(zero->q == 1);
}

TEST_CASE("classification of the four exemplar parameters") {
    const auto discrete = classify_lambda(Complex{0.0, 0.5});
    CHECK(discrete.kind == Kind::discrete);
    CHECK(discrete.m == 4);
    CHECK(discrete.n == 4);

    const auto radial = classify_lambda(Complex{0.0, 0.6});
    CHECK(radial.kind == Kind::radial_lines);
    CHECK(radial.k == 4);
    CHECK_FALSE(radial.modulus_dependent);

    const double theta = 2.0 * M_PI * (std::sqrt(2.0) - 1.0);
    const auto circles = classify_lambda(std::polar(0.5, theta));
    CHECK(circles.kind == Kind::concentric_circles);
    CHECK(circles.log_step == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    const auto dense = classify_lambda(std::polar(0.6, theta));
    CHECK(dense.kind == Kind::dense_in_plane);
}

TEST_CASE("classification mirrors under conjugation") {
    auto rng = make_rng(19, 0);
    for (int i = 0; i < 40; ++i) {
        const Complex lam = std::polar(0.1 + 0.8 * uniform01(rng),
                                       2.0 * M_PI * uniform01(rng));
        const auto a = classify_lambda(lam);
        const auto b = classify_lambda(std::conj(lam));
        CHECK(a.kind == b.kind);
        CHECK(a.k == b.k);
        CHECK(a.m == b.m);
        CHECK(a.n == b.n);
        CHECK(a.angle_rational.has_value() == b.angle_rational.has_value());
        if (a.angle_rational) {
            CHECK(a.angle_rational->q == b.angle_rational->q);
            const bool boundary = a.angle_rational->q <= 2; // angle 0 or 1/2 is self-conjugate
            if (!boundary) CHECK(a.angle_rational->p == -b.angle_rational->p);
        }
    }
    CHECK_THROWS_AS(classify_lambda(Complex{0.0, 0.0}), Error);
}

TEST_CASE("closure cloud enumerations") {
    const auto half = closure_cloud(Complex{0.5, 0.0}, 2, 2);
    std::vector<double> values;
    for (const Complex& v : half) values.push_back(v.real());
    std::sort(values.begin(), values.end());
    const std::vector<double> want{0.25, 0.5, 0.5, 1, 1, 1, 2, 2, 4};
    REQUIRE(values.size() == want.size());
    for (size_t i = 0; i < want.size(); ++i)
        CHECK(values[i] == doctest::Approx(want[i]).epsilon(1e-14));

    for (const Complex& v : closure_cloud(Complex{0.0, 0.5}, 6, 6)) {
        const double l2 = std::log2(std::abs(v));
        CHECK(std::abs(l2 - std::round(l2)) <= 1e-12); // moduli are powers of 2
        const double a = std::arg(v) / (M_PI / 2.0);
        CHECK(std::abs(a - std::round(a)) <= 1e-12);   // angles multiples of pi/2
    }

    for (const Complex& v : closure_cloud(Complex{1.0, 0.0}, 5, 3)) {
        const double l2 = std::log2(std::abs(v));
        CHECK(std::abs(l2 - std::round(l2)) <= 1e-12);
        CHECK(v.imag() == 0.0);
    }
}

TEST_CASE("cloud pattern oracles recognize synthetic data") {
    // radial: exact rays
    std::vector<Complex> rays;
    for (int j = 0; j < 200; ++j)
        rays.push_back(std::polar(0.8 + 0.01 * (j % 50), M_PI / 2.0 * (j % 4)));
    CHECK(cloud_radial_defect(rays, 4) <= 1e-12);
    CHECK(cloud_radial_defect(rays, 3) > 0.1);

    // circles: exact powers of 2 radii
    std::vector<Complex> circ;
    for (int j = 0; j < 300; ++j)
        circ.push_back(std::polar(std::exp2((j % 5) - 2.0), 0.021 * j));
    CHECK(cloud_circles_defect(circ, std::log(2.0)) <= 1e-12);

    // discrete: a four-point set
    std::vector<Complex> four;
    for (int j = 0; j < 64; ++j) four.push_back(std::polar(1.0, M_PI / 2.0 * (j % 4)));
    CHECK(cloud_distinct_count(four) == 4);

    // dense random points hit every torus cell at coarse resolution
    auto rng = make_rng(29, 0);
    std::vector<Complex> dense;
    for (int j = 0; j < 20000; ++j)
        dense.push_back(std::polar(std::exp2(uniform01(rng) - 0.5),
                                   2.0 * M_PI * uniform01(rng)));
    CHECK(cloud_dense_cell_fraction(dense, 0.05) == 1.0);
    CHECK(cloud_dense_cell_fraction(rays, 0.05) < 0.5);
}

TEST_CASE("exemplar clouds match their classified patterns") {
    const auto radial_cloud = closure_cloud(Complex{0.0, 0.6}, 60, 60);
    CHECK(cloud_radial_defect(radial_cloud, 4) <= 1e-9);

    const double theta = 2.0 * M_PI * (std::sqrt(2.0) - 1.0);
    const auto circle_cloud = closure_cloud(std::polar(0.5, theta), 60, 60);
    CHECK(cloud_circles_defect(circle_cloud, std::log(2.0)) <= 1e-9);

    const auto discrete_cloud = closure_cloud(Complex{0.0, 0.5}, 60, 60);
    CHECK(cloud_distinct_count(discrete_cloud) <= 16);
}
