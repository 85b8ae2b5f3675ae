#include "hsir/error.hpp"
#include "hsir/fft3d.hpp"
#include "support/synthetic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace hsir {
namespace {

using testing::random_cube;

// O(n^2) per axis: direct triple sum over all voxels.
SpectralCube naive_dft(const Cube& c) {
    const Shape s = c.shape();
    SpectralCube out{s, std::vector<Complex>(s.size())};
    const double tp = 2.0 * std::numbers::pi;
    for (std::size_t r = 0; r < s.bands; ++r)
        for (std::size_t p = 0; p < s.height; ++p)
            for (std::size_t q = 0; q < s.width; ++q) {
                Complex acc = 0.0;
                for (std::size_t k = 0; k < s.bands; ++k)
                    for (std::size_t i = 0; i < s.height; ++i)
                        for (std::size_t j = 0; j < s.width; ++j) {
                            const double ph = tp * (static_cast<double>(p * i) / s.height +
                                                    static_cast<double>(q * j) / s.width +
                                                    static_cast<double>(r * k) / s.bands);
                            acc += c(i, j, k) * std::polar(1.0, -ph);
                        }
                out(p, q, r) = acc;
            }
    return out;
}

std::vector<Complex> naive_dft1(const std::vector<Complex>& x) {
    const std::size_t n = x.size();
    std::vector<Complex> y(n);
    for (std::size_t m = 0; m < n; ++m) {
        Complex acc = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            // reduce m*t mod n before converting to keep the phase exact
            const double ph = 2.0 * std::numbers::pi * static_cast<double>((m * t) % n) / static_cast<double>(n);
            acc += x[t] * std::polar(1.0, -ph);
        }
        y[m] = acc;
    }
    return y;
}

double max_abs_diff(const SpectralCube& a, const SpectralCube& b) {
    double m = 0.0;
    for (std::size_t n = 0; n < a.data.size(); ++n) m = std::max(m, std::abs(a.data[n] - b.data[n]));
    return m;
}

double round_trip_error(const Cube& c) {
    const SpectralCube back = ifftn(fftn(c));
    double m = 0.0;
    for (std::size_t n = 0; n < c.size(); ++n) m = std::max(m, std::abs(back.data[n] - c.values()[n]));
    return m;
}

TEST(FftPlanTest, MatchesNaiveDftForManyLengths) {
    std::mt19937_64 g(1);
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 6u, 7u, 8u, 9u, 11u, 12u, 13u, 16u, 17u, 19u, 23u, 30u, 31u, 45u,
                          64u, 97u, 145u, 210u, 224u, 307u}) {
        std::vector<Complex> x(n);
        for (auto& v : x) v = {2.0 * testing::unit(g) - 1.0, 2.0 * testing::unit(g) - 1.0};
        const auto ref = naive_dft1(x);
        FftPlan plan(n);
        auto y = x;
        plan.execute(y, false);
        double err = 0.0, scale = 1.0;
        for (std::size_t m = 0; m < n; ++m) {
            err = std::max(err, std::abs(y[m] - ref[m]));
            scale = std::max(scale, std::abs(ref[m]));
        }
        EXPECT_LE(err, 1e-12 * scale * static_cast<double>(n)) << "n=" << n;

        plan.execute(y, true);
        double rt = 0.0;
        for (std::size_t t = 0; t < n; ++t) rt = std::max(rt, std::abs(y[t] / static_cast<double>(n) - x[t]));
        EXPECT_LE(rt, 1e-12) << "n=" << n;
    }
}

TEST(FftPlanTest, RejectsZeroLength) { EXPECT_THROW(FftPlan(0), ArgumentError); }

TEST(Fft3dTest, DeltaGivesAllOnes) {
    Cube c(3, 5, 4);
    c(0, 0, 0) = 1.0;
    const SpectralCube sc = fftn(c);
    for (const Complex& v : sc.data) EXPECT_LE(std::abs(v - Complex(1.0, 0.0)), 1e-14);
}

TEST(Fft3dTest, ConstantConcentratesAtDc) {
    const Cube c(Shape{4, 7, 3}, 0.25);
    const SpectralCube sc = fftn(c);
    EXPECT_NEAR(sc(0, 0, 0).real(), 4 * 7 * 3 * 0.25, 1e-12);
    for (std::size_t n = 1; n < sc.data.size(); ++n) EXPECT_LE(std::abs(sc.data[n]), 1e-12);
}

TEST(Fft3dTest, Random5x7x3AgainstNaiveDft) {
    std::mt19937_64 g(2);
    const Cube c = random_cube(g, {5, 7, 3});
    EXPECT_LE(max_abs_diff(fftn(c), naive_dft(c)), 1e-8);
    EXPECT_LE(round_trip_error(c), 1e-10);
}

TEST(Fft3dTest, PrimeDimensionsAgainstNaiveDft) {
    std::mt19937_64 g(3);
    const Cube c = random_cube(g, {13, 7, 11});
    EXPECT_LE(max_abs_diff(fftn(c), naive_dft(c)), 1e-8);
    EXPECT_LE(round_trip_error(c), 1e-10);
}

TEST(Fft3dTest, RoundTripAllSmallShapes) {
    std::mt19937_64 g(4);
    for (std::size_t h = 1; h <= 16; ++h)
        for (std::size_t w = 1; w <= 16; ++w)
            for (std::size_t b : {1u, 2u, 3u, 5u, 7u, 8u, 13u, 16u}) {
                const Cube c = random_cube(g, {h, w, b});
                ASSERT_LE(round_trip_error(c), 1e-10) << h << "x" << w << "x" << b;
            }
}

TEST(Fft3dTest, RoundTripLongAxis) {
    std::mt19937_64 g(5);
    for (const Shape s : {Shape{145, 3, 2}, Shape{2, 145, 3}, Shape{3, 2, 145}}) {
        const Cube c = random_cube(g, s);
        EXPECT_LE(round_trip_error(c), 1e-10) << s.str();
    }
}

TEST(Fft3dTest, Parseval) {
    std::mt19937_64 g(6);
    for (const Shape s : {Shape{6, 5, 4}, Shape{7, 13, 3}, Shape{17, 4, 9}}) {
        const Cube c = random_cube(g, s);
        const SpectralCube sc = fftn(c);
        double e = 0.0;
        for (const Complex& v : sc.data) e += std::norm(v);
        e /= static_cast<double>(s.size());
        const double ex = inner(c, c);
        EXPECT_LE(std::abs(e - ex), 1e-9 * ex);
    }
}

TEST(Fft3dTest, Linearity) {
    std::mt19937_64 g(7);
    const Shape s{5, 6, 7};
    const Cube x = random_cube(g, s), y = random_cube(g, s);
    const double a = 1.7, b = -0.4;
    const SpectralCube lhs = fftn(a * x + b * y);
    const SpectralCube fx = fftn(x), fy = fftn(y);
    for (std::size_t n = 0; n < lhs.data.size(); ++n)
        EXPECT_LE(std::abs(lhs.data[n] - (a * fx.data[n] + b * fy.data[n])), 1e-10);
}

TEST(Fft3dTest, PlanReuseIsDeterministic) {
    std::mt19937_64 g(8);
    const Cube c = random_cube(g, {9, 10, 11});
    const Fft3d plan(c.shape());
    const SpectralCube a = plan.forward(c), b = plan.forward(c);
    EXPECT_EQ(a.data, b.data);
}

}  // namespace
}  // namespace hsir
