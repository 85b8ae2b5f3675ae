#include "hsir/error.hpp"
#include "hsir/metrics.hpp"
#include "support/synthetic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

namespace hsir {
namespace {

using testing::random_cube;
using testing::unit;

Cube uniform01(std::mt19937_64& g, Shape s) {
    Cube c(s);
    for (double& v : c.data()) v = unit(g);
    return c;
}

// Direct 2-D weighted window at every valid position; variance taken as
// sum w (x - mu)^2 rather than E[x^2] - mu^2.
double naive_ssim(const std::vector<double>& x, const std::vector<double>& y, std::size_t h, std::size_t w) {
    const int n = 11;
    const double sigma = 1.5;
    double wsum = 0.0;
    double wt[11][11];
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            wt[a][b] = std::exp(-((a - 5.0) * (a - 5.0) + (b - 5.0) * (b - 5.0)) / (2 * sigma * sigma));
            wsum += wt[a][b];
        }
    const double c1 = 1e-4, c2 = 9e-4;
    double acc = 0.0;
    std::size_t cnt = 0;
    for (std::size_t i = 0; i + n <= h; ++i)
        for (std::size_t j = 0; j + n <= w; ++j) {
            double mx = 0, my = 0;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    const std::size_t p = (i + a) * w + j + b;
                    mx += wt[a][b] / wsum * x[p];
                    my += wt[a][b] / wsum * y[p];
                }
            double sx = 0, sy = 0, sxy = 0;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    const std::size_t p = (i + a) * w + j + b;
                    const double ww = wt[a][b] / wsum;
                    sx += ww * (x[p] - mx) * (x[p] - mx);
                    sy += ww * (y[p] - my) * (y[p] - my);
                    sxy += ww * (x[p] - mx) * (y[p] - my);
                }
            acc += (2 * mx * my + c1) * (2 * sxy + c2) / ((mx * mx + my * my + c1) * (sx + sy + c2));
            ++cnt;
        }
    return acc / static_cast<double>(cnt);
}

TEST(PsnrTest, ClosedFormAndCap) {
    const std::vector<double> a(100, 0.5), b(100, 0.6);
    EXPECT_NEAR(psnr_band(a, b), 20.0, 1e-10);
    EXPECT_EQ(psnr_band(a, a), kPsnrCapDb);
    EXPECT_NEAR(psnr_band(a, b, 2.0), 20.0 + 20.0 * std::log10(2.0), 1e-10);
    EXPECT_THROW(psnr_band(a, std::vector<double>(99, 0.5)), ArgumentError);
    EXPECT_THROW(psnr_band(a, b, 0.0), ArgumentError);
}

TEST(PsnrTest, DirectMseOracle) {
    std::mt19937_64 g(1);
    const Cube r = uniform01(g, {9, 8, 1}), t = uniform01(g, {9, 8, 1});
    double e = 0.0;
    for (std::size_t n = 0; n < r.size(); ++n) e += std::pow(r.values()[n] - t.values()[n], 2);
    e /= static_cast<double>(r.size());
    EXPECT_NEAR(psnr_band(r.band(0), t.band(0)), -10.0 * std::log10(e), 1e-10);
}

TEST(PsnrTest, ConstantShiftInvariance) {
    std::mt19937_64 g(2);
    const Cube r = uniform01(g, {12, 10, 1}), t = uniform01(g, {12, 10, 1});
    const Cube r2 = r + Cube(r.shape(), 3.25), t2 = t + Cube(t.shape(), 3.25);
    EXPECT_NEAR(psnr_band(r.band(0), t.band(0)), psnr_band(r2.band(0), t2.band(0)), 1e-10);
}

TEST(SsimTest, IdenticalIsExactlyOne) {
    std::mt19937_64 g(3);
    const Cube r = uniform01(g, {20, 17, 1});
    EXPECT_EQ(ssim_band(r.band(0), r.band(0), 20, 17), 1.0);
}

TEST(SsimTest, MatchesNaiveSlidingWindow) {
    std::mt19937_64 g(4);
    for (int trial = 0; trial < 3; ++trial) {
        const std::size_t h = 14 + trial * 3, w = 12 + trial * 5;
        const Cube r = uniform01(g, {h, w, 1}), t = uniform01(g, {h, w, 1});
        const std::vector<double> x(r.values()), y(t.values());
        EXPECT_NEAR(ssim_band(r.band(0), t.band(0), h, w), naive_ssim(x, y, h, w), 1e-8);
    }
}

TEST(SsimTest, Symmetric) {
    std::mt19937_64 g(5);
    const Cube r = uniform01(g, {16, 16, 1}), t = uniform01(g, {16, 16, 1});
    EXPECT_NEAR(ssim_band(r.band(0), t.band(0), 16, 16), ssim_band(t.band(0), r.band(0), 16, 16), 1e-12);
}

TEST(SsimTest, NegatedRampIsNotPositive) {
    const std::size_t h = 24, w = 24;
    Cube r(h, w, 1);
    for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j) r(i, j, 0) = 0.1 + 0.8 * static_cast<double>(i + j) / (h + w - 2);
    double mean = 0.0;
    for (double v : r.data()) mean += v;
    mean /= static_cast<double>(r.size());
    Cube t = r;
    for (double& v : t.data()) v = 2.0 * mean - v;
    EXPECT_LE(ssim_band(r.band(0), t.band(0), h, w), 0.0);
}

TEST(SsimTest, WindowLargerThanBand) {
    const std::vector<double> a(100, 0.5);
    EXPECT_THROW(ssim_band(a, a, 10, 10), ArgumentError);
    SsimOptions small;
    small.window = 7;
    EXPECT_EQ(ssim_band(a, a, 10, 10, small), 1.0);
}

TEST(ErgasTest, ClosedFormAndIdentity) {
    const Cube r(Shape{4, 4, 3}, 0.5), t(Shape{4, 4, 3}, 0.6);
    EXPECT_NEAR(ergas(r, t), 20.0, 1e-9);
    EXPECT_EQ(ergas(r, r), 0.0);
    EXPECT_THROW(ergas(Cube(Shape{2, 2, 1}, 0.0), Cube(2, 2, 1)), DataError);
    EXPECT_THROW(ergas(r, Cube(4, 4, 2)), DataError);
}

TEST(ErgasTest, TwoLoopOracle) {
    std::mt19937_64 g(6);
    const Cube r = uniform01(g, {7, 6, 5}), t = uniform01(g, {7, 6, 5});
    double acc = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
        double e = 0.0, m = 0.0;
        for (std::size_t i = 0; i < 7; ++i)
            for (std::size_t j = 0; j < 6; ++j) {
                e += std::pow(r(i, j, k) - t(i, j, k), 2);
                m += r(i, j, k);
            }
        e /= 42.0;
        m /= 42.0;
        acc += e / (m * m);
    }
    EXPECT_NEAR(ergas(r, t), 100.0 * std::sqrt(acc / 5.0), 1e-10);
}

TEST(ErgasTest, ScalesWithError) {
    std::mt19937_64 g(7);
    const Cube r = uniform01(g, {6, 6, 4});
    const Cube e = random_cube(g, {6, 6, 4});
    const double base = ergas(r, r + e);
    for (double a : {-2.0, 0.5, 3.0}) EXPECT_NEAR(ergas(r, r + a * e), std::abs(a) * base, 1e-9 * base);
}

TEST(EvaluateTest, AggregatesAreExactMeans) {
    std::mt19937_64 g(8);
    const Cube r = uniform01(g, {12, 12, 4}), t = uniform01(g, {12, 12, 4});
    const MetricsReport m = evaluate(r, t);
    ASSERT_EQ(m.per_band_psnr.size(), 4u);
    ASSERT_EQ(m.per_band_ssim.size(), 4u);
    double sp = 0.0, ss = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        sp += m.per_band_psnr[k];
        ss += m.per_band_ssim[k];
        EXPECT_EQ(m.per_band_psnr[k], psnr_band(r.band(k), t.band(k)));
    }
    EXPECT_EQ(m.mpsnr, sp / 4.0);
    EXPECT_EQ(m.mssim, ss / 4.0);
    EXPECT_EQ(m.mpsnr, mpsnr(r, t));
    EXPECT_THROW(evaluate(r, Cube(12, 12, 3)), DataError);
}

TEST(EvaluateTest, IdenticalCubes) {
    std::mt19937_64 g(9);
    const Cube r = uniform01(g, {12, 13, 3});
    const MetricsReport m = evaluate(r, r);
    EXPECT_EQ(m.mpsnr, 100.0);
    EXPECT_EQ(m.mssim, 1.0);
    EXPECT_EQ(m.ergas, 0.0);
}

TEST(EvaluateTest, CsvLayout) {
    const Cube r(Shape{11, 11, 2}, 0.5), t(Shape{11, 11, 2}, 0.6);
    const std::string csv = evaluate(r, t).to_csv();
    std::istringstream in(csv);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    ASSERT_EQ(lines.size(), 6u);
    EXPECT_EQ(lines[0], "band,psnr_db,ssim");
    auto field = [](const std::string& l, std::size_t idx) {
        std::istringstream ls(l);
        std::string tok;
        for (std::size_t n = 0; n <= idx; ++n) std::getline(ls, tok, ',');
        return tok;
    };
    EXPECT_EQ(field(lines[1], 0), "1");
    EXPECT_NEAR(std::stod(field(lines[1], 1)), 20.0, 1e-9);
    EXPECT_EQ(field(lines[2], 0), "2");
    EXPECT_EQ(field(lines[3], 0), "mpsnr");
    EXPECT_NEAR(std::stod(field(lines[3], 1)), 20.0, 1e-9);
    EXPECT_EQ(field(lines[4], 0), "mssim");
    EXPECT_EQ(field(lines[5], 0), "ergas");
    EXPECT_NEAR(std::stod(field(lines[5], 1)), 20.0, 1e-9);
    const std::string js = evaluate(r, t).to_json();
    EXPECT_NE(js.find("\"per_band_psnr\""), std::string::npos);
    EXPECT_NE(js.find("\"ergas\""), std::string::npos);
}

TEST(MeanProfileTest, ConstantRampAndLoopOracle) {
    Cube c(Shape{5, 4, 2}, 0.3);
    for (double v : mean_profile(c, 1, ProfileAxis::Horizontal)) EXPECT_DOUBLE_EQ(v, 0.3);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 4; ++j) c(i, j, 0) = static_cast<double>(i);
    const auto ramp = mean_profile(c, 0, ProfileAxis::Horizontal);
    ASSERT_EQ(ramp.size(), 5u);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(ramp[i], static_cast<double>(i));

    std::mt19937_64 g(10);
    const Cube r = random_cube(g, {6, 7, 3});
    const auto hp = mean_profile(r, 2, ProfileAxis::Horizontal);
    const auto vp = mean_profile(r, 2, ProfileAxis::Vertical);
    ASSERT_EQ(vp.size(), 7u);
    for (std::size_t i = 0; i < 6; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < 7; ++j) s += r(i, j, 2);
        EXPECT_NEAR(hp[i], s / 7.0, 1e-12);
    }
    for (std::size_t j = 0; j < 7; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < 6; ++i) s += r(i, j, 2);
        EXPECT_NEAR(vp[j], s / 6.0, 1e-12);
    }
    EXPECT_THROW(mean_profile(r, 3, ProfileAxis::Vertical), ArgumentError);
    EXPECT_EQ(profile_axis_from_string("vertical"), ProfileAxis::Vertical);
    EXPECT_THROW(profile_axis_from_string("diagonal"), ArgumentError);
}

}  // namespace
}  // namespace hsir
