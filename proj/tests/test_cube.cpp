#include "hsir/cube.hpp"
#include "hsir/error.hpp"
#include "support/synthetic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace hsir {
namespace {

using testing::random_cube;
using testing::random_matrix;

Cube iota_cube(Shape s) {
    Cube c(s);
    double v = 1.0;
    // i fastest, then j, then k
    for (std::size_t k = 0; k < s.bands; ++k)
        for (std::size_t j = 0; j < s.width; ++j)
            for (std::size_t i = 0; i < s.height; ++i) c(i, j, k) = v++;
    return c;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

TEST(CubeTest, LayoutIsBandSequential) {
    Cube c(2, 3, 4);
    c(1, 2, 3) = 7.0;
    EXPECT_EQ(c.data()[(3 * 2 + 1) * 3 + 2], 7.0);
    EXPECT_EQ(c.band(3)[5], 7.0);
    EXPECT_EQ(c.size(), 24u);
}

TEST(CubeTest, RejectsMismatchedData) {
    EXPECT_THROW(Cube(Shape{2, 2, 2}, std::vector<double>(7)), ArgumentError);
}

TEST(UnfoldTest, Mode1FirstRowOf2x2x2) {
    const Cube c = iota_cube({2, 2, 2});
    const Matrix m = unfold(c, 1);
    ASSERT_EQ(m.rows(), 2);
    ASSERT_EQ(m.cols(), 4);
    // x111, x121, x112, x122
    EXPECT_EQ(m(0, 0), c(0, 0, 0));
    EXPECT_EQ(m(0, 1), c(0, 1, 0));
    EXPECT_EQ(m(0, 2), c(0, 0, 1));
    EXPECT_EQ(m(0, 3), c(0, 1, 1));
    EXPECT_EQ(m(0, 0), 1.0);
    EXPECT_EQ(m(0, 1), 3.0);
    EXPECT_EQ(m(0, 2), 5.0);
    EXPECT_EQ(m(0, 3), 7.0);
}

TEST(UnfoldTest, Mode3ColumnsAreSpectra) {
    std::mt19937_64 g(1);
    const Cube c = random_cube(g, {3, 4, 5});
    const Matrix m = unfold(c, 3);
    ASSERT_EQ(m.rows(), 5);
    ASSERT_EQ(m.cols(), 12);
    // column index 1 + (i-1) + (j-1)*I, enumerated by brute force
    Eigen::Index col = 0;
    for (std::size_t j = 0; j < 4; ++j) {
        for (std::size_t i = 0; i < 3; ++i, ++col) {
            for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(m(k, col), c(i, j, k));
        }
    }
}

TEST(UnfoldTest, BruteForceIndexMapAllModes) {
    std::mt19937_64 g(2);
    const Cube c = random_cube(g, {4, 3, 2});
    const std::size_t dims[3] = {4, 3, 2};
    for (int n = 1; n <= 3; ++n) {
        const Matrix m = unfold(c, n);
        for (std::size_t k = 0; k < 2; ++k) {
            for (std::size_t j = 0; j < 3; ++j) {
                for (std::size_t i = 0; i < 4; ++i) {
                    const std::size_t idx[3] = {i, j, k};
                    // j = sum over other modes of i_m * J_m, J_m = product of earlier other dims
                    std::size_t colv = 0, stride = 1;
                    for (int m2 = 0; m2 < 3; ++m2) {
                        if (m2 == n - 1) continue;
                        colv += idx[m2] * stride;
                        stride *= dims[m2];
                    }
                    EXPECT_EQ(m(static_cast<Eigen::Index>(idx[n - 1]), static_cast<Eigen::Index>(colv)),
                              c(i, j, k));
                }
            }
        }
        EXPECT_EQ(fold(m, n, c.shape()), c);
    }
}

TEST(UnfoldTest, FoldRoundTripExhaustiveSmallShapes) {
    std::mt19937_64 g(3);
    for (std::size_t h = 1; h <= 7; ++h) {
        for (std::size_t w = 1; w <= 6; ++w) {
            for (std::size_t b = 1; b <= 5; ++b) {
                const Cube c = random_cube(g, {h, w, b});
                for (int n = 1; n <= 3; ++n) ASSERT_EQ(fold(unfold(c, n), n, c.shape()), c);
            }
        }
    }
}

TEST(UnfoldTest, SingleVoxel) {
    const Cube c(Shape{1, 1, 1}, 4.5);
    for (int n = 1; n <= 3; ++n) EXPECT_EQ(fold(unfold(c, n), n, c.shape()), c);
}

TEST(UnfoldTest, Errors) {
    const Cube c(2, 3, 4);
    EXPECT_THROW(unfold(c, 0), ArgumentError);
    EXPECT_THROW(unfold(c, 4), ArgumentError);
    EXPECT_THROW(fold(Matrix::Zero(3, 8), 1, c.shape()), ArgumentError);
    EXPECT_THROW(fold(Matrix::Zero(2, 12), 4, c.shape()), ArgumentError);
}

TEST(ModeMulTest, IdentityAndScaling) {
    std::mt19937_64 g(4);
    const Cube c = random_cube(g, {3, 4, 5});
    for (int n = 1; n <= 3; ++n) {
        const auto d = static_cast<Eigen::Index>(c.shape().extent(n));
        EXPECT_EQ(mode_mul(c, Matrix::Identity(d, d), n), c);
        EXPECT_EQ(mode_mul(c, 2.0 * Matrix::Identity(d, d), n), 2.0 * c);
    }
}

TEST(ModeMulTest, TripleLoopOracle) {
    std::mt19937_64 g(5);
    const Cube c = random_cube(g, {3, 3, 3});
    const Matrix u = random_matrix(g, 2, 3);
    const Cube r = mode_mul(c, u, 1);
    ASSERT_EQ(r.shape(), (Shape{2, 3, 3}));
    for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t j = 0; j < 3; ++j) {
            for (Eigen::Index a = 0; a < 2; ++a) {
                double s = 0.0;
                for (std::size_t i = 0; i < 3; ++i) s += c(i, j, k) * u(a, static_cast<Eigen::Index>(i));
                EXPECT_NEAR(r(static_cast<std::size_t>(a), j, k), s, 1e-12);
            }
        }
    }
}

TEST(ModeMulTest, OtherModesLoopOracle) {
    std::mt19937_64 g(6);
    const Cube c = random_cube(g, {3, 4, 5});
    const Matrix b = random_matrix(g, 2, 4);
    const Matrix d = random_matrix(g, 6, 5);
    const Cube r2 = mode_mul(c, b, 2);
    const Cube r3 = mode_mul(c, d, 3);
    for (std::size_t k = 0; k < 5; ++k)
        for (std::size_t i = 0; i < 3; ++i)
            for (Eigen::Index a = 0; a < 2; ++a) {
                double s = 0.0;
                for (std::size_t j = 0; j < 4; ++j) s += c(i, j, k) * b(a, static_cast<Eigen::Index>(j));
                EXPECT_NEAR(r2(i, static_cast<std::size_t>(a), k), s, 1e-12);
            }
    for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t i = 0; i < 3; ++i)
            for (Eigen::Index a = 0; a < 6; ++a) {
                double s = 0.0;
                for (std::size_t k = 0; k < 5; ++k) s += c(i, j, k) * d(a, static_cast<Eigen::Index>(k));
                EXPECT_NEAR(r3(i, j, static_cast<std::size_t>(a)), s, 1e-12);
            }
}

TEST(ModeMulTest, DimensionMismatch) {
    const Cube c(3, 4, 5);
    EXPECT_THROW(mode_mul(c, Matrix::Zero(2, 4), 1), ArgumentError);
    EXPECT_THROW(mode_mul(c, Matrix::Zero(2, 4), 7), ArgumentError);
}

TEST(ModeMulTest, AssociativeAcrossDistinctModes) {
    std::mt19937_64 g(7);
    for (int trial = 0; trial < 20; ++trial) {
        const Cube c = random_cube(g, {4, 5, 3});
        const Matrix a = random_matrix(g, 3, 4);
        const Matrix b = random_matrix(g, 2, 5);
        const Cube lhs = mode_mul(mode_mul(c, a, 1), b, 2);
        const Cube rhs = mode_mul(mode_mul(c, b, 2), a, 1);
        EXPECT_LE(frob_norm(lhs - rhs), 1e-12 * frob_norm(lhs));
    }
}

TEST(ModeMulTest, AdjointIdentity) {
    std::mt19937_64 g(8);
    for (int n = 1; n <= 3; ++n) {
        const Cube c = random_cube(g, {4, 3, 5});
        const auto d_in = static_cast<Eigen::Index>(c.shape().extent(n));
        const Matrix a = random_matrix(g, 2, d_in);
        Shape ds = c.shape();
        (n == 1 ? ds.height : n == 2 ? ds.width : ds.bands) = 2;
        const Cube d = random_cube(g, ds);
        const double lhs = inner(mode_mul(c, a, n), d);
        const double rhs = inner(c, mode_mul(d, a.transpose(), n));
        EXPECT_LE(rel_diff(lhs, rhs), 1e-12);
    }
}

TEST(InnerTest, ZeroOnesAndFlatOracle) {
    std::mt19937_64 g(9);
    const Cube c = random_cube(g, {3, 4, 5});
    EXPECT_EQ(inner(c, Cube(c.shape())), 0.0);
    EXPECT_DOUBLE_EQ(frob_norm(Cube(Shape{2, 2, 2}, 1.0)), std::sqrt(8.0));
    const Cube d = random_cube(g, {3, 4, 5});
    double s = 0.0;
    for (std::size_t n = 0; n < c.size(); ++n) s += c.values()[n] * d.values()[n];
    EXPECT_LE(rel_diff(inner(c, d), s), 1e-12);
    EXPECT_THROW(inner(c, Cube(3, 4, 4)), ArgumentError);
}

TEST(InnerTest, NormMatchesSingularValuesOfEveryUnfolding) {
    std::mt19937_64 g(10);
    const Cube c = random_cube(g, {5, 4, 6});
    const double n2 = frob_norm(c) * frob_norm(c);
    for (int n = 1; n <= 3; ++n) {
        Eigen::JacobiSVD<Matrix> svd(unfold(c, n));
        EXPECT_LE(rel_diff(svd.singularValues().squaredNorm(), n2), 1e-8);
    }
}

TEST(TuckerReconstructTest, RankOneOuterProduct) {
    TuckerFactors tf;
    tf.core = Cube(Shape{1, 1, 1}, 3.0);
    Eigen::VectorXd u(3), v(2), w(4);
    u << 1, 2, 2;
    v << 3, 4;
    w << 1, 1, 1, 1;
    u /= u.norm();
    v /= v.norm();
    w /= w.norm();
    tf.factors = {u, v, w};
    const Cube r = tucker_reconstruct(tf);
    ASSERT_EQ(r.shape(), (Shape{3, 2, 4}));
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t i = 0; i < 3; ++i)
                EXPECT_NEAR(r(i, j, k), 3.0 * u(i) * v(j) * w(k), 1e-15);
}

TEST(TuckerReconstructTest, IdentityFactors) {
    std::mt19937_64 g(11);
    TuckerFactors tf;
    tf.core = random_cube(g, {3, 4, 2});
    tf.factors = {Matrix::Identity(3, 3), Matrix::Identity(4, 4), Matrix::Identity(2, 2)};
    EXPECT_EQ(tucker_reconstruct(tf), tf.core);
}

TEST(TuckerReconstructTest, MatchesNestedModeMul) {
    std::mt19937_64 g(12);
    TuckerFactors tf;
    tf.core = random_cube(g, {2, 3, 2});
    tf.factors = {random_matrix(g, 5, 2), random_matrix(g, 4, 3), random_matrix(g, 6, 2)};
    const Cube oracle = mode_mul(mode_mul(mode_mul(tf.core, tf.factors[0], 1), tf.factors[1], 2), tf.factors[2], 3);
    const Cube r = tucker_reconstruct(tf);
    EXPECT_LE(frob_norm(r - oracle), 1e-12 * frob_norm(oracle));
}

TEST(TuckerReconstructTest, InconsistentShapes) {
    TuckerFactors tf;
    tf.core = Cube(2, 2, 2);
    tf.factors = {Matrix::Zero(4, 3), Matrix::Zero(4, 2), Matrix::Zero(4, 2)};
    EXPECT_THROW(tucker_reconstruct(tf), ArgumentError);
}

}  // namespace
}  // namespace hsir
