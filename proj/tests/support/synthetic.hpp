#pragma once

#include "hsir/cube.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace hsir::testing {

// Portable uniform in [0,1): mt19937_64 output is fixed by the standard,
// the std distributions are not.
inline double unit(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

inline Matrix random_matrix(std::mt19937_64& g, Eigen::Index r, Eigen::Index c) {
    Matrix m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i) m(i, j) = 2.0 * unit(g) - 1.0;
    return m;
}

inline Cube random_cube(std::mt19937_64& g, Shape s) {
    Cube c(s);
    for (double& v : c.data()) v = 2.0 * unit(g) - 1.0;
    return c;
}

inline Matrix random_orthonormal(std::mt19937_64& g, Eigen::Index n, Eigen::Index r) {
    Eigen::HouseholderQR<Matrix> qr(random_matrix(g, n, r));
    return qr.householderQ() * Matrix::Identity(n, r);
}

// Smooth low-frequency basis: column c is a cosine of frequency c, shifted
// so every column stays positive.
inline Matrix smooth_factor(std::size_t n, std::size_t r, double phase) {
    Matrix u(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(r));
    for (std::size_t c = 0; c < r; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(n);
            u(i, c) = 1.2 + std::cos(std::numbers::pi * (c + 0.5) * t + phase * (c + 1));
        }
    }
    return u;
}

// Low-rank smooth cube multiplied by a piecewise-constant spatial mask, then
// globally rescaled to [0, 1].
inline Cube synthetic_scene(std::size_t h = 40, std::size_t w = 40, std::size_t b = 20) {
    TuckerFactors tf;
    tf.core = Cube(4, 4, 3);
    std::mt19937_64 g(2024);
    for (double& v : tf.core.data()) v = 0.2 + unit(g);
    tf.factors[0] = smooth_factor(h, 4, 0.3);
    tf.factors[1] = smooth_factor(w, 4, 0.7);
    tf.factors[2] = smooth_factor(b, 3, 1.1);
    Cube c = tucker_reconstruct(tf);

    for (std::size_t k = 0; k < b; ++k) {
        for (std::size_t i = 0; i < h; ++i) {
            for (std::size_t j = 0; j < w; ++j) {
                double m = 1.0;
                if (i < h / 2 && j >= w / 3) m = 0.7;
                if (i >= h / 2 && j < w / 2) m = 1.25;
                if (i >= (3 * h) / 4 && j >= (2 * w) / 3) m = 0.85;
                c(i, j, k) *= m;
            }
        }
    }
    const auto [lo, hi] = std::minmax_element(c.data().begin(), c.data().end());
    const double mn = *lo, span = *hi - *lo;
    for (double& v : c.data()) v = (v - mn) / span;
    return c;
}

}  // namespace hsir::testing
