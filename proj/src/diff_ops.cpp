#include "hsir/diff_ops.hpp"

#include "hsir/error.hpp"

#include <cmath>
#include <numbers>

namespace hsir {

void TVWeights::validate() const {
    if (!(spectral >= 0.0) || !(horizontal >= 0.0) || !(vertical >= 0.0)) {
        throw ArgumentError("TV weights must be non-negative");
    }
    if (spectral == 0.0 && horizontal == 0.0 && vertical == 0.0) {
        throw ArgumentError("at least one TV weight must be positive");
    }
}

void StackedGrad::check_consistent() const {
    if (horizontal.shape() != spectral.shape() || vertical.shape() != spectral.shape()) {
        throw ArgumentError("StackedGrad channels differ in shape: " + spectral.shape().str() + ", " +
                            horizontal.shape().str() + ", " + vertical.shape().str());
    }
}

StackedGrad& StackedGrad::operator+=(const StackedGrad& other) {
    spectral += other.spectral;
    horizontal += other.horizontal;
    vertical += other.vertical;
    return *this;
}

StackedGrad& StackedGrad::operator-=(const StackedGrad& other) {
    spectral -= other.spectral;
    horizontal -= other.horizontal;
    vertical -= other.vertical;
    return *this;
}

StackedGrad& StackedGrad::operator*=(double s) {
    spectral *= s;
    horizontal *= s;
    vertical *= s;
    return *this;
}

double inner(const StackedGrad& a, const StackedGrad& b) {
    return inner(a.spectral, b.spectral) + inner(a.horizontal, b.horizontal) +
           inner(a.vertical, b.vertical);
}

StackedGrad dw_forward(const Cube& x, const TVWeights& w) {
    const Shape& s = x.shape();
    StackedGrad g(s);
    const std::size_t h = s.height, wd = s.width, b = s.bands;
    for (std::size_t k = 0; k < b; ++k) {
        const std::size_t kp = (k + b - 1) % b;
        for (std::size_t i = 0; i < h; ++i) {
            const std::size_t ip = (i + h - 1) % h;
            for (std::size_t j = 0; j < wd; ++j) {
                const std::size_t jp = (j + wd - 1) % wd;
                const double v = x(i, j, k);
                g.spectral(i, j, k) = w.spectral * (v - x(i, j, kp));
                g.horizontal(i, j, k) = w.horizontal * (v - x(i, jp, k));
                g.vertical(i, j, k) = w.vertical * (v - x(ip, j, k));
            }
        }
    }
    return g;
}

Cube dw_adjoint(const StackedGrad& g, const TVWeights& w) {
    g.check_consistent();
    const Shape& s = g.shape();
    Cube out(s);
    const std::size_t h = s.height, wd = s.width, b = s.bands;
    for (std::size_t k = 0; k < b; ++k) {
        const std::size_t kn = (k + 1) % b;
        for (std::size_t i = 0; i < h; ++i) {
            const std::size_t in = (i + 1) % h;
            for (std::size_t j = 0; j < wd; ++j) {
                const std::size_t jn = (j + 1) % wd;
                out(i, j, k) = w.spectral * (g.spectral(i, j, k) - g.spectral(i, j, kn)) +
                               w.horizontal * (g.horizontal(i, j, k) - g.horizontal(i, jn, k)) +
                               w.vertical * (g.vertical(i, j, k) - g.vertical(in, j, k));
            }
        }
    }
    return out;
}

namespace {

// |1 - e^{-2 pi i m / n}|^2
double circulant_eig(std::size_t m, std::size_t n) {
    return 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n));
}

}  // namespace

Cube tz_spectrum(const Shape& s, const TVWeights& w) {
    Cube t(s);
    const double w1 = w.spectral * w.spectral;
    const double w2 = w.horizontal * w.horizontal;
    const double w3 = w.vertical * w.vertical;
    for (std::size_t k = 0; k < s.bands; ++k)
        for (std::size_t i = 0; i < s.height; ++i)
            for (std::size_t j = 0; j < s.width; ++j)
                t(i, j, k) = w1 * circulant_eig(k, s.bands) + w2 * circulant_eig(j, s.width) +
                             w3 * circulant_eig(i, s.height);
    return t;
}

double sstv_norm(const Cube& cube, const TVWeights& w) {
    const StackedGrad g = dw_forward(cube, w);
    double acc = 0.0;
    for (const Cube* c : {&g.spectral, &g.horizontal, &g.vertical}) {
        for (double v : c->data()) acc += std::abs(v);
    }
    return acc;
}

}  // namespace hsir
