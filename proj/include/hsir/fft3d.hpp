#pragma once

#include "hsir/cube.hpp"

#include <complex>
#include <memory>
#include <vector>

namespace hsir {

using Complex = std::complex<double>;

// Complex cube in the same (i, j, k) layout as Cube.
struct SpectralCube {
    Shape shape{};
    std::vector<Complex> data;

    Complex& operator()(std::size_t i, std::size_t j, std::size_t k) {
        return data[(k * shape.height + i) * shape.width + j];
    }
    Complex operator()(std::size_t i, std::size_t j, std::size_t k) const {
        return data[(k * shape.height + i) * shape.width + j];
    }
};

// Unnormalized 1-D DFT of any length, X[m] = sum_t x[t] e^{-2 pi i m t / n}.
//
// Lengths whose prime factors are all small go through a recursive mixed-radix
// Cooley-Tukey pass; anything with a larger prime factor is handled by
// Bluestein's chirp-z reduction to a power-of-two transform.
class FftPlan {
  public:
    explicit FftPlan(std::size_t n);
    ~FftPlan();
    FftPlan(FftPlan&&) noexcept;
    FftPlan& operator=(FftPlan&&) noexcept;

    std::size_t size() const { return n_; }

    // In place. inverse=true flips the exponent sign; no 1/n scaling.
    void execute(std::span<Complex> data, bool inverse) const;

  private:
    struct Impl;
    std::size_t n_;
    std::unique_ptr<Impl> impl_;
};

// Three cached 1-D plans for a fixed shape; immutable after construction and
// safe to share between threads.
class Fft3d {
  public:
    explicit Fft3d(const Shape& shape);

    const Shape& shape() const { return shape_; }

    SpectralCube forward(const Cube& cube) const;
    void forward(SpectralCube& sc) const;
    // Includes the 1/(h*w*b) normalization.
    void inverse(SpectralCube& sc) const;

  private:
    void transform(SpectralCube& sc, bool inverse) const;

    Shape shape_;
    FftPlan rows_;   // along height
    FftPlan cols_;   // along width
    FftPlan bands_;  // along bands
};

SpectralCube fftn(const Cube& cube);
SpectralCube ifftn(const SpectralCube& sc);

}  // namespace hsir
