#pragma once

#include "hsir/cube.hpp"

namespace hsir {

// Per-direction weights of the spatial-spectral TV. All boundaries are
// periodic, which is what makes D_w^* D_w diagonal in the 3-D Fourier basis.
struct TVWeights {
    double spectral = 0.5;  // w1, difference along bands
    double horizontal = 1.0;  // w2, difference along width
    double vertical = 1.0;    // w3, difference along height

    // Throws ArgumentError on negative weights or all-zero weights.
    void validate() const;
};

// Weighted circular first differences, one cube per direction.
struct StackedGrad {
    Cube spectral;
    Cube horizontal;
    Cube vertical;

    explicit StackedGrad(const Shape& shape = {})
        : spectral(shape), horizontal(shape), vertical(shape) {}

    const Shape& shape() const { return spectral.shape(); }
    void check_consistent() const;

    StackedGrad& operator+=(const StackedGrad& other);
    StackedGrad& operator-=(const StackedGrad& other);
    StackedGrad& operator*=(double s);
};

double inner(const StackedGrad& a, const StackedGrad& b);

// spectral(i,j,k)   = w1 (x(i,j,k) - x(i,j,k-1))
// horizontal(i,j,k) = w2 (x(i,j,k) - x(i,j-1,k))
// vertical(i,j,k)   = w3 (x(i,j,k) - x(i-1,j,k))
StackedGrad dw_forward(const Cube& cube, const TVWeights& w);

// Adjoint of dw_forward: w (g(k) - g(k+1)) per direction, summed.
Cube dw_adjoint(const StackedGrad& g, const TVWeights& w);

// Eigenvalues of D_w^* D_w in the fftn basis:
// w1^2 |1 - e^{-2 pi i r/b}|^2 + w2^2 |1 - e^{-2 pi i q/w}|^2 + w3^2 |1 - e^{-2 pi i p/h}|^2.
Cube tz_spectrum(const Shape& shape, const TVWeights& w);

// Weighted anisotropic SSTV seminorm: sum of |dw_forward(cube)|.
double sstv_norm(const Cube& cube, const TVWeights& w);

}  // namespace hsir
