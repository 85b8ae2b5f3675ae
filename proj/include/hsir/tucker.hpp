#pragma once

#include "hsir/cube.hpp"

#include <array>
#include <optional>
#include <vector>

namespace hsir {

using Ranks = std::array<std::size_t, 3>;

// r leading left singular vectors of mat, computed from the eigenvectors of
// the smaller Gram matrix. Columns come out in descending singular-value
// order, ties broken by index, with each column's largest-magnitude entry
// made positive.
Matrix truncated_svd_factors(const Matrix& mat, std::size_t r);

struct HooiOptions {
    int sweeps = 1;
    double tol = 1e-8;  // early exit on relative error change below tol
};

// Rank-(r1,r2,r3) Tucker approximation of target by higher-order orthogonal
// iteration. Without a warm start, factors are initialized by truncated
// HOSVD. If sweep_errors is given it receives ||target - reconstruction||_F
// for the initialization followed by one entry per completed sweep.
TuckerFactors hooi(const Cube& target, const Ranks& ranks, const TuckerFactors* warm = nullptr,
                   const HooiOptions& opts = {}, std::vector<double>* sweep_errors = nullptr);

// Core for fixed orthonormal factors: target x1 U1^T x2 U2^T x3 U3^T.
Cube project_core(const Cube& target, const std::array<Matrix, 3>& factors);

}  // namespace hsir
