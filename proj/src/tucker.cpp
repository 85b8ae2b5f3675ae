#include "hsir/tucker.hpp"

#include "hsir/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hsir {

namespace {

// Indices of eigenvalues in descending order; equal values keep index order.
std::vector<Eigen::Index> descending_order(const Eigen::VectorXd& evals) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(evals.size()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return evals(a) > evals(b); });
    return idx;
}

void fix_signs(Matrix& u) {
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
        Eigen::Index best = 0;
        for (Eigen::Index r = 1; r < u.rows(); ++r) {
            if (std::abs(u(r, c)) > std::abs(u(best, c))) best = r;
        }
        if (u(best, c) < 0.0) u.col(c) = -u.col(c);
    }
}

// Two passes of modified Gram-Schmidt; columns that collapse are replaced by
// the first coordinate vector that still has a substantial orthogonal part.
void orthonormalize(Matrix& u) {
    const Eigen::Index rows = u.rows();
    Eigen::Index next_basis = 0;
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
        Eigen::VectorXd v = u.col(c);
        for (int attempt = 0;; ++attempt) {
            for (int pass = 0; pass < 2; ++pass) {
                for (Eigen::Index p = 0; p < c; ++p) v -= u.col(p).dot(v) * u.col(p);
            }
            const double nrm = v.norm();
            if (nrm > 1e-8 || attempt > rows) {
                u.col(c) = v / nrm;
                break;
            }
            v = Eigen::VectorXd::Unit(rows, next_basis % rows);
            ++next_basis;
        }
    }
}

// r leading left singular vectors, r <= rows (may exceed cols; the extra
// columns span part of the null space of mat^T).
Matrix leading_left_vectors(const Matrix& a, std::size_t r) {
    const Eigen::Index rows = a.rows();
    const auto rr = static_cast<Eigen::Index>(r);
    if (rows <= a.cols()) {
        const Matrix gram = a * a.transpose();
        Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
        if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
        const auto order = descending_order(es.eigenvalues());
        Matrix u(rows, rr);
        for (Eigen::Index c = 0; c < rr; ++c) u.col(c) = es.eigenvectors().col(order[c]);
        fix_signs(u);
        return u;
    }
    const Matrix gram = a.transpose() * a;
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
    const auto order = descending_order(es.eigenvalues());
    const double top = std::max(es.eigenvalues()(order[0]), 0.0);
    Matrix u = Matrix::Zero(rows, rr);
    for (Eigen::Index c = 0; c < rr && c < a.cols(); ++c) {
        const double lam = es.eigenvalues()(order[c]);
        if (lam > 1e-24 * top && lam > 0.0) {
            u.col(c) = a * es.eigenvectors().col(order[c]) / std::sqrt(lam);
        }
    }
    orthonormalize(u);
    fix_signs(u);
    return u;
}

void check_ranks(const Shape& s, const Ranks& ranks) {
    for (int n = 0; n < 3; ++n) {
        if (ranks[n] < 1 || ranks[n] > s.extent(n + 1)) {
            throw ArgumentError("rank " + std::to_string(ranks[n]) + " out of range for mode " +
                                std::to_string(n + 1) + " of shape " + s.str());
        }
    }
}

Cube project_all_but(const Cube& target, const std::array<Matrix, 3>& factors, int skip) {
    Cube y = target;
    for (int m = 0; m < 3; ++m) {
        if (m != skip) y = mode_mul(y, factors[m].transpose(), m + 1);
    }
    return y;
}

}  // namespace

Matrix truncated_svd_factors(const Matrix& mat, std::size_t r) {
    const auto limit = static_cast<std::size_t>(std::min(mat.rows(), mat.cols()));
    if (r < 1 || r > limit) {
        throw ArgumentError("truncated_svd_factors: rank " + std::to_string(r) + " outside [1, " +
                            std::to_string(limit) + "]");
    }
    return leading_left_vectors(mat, r);
}

Cube project_core(const Cube& target, const std::array<Matrix, 3>& factors) {
    Cube c = mode_mul(target, factors[0].transpose(), 1);
    c = mode_mul(c, factors[1].transpose(), 2);
    return mode_mul(c, factors[2].transpose(), 3);
}

TuckerFactors hooi(const Cube& target, const Ranks& ranks, const TuckerFactors* warm,
                   const HooiOptions& opts, std::vector<double>* sweep_errors) {
    const Shape& s = target.shape();
    check_ranks(s, ranks);
    if (opts.sweeps < 1) throw ArgumentError("hooi: sweeps must be >= 1");

    TuckerFactors tf;
    if (warm != nullptr) {
        for (int n = 0; n < 3; ++n) {
            if (static_cast<std::size_t>(warm->factors[n].rows()) != s.extent(n + 1) ||
                static_cast<std::size_t>(warm->factors[n].cols()) != ranks[n]) {
                throw ArgumentError("hooi: warm-start factor " + std::to_string(n + 1) +
                                    " has the wrong shape");
            }
        }
        tf.factors = warm->factors;
    } else {
        for (int n = 0; n < 3; ++n) tf.factors[n] = leading_left_vectors(unfold(target, n + 1), ranks[n]);
    }

    const bool track = sweep_errors != nullptr || opts.sweeps > 1;
    auto residual = [&](const TuckerFactors& f) { return frob_norm(target - tucker_reconstruct(f)); };
    double prev = 0.0;
    if (track) {
        tf.core = project_core(target, tf.factors);
        prev = residual(tf);
        if (sweep_errors) sweep_errors->assign(1, prev);
    }
    const double scale = std::max(frob_norm(target), 1e-300);

    for (int sweep = 0; sweep < opts.sweeps; ++sweep) {
        for (int n = 0; n < 3; ++n) {
            const Cube y = project_all_but(target, tf.factors, n);
            tf.factors[n] = leading_left_vectors(unfold(y, n + 1), ranks[n]);
        }
        tf.core = project_core(target, tf.factors);
        if (!track) continue;
        const double err = residual(tf);
        if (sweep_errors) sweep_errors->push_back(err);
        const bool stalled = std::abs(prev - err) / scale < opts.tol;
        prev = err;
        if (stalled) break;
    }
    return tf;
}

}  // namespace hsir
