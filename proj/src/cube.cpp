#include "hsir/cube.hpp"

#include "hsir/error.hpp"

#include <cmath>
#include <sstream>

namespace hsir {

namespace {

void check_mode(int mode) {
    if (mode < 1 || mode > 3) {
        throw ArgumentError("mode must be 1, 2 or 3 (got " + std::to_string(mode) + ")");
    }
}

// Column of (i, j, k) in the mode-n unfolding.
inline std::size_t unfold_col(const Shape& s, int mode, std::size_t i, std::size_t j, std::size_t k) {
    switch (mode) {
        case 1: return j + k * s.width;
        case 2: return i + k * s.height;
        default: return i + j * s.height;
    }
}

inline std::size_t unfold_row(int mode, std::size_t i, std::size_t j, std::size_t k) {
    return mode == 1 ? i : (mode == 2 ? j : k);
}

}  // namespace

std::size_t Shape::extent(int mode) const {
    check_mode(mode);
    return mode == 1 ? height : (mode == 2 ? width : bands);
}

std::string Shape::str() const {
    std::ostringstream os;
    os << height << "x" << width << "x" << bands;
    return os.str();
}

Cube::Cube(Shape shape, double fill) : shape_(shape), data_(shape.size(), fill) {}

Cube::Cube(Shape shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
    if (data_.size() != shape_.size()) {
        throw ArgumentError("cube data length " + std::to_string(data_.size()) +
                            " does not match shape " + shape_.str());
    }
}

std::span<const double> Cube::band(std::size_t k) const {
    if (k >= shape_.bands) throw ArgumentError("band index out of range");
    const std::size_t n = shape_.height * shape_.width;
    return std::span<const double>(data_).subspan(k * n, n);
}

std::span<double> Cube::band(std::size_t k) {
    if (k >= shape_.bands) throw ArgumentError("band index out of range");
    const std::size_t n = shape_.height * shape_.width;
    return std::span<double>(data_).subspan(k * n, n);
}

bool Cube::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

Cube& Cube::operator+=(const Cube& other) {
    require_same_shape(*this, other, "cube +=");
    for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += other.data_[n];
    return *this;
}

Cube& Cube::operator-=(const Cube& other) {
    require_same_shape(*this, other, "cube -=");
    for (std::size_t n = 0; n < data_.size(); ++n) data_[n] -= other.data_[n];
    return *this;
}

Cube& Cube::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

Cube operator+(Cube a, const Cube& b) { return a += b; }
Cube operator-(Cube a, const Cube& b) { return a -= b; }
Cube operator*(double s, Cube a) { return a *= s; }

void require_same_shape(const Cube& a, const Cube& b, const char* what) {
    if (a.shape() != b.shape()) {
        throw ArgumentError(std::string(what) + ": shape mismatch " + a.shape().str() + " vs " +
                            b.shape().str());
    }
}

Matrix unfold(const Cube& cube, int mode) {
    check_mode(mode);
    const Shape& s = cube.shape();
    const std::size_t rows = s.extent(mode);
    Matrix m(rows, rows == 0 ? 0 : s.size() / rows);
    for (std::size_t k = 0; k < s.bands; ++k)
        for (std::size_t i = 0; i < s.height; ++i)
            for (std::size_t j = 0; j < s.width; ++j)
                m(unfold_row(mode, i, j, k), unfold_col(s, mode, i, j, k)) = cube(i, j, k);
    return m;
}

Cube fold(const Matrix& mat, int mode, const Shape& shape) {
    check_mode(mode);
    const std::size_t rows = shape.extent(mode);
    if (static_cast<std::size_t>(mat.rows()) != rows ||
        static_cast<std::size_t>(mat.rows() * mat.cols()) != shape.size()) {
        throw ArgumentError("fold: " + std::to_string(mat.rows()) + "x" + std::to_string(mat.cols()) +
                            " matrix is inconsistent with mode " + std::to_string(mode) +
                            " of shape " + shape.str());
    }
    Cube cube(shape);
    for (std::size_t k = 0; k < shape.bands; ++k)
        for (std::size_t i = 0; i < shape.height; ++i)
            for (std::size_t j = 0; j < shape.width; ++j)
                cube(i, j, k) = mat(unfold_row(mode, i, j, k), unfold_col(shape, mode, i, j, k));
    return cube;
}

Cube mode_mul(const Cube& cube, const Matrix& mat, int mode) {
    check_mode(mode);
    const Shape& s = cube.shape();
    if (static_cast<std::size_t>(mat.cols()) != s.extent(mode)) {
        throw ArgumentError("mode_mul: matrix has " + std::to_string(mat.cols()) +
                            " columns but cube extent along mode " + std::to_string(mode) + " is " +
                            std::to_string(s.extent(mode)));
    }
    Shape out = s;
    const auto r = static_cast<std::size_t>(mat.rows());
    (mode == 1 ? out.height : (mode == 2 ? out.width : out.bands)) = r;
    const Matrix prod = mat * unfold(cube, mode);
    return fold(prod, mode, out);
}

double inner(const Cube& a, const Cube& b) {
    require_same_shape(a, b, "inner");
    double acc = 0.0;
    auto x = a.data();
    auto y = b.data();
    for (std::size_t n = 0; n < x.size(); ++n) acc += x[n] * y[n];
    return acc;
}

double frob_norm(const Cube& a) { return std::sqrt(inner(a, a)); }

Cube tucker_reconstruct(const TuckerFactors& tf) {
    const auto ranks = tf.ranks();
    for (int n = 0; n < 3; ++n) {
        if (static_cast<std::size_t>(tf.factors[n].cols()) != ranks[n]) {
            throw ArgumentError("tucker_reconstruct: factor " + std::to_string(n + 1) + " has " +
                                std::to_string(tf.factors[n].cols()) + " columns, core rank is " +
                                std::to_string(ranks[n]));
        }
    }
    Cube x = mode_mul(tf.core, tf.factors[0], 1);
    x = mode_mul(x, tf.factors[1], 2);
    return mode_mul(x, tf.factors[2], 3);
}

}  // namespace hsir
