#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hsir {

using Matrix = Eigen::MatrixXd;

struct Shape {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t bands = 0;

    std::size_t size() const { return height * width * bands; }
    std::size_t extent(int mode) const;  // mode in {1,2,3}
    bool operator==(const Shape&) const = default;
    std::string str() const;
};

// Dense height x width x bands cube of doubles.
//
// Storage is band-sequential and row-major inside each band:
// offset(i, j, k) = k * height * width + i * width + j.
class Cube {
  public:
    Cube() = default;
    explicit Cube(Shape shape, double fill = 0.0);
    Cube(std::size_t height, std::size_t width, std::size_t bands, double fill = 0.0)
        : Cube(Shape{height, width, bands}, fill) {}
    Cube(Shape shape, std::vector<double> data);

    const Shape& shape() const { return shape_; }
    std::size_t height() const { return shape_.height; }
    std::size_t width() const { return shape_.width; }
    std::size_t bands() const { return shape_.bands; }
    std::size_t size() const { return data_.size(); }

    std::size_t offset(std::size_t i, std::size_t j, std::size_t k) const {
        return (k * shape_.height + i) * shape_.width + j;
    }
    double& operator()(std::size_t i, std::size_t j, std::size_t k) { return data_[offset(i, j, k)]; }
    double operator()(std::size_t i, std::size_t j, std::size_t k) const { return data_[offset(i, j, k)]; }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }
    const std::vector<double>& values() const { return data_; }

    // One band as a height x width view into the storage.
    std::span<const double> band(std::size_t k) const;
    std::span<double> band(std::size_t k);

    bool all_finite() const;

    Cube& operator+=(const Cube& other);
    Cube& operator-=(const Cube& other);
    Cube& operator*=(double s);

    bool operator==(const Cube&) const = default;

  private:
    Shape shape_{};
    std::vector<double> data_;
};

Cube operator+(Cube a, const Cube& b);
Cube operator-(Cube a, const Cube& b);
Cube operator*(double s, Cube a);

// Column-orthonormal factors plus core; reconstruct with tucker_reconstruct.
struct TuckerFactors {
    Cube core;
    std::array<Matrix, 3> factors;

    std::array<std::size_t, 3> ranks() const {
        return {core.height(), core.width(), core.bands()};
    }
};

// Mode-n unfolding (mode in {1,2,3}). Column index follows the classic
// Kolda-Bader map: among the remaining modes, the lower mode varies fastest.
Matrix unfold(const Cube& cube, int mode);
Cube fold(const Matrix& mat, int mode, const Shape& shape);

// cube x_mode mat; mat.cols() must equal the cube extent along mode.
Cube mode_mul(const Cube& cube, const Matrix& mat, int mode);

double inner(const Cube& a, const Cube& b);
double frob_norm(const Cube& a);

Cube tucker_reconstruct(const TuckerFactors& tf);

void require_same_shape(const Cube& a, const Cube& b, const char* what);

}  // namespace hsir
