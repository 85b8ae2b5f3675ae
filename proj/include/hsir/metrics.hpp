#pragma once

#include "hsir/cube.hpp"

#include <span>
#include <string>
#include <vector>

namespace hsir {

// Cap reported for identical bands (zero MSE).
inline constexpr double kPsnrCapDb = 100.0;

struct SsimOptions {
    std::size_t window = 11;
    double sigma = 1.5;
    double dynamic_range = 1.0;
};

struct MetricsReport {
    std::vector<double> per_band_psnr;
    std::vector<double> per_band_ssim;
    double mpsnr = 0.0;
    double mssim = 0.0;
    double ergas = 0.0;

    // header "band,psnr_db,ssim", one row per band (1-based), then
    // "mpsnr,<v>", "mssim,<v>", "ergas,<v>".
    std::string to_csv() const;
    std::string to_json() const;
};

// Bands are height x width, row-major.
double psnr_band(std::span<const double> ref, std::span<const double> test, double peak = 1.0);
double ssim_band(std::span<const double> ref, std::span<const double> test, std::size_t height,
                 std::size_t width, const SsimOptions& opts = {});

double mse(std::span<const double> a, std::span<const double> b);

// 100 * sqrt(mean_b(MSE_b / mean(ref_b)^2)).
double ergas(const Cube& ref, const Cube& test);

MetricsReport evaluate(const Cube& ref, const Cube& test, const SsimOptions& opts = {});
double mpsnr(const Cube& ref, const Cube& test);

enum class ProfileAxis {
    Horizontal,  // mean of each row, length = height
    Vertical,    // mean of each column, length = width
};

ProfileAxis profile_axis_from_string(const std::string& s);

std::vector<double> mean_profile(const Cube& cube, std::size_t band, ProfileAxis axis);

}  // namespace hsir
