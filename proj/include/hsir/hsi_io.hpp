#pragma once

#include "hsir/cube.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hsir {

enum class DType { F32, F64 };

const char* to_string(DType d);
DType dtype_from_string(const std::string& s);

struct ValueRange {
    double min = 0.0;
    double max = 0.0;
    bool operator==(const ValueRange&) const = default;
};

// Sidecar header stored at <path>.json; payload at <path>.bin.
struct CubeHeader {
    static constexpr const char* kMagic = "HSICUBE1";
    static constexpr const char* kLayout = "band-sequential";

    Shape shape{};
    DType dtype = DType::F64;
    std::optional<ValueRange> value_range;

    std::string to_json() const;
    // Throws FormatError naming the offending field.
    static CubeHeader from_json(const std::string& text);
};

// Little-endian, band-sequential, row-major within each band.
void write_cube(const std::string& path, const Cube& cube, DType dtype = DType::F64,
                const std::optional<ValueRange>& value_range = std::nullopt);
Cube read_cube(const std::string& path, CubeHeader* header = nullptr);
CubeHeader read_header(const std::string& path);

// Affine per-band map to [0, 1]; constant bands become 0 with (v, v) recorded.
std::pair<Cube, std::vector<ValueRange>> normalize_bands(const Cube& cube);
Cube denormalize_bands(const Cube& cube, const std::vector<ValueRange>& ranges);

// 8-bit grayscale PNG of one band (0-based), clamped to [0, 1] and scaled by
// 255 with round-half-up.
void export_band_png(const Cube& cube, std::size_t band, const std::string& path);
std::vector<unsigned char> band_to_gray8(const Cube& cube, std::size_t band);

}  // namespace hsir
