#include "hsir/hsi_io.hpp"

#include "hsir/error.hpp"

#include <nlohmann/json.hpp>
#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

namespace hsir {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put_le(std::vector<char>& out, T v) {
    char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    out.insert(out.end(), bytes, bytes + sizeof(T));
}

template <typename T>
T get_le(const char* p) {
    char bytes[sizeof(T)];
    std::memcpy(bytes, p, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T v;
    std::memcpy(&v, bytes, sizeof(T));
    return v;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path);
    return data;
}

void dump(const std::string& path, const char* data, std::size_t n) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(data, static_cast<std::streamsize>(n));
    if (!out) throw IoError("write failed: " + path);
}

std::size_t element_size(DType d) { return d == DType::F32 ? 4 : 8; }

}  // namespace

const char* to_string(DType d) { return d == DType::F32 ? "f32" : "f64"; }

DType dtype_from_string(const std::string& s) {
    if (s == "f32") return DType::F32;
    if (s == "f64") return DType::F64;
    throw ArgumentError("dtype must be f32 or f64 (got '" + s + "')");
}

std::string CubeHeader::to_json() const {
    nlohmann::json j;
    j["magic"] = kMagic;
    j["height"] = shape.height;
    j["width"] = shape.width;
    j["bands"] = shape.bands;
    j["dtype"] = to_string(dtype);
    j["layout"] = kLayout;
    if (value_range) j["value_range"] = {value_range->min, value_range->max};
    return j.dump(2);
}

CubeHeader CubeHeader::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("header: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw FormatError("header: not a JSON object");
    auto field = [&](const char* key) -> const nlohmann::json& {
        if (!j.contains(key)) throw FormatError(std::string("header field '") + key + "' missing");
        return j[key];
    };
    auto str_field = [&](const char* key) {
        const auto& v = field(key);
        if (!v.is_string()) throw FormatError(std::string("header field '") + key + "' must be a string");
        return v.get<std::string>();
    };
    auto dim_field = [&](const char* key) {
        const auto& v = field(key);
        if (!v.is_number_integer() || v.get<long long>() <= 0) {
            throw FormatError(std::string("header field '") + key + "' must be a positive integer");
        }
        return static_cast<std::size_t>(v.get<long long>());
    };

    CubeHeader h;
    if (str_field("magic") != kMagic) throw FormatError("header field 'magic' is not " + std::string(kMagic));
    h.shape = {dim_field("height"), dim_field("width"), dim_field("bands")};
    const std::string dt = str_field("dtype");
    if (dt == "f32") {
        h.dtype = DType::F32;
    } else if (dt == "f64") {
        h.dtype = DType::F64;
    } else {
        throw FormatError("header field 'dtype' must be f32 or f64 (got '" + dt + "')");
    }
    if (str_field("layout") != kLayout) throw FormatError("header field 'layout' must be " + std::string(kLayout));
    if (j.contains("value_range") && !j["value_range"].is_null()) {
        const auto& vr = j["value_range"];
        if (!vr.is_array() || vr.size() != 2 || !vr[0].is_number() || !vr[1].is_number()) {
            throw FormatError("header field 'value_range' must be [min, max]");
        }
        h.value_range = ValueRange{vr[0].get<double>(), vr[1].get<double>()};
    }
    return h;
}

void write_cube(const std::string& path, const Cube& cube, DType dtype,
                const std::optional<ValueRange>& value_range) {
    if (cube.size() == 0) throw ArgumentError("write_cube: empty cube");
    CubeHeader h{cube.shape(), dtype, value_range};
    std::vector<char> payload;
    payload.reserve(cube.size() * element_size(dtype));
    for (double v : cube.data()) {
        if (dtype == DType::F32) {
            put_le(payload, static_cast<float>(v));
        } else {
            put_le(payload, v);
        }
    }
    dump(path + ".bin", payload.data(), payload.size());
    const std::string text = h.to_json() + "\n";
    dump(path + ".json", text.data(), text.size());
}

CubeHeader read_header(const std::string& path) { return CubeHeader::from_json(slurp(path + ".json")); }

Cube read_cube(const std::string& path, CubeHeader* header) {
    const CubeHeader h = read_header(path);
    const std::string payload = slurp(path + ".bin");
    const std::size_t es = element_size(h.dtype);
    const std::size_t expected = h.shape.size() * es;
    if (payload.size() != expected) {
        throw FormatError("payload length: expected " + std::to_string(expected) + " bytes for " +
                          h.shape.str() + " " + to_string(h.dtype) + ", found " +
                          std::to_string(payload.size()));
    }
    std::vector<double> data(h.shape.size());
    for (std::size_t n = 0; n < data.size(); ++n) {
        const char* p = payload.data() + n * es;
        data[n] = h.dtype == DType::F32 ? static_cast<double>(get_le<float>(p)) : get_le<double>(p);
    }
    if (header) *header = h;
    return Cube(h.shape, std::move(data));
}

std::pair<Cube, std::vector<ValueRange>> normalize_bands(const Cube& cube) {
    Cube out(cube.shape());
    std::vector<ValueRange> ranges;
    ranges.reserve(cube.bands());
    for (std::size_t k = 0; k < cube.bands(); ++k) {
        const auto src = cube.band(k);
        auto dst = out.band(k);
        const auto [lo, hi] = std::minmax_element(src.begin(), src.end());
        const ValueRange r{*lo, *hi};
        ranges.push_back(r);
        if (r.max == r.min) {
            std::fill(dst.begin(), dst.end(), 0.0);
            continue;
        }
        const double span = r.max - r.min;
        for (std::size_t n = 0; n < src.size(); ++n) dst[n] = (src[n] - r.min) / span;
    }
    return {std::move(out), std::move(ranges)};
}

Cube denormalize_bands(const Cube& cube, const std::vector<ValueRange>& ranges) {
    if (ranges.size() != cube.bands()) {
        throw ArgumentError("denormalize_bands: " + std::to_string(ranges.size()) + " ranges for " +
                            std::to_string(cube.bands()) + " bands");
    }
    Cube out(cube.shape());
    for (std::size_t k = 0; k < cube.bands(); ++k) {
        const auto src = cube.band(k);
        auto dst = out.band(k);
        const ValueRange& r = ranges[k];
        for (std::size_t n = 0; n < src.size(); ++n) dst[n] = src[n] * (r.max - r.min) + r.min;
    }
    return out;
}

std::vector<unsigned char> band_to_gray8(const Cube& cube, std::size_t band) {
    if (band >= cube.bands()) {
        throw ArgumentError("band " + std::to_string(band) + " out of range (cube has " +
                            std::to_string(cube.bands()) + " bands)");
    }
    const auto src = cube.band(band);
    std::vector<unsigned char> px(src.size());
    for (std::size_t n = 0; n < src.size(); ++n) {
        const double v = std::clamp(std::isnan(src[n]) ? 0.0 : src[n], 0.0, 1.0);
        px[n] = static_cast<unsigned char>(std::floor(v * 255.0 + 0.5));
    }
    return px;
}

void export_band_png(const Cube& cube, std::size_t band, const std::string& path) {
    const auto px = band_to_gray8(cube, band);
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
    if (!fp) throw IoError("cannot open " + path + " for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng: cannot create write struct for " + path);
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng: cannot create info struct for " + path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng: failed writing " + path);
    }
    png_init_io(png, fp.get());
    const auto h = static_cast<png_uint_32>(cube.height());
    const auto w = static_cast<png_uint_32>(cube.width());
    png_set_IHDR(png, info, w, h, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (png_uint_32 i = 0; i < h; ++i) {
        png_write_row(png, const_cast<png_bytep>(px.data() + static_cast<std::size_t>(i) * w));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace hsir
