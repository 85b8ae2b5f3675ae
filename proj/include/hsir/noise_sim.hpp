#pragma once

#include "hsir/cube.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hsir {

// 1-based, inclusive band window.
struct BandRange {
    std::size_t first = 1;
    std::size_t last = 1;
    bool operator==(const BandRange&) const = default;
};

// One of the six mixed-noise scenarios plus optional overrides.
//
// gaussian_sigma: noise standard deviation for cases 1-4; for cases 5-6 the
//   per-band variance is drawn from U[0, gaussian_sigma^2].
// impulse_fraction: fraction of salt-and-pepper pixels per band for cases
//   3-4; for cases 5-6 the per-band fraction is drawn from U[0, impulse_fraction].
// deadline_band_range / stripe_band_range: replace the default windows, which
//   are bands 91-130 and 161-190 of a 224-band cube scaled to the actual
//   band count.
struct NoiseSpec {
    int case_id = 1;
    std::uint64_t seed = 0;
    std::optional<double> gaussian_sigma;
    std::optional<double> impulse_fraction;
    std::optional<BandRange> deadline_band_range;
    std::optional<BandRange> stripe_band_range;

    void validate(const Shape& shape) const;

    std::string to_json() const;
    static NoiseSpec from_json(const std::string& text);

    bool has_impulse() const { return case_id >= 3; }
    bool has_deadlines() const { return case_id == 2 || case_id >= 4; }
    bool has_stripes() const { return case_id == 6; }
};

BandRange default_deadline_range(std::size_t bands);
BandRange default_stripe_range(std::size_t bands);

// Per-voxel bit flags describing where structured corruption was placed.
class NoiseMasks {
  public:
    static constexpr std::uint8_t kImpulse = 1;
    static constexpr std::uint8_t kDeadline = 2;
    static constexpr std::uint8_t kStripe = 4;

    NoiseMasks() = default;
    explicit NoiseMasks(const Shape& shape) : shape_(shape), flags_(shape.size(), 0) {}

    const Shape& shape() const { return shape_; }
    std::uint8_t at(std::size_t i, std::size_t j, std::size_t k) const {
        return flags_[(k * shape_.height + i) * shape_.width + j];
    }
    void set(std::size_t i, std::size_t j, std::size_t k, std::uint8_t bit) {
        flags_[(k * shape_.height + i) * shape_.width + j] |= bit;
    }
    bool has(std::size_t i, std::size_t j, std::size_t k, std::uint8_t bit) const {
        return (at(i, j, k) & bit) != 0;
    }

    std::size_t count(std::uint8_t bit) const;
    std::size_t count_in_band(std::uint8_t bit, std::size_t band) const;

    // Flags as a cube of small integers (bitwise OR of the constants above).
    Cube to_cube() const;

  private:
    Shape shape_{};
    std::vector<std::uint8_t> flags_;
};

struct NoisyCube {
    Cube noisy;
    NoiseMasks masks;
};

// Deterministic in (clean, spec). Each (noise type, band) pair draws from its
// own substream, so a band's realization does not depend on the others and
// the shared components of nested cases coincide for the same seed.
NoisyCube apply_noise(const Cube& clean, const NoiseSpec& spec);

}  // namespace hsir
