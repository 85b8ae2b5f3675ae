#include "hsir/noise_sim.hpp"

#include "hsir/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <random>

namespace hsir {

namespace {

constexpr double kCase12Variance = 0.1;
constexpr double kCase34Variance = 0.075;
constexpr double kCase56MaxVariance = 0.2;
constexpr double kCase34Impulse = 0.15;
constexpr double kCase56MaxImpulse = 0.2;

enum class Component : std::uint64_t { Gaussian = 1, Impulse = 2, Deadline = 3, Stripe = 4 };

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// mt19937_64 keyed by splitmix64(seed, component, band). Only the raw 64-bit
// engine output is used; the distributions below are written out so results
// do not depend on the standard library's distribution implementations.
class Substream {
  public:
    Substream(std::uint64_t seed, Component c, std::size_t band)
        : eng_(splitmix64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(c)) ^
                          static_cast<std::uint64_t>(band))) {}

    // [0, 1)
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [lo, hi].
    std::uint64_t integer(std::uint64_t lo, std::uint64_t hi) {
        const std::uint64_t span = hi - lo + 1;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % span;
        std::uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return lo + v % span;
    }

    // Box-Muller, one variate per call.
    double normal() {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // First `count` entries of a seeded Fisher-Yates shuffle of 0..n-1.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        count = std::min(count, n);
        for (std::size_t t = 0; t < count; ++t) {
            const auto pick = static_cast<std::size_t>(integer(t, n - 1));
            std::swap(idx[t], idx[pick]);
        }
        idx.resize(count);
        return idx;
    }

  private:
    std::mt19937_64 eng_;
};

BandRange scaled_range(std::size_t first, std::size_t last, std::size_t bands) {
    const double scale = static_cast<double>(bands) / 224.0;
    BandRange r;
    r.first = std::min<std::size_t>(bands, static_cast<std::size_t>(std::floor((first - 1) * scale)) + 1);
    r.last = static_cast<std::size_t>(std::lround(last * scale));
    r.last = std::clamp<std::size_t>(r.last, r.first, bands);
    return r;
}

void check_range(const BandRange& r, std::size_t bands, const char* what) {
    if (r.first < 1 || r.first > r.last || r.last > bands) {
        throw ArgumentError(std::string(what) + " " + std::to_string(r.first) + ":" +
                            std::to_string(r.last) + " is not a valid window of " +
                            std::to_string(bands) + " bands");
    }
}

}  // namespace

BandRange default_deadline_range(std::size_t bands) { return scaled_range(91, 130, bands); }
BandRange default_stripe_range(std::size_t bands) { return scaled_range(161, 190, bands); }

void NoiseSpec::validate(const Shape& shape) const {
    if (case_id < 1 || case_id > 6) {
        throw ArgumentError("case_id must be in 1..6 (got " + std::to_string(case_id) + ")");
    }
    if (gaussian_sigma && !(std::isfinite(*gaussian_sigma) && *gaussian_sigma >= 0.0)) {
        throw ArgumentError("gaussian_sigma must be finite and >= 0");
    }
    if (impulse_fraction) {
        if (!has_impulse()) throw ArgumentError("impulse_fraction given but case " + std::to_string(case_id) + " has no impulse noise");
        if (!(*impulse_fraction >= 0.0 && *impulse_fraction <= 1.0)) {
            throw ArgumentError("impulse_fraction must lie in [0, 1]");
        }
    }
    if (deadline_band_range) {
        if (!has_deadlines()) throw ArgumentError("deadline_band_range given but case " + std::to_string(case_id) + " has no deadlines");
        check_range(*deadline_band_range, shape.bands, "deadline_band_range");
    }
    if (stripe_band_range) {
        if (!has_stripes()) throw ArgumentError("stripe_band_range given but case " + std::to_string(case_id) + " has no stripes");
        check_range(*stripe_band_range, shape.bands, "stripe_band_range");
    }
}

std::string NoiseSpec::to_json() const {
    nlohmann::json j;
    j["case_id"] = case_id;
    j["seed"] = seed;
    j["gaussian_sigma"] = gaussian_sigma ? nlohmann::json(*gaussian_sigma) : nlohmann::json(nullptr);
    j["impulse_fraction"] = impulse_fraction ? nlohmann::json(*impulse_fraction) : nlohmann::json(nullptr);
    auto range = [](const std::optional<BandRange>& r) {
        return r ? nlohmann::json::array({r->first, r->last}) : nlohmann::json(nullptr);
    };
    j["deadline_band_range"] = range(deadline_band_range);
    j["stripe_band_range"] = range(stripe_band_range);
    return j.dump(2);
}

NoiseSpec NoiseSpec::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("noise spec: invalid JSON: ") + e.what());
    }
    NoiseSpec s;
    try {
        s.case_id = j.at("case_id").get<int>();
        s.seed = j.at("seed").get<std::uint64_t>();
        auto opt_num = [&](const char* key) -> std::optional<double> {
            if (!j.contains(key) || j[key].is_null()) return std::nullopt;
            return j[key].get<double>();
        };
        auto opt_range = [&](const char* key) -> std::optional<BandRange> {
            if (!j.contains(key) || j[key].is_null()) return std::nullopt;
            const auto& a = j[key];
            if (!a.is_array() || a.size() != 2) throw FormatError(std::string("noise spec: ") + key + " must be [first, last]");
            return BandRange{a[0].get<std::size_t>(), a[1].get<std::size_t>()};
        };
        s.gaussian_sigma = opt_num("gaussian_sigma");
        s.impulse_fraction = opt_num("impulse_fraction");
        s.deadline_band_range = opt_range("deadline_band_range");
        s.stripe_band_range = opt_range("stripe_band_range");
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("noise spec: ") + e.what());
    }
    return s;
}

std::size_t NoiseMasks::count(std::uint8_t bit) const {
    return static_cast<std::size_t>(
        std::count_if(flags_.begin(), flags_.end(), [bit](std::uint8_t f) { return (f & bit) != 0; }));
}

std::size_t NoiseMasks::count_in_band(std::uint8_t bit, std::size_t band) const {
    const std::size_t n = shape_.height * shape_.width;
    const auto first = flags_.begin() + static_cast<std::ptrdiff_t>(band * n);
    return static_cast<std::size_t>(
        std::count_if(first, first + static_cast<std::ptrdiff_t>(n), [bit](std::uint8_t f) { return (f & bit) != 0; }));
}

Cube NoiseMasks::to_cube() const {
    Cube c(shape_);
    auto d = c.data();
    for (std::size_t n = 0; n < flags_.size(); ++n) d[n] = flags_[n];
    return c;
}

NoisyCube apply_noise(const Cube& clean, const NoiseSpec& spec) {
    const Shape& s = clean.shape();
    if (s.size() == 0) throw ArgumentError("apply_noise: empty cube");
    spec.validate(s);
    for (double v : clean.data()) {
        if (!(v >= 0.0 && v <= 1.0)) throw DataError("apply_noise: clean cube must lie in [0, 1]");
    }

    NoisyCube out{clean, NoiseMasks(s)};
    Cube& y = out.noisy;
    const std::size_t h = s.height, w = s.width, pixels = h * w;
    const bool per_band_levels = spec.case_id >= 5;

    for (std::size_t k = 0; k < s.bands; ++k) {
        auto band = y.band(k);

        Substream gauss(spec.seed, Component::Gaussian, k);
        double sigma;
        if (per_band_levels) {
            const double max_var = spec.gaussian_sigma ? *spec.gaussian_sigma * *spec.gaussian_sigma : kCase56MaxVariance;
            sigma = std::sqrt(gauss.uniform(0.0, max_var));
        } else {
            sigma = spec.gaussian_sigma.value_or(std::sqrt(spec.case_id <= 2 ? kCase12Variance : kCase34Variance));
        }
        for (double& v : band) v += sigma * gauss.normal();

        if (spec.has_impulse()) {
            Substream imp(spec.seed, Component::Impulse, k);
            double frac;
            if (per_band_levels) {
                frac = imp.uniform(0.0, spec.impulse_fraction.value_or(kCase56MaxImpulse));
            } else {
                frac = spec.impulse_fraction.value_or(kCase34Impulse);
            }
            const auto count = static_cast<std::size_t>(std::lround(frac * static_cast<double>(pixels)));
            for (std::size_t p : imp.sample_without_replacement(pixels, count)) {
                band[p] = imp.uniform() < 0.5 ? 0.0 : 1.0;
                out.masks.set(p / w, p % w, k, NoiseMasks::kImpulse);
            }
        }

        if (spec.has_deadlines()) {
            const BandRange r = spec.deadline_band_range.value_or(default_deadline_range(s.bands));
            if (k + 1 >= r.first && k + 1 <= r.last) {
                Substream dl(spec.seed, Component::Deadline, k);
                const auto lines = dl.integer(3, 10);
                for (std::uint64_t l = 0; l < lines; ++l) {
                    const auto width = std::min<std::size_t>(static_cast<std::size_t>(dl.integer(1, 3)), w);
                    const auto start = static_cast<std::size_t>(dl.integer(0, w - width));
                    for (std::size_t j = start; j < start + width; ++j)
                        for (std::size_t i = 0; i < h; ++i) {
                            band[i * w + j] = 0.0;
                            out.masks.set(i, j, k, NoiseMasks::kDeadline);
                        }
                }
            }
        }

        if (spec.has_stripes()) {
            const BandRange r = spec.stripe_band_range.value_or(default_stripe_range(s.bands));
            if (k + 1 >= r.first && k + 1 <= r.last) {
                Substream st(spec.seed, Component::Stripe, k);
                const auto count = static_cast<std::size_t>(st.integer(20, 40));
                for (std::size_t j : st.sample_without_replacement(w, count)) {
                    const double mag = st.uniform(0.2, 0.5);
                    const double offset = st.uniform() < 0.5 ? -mag : mag;
                    for (std::size_t i = 0; i < h; ++i) {
                        band[i * w + j] += offset;
                        out.masks.set(i, j, k, NoiseMasks::kStripe);
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace hsir
