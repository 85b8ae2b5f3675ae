#include "hsir/fft3d.hpp"

#include "hsir/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hsir {

namespace {

// Largest prime handled by the direct mixed-radix butterflies.
constexpr std::size_t kMaxDirectRadix = 13;

std::vector<std::size_t> prime_factors(std::size_t n) {
    std::vector<std::size_t> f;
    // Peel 4s first so power-of-two lengths mostly use radix-4 stages.
    while (n % 4 == 0) {
        f.push_back(4);
        n /= 4;
    }
    for (std::size_t p = 2; p * p <= n; ++p) {
        while (n % p == 0) {
            f.push_back(p);
            n /= p;
        }
    }
    if (n > 1) f.push_back(n);
    return f;
}

Complex unit_root(double turns) {
    const double a = -2.0 * std::numbers::pi * turns;
    return {std::cos(a), std::sin(a)};
}

}  // namespace

struct FftPlan::Impl {
    std::size_t n = 0;
    std::vector<std::size_t> factors;
    std::vector<Complex> twiddles;  // e^{-2 pi i t / n}

    // Bluestein state, only when some factor exceeds kMaxDirectRadix.
    bool bluestein = false;
    std::vector<Complex> chirp;        // e^{-i pi t^2 / n}, t < n
    std::vector<Complex> kernel_hat;   // FFT_m of the conjugate chirp
    std::unique_ptr<FftPlan> padded;   // power-of-two plan of length m

    void forward(std::span<Complex> data) const;
    void mixed_radix(const Complex* in, std::size_t stride, Complex* out, std::size_t len,
                     std::size_t level, std::vector<Complex>& tmp) const;
};

void FftPlan::Impl::mixed_radix(const Complex* in, std::size_t stride, Complex* out, std::size_t len,
                                std::size_t level, std::vector<Complex>& tmp) const {
    const std::size_t p = factors[level];
    const std::size_t m = len / p;
    if (m == 1) {
        for (std::size_t r = 0; r < p; ++r) out[r] = in[r * stride];
    } else {
        for (std::size_t r = 0; r < p; ++r) {
            mixed_radix(in + r * stride, stride * p, out + r * m, m, level + 1, tmp);
        }
    }
    // out[r*m + q] now holds sub-transform r at bin q. Twiddles of this
    // sub-length are W_len^e = W_n^{e * stride}.
    Complex* y = tmp.data() + level * kMaxDirectRadix;  // scratch slot per recursion level
    for (std::size_t q = 0; q < m; ++q) {
        for (std::size_t r = 0; r < p; ++r) y[r] = out[r * m + q];
        for (std::size_t s = 0; s < p; ++s) {
            const std::size_t bin = q + s * m;
            Complex acc = y[0];
            for (std::size_t r = 1; r < p; ++r) {
                acc += y[r] * twiddles[(r * bin * stride) % n];
            }
            out[bin] = acc;
        }
    }
}

void FftPlan::Impl::forward(std::span<Complex> data) const {
    if (n == 1) return;
    if (!bluestein) {
        std::vector<Complex> in(data.begin(), data.end());
        std::vector<Complex> tmp(factors.size() * kMaxDirectRadix);
        mixed_radix(in.data(), 1, data.data(), n, 0, tmp);
        return;
    }
    const std::size_t m = padded->size();
    std::vector<Complex> a(m, Complex{});
    for (std::size_t t = 0; t < n; ++t) a[t] = data[t] * chirp[t];
    padded->execute(a, false);
    for (std::size_t t = 0; t < m; ++t) a[t] *= kernel_hat[t];
    padded->execute(a, true);
    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) data[k] = chirp[k] * a[k] * scale;
}

FftPlan::FftPlan(std::size_t n) : n_(n), impl_(std::make_unique<Impl>()) {
    if (n == 0) throw ArgumentError("FFT length must be positive");
    Impl& p = *impl_;
    p.n = n;
    p.factors = prime_factors(n);
    p.bluestein = std::any_of(p.factors.begin(), p.factors.end(),
                              [](std::size_t f) { return f > kMaxDirectRadix; });
    if (!p.bluestein) {
        p.twiddles.resize(n);
        for (std::size_t t = 0; t < n; ++t) {
            p.twiddles[t] = unit_root(static_cast<double>(t) / static_cast<double>(n));
        }
        return;
    }
    std::size_t m = 1;
    while (m < 2 * n - 1) m <<= 1;
    p.chirp.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        // t^2 mod 2n keeps the angle argument small and exact.
        const std::size_t s = static_cast<std::size_t>((static_cast<unsigned __int128>(t) * t) % (2 * n));
        p.chirp[t] = unit_root(0.5 * static_cast<double>(s) / static_cast<double>(n));
    }
    p.padded = std::make_unique<FftPlan>(m);
    p.kernel_hat.assign(m, Complex{});
    p.kernel_hat[0] = std::conj(p.chirp[0]);
    for (std::size_t t = 1; t < n; ++t) {
        p.kernel_hat[t] = std::conj(p.chirp[t]);
        p.kernel_hat[m - t] = std::conj(p.chirp[t]);
    }
    p.padded->execute(p.kernel_hat, false);
}

FftPlan::~FftPlan() = default;
FftPlan::FftPlan(FftPlan&&) noexcept = default;
FftPlan& FftPlan::operator=(FftPlan&&) noexcept = default;

void FftPlan::execute(std::span<Complex> data, bool inverse) const {
    if (data.size() != n_) throw ArgumentError("FFT buffer length does not match plan");
    if (!inverse) {
        impl_->forward(data);
        return;
    }
    for (auto& v : data) v = std::conj(v);
    impl_->forward(data);
    for (auto& v : data) v = std::conj(v);
}

namespace {

Shape checked(const Shape& s) {
    if (s.height == 0 || s.width == 0 || s.bands == 0) {
        throw ArgumentError("fftn: zero-size dimension in shape " + s.str());
    }
    return s;
}

}  // namespace

Fft3d::Fft3d(const Shape& shape)
    : shape_(checked(shape)), rows_(shape.height), cols_(shape.width), bands_(shape.bands) {}

void Fft3d::transform(SpectralCube& sc, bool inverse) const {
    if (sc.shape != shape_) throw ArgumentError("Fft3d: spectral cube shape mismatch");
    const std::size_t h = shape_.height, w = shape_.width, b = shape_.bands;
    auto at = [&](std::size_t i, std::size_t j, std::size_t k) -> Complex& {
        return sc.data[(k * h + i) * w + j];
    };
    std::vector<Complex> line;
    if (w > 1) {
        for (std::size_t k = 0; k < b; ++k)
            for (std::size_t i = 0; i < h; ++i) {
                std::span<Complex> row(&at(i, 0, k), w);
                cols_.execute(row, inverse);
            }
    }
    if (h > 1) {
        line.resize(h);
        for (std::size_t k = 0; k < b; ++k)
            for (std::size_t j = 0; j < w; ++j) {
                for (std::size_t i = 0; i < h; ++i) line[i] = at(i, j, k);
                rows_.execute(line, inverse);
                for (std::size_t i = 0; i < h; ++i) at(i, j, k) = line[i];
            }
    }
    if (b > 1) {
        line.resize(b);
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = 0; j < w; ++j) {
                for (std::size_t k = 0; k < b; ++k) line[k] = at(i, j, k);
                bands_.execute(line, inverse);
                for (std::size_t k = 0; k < b; ++k) at(i, j, k) = line[k];
            }
    }
}

SpectralCube Fft3d::forward(const Cube& cube) const {
    SpectralCube sc{cube.shape(), std::vector<Complex>(cube.data().begin(), cube.data().end())};
    transform(sc, false);
    return sc;
}

void Fft3d::forward(SpectralCube& sc) const { transform(sc, false); }

void Fft3d::inverse(SpectralCube& sc) const {
    transform(sc, true);
    const double scale = 1.0 / static_cast<double>(shape_.size());
    for (auto& v : sc.data) v *= scale;
}

SpectralCube fftn(const Cube& cube) { return Fft3d(cube.shape()).forward(cube); }

SpectralCube ifftn(const SpectralCube& sc) {
    SpectralCube out = sc;
    Fft3d(sc.shape).inverse(out);
    return out;
}

}  // namespace hsir
