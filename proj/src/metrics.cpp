#include "hsir/metrics.hpp"

#include "hsir/error.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace hsir {

namespace {

void require_same_length(std::span<const double> a, std::span<const double> b, const char* what) {
    if (a.size() != b.size()) {
        throw ArgumentError(std::string(what) + ": band sizes differ (" + std::to_string(a.size()) +
                            " vs " + std::to_string(b.size()) + ")");
    }
}

std::vector<double> gaussian_window(std::size_t n, double sigma) {
    std::vector<double> g(n);
    const double c = 0.5 * static_cast<double>(n - 1);
    for (std::size_t t = 0; t < n; ++t) {
        const double d = static_cast<double>(t) - c;
        g[t] = std::exp(-d * d / (2.0 * sigma * sigma));
    }
    const double s = std::accumulate(g.begin(), g.end(), 0.0);
    for (double& v : g) v /= s;
    return g;
}

// Separable 'valid' correlation of an h x w image with g (x) g.
std::vector<double> filter_valid(const std::vector<double>& img, std::size_t h, std::size_t w,
                                 const std::vector<double>& g) {
    const std::size_t n = g.size();
    const std::size_t oh = h - n + 1, ow = w - n + 1;
    std::vector<double> tmp(h * ow);
    for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < ow; ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < n; ++t) acc += g[t] * img[i * w + j + t];
            tmp[i * ow + j] = acc;
        }
    std::vector<double> out(oh * ow);
    for (std::size_t i = 0; i < oh; ++i)
        for (std::size_t j = 0; j < ow; ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < n; ++t) acc += g[t] * tmp[(i + t) * ow + j];
            out[i * ow + j] = acc;
        }
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace

double mse(std::span<const double> a, std::span<const double> b) {
    require_same_length(a, b, "mse");
    if (a.empty()) throw ArgumentError("mse: empty band");
    double acc = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) {
        const double d = a[n] - b[n];
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

double psnr_band(std::span<const double> ref, std::span<const double> test, double peak) {
    if (!(peak > 0.0)) throw ArgumentError("psnr: peak must be positive");
    const double e = mse(ref, test);
    if (e == 0.0) return kPsnrCapDb;
    return std::min(kPsnrCapDb, 10.0 * std::log10(peak * peak / e));
}

double ssim_band(std::span<const double> ref, std::span<const double> test, std::size_t height,
                 std::size_t width, const SsimOptions& opts) {
    require_same_length(ref, test, "ssim");
    if (ref.size() != height * width) throw ArgumentError("ssim: band length does not match height*width");
    if (opts.window == 0 || !(opts.sigma > 0.0)) throw ArgumentError("ssim: invalid window options");
    if (height < opts.window || width < opts.window) {
        throw ArgumentError("ssim: band " + std::to_string(height) + "x" + std::to_string(width) +
                            " is smaller than the " + std::to_string(opts.window) +
                            "-pixel window; pass a smaller window in SsimOptions");
    }
    const auto g = gaussian_window(opts.window, opts.sigma);
    const std::size_t n = ref.size();
    std::vector<double> x(ref.begin(), ref.end()), y(test.begin(), test.end());
    std::vector<double> xx(n), yy(n), xy(n);
    for (std::size_t t = 0; t < n; ++t) {
        xx[t] = x[t] * x[t];
        yy[t] = y[t] * y[t];
        xy[t] = x[t] * y[t];
    }
    const auto mx = filter_valid(x, height, width, g);
    const auto my = filter_valid(y, height, width, g);
    const auto exx = filter_valid(xx, height, width, g);
    const auto eyy = filter_valid(yy, height, width, g);
    const auto exy = filter_valid(xy, height, width, g);

    const double c1 = std::pow(0.01 * opts.dynamic_range, 2);
    const double c2 = std::pow(0.03 * opts.dynamic_range, 2);
    double acc = 0.0;
    for (std::size_t t = 0; t < mx.size(); ++t) {
        const double sx = exx[t] - mx[t] * mx[t];
        const double sy = eyy[t] - my[t] * my[t];
        const double sxy = exy[t] - mx[t] * my[t];
        const double num = (2.0 * mx[t] * my[t] + c1) * (2.0 * sxy + c2);
        const double den = (mx[t] * mx[t] + my[t] * my[t] + c1) * (sx + sy + c2);
        acc += num / den;
    }
    return acc / static_cast<double>(mx.size());
}

double ergas(const Cube& ref, const Cube& test) {
    if (ref.shape() != test.shape()) {
        throw DataError("ergas: shape mismatch " + ref.shape().str() + " vs " + test.shape().str());
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < ref.bands(); ++k) {
        const auto r = ref.band(k);
        const double mean = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
        if (mean == 0.0) {
            throw DataError("ergas: reference band " + std::to_string(k + 1) + " has zero mean");
        }
        acc += mse(r, test.band(k)) / (mean * mean);
    }
    return 100.0 * std::sqrt(acc / static_cast<double>(ref.bands()));
}

MetricsReport evaluate(const Cube& ref, const Cube& test, const SsimOptions& opts) {
    if (ref.shape() != test.shape()) {
        throw DataError("evaluate: shape mismatch " + ref.shape().str() + " vs " + test.shape().str());
    }
    MetricsReport rep;
    for (std::size_t k = 0; k < ref.bands(); ++k) {
        rep.per_band_psnr.push_back(psnr_band(ref.band(k), test.band(k)));
        rep.per_band_ssim.push_back(ssim_band(ref.band(k), test.band(k), ref.height(), ref.width(), opts));
    }
    const double b = static_cast<double>(ref.bands());
    rep.mpsnr = std::accumulate(rep.per_band_psnr.begin(), rep.per_band_psnr.end(), 0.0) / b;
    rep.mssim = std::accumulate(rep.per_band_ssim.begin(), rep.per_band_ssim.end(), 0.0) / b;
    rep.ergas = ergas(ref, test);
    return rep;
}

double mpsnr(const Cube& ref, const Cube& test) {
    require_same_shape(ref, test, "mpsnr");
    double acc = 0.0;
    for (std::size_t k = 0; k < ref.bands(); ++k) acc += psnr_band(ref.band(k), test.band(k));
    return acc / static_cast<double>(ref.bands());
}

std::string MetricsReport::to_csv() const {
    std::ostringstream os;
    os << "band,psnr_db,ssim\n";
    for (std::size_t k = 0; k < per_band_psnr.size(); ++k) {
        os << (k + 1) << ',' << fmt(per_band_psnr[k]) << ',' << fmt(per_band_ssim[k]) << '\n';
    }
    os << "mpsnr," << fmt(mpsnr) << '\n';
    os << "mssim," << fmt(mssim) << '\n';
    os << "ergas," << fmt(ergas) << '\n';
    return os.str();
}

std::string MetricsReport::to_json() const {
    nlohmann::json j;
    j["per_band_psnr"] = per_band_psnr;
    j["per_band_ssim"] = per_band_ssim;
    j["mpsnr"] = mpsnr;
    j["mssim"] = mssim;
    j["ergas"] = ergas;
    return j.dump(2);
}

ProfileAxis profile_axis_from_string(const std::string& s) {
    if (s == "horizontal") return ProfileAxis::Horizontal;
    if (s == "vertical") return ProfileAxis::Vertical;
    throw ArgumentError("axis must be horizontal or vertical (got '" + s + "')");
}

std::vector<double> mean_profile(const Cube& cube, std::size_t band, ProfileAxis axis) {
    if (band >= cube.bands()) {
        throw ArgumentError("mean_profile: band " + std::to_string(band) + " out of range (cube has " +
                            std::to_string(cube.bands()) + " bands)");
    }
    const std::size_t h = cube.height(), w = cube.width();
    if (axis == ProfileAxis::Horizontal) {
        std::vector<double> p(h, 0.0);
        for (std::size_t i = 0; i < h; ++i) {
            for (std::size_t j = 0; j < w; ++j) p[i] += cube(i, j, band);
            p[i] /= static_cast<double>(w);
        }
        return p;
    }
    std::vector<double> p(w, 0.0);
    for (std::size_t j = 0; j < w; ++j) {
        for (std::size_t i = 0; i < h; ++i) p[j] += cube(i, j, band);
        p[j] /= static_cast<double>(h);
    }
    return p;
}

}  // namespace hsir
