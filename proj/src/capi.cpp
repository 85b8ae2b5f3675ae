#include "hsir/hsirestore.h"

#include "hsir/error.hpp"
#include "hsir/hsi_io.hpp"
#include "hsir/metrics.hpp"
#include "hsir/noise_sim.hpp"
#include "hsir/solver.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

struct hsir_cube {
    hsir::Cube cube;
};

struct hsir_report {
    hsir_cube restored;
    hsir_cube sparse;
    hsir_cube gaussian;
    hsir::RestoreReport meta;  // cubes moved out into the handles above
};

struct hsir_metrics {
    hsir::MetricsReport report;
};

namespace {

thread_local std::string g_last_error;

hsir_status fail(hsir_status code, const char* msg) {
    g_last_error = msg;
    return code;
}

// Runs fn, translating the library's exception hierarchy into status codes.
template <typename Fn>
hsir_status guarded(Fn&& fn) {
    try {
        fn();
        return HSIR_OK;
    } catch (const hsir::DataError& e) {
        return fail(HSIR_E_DATA, e.what());
    } catch (const hsir::ArgumentError& e) {
        return fail(HSIR_E_ARGUMENT, e.what());
    } catch (const hsir::FormatError& e) {
        return fail(HSIR_E_FORMAT, e.what());
    } catch (const hsir::IoError& e) {
        return fail(HSIR_E_IO, e.what());
    } catch (const hsir::StateError& e) {
        return fail(HSIR_E_STATE, e.what());
    } catch (const std::bad_alloc&) {
        return fail(HSIR_E_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(HSIR_E_INTERNAL, e.what());
    } catch (...) {
        return fail(HSIR_E_INTERNAL, "unknown error");
    }
}

char* dup_string(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

#define HSIR_REQUIRE(cond, msg)                          \
    do {                                                 \
        if (!(cond)) return fail(HSIR_E_ARGUMENT, msg);  \
    } while (0)

hsir::DType to_dtype(hsir_dtype d) {
    if (d != HSIR_F32 && d != HSIR_F64) throw hsir::ArgumentError("unknown dtype " + std::to_string(d));
    return d == HSIR_F32 ? hsir::DType::F32 : hsir::DType::F64;
}

hsir::SolverConfig to_config(const hsir_solver_config& c) {
    if (c.model != HSIR_MODEL_GENERAL && c.model != HSIR_MODEL_APPROXIMATE) {
        throw hsir::ArgumentError("unknown model " + std::to_string(c.model));
    }
    hsir::SolverConfig cfg;
    cfg.model = c.model == HSIR_MODEL_GENERAL ? hsir::Model::General : hsir::Model::Approximate;
    cfg.tau = c.tau;
    cfg.lambda_c = c.lambda_c;
    if (c.beta >= 0.0) cfg.beta = c.beta;
    cfg.weights = {c.weights[0], c.weights[1], c.weights[2]};
    if (c.ranks[0] != 0 || c.ranks[1] != 0 || c.ranks[2] != 0) {
        cfg.ranks = hsir::Ranks{c.ranks[0], c.ranks[1], c.ranks[2]};
    }
    cfg.mu0 = c.mu0;
    cfg.rho = c.rho;
    cfg.mu_max = c.mu_max;
    cfg.eps = c.eps;
    cfg.feas_tol = c.feas_tol;
    cfg.max_iter = c.max_iter;
    cfg.hooi_sweeps = c.hooi_sweeps;
    return cfg;
}

}  // namespace

extern "C" {

const char* hsir_last_error(void) { return g_last_error.c_str(); }

const char* hsir_version(void) { return "1.0.0"; }

hsir_status hsir_cube_create(size_t height, size_t width, size_t bands, hsir_cube** out) {
    HSIR_REQUIRE(out, "out is NULL");
    HSIR_REQUIRE(height > 0 && width > 0 && bands > 0, "cube dimensions must be positive");
    return guarded([&] { *out = new hsir_cube{hsir::Cube(height, width, bands)}; });
}

hsir_status hsir_cube_from_data(size_t height, size_t width, size_t bands, const double* data, hsir_cube** out) {
    HSIR_REQUIRE(out && data, "NULL argument");
    HSIR_REQUIRE(height > 0 && width > 0 && bands > 0, "cube dimensions must be positive");
    return guarded([&] {
        const hsir::Shape s{height, width, bands};
        *out = new hsir_cube{hsir::Cube(s, std::vector<double>(data, data + s.size()))};
    });
}

hsir_status hsir_cube_clone(const hsir_cube* cube, hsir_cube** out) {
    HSIR_REQUIRE(cube && out, "NULL argument");
    return guarded([&] { *out = new hsir_cube{cube->cube}; });
}

void hsir_cube_destroy(hsir_cube* cube) { delete cube; }

hsir_status hsir_cube_shape(const hsir_cube* cube, size_t* height, size_t* width, size_t* bands) {
    HSIR_REQUIRE(cube, "cube is NULL");
    if (height) *height = cube->cube.height();
    if (width) *width = cube->cube.width();
    if (bands) *bands = cube->cube.bands();
    return HSIR_OK;
}

double* hsir_cube_data(hsir_cube* cube) { return cube ? cube->cube.data().data() : nullptr; }

const double* hsir_cube_cdata(const hsir_cube* cube) { return cube ? cube->cube.data().data() : nullptr; }

hsir_status hsir_cube_read(const char* path, hsir_cube** out) {
    HSIR_REQUIRE(path && out, "NULL argument");
    return guarded([&] { *out = new hsir_cube{hsir::read_cube(path)}; });
}

hsir_status hsir_cube_write(const char* path, const hsir_cube* cube, hsir_dtype dtype) {
    HSIR_REQUIRE(path && cube, "NULL argument");
    return guarded([&] {
        hsir::write_cube(path, cube->cube, to_dtype(dtype));
    });
}

hsir_status hsir_cube_write_ranged(const char* path, const hsir_cube* cube, hsir_dtype dtype, double range_min,
                                   double range_max) {
    HSIR_REQUIRE(path && cube, "NULL argument");
    return guarded([&] {
        hsir::write_cube(path, cube->cube, to_dtype(dtype),
                         hsir::ValueRange{range_min, range_max});
    });
}

hsir_status hsir_normalize_bands(const hsir_cube* cube, hsir_cube** out, double* ranges) {
    HSIR_REQUIRE(cube && out, "NULL argument");
    return guarded([&] {
        auto [norm, r] = hsir::normalize_bands(cube->cube);
        if (ranges) {
            for (std::size_t k = 0; k < r.size(); ++k) {
                ranges[2 * k] = r[k].min;
                ranges[2 * k + 1] = r[k].max;
            }
        }
        *out = new hsir_cube{std::move(norm)};
    });
}

hsir_status hsir_denormalize_bands(const hsir_cube* cube, const double* ranges, hsir_cube** out) {
    HSIR_REQUIRE(cube && ranges && out, "NULL argument");
    return guarded([&] {
        std::vector<hsir::ValueRange> r(cube->cube.bands());
        for (std::size_t k = 0; k < r.size(); ++k) r[k] = {ranges[2 * k], ranges[2 * k + 1]};
        *out = new hsir_cube{hsir::denormalize_bands(cube->cube, r)};
    });
}

hsir_status hsir_export_band_png(const hsir_cube* cube, size_t band, const char* path) {
    HSIR_REQUIRE(cube && path, "NULL argument");
    return guarded([&] { hsir::export_band_png(cube->cube, band, path); });
}

hsir_status hsir_apply_noise(const hsir_cube* clean, const char* spec_json, hsir_cube** noisy, hsir_cube** mask) {
    HSIR_REQUIRE(clean && spec_json && noisy, "NULL argument");
    return guarded([&] {
        const auto spec = hsir::NoiseSpec::from_json(spec_json);
        auto result = hsir::apply_noise(clean->cube, spec);
        auto* n = new hsir_cube{std::move(result.noisy)};
        if (mask) {
            try {
                *mask = new hsir_cube{result.masks.to_cube()};
            } catch (...) {
                delete n;
                throw;
            }
        }
        *noisy = n;
    });
}

hsir_status hsir_noise_spec_canonical(const char* spec_json, char** out) {
    HSIR_REQUIRE(spec_json && out, "NULL argument");
    return guarded([&] { *out = dup_string(hsir::NoiseSpec::from_json(spec_json).to_json()); });
}

void hsir_solver_config_default(hsir_solver_config* cfg) {
    if (!cfg) return;
    const hsir::SolverConfig d;
    cfg->model = HSIR_MODEL_APPROXIMATE;
    cfg->tau = d.tau;
    cfg->lambda_c = d.lambda_c;
    cfg->beta = -1.0;
    cfg->weights[0] = d.weights.spectral;
    cfg->weights[1] = d.weights.horizontal;
    cfg->weights[2] = d.weights.vertical;
    cfg->ranks[0] = cfg->ranks[1] = cfg->ranks[2] = 0;
    cfg->mu0 = d.mu0;
    cfg->rho = d.rho;
    cfg->mu_max = d.mu_max;
    cfg->eps = d.eps;
    cfg->feas_tol = d.feas_tol;
    cfg->max_iter = d.max_iter;
    cfg->hooi_sweeps = d.hooi_sweeps;
}

hsir_status hsir_auto_ranks(size_t height, size_t width, size_t bands, size_t ranks[3]) {
    HSIR_REQUIRE(ranks, "ranks is NULL");
    HSIR_REQUIRE(height > 0 && width > 0 && bands > 0, "cube dimensions must be positive");
    const auto r = hsir::auto_ranks({height, width, bands});
    for (int n = 0; n < 3; ++n) ranks[n] = r[n];
    return HSIR_OK;
}

hsir_status hsir_restore(const hsir_cube* noisy, const hsir_solver_config* cfg, hsir_report** out) {
    HSIR_REQUIRE(noisy && cfg && out, "NULL argument");
    return guarded([&] {
        auto rep = hsir::restore(noisy->cube, to_config(*cfg));
        auto* r = new hsir_report{{std::move(rep.restored)}, {std::move(rep.sparse)}, {std::move(rep.gaussian)}, {}};
        r->meta = std::move(rep);
        *out = r;
    });
}

void hsir_report_destroy(hsir_report* report) { delete report; }

const hsir_cube* hsir_report_restored(const hsir_report* r) { return r ? &r->restored : nullptr; }
const hsir_cube* hsir_report_sparse(const hsir_report* r) { return r ? &r->sparse : nullptr; }
const hsir_cube* hsir_report_gaussian(const hsir_report* r) { return r ? &r->gaussian : nullptr; }
int hsir_report_iterations(const hsir_report* r) { return r ? r->meta.iterations : 0; }
int hsir_report_converged(const hsir_report* r) { return r && r->meta.converged ? 1 : 0; }

const double* hsir_report_rel_change(const hsir_report* r, size_t* len) {
    if (!r) return nullptr;
    if (len) *len = r->meta.rel_change_history.size();
    return r->meta.rel_change_history.data();
}

const double* hsir_report_residual(const hsir_report* r, size_t* len) {
    if (!r) return nullptr;
    if (len) *len = r->meta.residual_history.size();
    return r->meta.residual_history.data();
}

void hsir_report_ranks(const hsir_report* r, size_t ranks[3]) {
    if (!r || !ranks) return;
    for (int n = 0; n < 3; ++n) ranks[n] = r->meta.ranks[n];
}

double hsir_report_lambda(const hsir_report* r) { return r ? r->meta.lambda : 0.0; }
double hsir_report_beta(const hsir_report* r) { return r ? r->meta.beta : 0.0; }

hsir_status hsir_evaluate(const hsir_cube* ref, const hsir_cube* test, hsir_metrics** out) {
    HSIR_REQUIRE(ref && test && out, "NULL argument");
    return guarded([&] { *out = new hsir_metrics{hsir::evaluate(ref->cube, test->cube)}; });
}

void hsir_metrics_destroy(hsir_metrics* m) { delete m; }
double hsir_metrics_mpsnr(const hsir_metrics* m) { return m ? m->report.mpsnr : 0.0; }
double hsir_metrics_mssim(const hsir_metrics* m) { return m ? m->report.mssim : 0.0; }
double hsir_metrics_ergas(const hsir_metrics* m) { return m ? m->report.ergas : 0.0; }
size_t hsir_metrics_bands(const hsir_metrics* m) { return m ? m->report.per_band_psnr.size() : 0; }

double hsir_metrics_band_psnr(const hsir_metrics* m, size_t band) {
    return m && band < m->report.per_band_psnr.size() ? m->report.per_band_psnr[band] : 0.0;
}

double hsir_metrics_band_ssim(const hsir_metrics* m, size_t band) {
    return m && band < m->report.per_band_ssim.size() ? m->report.per_band_ssim[band] : 0.0;
}

hsir_status hsir_metrics_csv(const hsir_metrics* m, char** out) {
    HSIR_REQUIRE(m && out, "NULL argument");
    return guarded([&] { *out = dup_string(m->report.to_csv()); });
}

hsir_status hsir_metrics_json(const hsir_metrics* m, char** out) {
    HSIR_REQUIRE(m && out, "NULL argument");
    return guarded([&] { *out = dup_string(m->report.to_json()); });
}

hsir_status hsir_mean_profile(const hsir_cube* cube, size_t band, hsir_axis axis, double* out, size_t len) {
    HSIR_REQUIRE(cube && out, "NULL argument");
    return guarded([&] {
        const auto p = hsir::mean_profile(
            cube->cube, band, axis == HSIR_AXIS_HORIZONTAL ? hsir::ProfileAxis::Horizontal : hsir::ProfileAxis::Vertical);
        if (len < p.size()) {
            throw hsir::ArgumentError("profile buffer holds " + std::to_string(len) + " values, need " +
                                      std::to_string(p.size()));
        }
        std::copy(p.begin(), p.end(), out);
    });
}

void hsir_string_free(char* s) { std::free(s); }

}  // extern "C"
