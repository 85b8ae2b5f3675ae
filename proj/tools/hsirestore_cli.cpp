// hsirestore: batch front-end for noise simulation, restoration, evaluation
// and mean-profile extraction. Talks to the library only through the C API.
//
// Exit codes: 0 success, 2 usage, 3 I/O or format, 4 data/validation.

#include "hsir/hsirestore.h"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitData = 4;

struct CubeDeleter {
    void operator()(hsir_cube* c) const { hsir_cube_destroy(c); }
};
struct ReportDeleter {
    void operator()(hsir_report* r) const { hsir_report_destroy(r); }
};
struct MetricsDeleter {
    void operator()(hsir_metrics* m) const { hsir_metrics_destroy(m); }
};
struct StringDeleter {
    void operator()(char* s) const { hsir_string_free(s); }
};

using CubePtr = std::unique_ptr<hsir_cube, CubeDeleter>;
using ReportPtr = std::unique_ptr<hsir_report, ReportDeleter>;
using MetricsPtr = std::unique_ptr<hsir_metrics, MetricsDeleter>;
using CString = std::unique_ptr<char, StringDeleter>;

// Carries an exit code out of a subcommand.
struct CommandError {
    int code;
    std::string message;
};

int exit_code_for(hsir_status s) {
    switch (s) {
        case HSIR_OK: return kExitOk;
        case HSIR_E_ARGUMENT:
        case HSIR_E_STATE: return kExitUsage;
        case HSIR_E_IO:
        case HSIR_E_FORMAT: return kExitIo;
        case HSIR_E_DATA: return kExitData;
        default: return 1;
    }
}

void check(hsir_status s, const std::string& context) {
    if (s != HSIR_OK) throw CommandError{exit_code_for(s), context + ": " + hsir_last_error()};
}

CubePtr load(const std::string& path) {
    hsir_cube* c = nullptr;
    check(hsir_cube_read(path.c_str(), &c), "reading " + path);
    return CubePtr(c);
}

struct Dims {
    size_t h = 0, w = 0, b = 0;
    std::string str() const {
        return std::to_string(h) + "x" + std::to_string(w) + "x" + std::to_string(b);
    }
};

Dims dims_of(const hsir_cube* c) {
    Dims d;
    hsir_cube_shape(c, &d.h, &d.w, &d.b);
    return d;
}

hsir_dtype parse_dtype(const std::string& s) { return s == "f32" ? HSIR_F32 : HSIR_F64; }

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw CommandError{kExitIo, "cannot open " + path + " for writing"};
    out << text;
    if (!out) throw CommandError{kExitIo, "write failed: " + path};
}

std::vector<double> parse_list(const std::string& s, std::size_t n, const char* flag) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw CommandError{kExitUsage, std::string(flag) + ": cannot parse '" + item + "'"};
        }
    }
    if (out.size() != n) {
        throw CommandError{kExitUsage, std::string(flag) + " expects " + std::to_string(n) + " comma-separated values"};
    }
    return out;
}

nlohmann::json parse_band_range(const std::string& s, const char* flag) {
    const auto colon = s.find(':');
    try {
        if (colon == std::string::npos) throw std::invalid_argument(s);
        std::size_t u1 = 0, u2 = 0;
        const std::string a = s.substr(0, colon), b = s.substr(colon + 1);
        const long first = std::stol(a, &u1);
        const long last = std::stol(b, &u2);
        if (u1 != a.size() || u2 != b.size() || first < 1 || last < first) throw std::invalid_argument(s);
        return nlohmann::json::array({first, last});
    } catch (const std::exception&) {
        throw CommandError{kExitUsage, std::string(flag) + " expects a:b with 1 <= a <= b (got '" + s + "')"};
    }
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
    std::string input, output, dtype = "f64";
    int case_id = 0;
    std::uint64_t seed = 0;
    std::optional<double> sigma, impulse;
    std::optional<std::string> deadline_bands, stripe_bands;
};

int cmd_simulate(const SimulateArgs& a) {
    nlohmann::json spec;
    spec["case_id"] = a.case_id;
    spec["seed"] = a.seed;
    spec["gaussian_sigma"] = a.sigma ? nlohmann::json(*a.sigma) : nlohmann::json(nullptr);
    spec["impulse_fraction"] = a.impulse ? nlohmann::json(*a.impulse) : nlohmann::json(nullptr);
    spec["deadline_band_range"] = a.deadline_bands ? parse_band_range(*a.deadline_bands, "--deadline-bands") : nlohmann::json(nullptr);
    spec["stripe_band_range"] = a.stripe_bands ? parse_band_range(*a.stripe_bands, "--stripe-bands") : nlohmann::json(nullptr);
    const std::string spec_text = spec.dump();

    CubePtr clean = load(a.input);
    hsir_cube* noisy_raw = nullptr;
    hsir_cube* mask_raw = nullptr;
    check(hsir_apply_noise(clean.get(), spec_text.c_str(), &noisy_raw, &mask_raw), "simulating noise");
    CubePtr noisy(noisy_raw), mask(mask_raw);

    char* canon_raw = nullptr;
    check(hsir_noise_spec_canonical(spec_text.c_str(), &canon_raw), "serializing noise spec");
    CString canon(canon_raw);

    check(hsir_cube_write(a.output.c_str(), noisy.get(), parse_dtype(a.dtype)), "writing " + a.output);
    const std::string mask_path = a.output + ".mask";
    check(hsir_cube_write(mask_path.c_str(), mask.get(), HSIR_F32), "writing " + mask_path);
    write_text(a.output + ".noise.json", std::string(canon.get()) + "\n");
    return kExitOk;
}

// ---- restore ---------------------------------------------------------------

struct RestoreArgs {
    std::string input, output, model = "approx", ranks = "auto", dtype = "f64", report;
    std::optional<double> tau, lambda_c, beta, noise_variance, eps, feas_tol, mu0, rho, mu_max;
    std::optional<std::string> weights;
    std::optional<int> max_iter, hooi_sweeps;
    bool normalize = false;
};

int cmd_restore(const RestoreArgs& a) {
    hsir_solver_config cfg;
    hsir_solver_config_default(&cfg);
    if (a.model == "general") {
        cfg.model = HSIR_MODEL_GENERAL;
    } else if (a.model == "approx") {
        cfg.model = HSIR_MODEL_APPROXIMATE;
    } else {
        throw CommandError{kExitUsage, "--model must be general or approx"};
    }
    if (a.tau) cfg.tau = *a.tau;
    if (a.lambda_c) cfg.lambda_c = *a.lambda_c;
    if (a.beta && a.noise_variance) throw CommandError{kExitUsage, "--beta and --noise-variance are exclusive"};
    if (a.beta) cfg.beta = *a.beta;
    if (a.noise_variance) {
        if (!(*a.noise_variance > 0.0)) throw CommandError{kExitUsage, "--noise-variance must be positive"};
        cfg.beta = 1.0 / *a.noise_variance;
    }
    if (a.weights) {
        const auto w = parse_list(*a.weights, 3, "--weights");
        for (int n = 0; n < 3; ++n) cfg.weights[n] = w[n];
    }
    if (a.ranks != "auto") {
        const auto r = parse_list(a.ranks, 3, "--ranks");
        for (int n = 0; n < 3; ++n) {
            if (r[n] < 1 || r[n] != static_cast<double>(static_cast<size_t>(r[n]))) {
                throw CommandError{kExitUsage, "--ranks must be positive integers or 'auto'"};
            }
            cfg.ranks[n] = static_cast<size_t>(r[n]);
        }
    }
    if (a.eps) cfg.eps = *a.eps;
    if (a.feas_tol) cfg.feas_tol = *a.feas_tol;
    if (a.mu0) cfg.mu0 = *a.mu0;
    if (a.rho) cfg.rho = *a.rho;
    if (a.mu_max) cfg.mu_max = *a.mu_max;
    if (a.max_iter) cfg.max_iter = *a.max_iter;
    if (a.hooi_sweeps) cfg.hooi_sweeps = *a.hooi_sweeps;

    CubePtr input = load(a.input);
    const Dims d = dims_of(input.get());
    const double* raw = hsir_cube_cdata(input.get());
    for (size_t n = 0; n < d.h * d.w * d.b; ++n) {
        if (!std::isfinite(raw[n])) throw CommandError{kExitData, "input cube contains non-finite values"};
    }

    std::vector<double> ranges;
    CubePtr work;
    if (a.normalize) {
        ranges.resize(2 * d.b);
        hsir_cube* n = nullptr;
        check(hsir_normalize_bands(input.get(), &n, ranges.data()), "normalizing bands");
        work.reset(n);
    }
    const hsir_cube* y = work ? work.get() : input.get();

    const auto t0 = std::chrono::steady_clock::now();
    hsir_report* rep_raw = nullptr;
    check(hsir_restore(y, &cfg, &rep_raw), "restoring");
    ReportPtr rep(rep_raw);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    auto emit = [&](const hsir_cube* c, const std::string& path) {
        if (a.normalize) {
            hsir_cube* back = nullptr;
            check(hsir_denormalize_bands(c, ranges.data(), &back), "denormalizing " + path);
            CubePtr owned(back);
            check(hsir_cube_write(path.c_str(), owned.get(), parse_dtype(a.dtype)), "writing " + path);
        } else {
            check(hsir_cube_write(path.c_str(), c, parse_dtype(a.dtype)), "writing " + path);
        }
    };
    emit(hsir_report_restored(rep.get()), a.output);
    // The noise components are written in the normalized domain.
    const std::string sparse_path = a.output + ".sparse";
    check(hsir_cube_write(sparse_path.c_str(), hsir_report_sparse(rep.get()), parse_dtype(a.dtype)),
          "writing " + sparse_path);
    if (cfg.model == HSIR_MODEL_GENERAL) {
        const std::string g_path = a.output + ".gaussian";
        check(hsir_cube_write(g_path.c_str(), hsir_report_gaussian(rep.get()), parse_dtype(a.dtype)),
              "writing " + g_path);
    }

    size_t ranks[3];
    hsir_report_ranks(rep.get(), ranks);
    size_t hist_len = 0, res_len = 0;
    const double* hist = hsir_report_rel_change(rep.get(), &hist_len);
    const double* res = hsir_report_residual(rep.get(), &res_len);

    nlohmann::json j;
    j["tool"] = "hsirestore";
    j["version"] = hsir_version();
    j["input"] = a.input;
    j["output"] = a.output;
    j["shape"] = {d.h, d.w, d.b};
    j["config"] = {
        {"model", a.model},
        {"tau", cfg.tau},
        {"lambda_c", cfg.lambda_c},
        {"lambda", hsir_report_lambda(rep.get())},
        {"beta", cfg.model == HSIR_MODEL_GENERAL ? nlohmann::json(hsir_report_beta(rep.get())) : nlohmann::json(nullptr)},
        {"weights", {cfg.weights[0], cfg.weights[1], cfg.weights[2]}},
        {"ranks", {ranks[0], ranks[1], ranks[2]}},
        {"ranks_auto", a.ranks == "auto"},
        {"mu0", cfg.mu0},
        {"rho", cfg.rho},
        {"mu_max", cfg.mu_max},
        {"eps", cfg.eps},
        {"feas_tol", cfg.feas_tol},
        {"max_iter", cfg.max_iter},
        {"hooi_sweeps", cfg.hooi_sweeps},
        {"normalize", a.normalize},
    };
    j["iterations"] = hsir_report_iterations(rep.get());
    j["converged"] = hsir_report_converged(rep.get()) != 0;
    j["rel_change_history"] = std::vector<double>(hist, hist + hist_len);
    j["residual_history"] = std::vector<double>(res, res + res_len);
    j["wall_time_s"] = wall;
    write_text(a.report.empty() ? a.output + ".report.json" : a.report, j.dump(2) + "\n");
    return kExitOk;
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateArgs {
    std::string ref, test, out;
    std::optional<std::string> json;
};

int cmd_evaluate(const EvaluateArgs& a) {
    CubePtr ref = load(a.ref);
    CubePtr test = load(a.test);
    const Dims dr = dims_of(ref.get()), dt = dims_of(test.get());
    if (dr.h != dt.h || dr.w != dt.w || dr.b != dt.b) {
        throw CommandError{kExitData, "shape mismatch: ref " + dr.str() + " vs test " + dt.str()};
    }
    hsir_metrics* m_raw = nullptr;
    check(hsir_evaluate(ref.get(), test.get(), &m_raw), "evaluating");
    MetricsPtr m(m_raw);

    char* csv = nullptr;
    check(hsir_metrics_csv(m.get(), &csv), "formatting CSV");
    CString csv_owned(csv);
    write_text(a.out, csv_owned.get());
    if (a.json) {
        char* js = nullptr;
        check(hsir_metrics_json(m.get(), &js), "formatting JSON");
        CString js_owned(js);
        write_text(*a.json, std::string(js_owned.get()) + "\n");
    }
    std::printf("MPSNR=%.4f MSSIM=%.4f ERGAS=%.4f\n", hsir_metrics_mpsnr(m.get()), hsir_metrics_mssim(m.get()),
                hsir_metrics_ergas(m.get()));
    return kExitOk;
}

// ---- profile ---------------------------------------------------------------

struct ProfileArgs {
    std::string input, axis = "horizontal", out;
    std::size_t band = 0;  // 1-based
};

int cmd_profile(const ProfileArgs& a) {
    CubePtr cube = load(a.input);
    const Dims d = dims_of(cube.get());
    if (a.band < 1 || a.band > d.b) {
        throw CommandError{kExitUsage, "--band " + std::to_string(a.band) + " out of range 1.." + std::to_string(d.b)};
    }
    const hsir_axis axis = a.axis == "vertical" ? HSIR_AXIS_VERTICAL : HSIR_AXIS_HORIZONTAL;
    std::vector<double> p(axis == HSIR_AXIS_HORIZONTAL ? d.h : d.w);
    check(hsir_mean_profile(cube.get(), a.band - 1, axis, p.data(), p.size()), "computing profile");
    std::ostringstream os;
    os.precision(17);
    os << "index,value\n";
    for (std::size_t n = 0; n < p.size(); ++n) os << (n + 1) << ',' << p[n] << '\n';
    write_text(a.out, os.str());
    return kExitOk;
}

// ---- png -------------------------------------------------------------------

struct PngArgs {
    std::string input, out;
    std::size_t band = 0;  // 1-based
};

int cmd_png(const PngArgs& a) {
    CubePtr cube = load(a.input);
    const Dims d = dims_of(cube.get());
    if (a.band < 1 || a.band > d.b) {
        throw CommandError{kExitUsage, "--band " + std::to_string(a.band) + " out of range 1.." + std::to_string(d.b)};
    }
    check(hsir_export_band_png(cube.get(), a.band - 1, a.out.c_str()), "exporting " + a.out);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixed-noise restoration of hyperspectral cubes (TV-regularized low-rank Tucker model)"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Add one of the six simulated mixed-noise cases to a clean cube");
    simulate->add_option("--input", sim.input, "Clean cube (values in [0,1])")->required();
    simulate->add_option("--case", sim.case_id, "Noise case 1..6")->required()->check(CLI::Range(1, 6));
    simulate->add_option("--seed", sim.seed, "RNG seed")->required();
    simulate->add_option("--output", sim.output, "Noisy cube path")->required();
    simulate->add_option("--sigma", sim.sigma, "Gaussian sigma (cases 1-4) or sqrt of max per-band variance (5-6)");
    simulate->add_option("--impulse", sim.impulse, "Impulse fraction (3-4) or its per-band maximum (5-6)");
    simulate->add_option("--deadline-bands", sim.deadline_bands, "Deadline window a:b (1-based, inclusive)");
    simulate->add_option("--stripe-bands", sim.stripe_bands, "Stripe window a:b (1-based, inclusive)");
    simulate->add_option("--dtype", sim.dtype, "Payload type")->check(CLI::IsMember({"f32", "f64"}));

    RestoreArgs rst;
    auto* restore = app.add_subcommand("restore", "Restore a noisy cube");
    restore->add_option("--input", rst.input, "Noisy cube")->required();
    restore->add_option("--output", rst.output, "Restored cube path")->required();
    restore->add_option("--model", rst.model, "general|approx")->check(CLI::IsMember({"general", "approx"}));
    restore->add_option("--ranks", rst.ranks, "r1,r2,r3 or auto (80% spatial, 10 spectral)");
    restore->add_option("--tau", rst.tau, "SSTV weight");
    restore->add_option("--lambda-c", rst.lambda_c, "C in lambda = 100*C/sqrt(h*w)");
    restore->add_option("--beta", rst.beta, "Frobenius noise weight (general model)");
    restore->add_option("--noise-variance", rst.noise_variance, "Gaussian variance estimate; sets beta = 1/variance");
    restore->add_option("--weights", rst.weights, "w1,w2,w3 (spectral, horizontal, vertical)");
    restore->add_option("--eps", rst.eps, "Stopping threshold on ||dX||^2/||Y||^2");
    restore->add_option("--feas-tol", rst.feas_tol, "Stopping threshold on ||Y-X-S-N||/||Y||");
    restore->add_option("--max-iter", rst.max_iter, "Iteration cap");
    restore->add_option("--mu0", rst.mu0, "Initial penalty");
    restore->add_option("--rho", rst.rho, "Penalty growth factor");
    restore->add_option("--mu-max", rst.mu_max, "Penalty cap");
    restore->add_option("--hooi-sweeps", rst.hooi_sweeps, "HOOI sweeps per iteration");
    restore->add_flag("--normalize", rst.normalize, "Normalize each band to [0,1] and stretch back afterwards");
    restore->add_option("--dtype", rst.dtype, "Payload type")->check(CLI::IsMember({"f32", "f64"}));
    restore->add_option("--report", rst.report, "Run report path (default <output>.report.json)");

    EvaluateArgs ev;
    auto* evaluate = app.add_subcommand("evaluate", "Compare a cube against a reference");
    evaluate->add_option("--ref", ev.ref, "Reference cube")->required();
    evaluate->add_option("--test", ev.test, "Test cube")->required();
    evaluate->add_option("--out", ev.out, "Per-band CSV output")->required();
    evaluate->add_option("--json", ev.json, "Also write the metrics as JSON to this path");

    ProfileArgs pr;
    auto* profile = app.add_subcommand("profile", "Mean profile of one band");
    profile->add_option("--input", pr.input, "Cube")->required();
    profile->add_option("--band", pr.band, "Band (1-based)")->required();
    profile->add_option("--axis", pr.axis, "horizontal (row means) or vertical (column means)")
        ->check(CLI::IsMember({"horizontal", "vertical"}));
    profile->add_option("--out", pr.out, "CSV output")->required();

    PngArgs pg;
    auto* png = app.add_subcommand("png", "Export one band as an 8-bit grayscale PNG");
    png->add_option("--input", pg.input, "Cube")->required();
    png->add_option("--band", pg.band, "Band (1-based)")->required();
    png->add_option("--out", pg.out, "PNG path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return kExitUsage;
    }

    try {
        if (*simulate) return cmd_simulate(sim);
        if (*restore) return cmd_restore(rst);
        if (*evaluate) return cmd_evaluate(ev);
        if (*profile) return cmd_profile(pr);
        if (*png) return cmd_png(pg);
    } catch (const CommandError& e) {
        std::cerr << "hsirestore: " << e.message << "\n";
        if (e.code == kExitUsage) std::cerr << "run with --help for usage\n";
        return e.code;
    }
    return kExitUsage;
}
