#include "hsir/solver.hpp"

#include "hsir/error.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace hsir {

const char* to_string(Model m) { return m == Model::General ? "general" : "approx"; }

Model model_from_string(const std::string& s) {
    if (s == "general") return Model::General;
    if (s == "approx" || s == "approximate") return Model::Approximate;
    throw ArgumentError("unknown model '" + s + "' (expected general or approx)");
}

Ranks auto_ranks(const Shape& s) {
    auto spatial = [](std::size_t n) {
        const auto r = static_cast<std::size_t>(std::lround(0.8 * static_cast<double>(n)));
        return std::clamp<std::size_t>(r, 1, n);
    };
    return {spatial(s.height), spatial(s.width), std::min<std::size_t>(10, s.bands)};
}

void SolverConfig::validate(const Shape& shape) const {
    if (!(tau >= 0.0)) throw ArgumentError("tau must be >= 0");
    if (!(lambda_c > 0.0)) throw ArgumentError("lambda_c must be > 0");
    if (beta && !(*beta >= 0.0)) throw ArgumentError("beta must be >= 0");
    weights.validate();
    if (!(rho > 1.0)) throw ArgumentError("rho must be > 1");
    if (!(mu0 > 0.0) || !(mu0 <= mu_max)) throw ArgumentError("need 0 < mu0 <= mu_max");
    if (!(eps > 0.0)) throw ArgumentError("eps must be > 0");
    if (!(feas_tol > 0.0)) throw ArgumentError("feas_tol must be > 0");
    if (max_iter < 1) throw ArgumentError("max_iter must be >= 1");
    if (hooi_sweeps < 1) throw ArgumentError("hooi_sweeps must be >= 1");
    const Ranks r = resolved_ranks(shape);
    for (int n = 0; n < 3; ++n) {
        if (r[n] < 1 || r[n] > shape.extent(n + 1)) {
            throw ArgumentError("rank " + std::to_string(r[n]) + " out of range for mode " +
                                std::to_string(n + 1) + " of shape " + shape.str());
        }
    }
}

double SolverConfig::lambda(const Shape& s) const {
    return 100.0 * lambda_c / std::sqrt(static_cast<double>(s.height * s.width));
}

double SolverConfig::beta_from_variance(double variance) {
    if (!(variance > 0.0) || !std::isfinite(variance)) {
        throw ArgumentError("noise variance must be positive and finite");
    }
    return 1.0 / variance;
}

SolverState SolverState::initial(const Shape& shape, const SolverConfig& cfg) {
    SolverState st;
    st.X = st.Z = st.S = st.N = Cube(shape);
    st.gamma1 = st.gamma2 = Cube(shape);
    st.F = st.gamma3 = StackedGrad(shape);
    st.mu = cfg.mu0;
    return st;
}

double soft_threshold(double x, double delta) {
    if (!(delta >= 0.0)) throw ArgumentError("soft_threshold: negative threshold");
    if (x > delta) return x - delta;
    if (x < -delta) return x + delta;
    return 0.0;
}

Cube soft_threshold(Cube x, double delta) {
    if (!(delta >= 0.0)) throw ArgumentError("soft_threshold: negative threshold");
    for (double& v : x.data()) {
        v = v > delta ? v - delta : (v < -delta ? v + delta : 0.0);
    }
    return x;
}

StackedGrad soft_threshold(StackedGrad g, double delta) {
    g.spectral = soft_threshold(std::move(g.spectral), delta);
    g.horizontal = soft_threshold(std::move(g.horizontal), delta);
    g.vertical = soft_threshold(std::move(g.vertical), delta);
    return g;
}

ZSolver::ZSolver(const Shape& shape, const TVWeights& weights)
    : fft_(shape), tz_(tz_spectrum(shape, weights)) {}

Cube ZSolver::solve(const Cube& rhs, double mu) const {
    if (!(mu > 0.0)) throw std::logic_error("ZSolver::solve: mu must be positive");
    SpectralCube sc = fft_.forward(rhs);
    auto tz = tz_.data();
    for (std::size_t n = 0; n < sc.data.size(); ++n) sc.data[n] /= mu * (1.0 + tz[n]);
    fft_.inverse(sc);
    Cube z(rhs.shape());
    auto out = z.data();
    for (std::size_t n = 0; n < out.size(); ++n) {
        assert(std::abs(sc.data[n].imag()) <= 1e-9 * std::max(1.0, std::abs(sc.data[n].real())));
        out[n] = sc.data[n].real();
    }
    return z;
}

Cube x_target(const SolverState& st, const Cube& y, const SolverConfig& cfg) {
    Cube t = y;
    const double inv_mu = 1.0 / st.mu;
    auto tv = t.data();
    auto s = st.S.data(), n = st.N.data(), z = st.Z.data();
    auto g1 = st.gamma1.data(), g2 = st.gamma2.data();
    const bool general = cfg.model == Model::General;
    for (std::size_t k = 0; k < tv.size(); ++k) {
        double v = tv[k] - s[k] + z[k] + (g1[k] - g2[k]) * inv_mu;
        if (general) v -= n[k];
        tv[k] = 0.5 * v;
    }
    return t;
}

void update_x(SolverState& st, const Cube& y, const SolverConfig& cfg) {
    const Cube target = x_target(st, y, cfg);
    const HooiOptions opts{cfg.hooi_sweeps, 1e-8};
    st.tucker = hooi(target, cfg.resolved_ranks(y.shape()), st.have_tucker ? &st.tucker : nullptr, opts);
    st.have_tucker = true;
    st.X = tucker_reconstruct(st.tucker);
}

Cube z_rhs(const SolverState& st, const SolverConfig& cfg) {
    Cube h = st.mu * st.X;
    h += st.mu * dw_adjoint(st.F, cfg.weights);
    h += st.gamma2;
    h -= dw_adjoint(st.gamma3, cfg.weights);
    return h;
}

void update_z(SolverState& st, const SolverConfig& cfg, const ZSolver& zs) {
    st.Z = zs.solve(z_rhs(st, cfg), st.mu);
}

void update_z(SolverState& st, const SolverConfig& cfg) {
    update_z(st, cfg, ZSolver(st.X.shape(), cfg.weights));
}

void update_f(SolverState& st, const SolverConfig& cfg) {
    StackedGrad g = dw_forward(st.Z, cfg.weights);
    StackedGrad scaled = st.gamma3;
    scaled *= 1.0 / st.mu;
    g += scaled;
    st.F = soft_threshold(std::move(g), cfg.tau / st.mu);
}

void update_s(SolverState& st, const Cube& y, const SolverConfig& cfg) {
    Cube r = y;
    auto rv = r.data();
    auto x = st.X.data(), n = st.N.data(), g1 = st.gamma1.data();
    const double inv_mu = 1.0 / st.mu;
    const bool general = cfg.model == Model::General;
    for (std::size_t k = 0; k < rv.size(); ++k) {
        double v = rv[k] - x[k] + g1[k] * inv_mu;
        if (general) v -= n[k];
        rv[k] = v;
    }
    st.S = soft_threshold(std::move(r), cfg.lambda(y.shape()) / st.mu);
}

void update_n(SolverState& st, const Cube& y, const SolverConfig& cfg) {
    if (cfg.model != Model::General) {
        throw StateError("update_n is only defined for the general model");
    }
    const double mu = st.mu;
    const double denom = mu + 2.0 * cfg.beta_value();
    auto out = st.N.data();
    std::span<const double> yv = y.data(), x = st.X.data(), s = st.S.data(), g1 = st.gamma1.data();
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = (mu * (yv[k] - x[k] - s[k]) + g1[k]) / denom;
    }
}

void update_multipliers(SolverState& st, const Cube& y, const SolverConfig& cfg) {
    const double mu = st.mu;
    const bool general = cfg.model == Model::General;
    {
        auto g1 = st.gamma1.data(), g2 = st.gamma2.data();
        std::span<const double> yv = y.data(), x = st.X.data(), s = st.S.data(), n = st.N.data(), z = st.Z.data();
        for (std::size_t k = 0; k < g1.size(); ++k) {
            double r = yv[k] - x[k] - s[k];
            if (general) r -= n[k];
            g1[k] += mu * r;
            g2[k] += mu * (x[k] - z[k]);
        }
    }
    StackedGrad r3 = dw_forward(st.Z, cfg.weights);
    r3 -= st.F;
    r3 *= mu;
    st.gamma3 += r3;
    st.mu = std::min(cfg.rho * mu, cfg.mu_max);
}

RestoreReport restore(const Cube& y, const SolverConfig& cfg, const IterationObserver& observer) {
    if (y.size() == 0) throw ArgumentError("restore: empty cube");
    if (!y.all_finite()) throw DataError("restore: input cube contains non-finite values");
    cfg.validate(y.shape());

    RestoreReport rep;
    rep.ranks = cfg.resolved_ranks(y.shape());
    rep.lambda = cfg.lambda(y.shape());
    rep.beta = cfg.model == Model::General ? cfg.beta_value() : 0.0;

    const ZSolver zs(y.shape(), cfg.weights);
    SolverState st = SolverState::initial(y.shape(), cfg);
    const double y_sq = inner(y, y);
    const double y_norm = std::sqrt(y_sq);

    for (int it = 1; it <= cfg.max_iter; ++it) {
        Cube x_prev = st.X;
        update_x(st, y, cfg);
        update_z(st, cfg, zs);
        update_f(st, cfg);
        update_s(st, y, cfg);
        if (cfg.model == Model::General) update_n(st, y, cfg);
        update_multipliers(st, y, cfg);
        st.iter = it;

        x_prev -= st.X;
        const double change_sq = inner(x_prev, x_prev);
        const double rel = y_sq > 0.0 ? change_sq / y_sq : change_sq;
        rep.rel_change_history.push_back(rel);

        Cube resid = y - st.X;
        resid -= st.S;
        resid -= st.N;
        const double rn = frob_norm(resid);
        const double feas = y_norm > 0.0 ? rn / y_norm : rn;
        rep.residual_history.push_back(feas);

        if (observer) observer(st);
        if (rel <= cfg.eps && feas <= cfg.feas_tol) {
            rep.converged = true;
            break;
        }
    }

    rep.iterations = st.iter;
    rep.final_mu = st.mu;
    rep.restored = std::move(st.X);
    rep.sparse = std::move(st.S);
    rep.gaussian = std::move(st.N);
    return rep;
}

}  // namespace hsir
