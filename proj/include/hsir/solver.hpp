#pragma once

#include "hsir/cube.hpp"
#include "hsir/diff_ops.hpp"
#include "hsir/fft3d.hpp"
#include "hsir/tucker.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hsir {

enum class Model {
    General,      // tau*SSTV + lambda*|S|_1 + beta*|N|_F^2, Y = X + S + N
    Approximate,  // tau*SSTV + lambda*|S|_1, Y = X + S
};

const char* to_string(Model m);
Model model_from_string(const std::string& s);

// Spatial ranks at 80% of the spatial size, spectral rank 10 (capped by the
// band count).
Ranks auto_ranks(const Shape& shape);

struct SolverConfig {
    Model model = Model::Approximate;
    double tau = 1.0;
    double lambda_c = 10.0;        // lambda = 100 * lambda_c / sqrt(height * width)
    std::optional<double> beta;    // General model only; unset means 100
    TVWeights weights{};
    std::optional<Ranks> ranks;    // unset means auto_ranks
    double mu0 = 1e-2;
    double rho = 1.5;
    double mu_max = 1e6;
    double eps = 1e-6;
    // Convergence also needs ||Y - X - S - N|| / ||Y|| <= feas_tol; at small mu
    // X can stall long before the constraint is met.
    double feas_tol = 1e-3;
    int max_iter = 100;
    int hooi_sweeps = 1;

    static constexpr double kDefaultBeta = 100.0;

    // Throws ArgumentError describing the first violated constraint.
    void validate(const Shape& shape) const;

    Ranks resolved_ranks(const Shape& shape) const { return ranks ? *ranks : auto_ranks(shape); }
    double lambda(const Shape& shape) const;
    double beta_value() const { return beta.value_or(kDefaultBeta); }

    // beta as the reciprocal of a Gaussian noise variance estimate.
    static double beta_from_variance(double variance);
};

struct SolverState {
    Cube X, Z, S, N;
    StackedGrad F;
    Cube gamma1, gamma2;
    StackedGrad gamma3;
    TuckerFactors tucker;
    bool have_tucker = false;
    double mu = 0.0;
    int iter = 0;

    // Everything zero, mu = cfg.mu0.
    static SolverState initial(const Shape& shape, const SolverConfig& cfg);
};

struct RestoreReport {
    Cube restored;
    Cube sparse;
    Cube gaussian;  // zero for the approximate model
    int iterations = 0;
    std::vector<double> rel_change_history;  // ||X_k - X_{k+1}||^2 / ||Y||^2
    std::vector<double> residual_history;    // ||Y - X - S - N|| / ||Y||
    bool converged = false;
    Ranks ranks{};
    double lambda = 0.0;
    double beta = 0.0;
    double final_mu = 0.0;
};

// Prox of delta*|.|: shrink toward zero by delta.
double soft_threshold(double x, double delta);
Cube soft_threshold(Cube x, double delta);
StackedGrad soft_threshold(StackedGrad g, double delta);

// Cached FFT plans and D_w^* D_w eigenvalues for one shape and weight set.
class ZSolver {
  public:
    ZSolver(const Shape& shape, const TVWeights& weights);

    // Solves (mu I + mu D_w^* D_w) Z = rhs.
    Cube solve(const Cube& rhs, double mu) const;

    const Cube& spectrum() const { return tz_; }

  private:
    Fft3d fft_;
    Cube tz_;
};

// The Tucker-fit target 0.5 (Y - S - N + Z + (G1 - G2)/mu); N is left out
// under the approximate model.
Cube x_target(const SolverState& st, const Cube& y, const SolverConfig& cfg);
// Right-hand side mu X + mu D_w^*(F) + G2 - D_w^*(G3) of the Z system.
Cube z_rhs(const SolverState& st, const SolverConfig& cfg);

void update_x(SolverState& st, const Cube& y, const SolverConfig& cfg);
void update_z(SolverState& st, const SolverConfig& cfg, const ZSolver& zs);
void update_z(SolverState& st, const SolverConfig& cfg);
void update_f(SolverState& st, const SolverConfig& cfg);
void update_s(SolverState& st, const Cube& y, const SolverConfig& cfg);
// General model only; throws StateError otherwise.
void update_n(SolverState& st, const Cube& y, const SolverConfig& cfg);
// Dual ascent on G1, G2, G3, then mu <- min(rho mu, mu_max).
void update_multipliers(SolverState& st, const Cube& y, const SolverConfig& cfg);

// Called after every completed iteration.
using IterationObserver = std::function<void(const SolverState&)>;

RestoreReport restore(const Cube& y, const SolverConfig& cfg, const IterationObserver& observer = {});

}  // namespace hsir
