#pragma once

#include <optional>
#include <vector>

#include "stablab/grid_calculus.hpp"
#include "stablab/reports.hpp"
#include "stablab/space_time.hpp"
#include "stablab/stable_law.hpp"

namespace stablab {

struct SolverConfig {
    double kappa = 0.0;           // gradient-nonlinearity strength
    double lambda = 0.0;          // resolvent shift of the drift equation
    double picard_tol = 1e-10;
    std::size_t max_picard = 60;
    std::size_t quad_substeps = 4; // Duhamel sub-nodes per time step
    NormParams norm_params;

    void validate() const;
};

struct SolveResult {
    SpaceTimeField u;
    ConvergenceReport report;
};

// Fixed point of u_t = int_0^t T_{t-s} (kappa |grad u_s| + f_s) ds by Picard
// iteration. The semigroup weight of every Duhamel sub-interval is applied
// exactly as a multiplier; only the integrand data are interpolated in time
// (f piecewise constant from the left, grad u linear between frames).
// Throws NoContraction when max_picard is exceeded.
SolveResult solve_semilinear(const SpaceTimeField& f, const StableLaw& law,
                             const SolverConfig& cfg);

// Resolvent-weighted Picard iteration for
//   u_t = int_0^t e^{-lambda (t-s)} T_{t-s} (b_s . grad u_s + f_s) ds.
// b is a dim-component field; its sup norm is recorded in the report.
SolveResult solve_linear_drift(const SpaceTimeField& b, const SpaceTimeField& f,
                               const StableLaw& law, const SolverConfig& cfg);

enum class PideMode { semilinear, linear_drift };

// Self-consistency certificate: max over nodes of the grid L^2 distance
// between u_t and the Duhamel right-hand side recomputed at twice the
// configured substep count.
double residual(const SpaceTimeField& u, const SpaceTimeField& f, const StableLaw& law,
                const SolverConfig& cfg, PideMode mode,
                const SpaceTimeField* b = nullptr);

// Small-time growth fit of ||u_t||_{gamma,p} / ||f||_{L^q([0,t];L^p)} over the
// first decade of nodes. The report carries the exponent 1 - gamma/alpha - 1/q
// for comparison. Throws InsufficientNodes when fewer than 8 nodes fit.
FitReport check_small_time_bound(const SpaceTimeField& u, const SpaceTimeField& f,
                                 const StableLaw& law, const SolverConfig& cfg);

double small_time_exponent(double gamma, double alpha, double q);

struct LambdaDecayReport {
    std::vector<double> lambdas;
    std::vector<double> sup_norms; // sup_t ||u^lambda_t||_{gamma+beta,p}
    LinearFit fit;                 // log sup vs log lambda
    bool slope_negative = false;

    nlohmann::json to_json() const {
        return {{"lambdas", lambdas},
                {"sup_norms", sup_norms},
                {"slope", fit.slope},
                {"slope_stderr", fit.slope_stderr},
                {"slope_negative", slope_negative}};
    }
};

// Solves the drift equation per lambda and fits the decay of the solution
// size in lambda. Requires >= 4 increasing lambdas >= 1 spanning two decades.
LambdaDecayReport check_lambda_decay(const SpaceTimeField& b, const SpaceTimeField& f,
                                     const StableLaw& law, const SolverConfig& cfg,
                                     const std::vector<double>& lambdas);

// Discrete L^q([0,t_j]; L^p) norm of a data field (piecewise constant left).
double space_time_lq_lp_norm(const SpaceTimeField& f, double p, double q, std::size_t up_to_node);

} // namespace stablab
