#include "stablab/pide_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stablab/errors.hpp"
#include "stablab/fft.hpp"

namespace stablab {

void SolverConfig::validate() const {
    norm_params.validate();
    if (kappa < 0.0) throw std::invalid_argument("SolverConfig: kappa must be >= 0");
    if (lambda < 0.0) throw std::invalid_argument("SolverConfig: lambda must be >= 0");
    if (!(picard_tol > 0.0)) throw std::invalid_argument("SolverConfig: picard_tol must be > 0");
    if (max_picard < 1) throw std::invalid_argument("SolverConfig: max_picard must be >= 1");
    if (quad_substeps < 1) throw std::invalid_argument("SolverConfig: quad_substeps must be >= 1");
}

double small_time_exponent(double gamma, double alpha, double q) {
    return 1.0 - gamma / alpha - 1.0 / q;
}

double space_time_lq_lp_norm(const SpaceTimeField& f, double p, double q,
                             std::size_t up_to_node) {
    const double h = f.timegrid().dt();
    double acc = 0.0;
    for (std::size_t i = 0; i < up_to_node && i < f.timegrid().n_steps(); ++i)
        acc += std::pow(lp_norm(f.frame(i), p), q) * h;
    return std::pow(acc, 1.0 / q);
}

namespace {

struct MultiplierTables {
    std::vector<double> shifted;              // psi + lambda on the lattice
    std::vector<double> step;                 // e^{-h (psi+lambda)}
    std::vector<std::vector<double>> weights; // one exact Duhamel weight per substep
};

MultiplierTables build_tables(const PeriodicGrid& grid, const StableLaw& law, double lambda,
                              double h, std::size_t m) {
    MultiplierTables t;
    const std::size_t total = grid.size();
    t.shifted.resize(total);
    t.step.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        t.shifted[i] = law.levy_exponent(grid.freq(i)) + lambda;
        t.step[i] = std::exp(-h * t.shifted[i]);
    }
    t.weights.assign(m, std::vector<double>(total));
    const double sub = h / static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double tau1 = h - static_cast<double>(i) * sub;
        const double tau0 = tau1 - sub;
        for (std::size_t k = 0; k < total; ++k) {
            const double a = t.shifted[k];
            t.weights[i][k] = a * sub < 1e-14
                                  ? std::exp(-a * tau0) * sub
                                  : (std::exp(-a * tau0) - std::exp(-a * tau1)) / a;
        }
    }
    return t;
}

void spectral_forward(std::vector<Complex>& buf, const PeriodicGrid& grid) {
    fft::forward_nd(buf, grid.dim(), grid.points_per_axis());
    const double scale = 1.0 / static_cast<double>(grid.size());
    for (auto& z : buf) z *= scale;
}

GridField spectral_to_field(std::vector<Complex> spec, const PeriodicGrid& grid) {
    return from_spectrum(grid, std::move(spec));
}

// Integrand g at a substep: f (left data frame of the step) plus either
// kappa |grad u| or b . grad u, with grad u linear in time between frames.
std::vector<Complex> integrand(const SpaceTimeField& f, const SpaceTimeField* b,
                               const std::vector<GridField>& grads, std::size_t step_index,
                               double theta, double kappa, bool semilinear) {
    const auto& grid = f.grid();
    const std::size_t total = grid.size();
    const int d = grid.dim();
    const auto& g0 = grads[step_index];
    const auto& g1 = grads[step_index + 1];
    std::vector<Complex> out(total);
    const auto& fv = f.frame(step_index).comp(0);
    if (semilinear) {
        for (std::size_t i = 0; i < total; ++i) {
            double s = 0.0;
            for (int a = 0; a < d; ++a) {
                const double ga =
                    (1.0 - theta) * g0.comp(a)[i].real() + theta * g1.comp(a)[i].real();
                s += ga * ga;
            }
            out[i] = Complex(fv[i].real() + kappa * std::sqrt(s), 0.0);
        }
    } else {
        const auto& bf = b->frame(step_index);
        for (std::size_t i = 0; i < total; ++i) {
            double s = 0.0;
            for (int a = 0; a < d; ++a) {
                const double ga =
                    (1.0 - theta) * g0.comp(a)[i].real() + theta * g1.comp(a)[i].real();
                s += bf.comp(a)[i].real() * ga;
            }
            out[i] = Complex(fv[i].real() + s, 0.0);
        }
    }
    return out;
}

struct PicardProblem {
    const SpaceTimeField* b = nullptr; // null for the semilinear equation
    bool semilinear = true;
};

SolveResult picard_solve(const PicardProblem& prob, const SpaceTimeField& f, const StableLaw& law,
                         const SolverConfig& cfg, double diff_beta) {
    cfg.validate();
    const double alpha = law.alpha();
    if (!(alpha > 1.0 && alpha < 2.0))
        throw std::invalid_argument("pide solver: requires alpha in (1,2)");
    const auto& np = cfg.norm_params;
    if (prob.semilinear) {
        if (!(np.gamma > 1.0 && np.gamma < alpha))
            throw std::invalid_argument("solve_semilinear: gamma must lie in (1, alpha)");
        if (!(np.q > alpha / (alpha - np.gamma)))
            throw std::invalid_argument("solve_semilinear: q must exceed alpha/(alpha-gamma)");
    } else {
        if (!((np.gamma + np.beta - 1.0) * np.p > static_cast<double>(f.grid().dim())))
            throw std::invalid_argument("solve_linear_drift: need (gamma+beta-1) p > dim");
    }
    for (std::size_t j = 0; j < f.n_frames(); ++j)
        if (!std::isfinite(f.frame(j).max_abs()))
            throw std::invalid_argument("pide solver: f contains non-finite values");

    const auto& grid = f.grid();
    const auto& tg = f.timegrid();
    const std::size_t n = tg.n_steps();
    const std::size_t m = cfg.quad_substeps;
    const double lambda = prob.semilinear ? 0.0 : cfg.lambda;
    const auto tables = build_tables(grid, law, lambda, tg.dt(), m);
    const std::size_t total = grid.size();

    SpaceTimeField u(tg, grid, 1);
    std::vector<GridField> grads;
    grads.reserve(n + 1);
    for (std::size_t j = 0; j <= n; ++j) grads.emplace_back(grid, grid.dim());

    ConvergenceReport report;
    report.lambda_used = lambda;
    for (std::size_t iter = 1; iter <= cfg.max_picard; ++iter) {
        SpaceTimeField u_new(tg, grid, 1);
        std::vector<Complex> uhat(total, Complex(0.0, 0.0));
        std::vector<Complex> ghat;
        for (std::size_t j = 1; j <= n; ++j) {
            for (std::size_t k = 0; k < total; ++k) uhat[k] *= tables.step[k];
            for (std::size_t i = 0; i < m; ++i) {
                const double theta = static_cast<double>(i) / static_cast<double>(m);
                ghat = integrand(f, prob.b, grads, j - 1, theta, cfg.kappa, prob.semilinear);
                spectral_forward(ghat, grid);
                for (std::size_t k = 0; k < total; ++k) uhat[k] += tables.weights[i][k] * ghat[k];
            }
            u_new.frame(j) = spectral_to_field(uhat, grid);
        }

        double diff = 0.0;
        for (std::size_t j = 0; j <= n; ++j)
            diff = std::max(diff, bessel_norm(u_new.frame(j) - u.frame(j), diff_beta, np.p));
        if (!report.iteration_diffs.empty() && report.iteration_diffs.back() > 0.0)
            report.contraction_ratios.push_back(diff / report.iteration_diffs.back());
        report.iteration_diffs.push_back(diff);
        u = std::move(u_new);
        report.iterations = iter;
        report.final_diff = diff;
        if (diff <= cfg.picard_tol) {
            report.converged = true;
            break;
        }
        for (std::size_t j = 0; j <= n; ++j) grads[j] = gradient(u.frame(j));
    }
    if (!report.converged)
        throw NoContraction(
            "Picard iteration did not contract within max_picard sweeps; the horizon is "
            "likely too long for the contraction constant - shrink T and re-solve");
    return SolveResult{std::move(u), std::move(report)};
}

} // namespace

SolveResult solve_semilinear(const SpaceTimeField& f, const StableLaw& law,
                             const SolverConfig& cfg) {
    PicardProblem prob;
    prob.semilinear = true;
    return picard_solve(prob, f, law, cfg, cfg.norm_params.gamma);
}

SolveResult solve_linear_drift(const SpaceTimeField& b, const SpaceTimeField& f,
                               const StableLaw& law, const SolverConfig& cfg) {
    if (b.components() != f.grid().dim())
        throw std::invalid_argument("solve_linear_drift: b must have dim components");
    if (!(b.timegrid() == f.timegrid()))
        throw std::invalid_argument("solve_linear_drift: time grids must match");
    PicardProblem prob;
    prob.b = &b;
    prob.semilinear = false;
    return picard_solve(prob, f, law, cfg, cfg.norm_params.gamma + cfg.norm_params.beta);
}

double residual(const SpaceTimeField& u, const SpaceTimeField& f, const StableLaw& law,
                const SolverConfig& cfg, PideMode mode, const SpaceTimeField* b) {
    const auto& grid = u.grid();
    const auto& tg = u.timegrid();
    const bool semilinear = mode == PideMode::semilinear;
    if (!semilinear && b == nullptr)
        throw std::invalid_argument("residual: linear_drift mode requires b");
    const std::size_t n = tg.n_steps();
    const std::size_t m = 2 * cfg.quad_substeps;
    const double lambda = semilinear ? 0.0 : cfg.lambda;
    const auto tables = build_tables(grid, law, lambda, tg.dt(), m);
    const std::size_t total = grid.size();

    std::vector<GridField> grads;
    grads.reserve(n + 1);
    for (std::size_t j = 0; j <= n; ++j) grads.push_back(gradient(u.frame(j)));

    double worst = 0.0;
    std::vector<Complex> rhat(total, Complex(0.0, 0.0));
    std::vector<Complex> ghat;
    for (std::size_t j = 1; j <= n; ++j) {
        for (std::size_t k = 0; k < total; ++k) rhat[k] *= tables.step[k];
        for (std::size_t i = 0; i < m; ++i) {
            const double theta = static_cast<double>(i) / static_cast<double>(m);
            ghat = integrand(f, b, grads, j - 1, theta, cfg.kappa, semilinear);
            spectral_forward(ghat, grid);
            for (std::size_t k = 0; k < total; ++k) rhat[k] += tables.weights[i][k] * ghat[k];
        }
        GridField rhs = spectral_to_field(rhat, grid);
        worst = std::max(worst, lp_norm(u.frame(j) - rhs, 2.0));
    }
    return worst;
}

FitReport check_small_time_bound(const SpaceTimeField& u, const SpaceTimeField& f,
                                 const StableLaw& law, const SolverConfig& cfg) {
    const auto& tg = u.timegrid();
    const auto& np = cfg.norm_params;
    const double t1 = tg.node(1);
    std::vector<double> ts, ratios;
    for (std::size_t j = 1; j <= tg.n_steps(); ++j) {
        const double t = tg.node(j);
        if (t > 10.0 * t1 + 1e-12) break;
        const double num = bessel_norm(u.frame(j), np.gamma, np.p);
        const double den = space_time_lq_lp_norm(f, np.p, np.q, j);
        if (num > 0.0 && den > 0.0) {
            ts.push_back(t);
            ratios.push_back(num / den);
        }
    }
    if (ts.size() < 8)
        throw InsufficientNodes("check_small_time_bound: fewer than 8 usable nodes in the "
                                "first decade");
    const LinearFit fit = fit_loglog(ts, ratios);
    FitReport rep;
    rep.slope = fit.slope;
    rep.slope_stderr = fit.slope_stderr;
    rep.theoretical_exponent = small_time_exponent(np.gamma, law.alpha(), np.q);
    rep.n_points = fit.n_points;
    rep.abscissae = ts;
    rep.values = ratios;
    return rep;
}

LambdaDecayReport check_lambda_decay(const SpaceTimeField& b, const SpaceTimeField& f,
                                     const StableLaw& law, const SolverConfig& cfg,
                                     const std::vector<double>& lambdas) {
    if (lambdas.size() < 4)
        throw std::invalid_argument("check_lambda_decay: need at least 4 lambdas");
    for (std::size_t i = 0; i + 1 < lambdas.size(); ++i)
        if (!(lambdas[i] < lambdas[i + 1]))
            throw std::invalid_argument("check_lambda_decay: lambdas must increase");
    if (!(lambdas.front() >= 1.0))
        throw std::invalid_argument("check_lambda_decay: lambdas must be >= 1");
    if (!(lambdas.back() / lambdas.front() >= 100.0))
        throw std::invalid_argument("check_lambda_decay: lambdas must span two decades");

    LambdaDecayReport rep;
    for (double lam : lambdas) {
        SolverConfig c = cfg;
        c.lambda = lam;
        const SolveResult res = solve_linear_drift(b, f, law, c);
        double sup = 0.0;
        for (std::size_t j = 0; j < res.u.n_frames(); ++j)
            sup = std::max(sup, bessel_norm(res.u.frame(j),
                                            cfg.norm_params.gamma + cfg.norm_params.beta,
                                            cfg.norm_params.p));
        rep.lambdas.push_back(lam);
        rep.sup_norms.push_back(sup);
    }
    rep.fit = fit_loglog(rep.lambdas, rep.sup_norms);
    rep.slope_negative = rep.fit.slope < 0.0;
    return rep;
}

} // namespace stablab
