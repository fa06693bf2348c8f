#include "stablab/zvonkin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "stablab/errors.hpp"
#include "stablab/quadrature.hpp"

namespace stablab {

namespace {

double op_norm(const double* J, int d) {
    if (d == 1) return std::abs(J[0]);
    if (d == 2) {
        const double a = J[0], b = J[1], c = J[3], e = J[4];
        const double half_tr = 0.5 * (a * a + b * b + c * c + e * e);
        const double det = a * e - b * c;
        const double disc = std::max(0.0, half_tr * half_tr - det * det);
        return std::sqrt(half_tr + std::sqrt(disc));
    }
    double fro = 0.0;
    for (int i = 0; i < 9; ++i) fro += J[i] * J[i];
    return std::sqrt(fro);
}

} // namespace

double jacobian_sup_norm(const std::vector<std::vector<GridField>>& jac_frames) {
    double sup = 0.0;
    for (const auto& node : jac_frames) {
        if (node.empty()) continue;
        const int d = node.front().grid().dim();
        const std::size_t total = node.front().grid().size();
        double J[9];
        for (std::size_t i = 0; i < total; ++i) {
            for (int l = 0; l < d; ++l)
                for (int c = 0; c < d; ++c) J[l * 3 + c] = node[l].comp(c)[i].real();
            sup = std::max(sup, op_norm(J, d));
        }
    }
    return sup;
}

ZvonkinTransform::ZvonkinTransform(const StableLaw& law, SpaceTimeField v, double lambda_used,
                                   Interp interpolation, std::size_t radial_nodes,
                                   std::vector<std::pair<double, double>> lambda_trail)
    : law_(law), v_(std::move(v)), lambda_used_(lambda_used), interpolation_(interpolation),
      radial_nodes_(radial_nodes), lambda_trail_(std::move(lambda_trail)) {
    if (v_.components() != law.dim())
        throw std::invalid_argument("ZvonkinTransform: v must have dim components");
    const std::size_t n_nodes = v_.n_frames();
    const int d = law.dim();

    // Terminal condition: the last frame is identically zero.
    if (v_.frame(n_nodes - 1).max_abs() != 0.0)
        throw std::invalid_argument("ZvonkinTransform: terminal frame of v must be zero");

    jac_frames_.resize(n_nodes);
    for (std::size_t j = 0; j < n_nodes; ++j) {
        for (int l = 0; l < d; ++l) {
            GridField comp(v_.grid(), 1);
            comp.comp(0) = v_.frame(j).comp(l);
            jac_frames_[j].push_back(gradient(comp));
        }
        for (std::size_t i = 0; i < v_.grid().size(); ++i) {
            double s = 0.0;
            for (int l = 0; l < d; ++l) {
                const double re = v_.frame(j).comp(l)[i].real();
                s += re * re;
            }
            v_sup_ = std::max(v_sup_, std::sqrt(s));
        }
    }
    grad_sup_ = jacobian_sup_norm(jac_frames_);
    if (grad_sup_ > 0.5 + 1e-12)
        throw std::invalid_argument("ZvonkinTransform: measured sup|grad v| exceeds 1/2");

    // Tail certificate for the large-jump integral.
    const double alpha = law_.alpha();
    if (v_sup_ > 0.0) {
        const double cap = 2.0 * v_sup_ * law_.total_weight() / (alpha * 1e-10);
        r_max_ = std::max(2.0, std::pow(cap, 1.0 / alpha));
    } else {
        r_max_ = 2.0;
    }

    if (interpolation_ == Interp::spectral) {
        spectra_.resize(n_nodes);
        for (std::size_t j = 0; j < n_nodes; ++j)
            for (int l = 0; l < d; ++l) spectra_[j].push_back(to_spectrum(v_.frame(j), l));
    }
}

void ZvonkinTransform::frame_weights(double t, std::size_t& j0, std::size_t& j1,
                                     double& w1) const {
    const auto& tg = v_.timegrid();
    const double clamped = std::clamp(t, 0.0, tg.horizon());
    const double pos = clamped / tg.dt();
    j0 = std::min(static_cast<std::size_t>(pos), tg.n_steps());
    j1 = std::min(j0 + 1, tg.n_steps());
    w1 = pos - static_cast<double>(j0);
    if (j0 == tg.n_steps()) w1 = 0.0;
}

double ZvonkinTransform::eval_component(std::size_t node, int comp, const Point& x) const {
    if (interpolation_ == Interp::spectral)
        return trig_interpolate(spectra_[node][static_cast<std::size_t>(comp)], v_.grid(), x);
    return multilinear_interpolate(v_.frame(node), comp, x);
}

Point ZvonkinTransform::v_at(double t, const Point& x) const {
    std::size_t j0, j1;
    double w1;
    frame_weights(t, j0, j1, w1);
    Point out{0.0, 0.0, 0.0};
    for (int c = 0; c < law_.dim(); ++c) {
        const double a = eval_component(j0, c, x);
        const double b = w1 > 0.0 ? eval_component(j1, c, x) : a;
        out[c] = (1.0 - w1) * a + w1 * b;
    }
    return out;
}

std::array<double, 9> ZvonkinTransform::v_jacobian_at(double t, const Point& x) const {
    std::size_t j0, j1;
    double w1;
    frame_weights(t, j0, j1, w1);
    std::array<double, 9> J{};
    const int d = law_.dim();
    for (int l = 0; l < d; ++l)
        for (int c = 0; c < d; ++c) {
            const double a = multilinear_interpolate(jac_frames_[j0][l], c, x);
            const double b =
                w1 > 0.0 ? multilinear_interpolate(jac_frames_[j1][l], c, x) : a;
            J[static_cast<std::size_t>(l) * 3 + static_cast<std::size_t>(c)] =
                (1.0 - w1) * a + w1 * b;
        }
    return J;
}

Point ZvonkinTransform::phi(double t, const Point& x) const {
    const Point vv = v_at(t, x);
    Point out = x;
    for (int c = 0; c < law_.dim(); ++c) out[c] += vv[c];
    return out;
}

Point ZvonkinTransform::phi_inverse(double t, const Point& y) const {
    Point x = y;
    for (int iter = 0; iter < 100; ++iter) {
        const Point vv = v_at(t, x);
        double step = 0.0;
        for (int c = 0; c < law_.dim(); ++c) {
            const double next = y[c] - vv[c];
            step = std::max(step, std::abs(next - x[c]));
            x[c] = next;
        }
        if (step <= 1e-12) return x;
    }
    throw NoConvergence("phi_inverse: contraction failed; the grad_sup <= 1/2 invariant "
                        "appears violated");
}

Point ZvonkinTransform::transformed_drift(double t, const Point& y, double r_lo) const {
    if (!(r_lo > 0.0)) throw std::invalid_argument("transformed_drift: r_lo must be positive");
    const Point xstar = phi_inverse(t, y);
    const Point v0 = v_at(t, xstar);
    Point out{0.0, 0.0, 0.0};
    for (int c = 0; c < law_.dim(); ++c) out[c] = lambda_used_ * v0[c];
    if (v_sup_ == 0.0) return out;

    const auto& [gx, gw] = gauss_legendre(static_cast<int>(radial_nodes_));
    const double s_lo = 1.0 / r_max_, s_hi = 1.0 / r_lo;
    const double mid = 0.5 * (s_lo + s_hi), half = 0.5 * (s_hi - s_lo);
    const double alpha = law_.alpha();
    for (const auto& pr : law_.pairs()) {
        const double w_atom = 0.5 * pr.paired_weight;
        for (std::size_t q = 0; q < gx.size(); ++q) {
            const double s = mid + half * gx[q];
            const double r = 1.0 / s;
            const double weight = half * gw[q] * std::pow(s, alpha - 1.0) * w_atom;
            Point xp = xstar, xm = xstar;
            for (int c = 0; c < law_.dim(); ++c) {
                xp[c] += r * pr.direction[c];
                xm[c] -= r * pr.direction[c];
            }
            const Point vp = v_at(t, xp);
            const Point vm = v_at(t, xm);
            for (int c = 0; c < law_.dim(); ++c)
                out[c] -= weight * (vp[c] + vm[c] - 2.0 * v0[c]);
        }
    }
    return out;
}

Point ZvonkinTransform::transformed_jump(double t, const Point& y, const Point& z) const {
    Point x = phi_inverse(t, y);
    for (int c = 0; c < law_.dim(); ++c) x[c] += z[c];
    const Point im = phi(t, x);
    Point out{0.0, 0.0, 0.0};
    for (int c = 0; c < law_.dim(); ++c) out[c] = im[c] - y[c];
    return out;
}

double ZvonkinTransform::grad_sup_refined(int factor) const {
    const int d = law_.dim();
    double sup = 0.0;
    for (std::size_t j = 0; j < v_.n_frames(); ++j) {
        std::vector<std::vector<GridField>> node(1);
        for (int l = 0; l < d; ++l) {
            GridField comp(v_.grid(), 1);
            comp.comp(0) = v_.frame(j).comp(l);
            node[0].push_back(gradient(spectral_upsample(comp, factor)));
        }
        sup = std::max(sup, jacobian_sup_norm(node));
    }
    return sup;
}

ZvonkinTransform build_transform(const SpaceTimeField& b, const StableLaw& law, double T,
                                 const ZvonkinConfig& cfg) {
    if (std::abs(b.timegrid().horizon() - T) > 1e-12 * std::max(1.0, T))
        throw std::invalid_argument("build_transform: T must match the time grid of b");
    if (b.components() != law.dim())
        throw std::invalid_argument("build_transform: b must have dim components");

    const auto& tg = b.timegrid();
    const auto& grid = b.grid();
    const int d = law.dim();
    const std::size_t n = tg.n_steps();

    // Componentwise sources f = b^ell.
    std::vector<SpaceTimeField> sources;
    for (int l = 0; l < d; ++l) {
        SpaceTimeField f(tg, grid, 1);
        for (std::size_t j = 0; j <= n; ++j) f.frame(j).comp(0) = b.frame(j).comp(l);
        sources.push_back(std::move(f));
    }

    std::vector<std::pair<double, double>> trail;
    double lambda = std::max(1.0, cfg.solver.lambda);
    while (lambda <= cfg.lambda_cap) {
        SolverConfig sc = cfg.solver;
        sc.lambda = lambda;
        SpaceTimeField v(tg, grid, d);
        bool contracted = true;
        for (int l = 0; l < d && contracted; ++l) {
            try {
                const SolveResult res =
                    solve_linear_drift(b, sources[static_cast<std::size_t>(l)], law, sc);
                // Backward solution: v_t = u_{T-t}.
                for (std::size_t j = 0; j <= n; ++j)
                    v.frame(j).comp(l) = res.u.frame(n - j).comp(0);
            } catch (const NoContraction&) {
                // The resolvent shift is still too weak for this drift;
                // treat like an out-of-bounds gradient and double lambda.
                contracted = false;
            }
        }
        if (!contracted) {
            trail.emplace_back(lambda, std::numeric_limits<double>::infinity());
            lambda *= 2.0;
            continue;
        }
        std::vector<std::vector<GridField>> jac(n + 1);
        for (std::size_t j = 0; j <= n; ++j)
            for (int l = 0; l < d; ++l) {
                GridField comp(grid, 1);
                comp.comp(0) = v.frame(j).comp(l);
                jac[j].push_back(gradient(comp));
            }
        const double gs = jacobian_sup_norm(jac);
        trail.emplace_back(lambda, gs);
        if (gs <= 0.5)
            return ZvonkinTransform(law, std::move(v), lambda, cfg.interpolation,
                                    cfg.radial_nodes, std::move(trail));
        lambda *= 2.0;
    }
    throw LambdaCapExceeded(
        "build_transform: lambda search exceeded the cap; the drift is too rough or too "
        "large for this grid resolution - refine the grid, shorten the horizon, or mollify b");
}

} // namespace stablab
