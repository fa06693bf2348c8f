#include "stablab/sde_lab.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stablab/errors.hpp"
#include "stablab/parallel.hpp"
#include "stablab/quadrature.hpp"

namespace stablab {

namespace {

// Quartic bump rho(u) = (15/16)(1-u^2)^2 on [-1,1]; P is its CDF.
double bump_cdf(double u) {
    if (u <= -1.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return 0.5 + (15.0 / 16.0) * (u - 2.0 * u * u * u / 3.0 + std::pow(u, 5) / 5.0);
}

} // namespace

DriftSpec DriftSpec::zero(int) {
    DriftSpec b;
    b.evaluator = [](double, const Point&) { return Point{0.0, 0.0, 0.0}; };
    b.kind = Kind::smooth;
    b.bound = 0.0;
    b.label = "zero";
    return b;
}

DriftSpec DriftSpec::smooth_fn(std::function<Point(double, const Point&)> fn, double bound,
                               std::string label) {
    DriftSpec b;
    b.evaluator = std::move(fn);
    b.kind = Kind::smooth;
    b.bound = bound;
    b.label = std::move(label);
    return b;
}

DriftSpec DriftSpec::indicator_composite_1d(double a, double bnd, double c_in, double c_out) {
    if (!(a < bnd)) throw std::invalid_argument("indicator_composite_1d: need a < b");
    DriftSpec b;
    b.kind = Kind::indicator_composite;
    b.bound = std::max(std::abs(c_in), std::abs(c_out));
    b.beta_tag = 0.4; // any beta with beta p < 1 works for the reporting tag
    b.p_tag = 2.0;
    b.label = "indicator[" + std::to_string(a) + "," + std::to_string(bnd) + "]";
    b.indicator_params = {a, bnd, c_in, c_out};
    b.evaluator = [a, bnd, c_in, c_out](double, const Point& x) {
        return Point{(x[0] >= a && x[0] < bnd) ? c_in : c_out, 0.0, 0.0};
    };
    return b;
}

DriftSpec DriftSpec::mollified(const DriftSpec& base, double eps, int dim) {
    if (!(eps > 0.0)) throw std::invalid_argument("mollified: eps must be positive");
    DriftSpec b;
    b.kind = Kind::mollified;
    b.bound = base.bound;
    b.beta_tag = base.beta_tag;
    b.p_tag = base.p_tag;
    b.label = base.label + "*rho_" + std::to_string(eps);

    if (dim == 1 && base.kind == Kind::indicator_composite) {
        // Exact convolution of the two-level composite through the bump CDF.
        const double a = base.indicator_params[0], bd = base.indicator_params[1];
        const double c_in = base.indicator_params[2], c_out = base.indicator_params[3];
        b.evaluator = [a, bd, c_in, c_out, eps](double, const Point& x) {
            const double level =
                c_out + (c_in - c_out) * (bump_cdf((x[0] - a) / eps) - bump_cdf((x[0] - bd) / eps));
            return Point{level, 0.0, 0.0};
        };
        return b;
    }
    const auto& [gx, gw] = gauss_legendre(24);
    auto base_eval = base.evaluator;
    if (dim == 1) {
        b.evaluator = [base_eval, eps, gx = gx, gw = gw](double t, const Point& x) {
            double acc = 0.0;
            for (std::size_t i = 0; i < gx.size(); ++i) {
                const double u = gx[i]; // integrate rho(u) b(x - eps u) du over [-1,1]
                const double rho = (15.0 / 16.0) * (1.0 - u * u) * (1.0 - u * u);
                acc += gw[i] * rho * base_eval(t, Point{x[0] - eps * u, 0.0, 0.0})[0];
            }
            return Point{acc, 0.0, 0.0};
        };
    } else {
        b.evaluator = [base_eval, eps, dim, gx = gx, gw = gw](double t, const Point& x) {
            // Tensor quadrature; adequate for the d = 2 smooth drifts used here.
            Point out{0.0, 0.0, 0.0};
            double wsum = 0.0;
            for (std::size_t i = 0; i < gx.size(); ++i)
                for (std::size_t j = 0; j < gx.size(); ++j) {
                    const double u1 = gx[i], u2 = gx[j];
                    const double r2 = u1 * u1 + u2 * u2;
                    if (r2 >= 1.0) continue;
                    const double rho = (1.0 - r2) * (1.0 - r2);
                    const double w = gw[i] * gw[j] * rho;
                    const Point arg{x[0] - eps * u1, x[1] - eps * u2, x[2]};
                    const Point val = base_eval(t, arg);
                    for (int c = 0; c < dim; ++c) out[c] += w * val[c];
                    wsum += w;
                }
            for (int c = 0; c < dim; ++c) out[c] /= wsum;
            return out;
        };
    }
    return b;
}

double PathRecord::bookkeeping_error() const {
    Point acc = states.front();
    double worst = 0.0;
    for (std::size_t j = 0; j + 1 < states.size(); ++j) {
        for (int c = 0; c < 3; ++c) acc[c] += drift_terms[j][c] + increments[j][c];
        for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(acc[c] - states[j + 1][c]));
    }
    return worst;
}

double PathRecord::max_excursion() const {
    double worst = 0.0;
    for (const auto& x : states)
        for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(x[c] - states.front()[c]));
    return worst;
}

PathRecord drive_path(const DriftSpec& b, const Point& x0, const PathSample& noise, double dt) {
    const std::size_t n = noise.increments.size();
    PathRecord rec;
    rec.times.resize(n + 1);
    rec.states.resize(n + 1);
    rec.drift_terms.resize(n);
    rec.increments = noise.increments;
    rec.jumps = noise.jumps;
    rec.states[0] = x0;
    rec.times[0] = 0.0;
    Point x = x0;
    for (std::size_t j = 0; j < n; ++j) {
        const double t = dt * static_cast<double>(j);
        const Point bv = b(t, x);
        Point drift{0.0, 0.0, 0.0};
        for (int c = 0; c < 3; ++c) drift[c] = bv[c] * dt;
        for (int c = 0; c < 3; ++c) x[c] += drift[c] + noise.increments[j][c];
        rec.drift_terms[j] = drift;
        rec.states[j + 1] = x;
        rec.times[j + 1] = dt * static_cast<double>(j + 1);
    }
    return rec;
}

PathRecord euler_path(const DriftSpec& b, const Point& x0, const JumpPathSampler& sampler,
                      RngStream& rng) {
    const PathSample noise = sampler.sample(rng);
    return drive_path(b, x0, noise, sampler.dt());
}

PathRecord euler_path(const DriftSpec& b, const Point& x0, const StableLaw& law, double T,
                      std::size_t n_steps, RngStream& rng) {
    return euler_path(b, x0, JumpPathSampler(law, T, n_steps), rng);
}

double default_small_jump_threshold(double dt, double alpha) {
    return std::pow(dt, 1.0 / alpha);
}

PathRecord transformed_path_from_sample(const ZvonkinTransform& tr, const Point& y0,
                                        const PathSample& noise, double dt,
                                        double record_threshold) {
    const int d = tr.law().dim();
    const std::size_t n = noise.increments.size();
    PathRecord rec;
    rec.times.resize(n + 1);
    rec.states.resize(n + 1);
    rec.drift_terms.resize(n);
    rec.increments.resize(n);
    rec.jumps = noise.jumps;
    rec.states[0] = y0;
    rec.times[0] = 0.0;

    // Bucket the recorded jumps per step once.
    std::vector<std::vector<const JumpRecord*>> per_step(n);
    for (const auto& jr : noise.jumps) {
        const std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(jr.time / dt), n - 1);
        per_step[j].push_back(&jr);
    }

    // The drift's jump integral reaches down to the recording threshold,
    // compensating the sub-unit jumps that are mapped individually below.
    const double r_lo = std::min(1.0, record_threshold);
    Point y = y0;
    for (std::size_t j = 0; j < n; ++j) {
        const double t = dt * static_cast<double>(j);
        const Point bt = tr.transformed_drift(t, y, r_lo);
        Point drift{0.0, 0.0, 0.0};
        for (int c = 0; c < d; ++c) drift[c] = bt[c] * dt;

        Point incr{0.0, 0.0, 0.0};
        Point jump_sum{0.0, 0.0, 0.0};
        for (const JumpRecord* jr : per_step[j]) {
            const Point g = tr.transformed_jump(t, y, jr->jump);
            for (int c = 0; c < d; ++c) {
                incr[c] += g[c];
                jump_sum[c] += jr->jump[c];
            }
        }
        // Sub-threshold remainder mapped through the Jacobian of Phi at the
        // pre-step state: g(y,z) ~ grad Phi(x*) z = (I + grad v)(x*) z.
        Point rem{0.0, 0.0, 0.0};
        for (int c = 0; c < d; ++c) rem[c] = noise.increments[j][c] - jump_sum[c];
        const Point xstar = tr.phi_inverse(t, y);
        const auto J = tr.v_jacobian_at(t, xstar);
        for (int r = 0; r < d; ++r) {
            double mapped = rem[r];
            for (int c = 0; c < d; ++c)
                mapped += J[static_cast<std::size_t>(r) * 3 + static_cast<std::size_t>(c)] * rem[c];
            incr[r] += mapped;
        }
        for (int c = 0; c < d; ++c) y[c] += drift[c] + incr[c];
        rec.drift_terms[j] = drift;
        rec.increments[j] = incr;
        rec.states[j + 1] = y;
        rec.times[j + 1] = dt * static_cast<double>(j + 1);
    }
    return rec;
}

PathRecord transformed_path(const ZvonkinTransform& tr, const Point& y0,
                            const JumpPathSampler& sampler, RngStream& rng) {
    const PathSample noise = sampler.sample(rng);
    return transformed_path_from_sample(tr, y0, noise, sampler.dt(), sampler.threshold());
}

// --- uniqueness experiment ---

nlohmann::json UniquenessReport::to_json() const {
    return {{"labels", labels},
            {"mean_sup_diff", mean_sup_diff},
            {"std_err", std_err},
            {"terminal_ks_distance", terminal_ks_distance},
            {"decreasing_within_2se", decreasing_within_2se},
            {"final_mean", final_mean},
            {"drift_bound", drift_bound},
            {"horizon", horizon},
            {"paths", paths}};
}

UniquenessReport coupled_uniqueness_experiment(const std::vector<DriftSpec>& b_levels,
                                               const Point& x0, const StableLaw& law, double T,
                                               std::size_t n_steps, std::size_t paths,
                                               std::uint64_t seed, unsigned n_threads) {
    if (b_levels.size() < 3)
        throw std::invalid_argument("coupled_uniqueness_experiment: need >= 3 levels");
    const std::size_t n_pairs = b_levels.size() - 1;
    const JumpPathSampler sampler(law, T, n_steps);
    const RngStream master(seed);

    std::vector<std::vector<double>> sup_diff(n_pairs, std::vector<double>(paths, 0.0));
    std::vector<std::vector<double>> terminal(b_levels.size(), std::vector<double>(paths, 0.0));

    parallel_for(
        paths,
        [&](std::size_t i) {
            RngStream rng = master.split(i);
            const PathSample noise = sampler.sample(rng);
            std::vector<PathRecord> recs;
            recs.reserve(b_levels.size());
            for (const auto& b : b_levels) recs.push_back(drive_path(b, x0, noise, sampler.dt()));
            for (std::size_t l = 0; l < n_pairs; ++l) {
                double sup = 0.0;
                for (std::size_t j = 0; j < recs[l].states.size(); ++j) {
                    double d2 = 0.0;
                    for (int c = 0; c < law.dim(); ++c) {
                        const double dd = recs[l].states[j][c] - recs[l + 1].states[j][c];
                        d2 += dd * dd;
                    }
                    sup = std::max(sup, std::sqrt(d2));
                }
                sup_diff[l][i] = sup;
            }
            for (std::size_t l = 0; l < b_levels.size(); ++l)
                terminal[l][i] = recs[l].states.back()[0];
        },
        n_threads);

    UniquenessReport rep;
    rep.paths = paths;
    rep.horizon = T;
    for (const auto& b : b_levels) rep.drift_bound = std::max(rep.drift_bound, b.bound);
    for (std::size_t l = 0; l < n_pairs; ++l) {
        double mean = 0.0;
        for (double v : sup_diff[l]) mean += v;
        mean /= static_cast<double>(paths);
        double var = 0.0;
        for (double v : sup_diff[l]) var += (v - mean) * (v - mean);
        var /= static_cast<double>(paths) * std::max<double>(1.0, static_cast<double>(paths - 1));
        rep.labels.push_back(b_levels[l].label + " vs " + b_levels[l + 1].label);
        rep.mean_sup_diff.push_back(mean);
        rep.std_err.push_back(std::sqrt(var));
    }
    // Kolmogorov-Smirnov distances of the terminal marginals between levels.
    for (std::size_t l = 0; l + 1 < b_levels.size(); ++l) {
        std::vector<double> a = terminal[l], b = terminal[l + 1];
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        double ks = 0.0;
        std::size_t ia = 0, ib = 0;
        while (ia < a.size() && ib < b.size()) {
            if (a[ia] <= b[ib]) ++ia;
            else ++ib;
            ks = std::max(ks, std::abs(static_cast<double>(ia) / a.size() -
                                       static_cast<double>(ib) / b.size()));
        }
        rep.terminal_ks_distance.push_back(ks);
    }
    rep.decreasing_within_2se = true;
    for (std::size_t l = 0; l + 1 < n_pairs; ++l) {
        const double slack =
            2.0 * std::sqrt(rep.std_err[l] * rep.std_err[l] + rep.std_err[l + 1] * rep.std_err[l + 1]);
        if (rep.mean_sup_diff[l + 1] > rep.mean_sup_diff[l] + slack)
            rep.decreasing_within_2se = false;
    }
    rep.final_mean = rep.mean_sup_diff.back();
    return rep;
}

// --- Krylov experiment ---

void KrylovExperiment::validate(const StableLaw& law) const {
    if (family.empty()) throw std::invalid_argument("KrylovExperiment: family must be nonempty");
    for (const auto& m : family)
        for (const auto& z : m.field.comp(0))
            if (z.real() < -1e-12)
                throw std::invalid_argument("KrylovExperiment: family members must be nonnegative");
    if (!validate_window) return;
    const double d = static_cast<double>(law.dim());
    const double alpha = law.alpha();
    if (theorem == "Lp66") {
        if (!(p > std::max(d / alpha, 1.0)))
            throw std::invalid_argument("KrylovExperiment: Lp66 window needs p > d/alpha v 1");
        if (!(q > p * alpha / (p * alpha - d)))
            throw std::invalid_argument("KrylovExperiment: Lp66 window needs q > p a/(p a - d)");
    } else if (theorem == "Lp666") {
        if (!(alpha > 1.0) || !(p > d / (alpha - 1.0)))
            throw std::invalid_argument("KrylovExperiment: Lp666 window needs p > d/(alpha-1)");
        if (!(q > p * alpha / (p * (alpha - 1.0) - d)))
            throw std::invalid_argument("KrylovExperiment: Lp666 window needs larger q");
    } else {
        throw std::invalid_argument("KrylovExperiment: unknown theorem tag " + theorem);
    }
}

nlohmann::json KrylovReport::to_json() const {
    return {{"labels", labels},       {"estimates", estimates}, {"std_err", std_err},
            {"norms", norms},         {"ratios", ratios},       {"max_ratio", max_ratio},
            {"min_ratio", min_ratio}, {"window_validated", window_validated}};
}

KrylovReport krylov_ratio(const KrylovExperiment& exp, const StableLaw& law,
                          unsigned n_threads) {
    exp.validate(law);
    const std::size_t n_members = exp.family.size();
    const JumpPathSampler sampler(law, exp.horizon, exp.n_steps);
    const RngStream master(exp.seed);
    const double h = sampler.dt();
    const auto& grid = exp.family.front().field.grid();

    std::vector<std::vector<double>> occ(n_members, std::vector<double>(exp.paths, 0.0));
    const Point x0{0.0, 0.0, 0.0};
    parallel_for(
        exp.paths,
        [&](std::size_t i) {
            RngStream rng = master.split(i);
            const PathRecord rec = euler_path(exp.control, x0, sampler, rng);
            for (std::size_t m = 0; m < n_members; ++m) {
                double acc = 0.0;
                for (std::size_t j = 0; j < exp.n_steps; ++j)
                    acc += exp.family[m].eval(grid.wrap(rec.states[j]));
                occ[m][i] = acc * h;
            }
        },
        n_threads);

    KrylovReport rep;
    rep.window_validated = exp.validate_window;
    for (std::size_t m = 0; m < n_members; ++m) {
        double mean = 0.0;
        for (double v : occ[m]) mean += v;
        mean /= static_cast<double>(exp.paths);
        double var = 0.0;
        for (double v : occ[m]) var += (v - mean) * (v - mean);
        var /= static_cast<double>(exp.paths) *
               std::max<double>(1.0, static_cast<double>(exp.paths - 1));
        const double norm =
            std::pow(exp.horizon, 1.0 / exp.q) * lp_norm(exp.family[m].field, exp.p);
        rep.labels.push_back(exp.family[m].label);
        rep.estimates.push_back(mean);
        rep.std_err.push_back(std::sqrt(var));
        rep.norms.push_back(norm);
        rep.ratios.push_back(norm > 0.0 ? mean / norm : 0.0);
    }
    rep.max_ratio = *std::max_element(rep.ratios.begin(), rep.ratios.end());
    rep.min_ratio = *std::min_element(rep.ratios.begin(), rep.ratios.end());
    return rep;
}

double occupation_time_oracle(const StableLaw& law, const GridField& f, const Point& x0,
                              double T, std::size_t n_steps) {
    const double h = T / static_cast<double>(n_steps);
    double acc = 0.0;
    // Snap x0 to the nearest grid point (experiments start paths there).
    const auto& grid = f.grid();
    std::size_t idx = 0;
    std::array<std::size_t, 3> stride{1, 1, 1};
    for (int a = grid.dim() - 1, s = 1; a >= 0; --a) {
        stride[a] = static_cast<std::size_t>(s);
        s *= static_cast<int>(grid.points_per_axis());
    }
    for (int a = 0; a < grid.dim(); ++a) {
        const double pos = (grid.wrap_coord(x0[a]) + 0.5 * grid.box_length()) / grid.cell();
        std::size_t m = static_cast<std::size_t>(std::llround(pos)) % grid.points_per_axis();
        idx += m * stride[a];
    }
    for (std::size_t j = 0; j < n_steps; ++j) {
        const double t = h * static_cast<double>(j);
        const GridField Tf = semigroup_apply(f, law, t);
        acc += Tf.comp(0)[idx].real();
    }
    return acc * h;
}

} // namespace stablab
