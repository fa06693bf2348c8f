#include <doctest.h>

#include <cmath>
#include <vector>

#include "stablab/quadrature.hpp"
#include "stablab/sde_lab.hpp"

using namespace stablab;

namespace {

StableLaw d1_law(double alpha) {
    std::vector<SpectralAtom> atoms(2);
    atoms[0].direction = {1.0, 0.0, 0.0};
    atoms[1].direction = {-1.0, 0.0, 0.0};
    atoms[0].weight = atoms[1].weight = 0.5;
    return StableLaw(1, alpha, std::move(atoms));
}

} // namespace

TEST_CASE("zero drift reproduces the summed increments bit for bit") {
    const StableLaw law = d1_law(1.7);
    const JumpPathSampler sampler(law, 1.0, 64);
    RngStream rng = RngStream(12).split(0);
    const PathRecord rec = euler_path(DriftSpec::zero(1), Point{0.4, 0.0, 0.0}, sampler, rng);
    double acc = 0.4;
    for (std::size_t j = 0; j < 64; ++j) {
        acc += rec.increments[j][0];
        CHECK(rec.states[j + 1][0] == acc);
    }
    CHECK(rec.bookkeeping_error() == 0.0);
}

TEST_CASE("constant drift adds c T exactly") {
    const StableLaw law = d1_law(1.5);
    const JumpPathSampler sampler(law, 2.0, 128);
    const DriftSpec c = DriftSpec::smooth_fn(
        [](double, const Point&) { return Point{0.7, 0.0, 0.0}; }, 0.7, "const");
    RngStream rng = RngStream(900).split(1);
    const PathRecord rec = euler_path(c, Point{0.0, 0.0, 0.0}, sampler, rng);
    double noise = 0.0;
    for (const auto& inc : rec.increments) noise += inc[0];
    CHECK(rec.states.back()[0] - noise == doctest::Approx(0.7 * 2.0).epsilon(1e-13));
    CHECK(rec.bookkeeping_error() < 1e-12);
}

TEST_CASE("determinism across runs and thread counts") {
    const StableLaw law = d1_law(1.8);
    const DriftSpec base = DriftSpec::indicator_composite_1d(0.0, 1.0, 1.0, -1.0);
    std::vector<DriftSpec> levels;
    for (double eps : {0.2, 0.1, 0.05}) levels.push_back(DriftSpec::mollified(base, eps, 1));
    const UniquenessReport a = coupled_uniqueness_experiment(
        levels, Point{0.5, 0.0, 0.0}, law, 0.5, 64, 200, 42, 1);
    const UniquenessReport b = coupled_uniqueness_experiment(
        levels, Point{0.5, 0.0, 0.0}, law, 0.5, 64, 200, 42, 4);
    REQUIRE(a.mean_sup_diff.size() == b.mean_sup_diff.size());
    for (std::size_t i = 0; i < a.mean_sup_diff.size(); ++i) {
        CHECK(a.mean_sup_diff[i] == b.mean_sup_diff[i]);
        CHECK(a.std_err[i] == b.std_err[i]);
    }
}

TEST_CASE("terminal marginals of mollification levels form a Cauchy sequence") {
    // Weak-existence signature: the laws of X_T converge as the indicator
    // drift is mollified less and less.
    const StableLaw law = d1_law(1.8);
    const DriftSpec base = DriftSpec::indicator_composite_1d(0.0, 1.0, 1.0, -1.0);
    std::vector<DriftSpec> levels;
    for (double eps : {0.2, 0.1, 0.05, 0.025})
        levels.push_back(DriftSpec::mollified(base, eps, 1));
    const std::size_t M = 2000;
    const UniquenessReport rep = coupled_uniqueness_experiment(
        levels, Point{0.5, 0.0, 0.0}, law, 1.0, 256, M, 2026, 0);
    for (double ks : rep.terminal_ks_distance)
        CHECK(ks <= 3.0 / std::sqrt(static_cast<double>(M)));
}

TEST_CASE("identical levels produce exactly zero differences") {
    const StableLaw law = d1_law(1.8);
    const DriftSpec b = DriftSpec::smooth_fn(
        [](double, const Point& x) { return Point{0.3 * std::sin(x[0]), 0.0, 0.0}; }, 0.3, "s");
    const UniquenessReport rep = coupled_uniqueness_experiment(
        {b, b, b}, Point{0.0, 0.0, 0.0}, law, 0.5, 32, 50, 7, 1);
    for (double v : rep.mean_sup_diff) CHECK(v == 0.0);
    CHECK(rep.decreasing_within_2se);
}

TEST_CASE("mollified indicator composite: exact convolution properties") {
    const DriftSpec base = DriftSpec::indicator_composite_1d(0.0, 1.0, 1.0, -1.0);
    const DriftSpec moll = DriftSpec::mollified(base, 0.25, 1);
    // Values far from the jump match the base; the layer is within [-1,1].
    CHECK(moll(0.0, Point{0.5, 0.0, 0.0})[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(moll(0.0, Point{-2.0, 0.0, 0.0})[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(moll(0.0, Point{0.0, 0.0, 0.0})[0] == doctest::Approx(0.0).epsilon(1e-12));
    for (double x = -0.5; x <= 1.5; x += 0.01) {
        const double v = moll(0.0, Point{x, 0.0, 0.0})[0];
        CHECK(v <= 1.0 + 1e-12);
        CHECK(v >= -1.0 - 1e-12);
    }
    // Against an independent numerical convolution with the same bump. The
    // integrand jumps where x - eps u crosses 0 or 1, so integrate the smooth
    // pieces separately (Gauss-Legendre is then exact on each polynomial).
    const double eps = 0.25;
    const auto& [gx, gw] = gauss_legendre(24);
    for (double x : {-0.2, 0.05, 0.31, 0.97, 1.13}) {
        std::vector<double> cuts{-1.0, 1.0};
        for (double jump : {x / eps, (x - 1.0) / eps})
            if (jump > -1.0 && jump < 1.0) cuts.push_back(jump);
        std::sort(cuts.begin(), cuts.end());
        double acc = 0.0;
        for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
            const double mid = 0.5 * (cuts[seg] + cuts[seg + 1]);
            const double half = 0.5 * (cuts[seg + 1] - cuts[seg]);
            for (std::size_t i = 0; i < gx.size(); ++i) {
                const double u = mid + half * gx[i];
                const double rho = (15.0 / 16.0) * (1.0 - u * u) * (1.0 - u * u);
                acc += half * gw[i] * rho * base(0.0, Point{x - eps * u, 0.0, 0.0})[0];
            }
        }
        CHECK(moll(0.0, Point{x, 0.0, 0.0})[0] == doctest::Approx(acc).epsilon(1e-10));
    }
}

TEST_CASE("smooth-drift mollification levels converge") {
    const StableLaw law = d1_law(1.8);
    const DriftSpec smooth = DriftSpec::smooth_fn(
        [](double, const Point& x) { return Point{0.5 * std::sin(x[0]), 0.0, 0.0}; }, 0.5,
        "sine");
    std::vector<DriftSpec> levels;
    for (double eps : {0.4, 0.2, 0.1}) levels.push_back(DriftSpec::mollified(smooth, eps, 1));
    levels.push_back(smooth);
    const UniquenessReport rep = coupled_uniqueness_experiment(
        levels, Point{0.0, 0.0, 0.0}, law, 1.0, 128, 400, 11, 0);
    // Smoothing error of an even bump is O(eps^2): successive differences
    // drop by roughly 4x; require at least 1.8x.
    for (std::size_t i = 0; i + 1 < rep.mean_sup_diff.size(); ++i)
        CHECK(rep.mean_sup_diff[i] / rep.mean_sup_diff[i + 1] > 1.8);
}

TEST_CASE("transformed path with the identity transform equals the plain path") {
    const StableLaw law = d1_law(1.8);
    const PeriodicGrid grid(1, 64, 16.0);
    const TimeGrid tg(1.0, 32);
    const SpaceTimeField zero_b(tg, grid, 1);
    ZvonkinConfig zc;
    zc.solver.picard_tol = 1e-10;
    zc.solver.norm_params.gamma = 1.2;
    zc.solver.norm_params.beta = 0.4;
    zc.solver.norm_params.p = 2.0;
    zc.solver.norm_params.q = 8.0;
    const ZvonkinTransform tr = build_transform(zero_b, law, 1.0, zc);

    const JumpPathSampler sampler(law, 1.0, 32, 0.25);
    RngStream r1 = RngStream(77).split(0);
    RngStream r2 = RngStream(77).split(0);
    const PathRecord x = euler_path(DriftSpec::zero(1), Point{0.2, 0.0, 0.0}, sampler, r1);
    const PathRecord y = transformed_path(tr, Point{0.2, 0.0, 0.0}, sampler, r2);
    REQUIRE(x.states.size() == y.states.size());
    for (std::size_t j = 0; j < x.states.size(); ++j)
        CHECK(x.states[j][0] == doctest::Approx(y.states[j][0]).epsilon(1e-14));
}

TEST_CASE("a lone recorded jump maps through g exactly") {
    const StableLaw law = d1_law(1.8);
    const PeriodicGrid grid(1, 64, 16.0);
    const TimeGrid tg(1.0, 4);
    SpaceTimeField v(tg, grid, 1);
    for (std::size_t j = 0; j < tg.n_steps(); ++j) {
        auto& w = v.frame(j).comp(0);
        for (std::size_t i = 0; i < grid.size(); ++i)
            w[i] = Complex(0.3 * std::sin(2.0 * M_PI * grid.point(i)[0] / 16.0), 0.0);
    }
    const ZvonkinTransform tr(law, std::move(v), 2.0, Interp::multilinear, 32);

    PathSample noise;
    noise.increments.assign(4, Point{0.0, 0.0, 0.0});
    JumpRecord jr;
    jr.time = 0.4;
    jr.jump = Point{1.7, 0.0, 0.0};
    jr.is_large = true;
    noise.increments[1] = jr.jump; // the step containing t = 0.4
    noise.jumps.push_back(jr);

    const Point y0{0.1, 0.0, 0.0};
    const PathRecord rec = transformed_path_from_sample(tr, y0, noise, 0.25);
    // Step 1 update: drift + g(t_1, y_1, z); remainder is exactly zero.
    const double t1 = 0.25;
    const Point y1 = rec.states[1];
    const Point expected_jump = tr.transformed_jump(t1, y1, jr.jump);
    const Point drift = tr.transformed_drift(t1, y1);
    CHECK(rec.states[2][0] ==
          doctest::Approx(y1[0] + 0.25 * drift[0] + expected_jump[0]).epsilon(1e-12));
}

TEST_CASE("krylov experiment: guards and window validation") {
    const StableLaw law = d1_law(1.8);
    const PeriodicGrid grid(1, 1024, 40.0);

    KrylovFamilyMember zero{[](const Point&) { return 0.0; },
                            GridField::zeros(grid, 1), "zero"};
    KrylovExperiment exp;
    exp.control = DriftSpec::zero(1);
    exp.family = {zero};
    exp.p = 2.0;
    exp.q = 8.0;
    exp.horizon = 0.5;
    exp.n_steps = 32;
    exp.paths = 50;
    exp.seed = 5;
    const KrylovReport rep = krylov_ratio(exp, law, 1);
    CHECK(rep.ratios[0] == 0.0); // 0/0 guarded as exact zero numerator

    KrylovExperiment bad = exp;
    bad.q = 1.2; // below p alpha / (p alpha - d) = 1.3846
    CHECK_THROWS_AS(krylov_ratio(bad, law, 1), std::invalid_argument);
    bad.validate_window = false;
    CHECK_NOTHROW(krylov_ratio(bad, law, 1));
}

TEST_CASE("occupation oracle equals horizon for f = 1") {
    const StableLaw law = d1_law(1.5);
    const PeriodicGrid grid(1, 256, 40.0);
    const GridField one = GridField::from_function(grid, [](const Point&) { return 1.0; });
    CHECK(occupation_time_oracle(law, one, Point{0.0, 0.0, 0.0}, 1.0, 64) ==
          doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("small-jump threshold default") {
    CHECK(default_small_jump_threshold(1.0 / 256, 1.8) ==
          doctest::Approx(std::pow(1.0 / 256, 1.0 / 1.8)));
}
