#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "stablab/errors.hpp"
#include "stablab/quadrature.hpp"
#include "stablab/rng.hpp"
#include "stablab/stable_law.hpp"

using namespace stablab;

namespace {

StableLaw d1_law(double alpha, double w = 0.5) {
    std::vector<SpectralAtom> atoms(2);
    atoms[0].direction = {1.0, 0.0, 0.0};
    atoms[1].direction = {-1.0, 0.0, 0.0};
    atoms[0].weight = atoms[1].weight = w;
    return StableLaw(1, alpha, std::move(atoms));
}

double cf_sup_error(const StableLaw& law, double dt, std::size_t M, std::uint64_t seed,
                    const std::vector<Point>& panel) {
    std::vector<std::complex<double>> acc(panel.size(), {0.0, 0.0});
    RngStream rng(seed);
    for (std::size_t i = 0; i < M; ++i) {
        const Point x = law.sample_increment(dt, rng);
        for (std::size_t k = 0; k < panel.size(); ++k) {
            double ph = 0.0;
            for (int c = 0; c < law.dim(); ++c) ph += panel[k][c] * x[c];
            acc[k] += std::polar(1.0, ph);
        }
    }
    double sup = 0.0;
    for (std::size_t k = 0; k < panel.size(); ++k) {
        const auto emp = acc[k] / static_cast<double>(M);
        const double target = std::exp(-dt * law.levy_exponent(panel[k]));
        sup = std::max(sup, std::abs(emp - std::complex<double>(target, 0.0)));
    }
    return sup;
}

} // namespace

TEST_CASE("levy exponent basics") {
    const StableLaw law = d1_law(1.0);
    CHECK(law.levy_exponent(Point{0.0, 0.0, 0.0}) == 0.0);
    // psi(2) = K_1 * |2| = pi for the half-weight pair.
    CHECK(law.levy_exponent(Point{2.0, 0.0, 0.0}) == doctest::Approx(M_PI).epsilon(1e-10));

    RngStream rng(7);
    const StableLaw law2 = d1_law(1.5);
    for (int k = 0; k < 200; ++k) {
        const Point xi{rng.next_uniform(-5.0, 5.0), 0.0, 0.0};
        const Point neg{-xi[0], 0.0, 0.0};
        CHECK(law2.levy_exponent(xi) == doctest::Approx(law2.levy_exponent(neg)).epsilon(1e-13));
        const double c = rng.next_uniform(0.1, 3.0);
        const Point sc{c * xi[0], 0.0, 0.0};
        CHECK(law2.levy_exponent(sc) ==
              doctest::Approx(std::pow(c, 1.5) * law2.levy_exponent(xi)).epsilon(1e-12));
    }
}

TEST_CASE("nondegeneracy constant") {
    // Degenerate: both atoms on one axis in d = 2.
    std::vector<SpectralAtom> atoms(2);
    atoms[0].direction = {1.0, 0.0, 0.0};
    atoms[1].direction = {-1.0, 0.0, 0.0};
    atoms[0].weight = atoms[1].weight = 0.5;
    const StableLaw degenerate(2, 1.5, atoms);
    CHECK_THROWS_AS(degenerate.nondegeneracy_constant(64), DegenerateSpectralMeasure);

    CHECK(d1_law(1.0).nondegeneracy_constant(2) == doctest::Approx(M_PI / 2.0).epsilon(1e-12));

    // Octagon measure, alpha = 1.5: pin against a direct dense sphere scan.
    std::vector<SpectralAtom> oct(8);
    for (int k = 0; k < 8; ++k) {
        const double phi = 2.0 * M_PI * k / 8.0;
        oct[k].direction = {std::cos(phi), std::sin(phi), 0.0};
        oct[k].weight = 0.125;
    }
    const StableLaw law(2, 1.5, oct);
    double direct = 1e300;
    for (int k = 0; k < 20000; ++k) {
        const double phi = 2.0 * M_PI * k / 20000.0;
        direct = std::min(direct, law.levy_exponent(Point{std::cos(phi), std::sin(phi), 0.0}));
    }
    const double est = law.nondegeneracy_constant(4096);
    CHECK(est > 0.0);
    CHECK(est == doctest::Approx(direct).epsilon(1e-4));

    // (H^alpha) witness on random frequencies.
    RngStream rng(11);
    for (int k = 0; k < 1000; ++k) {
        const Point xi{rng.next_uniform(-8.0, 8.0), rng.next_uniform(-8.0, 8.0), 0.0};
        const double r = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1]);
        if (r < 1e-9) continue;
        CHECK(law.levy_exponent(xi) >= (est - 1e-12) * std::pow(r, 1.5) * (1.0 - 1e-10));
    }
}

TEST_CASE("auto-symmetrization") {
    std::vector<SpectralAtom> one(1);
    one[0].direction = {1.0, 0.0, 0.0};
    one[0].weight = 1.0;
    const StableLaw law(1, 1.5, one);
    CHECK(law.was_symmetrized());
    CHECK(law.atoms().size() == 2);
    CHECK(law.atoms()[0].weight == doctest::Approx(0.5));
    CHECK(law.total_weight() == doctest::Approx(1.0));

    CHECK_FALSE(d1_law(1.5).was_symmetrized());
}

TEST_CASE("serialization round trip") {
    const StableLaw law = StableLaw::axis_symmetric(2, 1.7, 2.0);
    const StableLaw back = StableLaw::from_text(law.to_text());
    RngStream rng(5);
    for (int k = 0; k < 50; ++k) {
        const Point xi{rng.next_uniform(-4.0, 4.0), rng.next_uniform(-4.0, 4.0), 0.0};
        CHECK(back.levy_exponent(xi) == doctest::Approx(law.levy_exponent(xi)).epsilon(1e-14));
    }
}

TEST_CASE("density: mass, symmetry, point oracle, coarse-grid error") {
    const StableLaw law = d1_law(1.5);
    const PeriodicGrid grid(1, 4096, 200.0);
    const GridField p = law.density(1.0, grid);

    double mass = 0.0;
    for (const auto& z : p.comp(0)) mass += z.real();
    mass *= grid.cell_volume();
    CHECK(std::abs(mass - 1.0) < 1e-10);

    const std::size_t n = grid.points_per_axis();
    double sym = 0.0;
    for (std::size_t m = 1; m < n; ++m)
        sym = std::max(sym, std::abs(p.comp(0)[m].real() - p.comp(0)[n - m].real()));
    CHECK(sym < 1e-12);

    // Quadrature oracle for the inversion integral at x = 0:
    // p_1(0) = (1/pi) int_0^inf e^{-psi(xi)} d xi.
    const double oracle = adaptive_simpson(
                              [&](double xi) {
                                  return std::exp(-law.levy_exponent(Point{xi, 0.0, 0.0}));
                              },
                              0.0, 60.0, 1e-12) /
                          M_PI;
    const double p0 = p.comp(0)[n / 2].real();
    CHECK(std::abs(p0 - oracle) < 1e-5); // wraparound-limited on this box

    CHECK_THROWS_AS(law.density(1e-6, PeriodicGrid(1, 64, 200.0)), GridTooCoarse);
}

TEST_CASE("density scaling identity is exact on matched grids") {
    const StableLaw law = d1_law(1.4);
    const double t = 0.37;
    const double scale = std::pow(t, -1.0 / 1.4);
    const PeriodicGrid g1(1, 512, 60.0);
    const PeriodicGrid g2(1, 512, 60.0 * scale);
    const GridField pt = law.density(t, g1);
    const GridField p1 = law.density(1.0, g2);
    double sup = 0.0;
    for (std::size_t i = 0; i < g1.size(); ++i)
        sup = std::max(sup, std::abs(pt.comp(0)[i].real() -
                                     std::pow(t, -1.0 / 1.4) * p1.comp(0)[i].real()));
    CHECK(sup < 1e-12);
}

TEST_CASE("sample_increment matches the characteristic function") {
    std::vector<Point> panel;
    for (int k = 1; k <= 20; ++k) panel.push_back(Point{0.15 * k, 0.0, 0.0});
    const std::size_t M = 20000;
    for (double alpha : {1.2, 1.8}) {
        const double err = cf_sup_error(d1_law(alpha), 1.0, M, 1234, panel);
        CHECK(err <= 4.0 / std::sqrt(static_cast<double>(M)));
    }
    // Cauchy case is allowed in the sampler.
    CHECK(cf_sup_error(d1_law(1.0), 0.7, M, 99, panel) <=
          4.0 / std::sqrt(static_cast<double>(M)));
}

TEST_CASE("sample_increment symmetry and moment behavior") {
    const StableLaw law = d1_law(1.9);
    RngStream rng(404);
    std::vector<double> xs(40000);
    for (auto& x : xs) x = law.sample_increment(1.0, rng)[0];
    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    CHECK(std::abs(median) < 0.06);

    // E|X|^0.5 is finite: stable across sample sizes and never dominated by
    // one draw. E|X|^1.9 is infinite (beta >= alpha): its empirical value
    // climbs with the sample size and leans on the extreme samples.
    auto emp_moment = [&](double p, std::size_t m) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc += std::pow(std::abs(xs[i]), p);
        return acc / static_cast<double>(m);
    };
    const double low_small = emp_moment(0.5, 2500);
    const double low_full = emp_moment(0.5, xs.size());
    CHECK(low_full / low_small > 0.95);
    CHECK(low_full / low_small < 1.05);
    const double heavy_small = emp_moment(1.9, 2500);
    const double heavy_full = emp_moment(1.9, xs.size());
    CHECK(heavy_full / heavy_small > 1.05);

    double max_abs = 0.0;
    for (double x : xs) max_abs = std::max(max_abs, std::abs(x));
    const double n = static_cast<double>(xs.size());
    const double low_share = std::pow(max_abs, 0.5) / (low_full * n);
    const double heavy_share = std::pow(max_abs, 1.9) / (heavy_full * n);
    CHECK(heavy_share > 10.0 * low_share); // extremes carry the divergent moment
}

TEST_CASE("sampler and Fourier-inverted density agree in distribution") {
    // Binned empirical CDF of sample_increment against the cumulative sums of
    // the density field.
    const StableLaw law = d1_law(1.5);
    const PeriodicGrid grid(1, 2048, 200.0);
    const GridField p = law.density(1.0, grid);
    std::vector<double> cdf(grid.size() + 1, 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i)
        cdf[i + 1] = cdf[i] + p.comp(0)[i].real() * grid.cell_volume();

    const std::size_t M = 40000;
    RngStream rng(606);
    std::vector<double> xs(M);
    for (auto& x : xs) x = law.sample_increment(1.0, rng)[0];
    std::sort(xs.begin(), xs.end());

    double sup = 0.0;
    for (std::size_t i = 0; i < grid.size(); i += 8) {
        const double edge = grid.coord(i);
        const std::size_t below = static_cast<std::size_t>(
            std::lower_bound(xs.begin(), xs.end(), edge) - xs.begin());
        sup = std::max(sup, std::abs(static_cast<double>(below) / M - cdf[i]));
    }
    CHECK(sup <= 5.0 / std::sqrt(static_cast<double>(M)));
}

TEST_CASE("truncated pair sampler matches its characteristic function") {
    const double alpha = 1.6, pw = 1.0, dt = 0.05, delta = 1.0;
    const double k = cosine_integral_constant_closed_form(alpha);
    const TruncatedPairSampler sampler(alpha, pw, k, dt, delta);
    RngStream rng(31337);
    const std::size_t M = 40000;
    for (double s : {0.7, 2.0, 5.0}) {
        std::complex<double> acc(0.0, 0.0);
        RngStream r2 = rng.split(static_cast<std::uint64_t>(s * 100));
        double mean = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            const double x = sampler.sample(r2);
            mean += x;
            acc += std::polar(1.0, s * x);
        }
        const double target =
            std::exp(-dt * pw * std::pow(delta, -alpha) * truncated_cosine_kernel(alpha, s * delta));
        CHECK(std::abs(acc / static_cast<double>(M) - std::complex<double>(target, 0.0)) <=
              4.0 / std::sqrt(static_cast<double>(M)));
        CHECK(std::abs(mean / static_cast<double>(M)) < 0.05);
    }
}

TEST_CASE("path sampler: jump rate, radial law, consistency") {
    const StableLaw law = d1_law(1.5); // total weight 1, rate 1/alpha per unit time
    const double T = 2.0;
    const JumpPathSampler sampler(law, T, 16);
    CHECK(sampler.large_jump_rate() == doctest::Approx(1.0 / 1.5).epsilon(1e-12));

    RngStream master(2024);
    std::size_t count = 0;
    std::vector<double> radii;
    const std::size_t paths = 3000;
    for (std::size_t i = 0; i < paths; ++i) {
        RngStream rng = master.split(i);
        const PathSample s = sampler.sample(rng);
        count += s.jumps.size();
        for (const auto& j : s.jumps) {
            const double r = std::abs(j.jump[0]);
            radii.push_back(r);
            CHECK(j.is_large == (r > 1.0));
            CHECK(j.time >= 0.0);
            CHECK(j.time < T);
        }
    }
    const double lam = T * sampler.large_jump_rate();
    const double mean = static_cast<double>(count) / paths;
    CHECK(std::abs(mean - lam) <= 3.0 * std::sqrt(lam / paths));

    // Radial CDF on (1, inf) is 1 - r^{-alpha}.
    std::sort(radii.begin(), radii.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double emp = static_cast<double>(i + 1) / radii.size();
        const double model = 1.0 - std::pow(radii[i], -1.5);
        ks = std::max(ks, std::abs(emp - model));
    }
    CHECK(ks <= 2.0 / std::sqrt(static_cast<double>(radii.size())));
}

TEST_CASE("path sampler: near-zero horizon leaves the jump list empty") {
    const StableLaw law = d1_law(1.5);
    const JumpPathSampler sampler(law, 1e-4, 1);
    RngStream master(5);
    std::size_t jumps = 0;
    for (std::size_t i = 0; i < 200; ++i) {
        RngStream rng = master.split(i);
        jumps += sampler.sample(rng).jumps.size();
    }
    CHECK(jumps <= 1);
}

TEST_CASE("concatenated path increments reproduce the one-shot law") {
    const StableLaw law = d1_law(1.7);
    const double T = 1.0;
    const JumpPathSampler sampler(law, T, 8);
    RngStream master(777);
    const std::size_t M = 20000;
    std::vector<Point> panel;
    for (int k = 1; k <= 15; ++k) panel.push_back(Point{0.2 * k, 0.0, 0.0});
    std::vector<std::complex<double>> acc(panel.size(), {0.0, 0.0});
    for (std::size_t i = 0; i < M; ++i) {
        RngStream rng = master.split(i);
        const PathSample s = sampler.sample(rng);
        double total = 0.0;
        for (const auto& inc : s.increments) total += inc[0];
        for (std::size_t k = 0; k < panel.size(); ++k) acc[k] += std::polar(1.0, panel[k][0] * total);
    }
    double sup = 0.0;
    for (std::size_t k = 0; k < panel.size(); ++k) {
        const double target = std::exp(-T * law.levy_exponent(panel[k]));
        sup = std::max(sup, std::abs(acc[k] / static_cast<double>(M) -
                                     std::complex<double>(target, 0.0)));
    }
    CHECK(sup <= 4.0 / std::sqrt(static_cast<double>(M)));
}

TEST_CASE("path sampler determinism across identical streams") {
    const StableLaw law = StableLaw::axis_symmetric(2, 1.6);
    const JumpPathSampler sampler(law, 1.0, 32);
    RngStream a = RngStream(99).split(3);
    RngStream b = RngStream(99).split(3);
    const PathSample sa = sampler.sample(a);
    const PathSample sb = sampler.sample(b);
    REQUIRE(sa.increments.size() == sb.increments.size());
    REQUIRE(sa.jumps.size() == sb.jumps.size());
    for (std::size_t j = 0; j < sa.increments.size(); ++j) {
        CHECK(sa.increments[j][0] == sb.increments[j][0]);
        CHECK(sa.increments[j][1] == sb.increments[j][1]);
    }
    for (std::size_t j = 0; j < sa.jumps.size(); ++j)
        CHECK(sa.jumps[j].time == sb.jumps[j].time);
}
