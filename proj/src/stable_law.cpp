#include "stablab/stable_law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "stablab/errors.hpp"
#include "stablab/fft.hpp"
#include "stablab/quadrature.hpp"

namespace stablab {

namespace {

double dot(const Point& a, const Point& b, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += a[i] * b[i];
    return s;
}

double norm(const Point& a, int dim) { return std::sqrt(dot(a, a, dim)); }

bool same_direction(const Point& a, const Point& b, int dim) {
    double d2 = 0.0;
    for (int i = 0; i < dim; ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
    return d2 < 1e-18;
}

Point negate(const Point& a) { return Point{-a[0], -a[1], -a[2]}; }

// Standard symmetric alpha-stable variate with E e^{isX} = e^{-|s|^alpha}.
double cms_standard(double alpha, RngStream& rng) {
    const double u = M_PI * (rng.next_uniform() - 0.5);
    const double w = rng.next_exponential();
    if (alpha == 1.0) return std::tan(u);
    const double au = alpha * u;
    return std::sin(au) / std::pow(std::cos(u), 1.0 / alpha) *
           std::pow(std::cos(u - au) / w, (1.0 - alpha) / alpha);
}

} // namespace

StableLaw::StableLaw(int dim, double alpha, std::vector<SpectralAtom> atoms)
    : dim_(dim), alpha_(alpha) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("StableLaw: dim must be 1, 2 or 3");
    if (!(alpha > 0.0 && alpha < 2.0))
        throw std::invalid_argument("StableLaw: alpha must lie in (0,2)");
    if (atoms.empty()) throw std::invalid_argument("StableLaw: spectral measure has no atoms");

    for (auto& a : atoms) {
        for (int i = dim; i < 3; ++i)
            if (a.direction[i] != 0.0)
                throw std::invalid_argument("StableLaw: direction has components beyond dim");
        if (std::abs(norm(a.direction, dim) - 1.0) > 1e-12)
            throw std::invalid_argument("StableLaw: directions must be unit vectors");
        if (!(a.weight > 0.0)) throw std::invalid_argument("StableLaw: weights must be positive");
    }

    // Symmetrize: half of every weight goes to the antipode, then merge
    // coincident directions. A symmetric input reproduces itself exactly.
    std::vector<SpectralAtom> sym;
    for (const auto& a : atoms) {
        auto deposit = [&](const Point& th, double w) {
            for (auto& s : sym) {
                if (same_direction(s.direction, th, dim)) {
                    s.weight += w;
                    return;
                }
            }
            sym.push_back(SpectralAtom{th, w});
        };
        deposit(a.direction, 0.5 * a.weight);
        deposit(negate(a.direction), 0.5 * a.weight);
    }
    // Detect whether the input already was its own symmetrization.
    symmetrized_ = sym.size() != atoms.size();
    if (!symmetrized_) {
        for (const auto& s : sym) {
            bool found = false;
            for (const auto& a : atoms)
                if (same_direction(s.direction, a.direction, dim) &&
                    std::abs(s.weight - a.weight) <= 1e-14 * (s.weight + a.weight)) {
                    found = true;
                    break;
                }
            if (!found) {
                symmetrized_ = true;
                break;
            }
        }
    }
    atoms_ = std::move(sym);
    for (const auto& a : atoms_) total_weight_ += a.weight;

    // Antipodal pairs; every atom must have its mirror with equal weight.
    std::vector<bool> used(atoms_.size(), false);
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (used[i]) continue;
        const Point anti = negate(atoms_[i].direction);
        std::size_t j = atoms_.size();
        for (std::size_t k = i + 1; k < atoms_.size(); ++k)
            if (!used[k] && same_direction(atoms_[k].direction, anti, dim)) {
                j = k;
                break;
            }
        if (j == atoms_.size())
            throw std::logic_error("StableLaw: symmetrization failed to produce antipodal pairs");
        used[i] = used[j] = true;
        pairs_.push_back(AtomPair{atoms_[i].direction, atoms_[i].weight + atoms_[j].weight});
    }

    k_alpha_ = cosine_integral_constant(alpha_);
    const double closed = cosine_integral_constant_closed_form(alpha_);
    if (std::abs(k_alpha_ - closed) > 1e-10 * std::abs(closed))
        throw std::logic_error("StableLaw: quadrature and closed-form K_alpha disagree");
}

double StableLaw::levy_exponent(const Point& xi) const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight * std::pow(std::abs(dot(xi, a.direction, dim_)), alpha_);
    return k_alpha_ * s;
}

double StableLaw::nondegeneracy_constant(std::size_t sphere_samples, double eps) const {
    if (sphere_samples < 2 * static_cast<std::size_t>(dim_))
        throw std::invalid_argument("nondegeneracy_constant: need at least 2*dim samples");
    double mn = std::numeric_limits<double>::infinity();
    auto probe = [&](const Point& th) { mn = std::min(mn, levy_exponent(th)); };
    if (dim_ == 1) {
        probe(Point{1.0, 0.0, 0.0});
        probe(Point{-1.0, 0.0, 0.0});
    } else if (dim_ == 2) {
        for (std::size_t k = 0; k < sphere_samples; ++k) {
            const double phi = 2.0 * M_PI * static_cast<double>(k) / sphere_samples;
            probe(Point{std::cos(phi), std::sin(phi), 0.0});
        }
    } else {
        // Fibonacci sphere.
        const double golden = M_PI * (3.0 - std::sqrt(5.0));
        for (std::size_t k = 0; k < sphere_samples; ++k) {
            const double z = 1.0 - 2.0 * (k + 0.5) / sphere_samples;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden * static_cast<double>(k);
            probe(Point{r * std::cos(phi), r * std::sin(phi), z});
        }
    }
    if (!(mn >= eps))
        throw DegenerateSpectralMeasure(
            "spectral measure is numerically degenerate: min psi on sphere = " + std::to_string(mn));
    return mn;
}

GridField StableLaw::density(double t, const PeriodicGrid& grid) const {
    if (grid.dim() != dim_) throw std::invalid_argument("density: grid dimension mismatch");
    if (!(t > 0.0)) throw std::invalid_argument("density: t must be positive");
    const double nyq = M_PI * static_cast<double>(grid.points_per_axis()) / grid.box_length();
    for (int a = 0; a < dim_; ++a) {
        Point xi{0.0, 0.0, 0.0};
        xi[a] = nyq;
        if (std::exp(-t * levy_exponent(xi)) > 1e-14)
            throw GridTooCoarse("density: e^{-t psi} above 1e-14 at the Nyquist frequency of axis " +
                                std::to_string(a));
    }
    GridField out(grid, 1);
    auto& v = out.comp(0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        // Checkerboard sign realigns the DFT origin with the box corner -l/2.
        int parity = 0;
        for (int a = 0; a < dim_; ++a) parity += static_cast<int>(grid.axis_index(i, a));
        const double sign = (parity % 2 == 0) ? 1.0 : -1.0;
        v[i] = Complex(sign * std::exp(-t * levy_exponent(grid.freq(i))), 0.0);
    }
    fft::inverse_nd(v, grid.dim(), grid.points_per_axis());
    const double scale = 1.0 / grid.cell_volume();
    for (auto& z : v) z *= scale;
    out.force_real(1e-8);
    return out;
}

Point StableLaw::sample_increment(double dt, RngStream& rng) const {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_increment: dt must be positive");
    Point x{0.0, 0.0, 0.0};
    for (const auto& p : pairs_) {
        const double sigma = std::pow(p.paired_weight * k_alpha_ * dt, 1.0 / alpha_);
        const double s = sigma * cms_standard(alpha_, rng);
        for (int i = 0; i < dim_; ++i) x[i] += s * p.direction[i];
    }
    return x;
}

std::string StableLaw::to_text() const {
    std::ostringstream os;
    os.precision(17);
    os << dim_ << " " << alpha_ << "\n";
    for (const auto& a : atoms_) {
        for (int i = 0; i < dim_; ++i) os << a.direction[i] << " ";
        os << a.weight << "\n";
    }
    return os.str();
}

StableLaw StableLaw::from_text(const std::string& text) {
    std::istringstream is(text);
    int dim = 0;
    double alpha = 0.0;
    if (!(is >> dim >> alpha)) throw ConfigError("StableLaw::from_text: malformed header line");
    std::vector<SpectralAtom> atoms;
    while (true) {
        SpectralAtom a;
        double first;
        if (!(is >> first)) break;
        a.direction[0] = first;
        for (int i = 1; i < dim; ++i)
            if (!(is >> a.direction[i])) throw ConfigError("StableLaw::from_text: truncated atom line");
        if (!(is >> a.weight)) throw ConfigError("StableLaw::from_text: atom line missing weight");
        atoms.push_back(a);
    }
    if (atoms.empty()) throw ConfigError("StableLaw::from_text: no atoms");
    return StableLaw(dim, alpha, std::move(atoms));
}

StableLaw StableLaw::axis_symmetric(int dim, double alpha, double mass) {
    std::vector<SpectralAtom> atoms;
    const double w = mass / (2.0 * dim);
    for (int a = 0; a < dim; ++a) {
        SpectralAtom plus, minus;
        plus.direction[a] = 1.0;
        minus.direction[a] = -1.0;
        plus.weight = minus.weight = w;
        atoms.push_back(plus);
        atoms.push_back(minus);
    }
    return StableLaw(dim, alpha, std::move(atoms));
}

// --- truncated remainder sampler ---------------------------------------------

TruncatedPairSampler::TruncatedPairSampler(double alpha, double paired_weight, double k_alpha,
                                           double dt, double delta)
    : delta_(delta) {
    if (!(dt > 0.0) || !(delta > 0.0) || !(paired_weight > 0.0))
        throw std::invalid_argument("TruncatedPairSampler: parameters must be positive");

    const double c = dt * paired_weight; // Levy-density scale of the pair over the step
    // Characteristic function exp(-c delta^{-alpha} g(s delta)).
    auto log_cf = [&](double s) {
        return -c * std::pow(delta, -alpha) * truncated_cosine_kernel(alpha, s * delta);
    };

    // Spectral range: decay of the CF is governed by c K |s|^alpha.
    const double s_star = std::pow(38.0 / (c * k_alpha), 1.0 / alpha);

    // Spatial range from a numerical Chernoff bound on the truncated law:
    // log E e^{theta X} = c int_0^delta (cosh(theta u) - 1) u^{-1-alpha} du.
    auto log_mgf = [&](double theta) {
        double sum = 0.0, term = 1.0;
        const double td = theta * delta;
        for (int k = 1; k <= 400; ++k) {
            term *= td * td / ((2.0 * k - 1.0) * (2.0 * k));
            const double contrib = term / (2.0 * k - alpha);
            sum += contrib;
            if (contrib < 1e-18 * (sum + 1e-300)) break;
        }
        return c * std::pow(delta, -alpha) * sum;
    };
    const double core = std::pow(c * k_alpha, 1.0 / alpha);
    double half = std::max(4.0 * delta, 16.0 * core);
    while (true) {
        double best = 1.0;
        for (double theta = 0.125 / delta; theta <= 512.0 / delta; theta *= 2.0)
            best = std::min(best, std::exp(log_mgf(theta) - theta * half));
        if (best < 1e-13) break;
        half *= 1.5;
        if (half > 1e6 * (delta + core))
            throw std::logic_error("TruncatedPairSampler: tail range search failed");
    }
    half_range_ = half;

    // Grid sizes: resolve the stable-like core and cover the CF support.
    std::size_t n = 1 << 15;
    while (M_PI * static_cast<double>(n / 2) / half_range_ < s_star && n < (1u << 21)) n <<= 1;
    while ((2.0 * half_range_ / static_cast<double>(n)) > core / 8.0 && n < (1u << 21)) n <<= 1;
    if (M_PI * static_cast<double>(n / 2) / half_range_ < s_star)
        throw std::logic_error("TruncatedPairSampler: spectral range not covered");

    // Density on the x-grid by FFT of the CF (checkerboard sign maps the
    // origin to the center of the table).
    const double ds = M_PI / half_range_;
    std::vector<Complex> buf(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double sj = ds * (j < n / 2 ? static_cast<double>(j)
                                          : static_cast<double>(j) - static_cast<double>(n));
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        buf[j] = Complex(sign * std::exp(log_cf(sj)), 0.0);
    }
    fft::transform(buf.data(), n, -1);
    std::vector<double> pdf(n);
    for (std::size_t m = 0; m < n; ++m) pdf[m] = std::max(0.0, buf[m].real()) * (ds / (2.0 * M_PI));
    // Enforce exact evenness about the center so sampling is symmetric.
    for (std::size_t m = 1; m < n / 2; ++m) {
        const double avg = 0.5 * (pdf[n / 2 + m] + pdf[n / 2 - m]);
        pdf[n / 2 + m] = pdf[n / 2 - m] = avg;
    }

    const double dx = 2.0 * half_range_ / static_cast<double>(n);
    cdf_.assign(n + 1, 0.0);
    for (std::size_t m = 0; m < n; ++m) cdf_[m + 1] = cdf_[m] + pdf[m] * dx;
    const double total = cdf_[n];
    if (!(total > 0.5))
        throw std::logic_error("TruncatedPairSampler: density mass lost");
    for (auto& v : cdf_) v /= total;
}

double TruncatedPairSampler::sample(RngStream& rng) const {
    const double u = rng.next_uniform();
    const std::size_t n = cdf_.size() - 1;
    std::size_t lo = 0, hi = n;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        (cdf_[mid] <= u ? lo : hi) = mid;
    }
    const double seg = cdf_[hi] - cdf_[lo];
    const double frac = seg > 0.0 ? (u - cdf_[lo]) / seg : 0.5;
    const double dx = 2.0 * half_range_ / static_cast<double>(n);
    return -half_range_ + dx * (static_cast<double>(lo) + frac);
}

// --- path sampler -------------------------------------------------------------

JumpPathSampler::JumpPathSampler(const StableLaw& law, double horizon, std::size_t n_steps,
                                 double record_threshold)
    : law_(law), horizon_(horizon), n_steps_(n_steps), threshold_(record_threshold) {
    if (!(horizon > 0.0)) throw std::invalid_argument("JumpPathSampler: horizon must be positive");
    if (n_steps < 1) throw std::invalid_argument("JumpPathSampler: n_steps must be >= 1");
    if (!(record_threshold > 0.0))
        throw std::invalid_argument("JumpPathSampler: record threshold must be positive");
    dt_ = horizon / static_cast<double>(n_steps);

    // Rate of recorded jumps: sum_k w_k delta^{-alpha} / alpha.
    poisson_rate_ = law.total_weight() * std::pow(threshold_, -law.alpha()) / law.alpha();
    double cum = 0.0;
    for (const auto& a : law.atoms()) {
        cum += a.weight;
        atom_cum_weight_.push_back(cum);
    }
    for (const auto& p : law.pairs())
        remainder_.emplace_back(law.alpha(), p.paired_weight, law.k_alpha(), dt_, threshold_);
}

PathSample JumpPathSampler::sample(RngStream& rng) const {
    PathSample out;
    out.increments.assign(n_steps_, Point{0.0, 0.0, 0.0});

    // Recorded jumps first: homogeneous Poisson times, atom choice by weight,
    // radius by exact inversion of the r^{-1-alpha} tail.
    double t = rng.next_exponential() / poisson_rate_;
    while (t < horizon_) {
        const double pick = rng.next_uniform() * law_.total_weight();
        std::size_t a = 0;
        while (a + 1 < atom_cum_weight_.size() && atom_cum_weight_[a] <= pick) ++a;
        const double r = threshold_ * std::pow(rng.next_uniform(), -1.0 / law_.alpha());
        JumpRecord rec;
        rec.time = t;
        for (int i = 0; i < law_.dim(); ++i) rec.jump[i] = r * law_.atoms()[a].direction[i];
        rec.is_large = r > 1.0;
        const std::size_t step = std::min<std::size_t>(
            static_cast<std::size_t>(t / dt_), n_steps_ - 1);
        for (int i = 0; i < law_.dim(); ++i) out.increments[step][i] += rec.jump[i];
        out.jumps.push_back(rec);
        t += rng.next_exponential() / poisson_rate_;
    }

    // Truncated-law remainder, one draw per pair per step.
    for (std::size_t s = 0; s < n_steps_; ++s) {
        for (std::size_t k = 0; k < remainder_.size(); ++k) {
            const double v = remainder_[k].sample(rng);
            for (int i = 0; i < law_.dim(); ++i)
                out.increments[s][i] += v * law_.pairs()[k].direction[i];
        }
    }
    return out;
}

PathSample sample_path_with_jumps(const StableLaw& law, double horizon, std::size_t n_steps,
                                  RngStream& rng, double record_threshold) {
    return JumpPathSampler(law, horizon, n_steps, record_threshold).sample(rng);
}

} // namespace stablab
