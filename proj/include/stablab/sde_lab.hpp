#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stablab/grid_calculus.hpp"
#include "stablab/rng.hpp"
#include "stablab/stable_law.hpp"
#include "stablab/zvonkin.hpp"

namespace stablab {

// Drift coefficient b(t,x) with its recorded regularity class. Evaluators are
// plain functions on R^d; experiments that compare against grid fields wrap
// the argument into the torus themselves.
struct DriftSpec {
    enum class Kind { smooth, indicator_composite, mollified };

    std::function<Point(double, const Point&)> evaluator;
    Kind kind = Kind::smooth;
    double bound = 0.0; // sup norm
    double beta_tag = 0.0, p_tag = 0.0;
    std::string label;
    // (a, b, c_in, c_out) of the 1-D composite; lets mollification use the
    // exact bump-CDF convolution instead of quadrature.
    std::array<double, 4> indicator_params{0.0, 0.0, 0.0, 0.0};

    Point operator()(double t, const Point& x) const { return evaluator(t, x); }

    static DriftSpec zero(int dim);
    static DriftSpec smooth_fn(std::function<Point(double, const Point&)> fn, double bound,
                               std::string label = "smooth");
    // 1-D composite c_in 1_{[a,b)} + c_out 1_{complement}.
    static DriftSpec indicator_composite_1d(double a, double b, double c_in, double c_out);
    // Convolution with the quartic bump of radius eps; exact closed form for
    // the 1-D indicator composite, Gauss-Legendre quadrature otherwise.
    static DriftSpec mollified(const DriftSpec& base, double eps, int dim);
};

// One trajectory: states at nodes plus the decomposed driving terms. States
// satisfy X_{j+1} = X_j + drift_term_j + increment_j exactly.
struct PathRecord {
    std::vector<double> times;
    std::vector<Point> states;
    std::vector<Point> drift_terms;
    std::vector<Point> increments;
    std::vector<JumpRecord> jumps;
    std::uint64_t path_index = 0;

    double bookkeeping_error() const;
    double max_excursion() const; // sup_j |X_j - X_0|
};

// Explicit Euler step X_{j+1} = X_j + b(t_j, X_j) h + dL_j driven by a
// pre-built sampler (reusable across paths and threads).
PathRecord euler_path(const DriftSpec& b, const Point& x0, const JumpPathSampler& sampler,
                      RngStream& rng);
PathRecord euler_path(const DriftSpec& b, const Point& x0, const StableLaw& law, double T,
                      std::size_t n_steps, RngStream& rng);

// Same Euler recursion driven by an already-sampled noise segment; used to
// couple several drifts to one noise realization.
PathRecord drive_path(const DriftSpec& b, const Point& x0, const PathSample& noise, double dt);

// Euler scheme of the transformed equation: recorded jumps above the
// sampler's threshold map through g (with the drift's jump integral extended
// down to the threshold, which carries their compensator), and the
// sub-threshold remainder maps through the Jacobian of Phi (first-order
// small-jump approximation).
PathRecord transformed_path(const ZvonkinTransform& tr, const Point& y0,
                            const JumpPathSampler& sampler, RngStream& rng);
PathRecord transformed_path_from_sample(const ZvonkinTransform& tr, const Point& y0,
                                        const PathSample& noise, double dt,
                                        double record_threshold = 1.0);

double default_small_jump_threshold(double dt, double alpha);

// --- coupled uniqueness experiment ---

struct UniquenessReport {
    std::vector<std::string> labels;          // one per adjacent level pair
    std::vector<double> mean_sup_diff;        // E sup_t |X^l - X^{l+1}|
    std::vector<double> std_err;
    std::vector<double> terminal_ks_distance; // CDF sup-distance of X_T between levels
    bool decreasing_within_2se = false;
    double final_mean = 0.0;
    double drift_bound = 0.0;
    double horizon = 0.0;
    std::size_t paths = 0;

    nlohmann::json to_json() const;
};

// Couples every mollification level to the same driving noise per path and
// reports adjacent-level sup differences with Monte Carlo standard errors.
UniquenessReport coupled_uniqueness_experiment(const std::vector<DriftSpec>& b_levels,
                                               const Point& x0, const StableLaw& law, double T,
                                               std::size_t n_steps, std::size_t paths,
                                               std::uint64_t seed, unsigned n_threads = 0);

// --- Krylov ratio experiment ---

struct KrylovFamilyMember {
    std::function<double(const Point&)> eval; // exact evaluator, torus-wrapped argument
    GridField field;                          // same function sampled on the oracle grid
    std::string label;
};

struct KrylovExperiment {
    DriftSpec control;                 // bounded adapted control (may be zero)
    std::vector<KrylovFamilyMember> family;
    double p = 2.0;
    double q = 8.0;
    double horizon = 1.0;
    std::size_t n_steps = 256;
    std::size_t paths = 10000;
    std::uint64_t seed = 1;
    std::string theorem = "Lp66";      // which estimate's exponent window applies
    bool validate_window = true;       // contrast rows bypass the window gate

    void validate(const StableLaw& law) const;
};

struct KrylovReport {
    std::vector<std::string> labels;
    std::vector<double> estimates;  // E int_0^T f(X_s) ds
    std::vector<double> std_err;
    std::vector<double> norms;      // ||f||_{L^q([0,T];L^p)}
    std::vector<double> ratios;
    double max_ratio = 0.0;
    double min_ratio = 0.0;
    bool window_validated = false;

    nlohmann::json to_json() const;
};

KrylovReport krylov_ratio(const KrylovExperiment& exp, const StableLaw& law,
                          unsigned n_threads = 0);

// Occupation-time oracle for b = 0: h sum_j (T_{t_j} f)(x0) computed through
// the semigroup on the grid of f; matches the Monte Carlo time discretization
// exactly, so the comparison error is purely statistical.
double occupation_time_oracle(const StableLaw& law, const GridField& f, const Point& x0,
                              double T, std::size_t n_steps);

} // namespace stablab
