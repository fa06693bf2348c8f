#pragma once

#include <functional>
#include <vector>

#include "stablab/grid.hpp"
#include "stablab/rng.hpp"
#include "stablab/stable_law.hpp"

namespace stablab {

// Exponent bundle for the norm calculus.
struct NormParams {
    double beta = 0.0;   // >= 0
    double p = 2.0;      // > 1
    double gamma = 1.5;  // solver smoothness index
    double q = 4.0;      // > 1, time integrability
    double theta = 1.0;  // in [0,1]

    void validate() const;
};

// --- multiplier machinery ---

// Forward/inverse between grid values and plain DFT coefficients.
std::vector<Complex> to_spectrum(const GridField& f, int comp = 0);
GridField from_spectrum(const PeriodicGrid& grid, std::vector<Complex> spectrum);

// Apply a scalar Fourier multiplier m(xi) to every component.
GridField apply_multiplier(const GridField& f, const std::function<Complex(const Point&)>& m);

// --- operator calculus ---

// T_t f: multiplier e^{-t psi(xi)}. Constants are preserved, real stays real.
GridField semigroup_apply(const GridField& f, const StableLaw& law, double t);

// Resolvent-weighted integrated semigroup: int_{tau0}^{tau1} e^{-tau (psi + lambda)} dtau
// as a multiplier. This is the exact Duhamel weight used by the PIDE solvers.
GridField integrated_semigroup_apply(const GridField& f, const StableLaw& law, double tau0,
                                     double tau1, double lambda = 0.0);

// Generator L_0 f: multiplier -psi(xi). Throws SpectralTailTooLarge when the
// top-octave spectral content of f exceeds 1e-10 of its peak.
GridField generator_apply(const GridField& f, const StableLaw& law);

// Principal-value quadrature of the increment form of the generator:
// per atom pair, int_{r_min}^{r_max} (f(x+r theta)+f(x-r theta)-2 f(x)) r^{-1-alpha} dr
// on log-spaced Gauss-Legendre panels; shifts act spectrally.
GridField generator_apply_direct(const GridField& f, const StableLaw& law, double r_min,
                                 double r_max, int nodes_per_octave = 12);

// --- norms ---

double lp_norm(const GridField& f, double p);

// Bessel norm: L^p norm after the multiplier (1+|xi|^2)^{beta/2}.
double bessel_norm(const GridField& f, double beta, double p);

// Slobodeckij norm ||f||_p + seminorm, the double sum grouped by displacement
// class with torus minimum-image distances; zero displacement excluded.
double slobodeckij_norm(const GridField& f, double beta, double p);
double slobodeckij_seminorm(const GridField& f, double beta, double p);

// --- pointwise machinery ---

// Hardy-Littlewood maximal function over the given ball radii (ball averages
// of |f| computed by circular convolution), pointwise max over radii.
GridField maximal_function(const GridField& f, const std::vector<double>& radii);

// Dyadic radius ladder {cell, 2 cell, ..., <= l/4}.
std::vector<double> dyadic_radii(const PeriodicGrid& grid);

// Shift difference T_z f(x) = f(x+z) - f(x), off-grid z by trigonometric
// interpolation (multiplier e^{i<xi,z>} - 1).
GridField shift_diff(const GridField& f, const Point& z);

// Mollification by a C^inf bump of unit mass supported in the ball of radius
// eps. Requires eps < l/4. The grid-sampled kernel is renormalized so the
// field mean is preserved exactly.
GridField mollify(const GridField& f, double eps);

// Spectral gradient; returns a dim-component field. Nyquist modes are zeroed.
GridField gradient(const GridField& f);

// Euclidean norm of a vector field, |v|(x).
GridField pointwise_norm(const GridField& v);

// --- sampling-based helpers ---

// White noise filtered by |xi|^spectral_exponent (zero mean mode, Nyquist
// planes cleared). spectral_exponent = -(d+2s)/2 gives an H^s-critical field.
GridField rough_field(const PeriodicGrid& grid, double spectral_exponent, RngStream& rng);

// Interpolation of one component at an arbitrary (wrapped) point.
double multilinear_interpolate(const GridField& f, int comp, const Point& x);
double trig_interpolate(const std::vector<Complex>& spectrum, const PeriodicGrid& grid,
                        const Point& x);

// Largest |f| on the outermost grid faces relative to the peak; monitors
// wraparound contamination of fields meant to be supported inside the box.
double boundary_contamination(const GridField& f);

// Zero-padded spectral refinement onto a grid with factor * n points per axis.
GridField spectral_upsample(const GridField& f, int factor);

} // namespace stablab
