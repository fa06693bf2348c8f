#pragma once

#include <complex>
#include <functional>
#include <utility>
#include <vector>

namespace stablab {

// Adaptive Simpson on [a,b] with absolute tolerance `tol`.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 60);

// Gauss-Legendre nodes and weights on [-1,1]; results are cached per order.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int order);

// g(y) = int_0^1 (1 - cos(y v)) v^{-1-alpha} dv, the truncated cosine kernel.
// Series for small |y|, stable-exponent asymptotics with a rotated-contour
// tail for large |y|. Absolute accuracy ~1e-12.
double truncated_cosine_kernel(double alpha, double y);

// int_1^inf cos(y u) u^{-1-alpha} du for y > 0, evaluated on the rotated
// contour u = 1 + it/y where the integrand decays like e^{-t}.
double cosine_tail_integral(double alpha, double y);

// K_alpha = int_0^inf (1 - cos u) u^{-1-alpha} du by quadrature composition.
double cosine_integral_constant(double alpha);

// Same constant in closed form: pi / (2 Gamma(1+alpha) sin(alpha pi / 2)).
double cosine_integral_constant_closed_form(double alpha);

} // namespace stablab
