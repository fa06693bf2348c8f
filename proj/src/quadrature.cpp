#include "stablab/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace stablab {

namespace {

// The evaluation budget stops runaway refinement near integrable
// singularities, where per-side tolerance halving would otherwise branch
// exponentially.
double simpson_rec(const std::function<double(double)>& f, double a, double m, double b,
                   double fa, double fm, double fb, double whole, double tol, int depth,
                   long& budget) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    budget -= 2;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || budget <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1, budget) +
           simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1, budget);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    long budget = 4000000;
    return simpson_rec(f, a, m, b, fa, fm, fb, whole, tol, max_depth, budget);
}

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int order) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
    if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");

    std::vector<double> x(order), w(order);
    for (int i = 0; i < order; ++i) {
        // Newton iteration from the Chebyshev-like initial guess.
        double t = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = order * (t * p1 - p0) / (t * t - 1.0);
            const double step = p1 / dp;
            t -= step;
            if (std::abs(step) < 1e-15) break;
        }
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= order; ++k) {
            const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = order * (t * p1 - p0) / (t * t - 1.0);
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    auto [pos, ok] = cache.emplace(order, std::make_pair(std::move(x), std::move(w)));
    return pos->second;
}

namespace {

// Gauss-Laguerre nodes/weights for int_0^inf e^{-t} h(t) dt.
const std::pair<std::vector<double>, std::vector<double>>& gauss_laguerre(int order) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;

    std::vector<double> x(order), w(order);
    for (int i = 0; i < order; ++i) {
        double t;
        if (i == 0) t = 3.0 / (1.0 + 2.4 * order);
        else if (i == 1) t = x[0] + 15.0 / (1.0 + 2.5 * order);
        else
            t = x[i - 1] + (x[i - 1] - x[i - 2]) * (1.0 + 2.55 * (i - 1)) / (1.9 * (i - 1));
        for (int iter = 0; iter < 200; ++iter) {
            double p0 = 1.0, p1 = 1.0 - t;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0 - t) * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = order * (p1 - p0) / t;
            const double step = p1 / dp;
            t -= step;
            if (std::abs(step) < 1e-14 * (1.0 + t)) break;
        }
        double p0 = 1.0, p1 = 1.0 - t;
        for (int k = 2; k <= order; ++k) {
            const double p2 = ((2.0 * k - 1.0 - t) * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        x[i] = t;
        // w_i = x_i / (n^2 L_{n-1}(x_i)^2).
        w[i] = t / (order * order * p0 * p0);
    }
    auto [pos, ok] = cache.emplace(order, std::make_pair(std::move(x), std::move(w)));
    return pos->second;
}

} // namespace

double cosine_tail_integral(double alpha, double y) {
    if (y <= 0.0) throw std::invalid_argument("cosine_tail_integral: y must be > 0");
    // int_1^inf e^{iyu} u^{-1-a} du = e^{iy} (i/y) int_0^inf e^{-t} (1+it/y)^{-1-a} dt.
    const std::complex<double> I(0.0, 1.0);
    const double s = 1.0 + alpha;
    std::complex<double> integral(0.0, 0.0);
    if (y >= 10.0) {
        // The integrand's branch point sits at t = i y, far from the Laguerre
        // node range; a fixed rule is accurate and cheap (hot path of the
        // truncated-law tables).
        const auto& [t, w] = gauss_laguerre(40);
        for (std::size_t i = 0; i < t.size(); ++i)
            integral += w[i] * std::pow(1.0 + I * (t[i] / y), -s);
    } else {
        auto real_part = [&](double t) {
            return (std::exp(-t) * std::pow(1.0 + I * (t / y), -s)).real();
        };
        auto imag_part = [&](double t) {
            return (std::exp(-t) * std::pow(1.0 + I * (t / y), -s)).imag();
        };
        // e^{-t} caps the range; 50 gives e^{-50} ~ 2e-22.
        const double re = adaptive_simpson(real_part, 0.0, 50.0, 1e-14);
        const double im = adaptive_simpson(imag_part, 0.0, 50.0, 1e-14);
        integral = std::complex<double>(re, im);
    }
    const std::complex<double> total = std::exp(I * y) * (I / y) * integral;
    return total.real();
}

double truncated_cosine_kernel(double alpha, double y) {
    if (alpha <= 0.0 || alpha >= 2.0)
        throw std::invalid_argument("truncated_cosine_kernel: alpha must be in (0,2)");
    const double ay = std::abs(y);
    if (ay == 0.0) return 0.0;
    if (ay <= 14.0) {
        // sum_{k>=1} (-1)^{k+1} y^{2k} / ((2k)! (2k - alpha))
        double sum = 0.0, term = 1.0;
        const double y2 = ay * ay;
        for (int k = 1; k <= 60; ++k) {
            term *= y2 / ((2.0 * k - 1.0) * (2.0 * k));
            const double contrib = term / (2.0 * k - alpha);
            sum += (k % 2 == 1) ? contrib : -contrib;
            if (term / (2.0 * k - alpha) < 1e-17 * (std::abs(sum) + 1e-300) && k > 3) break;
        }
        return sum;
    }
    // g(y) = K_alpha |y|^alpha - 1/alpha + int_1^inf cos(y u) u^{-1-alpha} du.
    // K_alpha is cached: this branch sits on the hot path of the
    // truncated-law table construction.
    static std::map<double, double> k_cache;
    static std::mutex k_mu;
    double k;
    {
        std::lock_guard<std::mutex> lock(k_mu);
        auto it = k_cache.find(alpha);
        if (it == k_cache.end())
            it = k_cache.emplace(alpha, cosine_integral_constant(alpha)).first;
        k = it->second;
    }
    return k * std::pow(ay, alpha) - 1.0 / alpha + cosine_tail_integral(alpha, ay);
}

double cosine_integral_constant(double alpha) {
    if (alpha <= 0.0 || alpha >= 2.0)
        throw std::invalid_argument("cosine_integral_constant: alpha must be in (0,2)");
    // K = int_0^1 (1-cos u) u^{-1-a} du + 1/a - int_1^inf cos(u) u^{-1-a} du,
    // first piece by the alternating series (y=1 lies deep in its radius).
    double series = 0.0, term = 1.0;
    for (int k = 1; k <= 40; ++k) {
        term /= (2.0 * k - 1.0) * (2.0 * k);
        const double contrib = term / (2.0 * k - alpha);
        series += (k % 2 == 1) ? contrib : -contrib;
        if (contrib < 1e-18 && k > 3) break;
    }
    return series + 1.0 / alpha - cosine_tail_integral(alpha, 1.0);
}

double cosine_integral_constant_closed_form(double alpha) {
    return M_PI / (2.0 * std::tgamma(1.0 + alpha) * std::sin(alpha * M_PI / 2.0));
}

} // namespace stablab
