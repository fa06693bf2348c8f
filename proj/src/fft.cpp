#include "stablab/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace stablab::fft {

void transform(std::complex<double>* data, std::size_t n, int sign) {
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft: length must be a power of two");
    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = data[i + k];
                const std::complex<double> v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

namespace {

void transform_all_axes(std::vector<std::complex<double>>& values, int dim, std::size_t n,
                        int sign) {
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) total *= n;
    if (values.size() != total) throw std::invalid_argument("fft: size/shape mismatch");

    std::vector<std::complex<double>> line(n);
    // Axis a has stride n^{dim-1-a} in row-major layout.
    std::size_t stride = total / n;
    for (int a = 0; a < dim; ++a) {
        const std::size_t block = stride * n; // span of one transform group
        for (std::size_t base = 0; base < total; base += block) {
            for (std::size_t off = 0; off < stride; ++off) {
                std::complex<double>* p = values.data() + base + off;
                if (stride == 1) {
                    transform(p, n, sign);
                } else {
                    for (std::size_t k = 0; k < n; ++k) line[k] = p[k * stride];
                    transform(line.data(), n, sign);
                    for (std::size_t k = 0; k < n; ++k) p[k * stride] = line[k];
                }
            }
        }
        stride /= n;
    }
}

} // namespace

void forward_nd(std::vector<std::complex<double>>& values, int dim, std::size_t n) {
    transform_all_axes(values, dim, n, -1);
}

void inverse_nd(std::vector<std::complex<double>>& values, int dim, std::size_t n) {
    transform_all_axes(values, dim, n, +1);
    const double scale = 1.0 / static_cast<double>(values.size());
    for (auto& v : values) v *= scale;
}

} // namespace stablab::fft
