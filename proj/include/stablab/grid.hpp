#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace stablab {

using Complex = std::complex<double>;
using Point = std::array<double, 3>; // first `dim` entries are meaningful

// Uniform periodic box [-l/2, l/2)^d with a power-of-two number of points per
// axis. The frequency lattice is (2 pi / l) * {-n/2, ..., n/2 - 1}^d.
class PeriodicGrid {
public:
    PeriodicGrid(int dim, std::size_t points_per_axis, double box_length)
        : dim_(dim), n_(points_per_axis), ell_(box_length) {
        if (dim < 1 || dim > 3) throw std::invalid_argument("PeriodicGrid: dim must be 1, 2 or 3");
        if (n_ < 8 || (n_ & (n_ - 1)) != 0)
            throw std::invalid_argument("PeriodicGrid: points_per_axis must be a power of two >= 8");
        if (!(ell_ > 0.0)) throw std::invalid_argument("PeriodicGrid: box_length must be positive");
    }

    int dim() const { return dim_; }
    std::size_t points_per_axis() const { return n_; }
    double box_length() const { return ell_; }
    double cell() const { return ell_ / static_cast<double>(n_); }
    double cell_volume() const { return std::pow(cell(), dim_); }

    std::size_t size() const {
        std::size_t s = 1;
        for (int a = 0; a < dim_; ++a) s *= n_;
        return s;
    }

    // Axis index -> coordinate in [-l/2, l/2).
    double coord(std::size_t m) const { return -0.5 * ell_ + cell() * static_cast<double>(m); }

    // Axis index -> signed frequency component.
    double freq_component(std::size_t j) const {
        const auto half = n_ / 2;
        const double signed_j =
            j < half ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n_);
        return 2.0 * M_PI / ell_ * signed_j;
    }

    std::size_t axis_index(std::size_t flat, int axis) const {
        std::size_t stride = 1;
        for (int a = dim_ - 1; a > axis; --a) stride *= n_;
        return (flat / stride) % n_;
    }

    Point point(std::size_t flat) const {
        Point x{0.0, 0.0, 0.0};
        for (int a = 0; a < dim_; ++a) x[a] = coord(axis_index(flat, a));
        return x;
    }

    Point freq(std::size_t flat) const {
        Point xi{0.0, 0.0, 0.0};
        for (int a = 0; a < dim_; ++a) xi[a] = freq_component(axis_index(flat, a));
        return xi;
    }

    // Whether flat index touches the unpaired Nyquist plane along some axis.
    bool on_nyquist(std::size_t flat) const {
        for (int a = 0; a < dim_; ++a)
            if (axis_index(flat, a) == n_ / 2) return true;
        return false;
    }

    double wrap_coord(double x) const {
        double y = std::fmod(x + 0.5 * ell_, ell_);
        if (y < 0.0) y += ell_;
        return y - 0.5 * ell_;
    }

    Point wrap(const Point& x) const {
        Point y{0.0, 0.0, 0.0};
        for (int a = 0; a < dim_; ++a) y[a] = wrap_coord(x[a]);
        return y;
    }

    // Torus (minimum image) distance between displacement components.
    double torus_abs(double dx) const {
        double y = std::abs(std::fmod(dx, ell_));
        return std::min(y, ell_ - y);
    }

    bool operator==(const PeriodicGrid& o) const {
        return dim_ == o.dim_ && n_ == o.n_ && ell_ == o.ell_;
    }

private:
    int dim_;
    std::size_t n_;
    double ell_;
};

// Function sampled on a PeriodicGrid: one complex array per component
// (1 component for scalars, dim for vector fields). Real-valued fields carry
// zero imaginary part up to FFT round-off.
class GridField {
public:
    GridField(PeriodicGrid grid, int components)
        : grid_(grid), values_(static_cast<std::size_t>(components),
                               std::vector<Complex>(grid.size(), Complex(0.0, 0.0))) {
        if (components < 1 || (components != 1 && components != grid.dim()))
            throw std::invalid_argument("GridField: components must be 1 or dim");
    }

    static GridField zeros(const PeriodicGrid& grid, int components = 1) {
        return GridField(grid, components);
    }

    static GridField from_function(const PeriodicGrid& grid,
                                   const std::function<double(const Point&)>& f) {
        GridField out(grid, 1);
        for (std::size_t i = 0; i < grid.size(); ++i)
            out.values_[0][i] = Complex(f(grid.point(i)), 0.0);
        return out;
    }

    const PeriodicGrid& grid() const { return grid_; }
    int components() const { return static_cast<int>(values_.size()); }
    std::size_t size() const { return grid_.size(); }

    std::vector<Complex>& comp(int c) { return values_.at(static_cast<std::size_t>(c)); }
    const std::vector<Complex>& comp(int c) const { return values_.at(static_cast<std::size_t>(c)); }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : values_)
            for (const auto& z : v) m = std::max(m, std::abs(z));
        return m;
    }

    double max_imag() const {
        double m = 0.0;
        for (const auto& v : values_)
            for (const auto& z : v) m = std::max(m, std::abs(z.imag()));
        return m;
    }

    // Drop the imaginary part, verifying it is round-off sized.
    GridField& force_real(double tol = 1e-10) {
        const double scale = std::max(1.0, max_abs());
        if (max_imag() > tol * scale)
            throw std::logic_error("GridField: imaginary part exceeds real-field tolerance");
        for (auto& v : values_)
            for (auto& z : v) z = Complex(z.real(), 0.0);
        return *this;
    }

    GridField& operator+=(const GridField& o) {
        check_shape(o);
        for (std::size_t c = 0; c < values_.size(); ++c)
            for (std::size_t i = 0; i < values_[c].size(); ++i) values_[c][i] += o.values_[c][i];
        return *this;
    }

    GridField& operator-=(const GridField& o) {
        check_shape(o);
        for (std::size_t c = 0; c < values_.size(); ++c)
            for (std::size_t i = 0; i < values_[c].size(); ++i) values_[c][i] -= o.values_[c][i];
        return *this;
    }

    GridField& operator*=(double s) {
        for (auto& v : values_)
            for (auto& z : v) z *= s;
        return *this;
    }

    friend GridField operator+(GridField a, const GridField& b) { return a += b; }
    friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
    friend GridField operator*(double s, GridField a) { return a *= s; }

private:
    void check_shape(const GridField& o) const {
        if (!(grid_ == o.grid_) || values_.size() != o.values_.size())
            throw std::invalid_argument("GridField: shape mismatch");
    }

    PeriodicGrid grid_;
    std::vector<std::vector<Complex>> values_;
};

} // namespace stablab
