#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "stablab/grid.hpp"

namespace stablab {

// Uniform time grid on [0, T] with nodes t_j = j T / n_steps.
class TimeGrid {
public:
    TimeGrid(double horizon, std::size_t n_steps) : horizon_(horizon), n_steps_(n_steps) {
        if (!(horizon > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be positive");
        if (n_steps < 1) throw std::invalid_argument("TimeGrid: n_steps must be >= 1");
    }

    double horizon() const { return horizon_; }
    std::size_t n_steps() const { return n_steps_; }
    std::size_t n_nodes() const { return n_steps_ + 1; }
    double dt() const { return horizon_ / static_cast<double>(n_steps_); }
    double node(std::size_t j) const { return dt() * static_cast<double>(j); }

    bool operator==(const TimeGrid& o) const {
        return horizon_ == o.horizon_ && n_steps_ == o.n_steps_;
    }

private:
    double horizon_;
    std::size_t n_steps_;
};

// Time-indexed sequence of grid fields, one frame per node.
class SpaceTimeField {
public:
    SpaceTimeField(TimeGrid timegrid, const PeriodicGrid& grid, int components)
        : timegrid_(timegrid) {
        frames_.reserve(timegrid.n_nodes());
        for (std::size_t j = 0; j < timegrid.n_nodes(); ++j) frames_.emplace_back(grid, components);
    }

    static SpaceTimeField from_function(const TimeGrid& tg, const PeriodicGrid& grid,
                                        const std::function<double(double, const Point&)>& f) {
        SpaceTimeField out(tg, grid, 1);
        for (std::size_t j = 0; j < tg.n_nodes(); ++j) {
            const double t = tg.node(j);
            auto& v = out.frame(j).comp(0);
            for (std::size_t i = 0; i < grid.size(); ++i) v[i] = Complex(f(t, grid.point(i)), 0.0);
        }
        return out;
    }

    const TimeGrid& timegrid() const { return timegrid_; }
    const PeriodicGrid& grid() const { return frames_.front().grid(); }
    int components() const { return frames_.front().components(); }
    std::size_t n_frames() const { return frames_.size(); }

    GridField& frame(std::size_t j) { return frames_.at(j); }
    const GridField& frame(std::size_t j) const { return frames_.at(j); }

    // Piecewise-constant-left value: data frame governing [t_j, t_{j+1}).
    const GridField& data_frame_at(double t) const {
        const double dt = timegrid_.dt();
        std::size_t j = t <= 0.0 ? 0 : static_cast<std::size_t>(t / dt);
        if (j >= timegrid_.n_steps()) j = timegrid_.n_steps() - 1;
        return frames_[j];
    }

private:
    TimeGrid timegrid_;
    std::vector<GridField> frames_;
};

} // namespace stablab
