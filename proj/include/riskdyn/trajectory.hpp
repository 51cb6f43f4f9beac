#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace riskdyn {

/// Uniform sampling grid. Sample k sits at t_start + k * dt, computed by a
/// single multiply-add so times never accumulate drift.
class TimeGrid {
public:
    TimeGrid(double t_start, double dt, std::size_t n_samples);

    double t_start() const noexcept { return t_start_; }
    double dt() const noexcept { return dt_; }
    std::size_t size() const noexcept { return n_samples_; }

    double time(std::size_t k) const noexcept {
        return t_start_ + static_cast<double>(k) * dt_;
    }
    double t_end() const noexcept { return time(n_samples_ - 1); }

    /// Index of the first sample at or after t. Times within a billionth of a
    /// step below a grid point round onto it. Returns size() when t lies past
    /// the last sample.
    std::size_t first_index_at_or_after(double t) const noexcept;

    TimeGrid shifted(double delta) const { return {t_start_ + delta, dt_, n_samples_}; }

    bool operator==(const TimeGrid&) const = default;

private:
    double t_start_;
    double dt_;
    std::size_t n_samples_;
};

/// Immutable scalar time series on a uniform grid. All values are finite.
class Trajectory {
public:
    Trajectory(TimeGrid grid, std::vector<double> values);

    const TimeGrid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t k) const noexcept { return values_[k]; }
    double time(std::size_t k) const noexcept { return grid_.time(k); }

    bool operator==(const Trajectory&) const = default;

private:
    TimeGrid grid_;
    std::vector<double> values_;
};

struct SteadyStateEstimate {
    double level;
    double window_start;
    double window_end;
};

Trajectory sample_function(const std::function<double(double)>& f, const TimeGrid& grid);

/// Mean of the last ceil(tail_fraction * n) samples.
SteadyStateEstimate estimate_steady_state(const Trajectory& traj, double tail_fraction);

Trajectory shift_baseline(const Trajectory& traj, double level);

}  // namespace riskdyn
