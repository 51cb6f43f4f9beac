#include "riskdyn/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "riskdyn/errors.hpp"

namespace riskdyn {

TimeGrid::TimeGrid(double t_start, double dt, std::size_t n_samples)
    : t_start_(t_start), dt_(dt), n_samples_(n_samples) {
    if (!std::isfinite(t_start) || !std::isfinite(dt)) {
        throw ConstructionError("time grid start and step must be finite");
    }
    if (!(dt > 0.0)) {
        throw ConstructionError("time grid step must be positive");
    }
    if (n_samples < 2) {
        throw ConstructionError("time grid needs at least 2 samples");
    }
}

std::size_t TimeGrid::first_index_at_or_after(double t) const noexcept {
    const double position = (t - t_start_) / dt_;
    if (position <= 0.0) {
        return 0;
    }
    const double k = std::ceil(position - 1e-9);
    if (k >= static_cast<double>(n_samples_)) {
        return n_samples_;
    }
    return static_cast<std::size_t>(k);
}

Trajectory::Trajectory(TimeGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        std::ostringstream msg;
        msg << "trajectory has " << values_.size() << " values for a grid of "
            << grid_.size() << " samples";
        throw ConstructionError(msg.str());
    }
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!std::isfinite(values_[k])) {
            std::ostringstream msg;
            msg << "non-finite value at t=" << grid_.time(k);
            throw ConstructionError(msg.str());
        }
    }
}

Trajectory sample_function(const std::function<double(double)>& f, const TimeGrid& grid) {
    std::vector<double> values(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double t = grid.time(k);
        const double v = f(t);
        if (!std::isfinite(v)) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "sampled function is non-finite at t=" << t;
            throw ConstructionError(msg.str());
        }
        values[k] = v;
    }
    return Trajectory(grid, std::move(values));
}

SteadyStateEstimate estimate_steady_state(const Trajectory& traj, double tail_fraction) {
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
        throw ParameterError("tail_fraction must lie in (0, 1]");
    }
    const std::size_t n = traj.size();
    auto count = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n)));
    count = std::min(count, n);
    if (count < 2) {
        throw ParameterError("steady-state tail window holds fewer than 2 samples");
    }
    const std::size_t first = n - count;
    // Accumulate offsets from the first tail sample: a constant tail then
    // yields its value exactly.
    const double anchor = traj[first];
    double offset_sum = 0.0;
    for (std::size_t k = first; k < n; ++k) {
        offset_sum += traj[k] - anchor;
    }
    return {anchor + offset_sum / static_cast<double>(count), traj.time(first), traj.time(n - 1)};
}

Trajectory shift_baseline(const Trajectory& traj, double level) {
    std::vector<double> values(traj.values().begin(), traj.values().end());
    for (double& v : values) {
        v -= level;
    }
    return Trajectory(traj.grid(), std::move(values));
}

}  // namespace riskdyn
