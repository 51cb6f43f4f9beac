#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "riskdyn/trajectory.hpp"

namespace riskdyn {

using StateVector = std::vector<double>;

/// Discrete companion state (e.g. a load-shedding flag). It is updated once
/// per full integration step, never inside RK4 substeps.
using Mode = int;

/// Exogenous disturbance d(t). A pulse is active on [onset, onset + duration).
struct DisturbanceSignal {
    enum class Kind { none, pulse };

    Kind kind = Kind::none;
    double onset = 0.0;
    double duration = 0.0;
    double magnitude = 0.0;

    static DisturbanceSignal none() { return {}; }
    static DisturbanceSignal pulse(double onset, double duration, double magnitude);

    void validate() const;
    bool operator==(const DisturbanceSignal&) const = default;
};

/// `neutral` is what the signal reads outside its window: 0 for additive
/// coupling, 1 for multiplicative coupling.
double evaluate_disturbance(const DisturbanceSignal& signal, double t, double neutral) noexcept;

/// What an observable sees at a grid sample. `mode_before` is the mode of the
/// step ending at t and `mode_after` the mode of the step starting at t; they
/// differ only at samples where the discrete mode switched. At the first and
/// last sample only one side exists and both fields carry it.
struct SamplePoint {
    double t;
    const StateVector& x;
    double disturbance;
    Mode mode_before;
    Mode mode_after;
};

struct Observable {
    std::string name;
    std::function<double(const SamplePoint&)> evaluate;
};

/// dx/dt = f(t, x, d). `rhs` must be pure. The optional hooks add a discrete
/// mode updated at each grid point and a projection applied after each step
/// (returning true when it altered the state).
struct DynamicalSystem {
    std::size_t dimension = 1;
    double disturbance_neutral = 0.0;
    std::function<StateVector(double t, const StateVector& x, double d, Mode mode)> rhs;
    Mode initial_mode = 0;
    std::function<Mode(double t, const StateVector& x, Mode previous)> update_mode;
    std::function<bool(StateVector& x)> project;
    std::vector<std::string> state_names;
    std::vector<Observable> observables;
};

/// Classical fixed-step RK4 over [t_start, t_end]. The span must hold a whole
/// number of steps.
struct IntegratorConfig {
    double dt = 0.01;
    double t_start = 0.0;
    double t_end = 1.0;
    std::size_t max_steps = 10'000'000;

    /// Validates and returns the number of steps.
    std::size_t step_count() const;
    bool operator==(const IntegratorConfig&) const = default;
};

struct IntegrationResult {
    std::vector<Trajectory> states;
    std::vector<std::string> observable_names;
    std::vector<Trajectory> observables;
    /// Mode in force on the step starting at each sample; the last entry
    /// repeats the final step's mode.
    std::vector<Mode> modes;
    std::size_t projections = 0;
    std::vector<std::string> warnings;

    const Trajectory& observable(const std::string& name) const;
};

IntegrationResult integrate(const DynamicalSystem& system, const StateVector& x0,
                            const DisturbanceSignal& disturbance, const IntegratorConfig& config);

/// dr/dt = -lambda * r with the identity as its single observable "r".
DynamicalSystem linear_decay_system(double lambda);

}  // namespace riskdyn
