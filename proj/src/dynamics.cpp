#include "riskdyn/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "riskdyn/errors.hpp"

namespace riskdyn {

namespace {

std::string at_time(const char* what, double t) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << " at t=" << t;
    return msg.str();
}

bool all_finite(const StateVector& x) {
    for (double v : x) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

StateVector axpy(const StateVector& x, double a, const StateVector& k) {
    StateVector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = x[i] + a * k[i];
    }
    return out;
}

}  // namespace

DisturbanceSignal DisturbanceSignal::pulse(double onset, double duration, double magnitude) {
    DisturbanceSignal s{Kind::pulse, onset, duration, magnitude};
    s.validate();
    return s;
}

void DisturbanceSignal::validate() const {
    if (kind == Kind::none) {
        return;
    }
    if (!std::isfinite(onset) || !std::isfinite(duration) || !std::isfinite(magnitude)) {
        throw ParameterError("disturbance fields must be finite");
    }
    if (duration < 0.0) {
        throw ParameterError("disturbance duration must be non-negative");
    }
}

double evaluate_disturbance(const DisturbanceSignal& signal, double t, double neutral) noexcept {
    if (signal.kind == DisturbanceSignal::Kind::none) {
        return neutral;
    }
    if (t >= signal.onset && t < signal.onset + signal.duration) {
        return signal.magnitude;
    }
    return neutral;
}

std::size_t IntegratorConfig::step_count() const {
    if (!std::isfinite(dt) || !std::isfinite(t_start) || !std::isfinite(t_end)) {
        throw ConfigError("integrator times must be finite");
    }
    const double span = t_end - t_start;
    if (!(dt > 0.0) || !(dt <= span)) {
        throw ConfigError("integrator requires 0 < dt <= t_end - t_start");
    }
    const double steps = std::round(span / dt);
    if (steps > static_cast<double>(max_steps)) {
        std::ostringstream msg;
        msg << "integration needs " << steps << " steps, above the limit of " << max_steps;
        throw ConfigError(msg.str());
    }
    if (std::abs(steps * dt - span) > 1e-9 * span) {
        throw ConfigError("t_end - t_start must be a whole number of steps dt");
    }
    return static_cast<std::size_t>(steps);
}

const Trajectory& IntegrationResult::observable(const std::string& name) const {
    for (std::size_t i = 0; i < observable_names.size(); ++i) {
        if (observable_names[i] == name) {
            return observables[i];
        }
    }
    throw ParameterError("no observable named '" + name + "'");
}

IntegrationResult integrate(const DynamicalSystem& system, const StateVector& x0,
                            const DisturbanceSignal& disturbance, const IntegratorConfig& config) {
    if (!system.rhs) {
        throw ParameterError("dynamical system has no right-hand side");
    }
    if (x0.size() != system.dimension) {
        throw ParameterError("initial state dimension does not match the system");
    }
    if (!all_finite(x0)) {
        throw ParameterError("initial state must be finite");
    }
    disturbance.validate();
    const std::size_t n_steps = config.step_count();
    const TimeGrid grid(config.t_start, config.dt, n_steps + 1);
    const double dt = config.dt;
    const double neutral = system.disturbance_neutral;

    IntegrationResult result;
    if (disturbance.kind == DisturbanceSignal::Kind::pulse && disturbance.duration < 10.0 * dt) {
        result.warnings.push_back("disturbance duration is shorter than 10 integration steps");
    }

    const std::size_t n_obs = system.observables.size();
    std::vector<std::vector<double>> state_values(system.dimension, std::vector<double>(grid.size()));
    std::vector<std::vector<double>> obs_values(n_obs, std::vector<double>(grid.size()));
    result.modes.resize(grid.size());

    auto derivative = [&](double t, const StateVector& x, Mode mode) {
        StateVector dx = system.rhs(t, x, evaluate_disturbance(disturbance, t, neutral), mode);
        if (dx.size() != system.dimension) {
            throw ParameterError("right-hand side returned a vector of the wrong dimension");
        }
        if (!all_finite(dx)) {
            throw IntegrationDiverged(t, at_time("non-finite derivative", t));
        }
        return dx;
    };

    StateVector x = x0;
    Mode mode = system.initial_mode;
    for (std::size_t k = 0; k <= n_steps; ++k) {
        const double t = grid.time(k);
        Mode mode_before = mode;
        if (k < n_steps && system.update_mode) {
            mode = system.update_mode(t, x, mode);
        }
        if (k == 0) {
            mode_before = mode;
        }
        result.modes[k] = mode;
        for (std::size_t i = 0; i < system.dimension; ++i) {
            state_values[i][k] = x[i];
        }
        const SamplePoint point{t, x, evaluate_disturbance(disturbance, t, neutral), mode_before, mode};
        for (std::size_t j = 0; j < n_obs; ++j) {
            const double v = system.observables[j].evaluate(point);
            if (!std::isfinite(v)) {
                throw IntegrationDiverged(t, at_time("non-finite observable", t));
            }
            obs_values[j][k] = v;
        }
        if (k == n_steps) {
            break;
        }

        const double t_mid = t + 0.5 * dt;
        const double t_next = grid.time(k + 1);
        const StateVector k1 = derivative(t, x, mode);
        const StateVector k2 = derivative(t_mid, axpy(x, 0.5 * dt, k1), mode);
        const StateVector k3 = derivative(t_mid, axpy(x, 0.5 * dt, k2), mode);
        const StateVector k4 = derivative(t_next, axpy(x, dt, k3), mode);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if (!all_finite(x)) {
            throw IntegrationDiverged(t_next, at_time("non-finite state", t_next));
        }
        if (system.project && system.project(x)) {
            ++result.projections;
        }
    }

    result.states.reserve(system.dimension);
    for (auto& values : state_values) {
        result.states.emplace_back(grid, std::move(values));
    }
    result.observables.reserve(n_obs);
    for (std::size_t j = 0; j < n_obs; ++j) {
        result.observable_names.push_back(system.observables[j].name);
        result.observables.emplace_back(grid, std::move(obs_values[j]));
    }
    return result;
}

DynamicalSystem linear_decay_system(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw ParameterError("linear decay requires a finite lambda > 0");
    }
    DynamicalSystem system;
    system.dimension = 1;
    system.rhs = [lambda](double, const StateVector& r, double, Mode) {
        return StateVector{-lambda * r[0]};
    };
    system.state_names = {"r"};
    system.observables.push_back({"r", [](const SamplePoint& p) { return p.x[0]; }});
    return system;
}

}  // namespace riskdyn
