#include "riskdyn/energy_scenario.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>

#include "riskdyn/errors.hpp"

namespace riskdyn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct GaussLegendre16 {
    std::array<double, 16> nodes{};
    std::array<double, 16> weights{};
};

// Nodes and weights by Newton iteration on P_16.
const GaussLegendre16& gauss_legendre16() {
    static const GaussLegendre16 rule = [] {
        GaussLegendre16 r;
        constexpr int n = 16;
        for (int i = 0; i < n; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0;
                double p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double step = p1 / dp;
                x -= step;
                if (std::abs(step) < 1e-16) {
                    break;
                }
            }
            r.nodes[i] = x;
            r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        return r;
    }();
    return rule;
}

double solar_shape(double t, const SolarProfile& profile) noexcept {
    const double s = std::sin(2.0 * std::numbers::pi * t / profile.period);
    return profile.peak_power * std::pow(std::max(0.0, s), profile.shape_exponent);
}

double base_load_of(const LoadPolicy& policy) noexcept {
    return std::visit([](const auto& p) { return p.base_load; }, policy);
}

void require(bool ok, const char* what) {
    if (!ok) {
        throw ConfigError(what);
    }
}

}  // namespace

std::string_view to_string(CaseId id) noexcept {
    switch (id) {
        case CaseId::passive:
            return "passive";
        case CaseId::reactive:
            return "reactive";
        case CaseId::anticipatory:
            return "anticipatory";
    }
    return "unknown";
}

CaseId parse_case(std::string_view name) {
    for (CaseId id : all_cases) {
        if (to_string(id) == name) {
            return id;
        }
    }
    throw ParameterError("unknown case '" + std::string(name) +
                         "' (expected passive, reactive or anticipatory)");
}

void EnergyParams::validate() const {
    require(std::isfinite(capacity) && std::isfinite(critical_level) &&
                std::isfinite(reference_level) && std::isfinite(initial_level),
            "energy levels must be finite");
    require(0.0 <= critical_level && critical_level < reference_level && reference_level <= capacity,
            "energy levels must satisfy 0 <= E_min < E_ref <= E_max");
    require(critical_level <= initial_level && initial_level <= capacity,
            "initial energy must lie in [E_min, E_max]");
}

void SolarProfile::validate() const {
    require(std::isfinite(peak_power) && peak_power > 0.0, "solar peak power must be positive");
    require(std::isfinite(period) && period > 0.0, "solar period must be positive");
    require(std::isfinite(shape_exponent) && (shape_exponent == 0.0 || shape_exponent >= 1.0),
            "solar shape exponent must be >= 1 (or 0 for a flat profile)");
}

CaseId case_of(const LoadPolicy& policy) noexcept {
    return std::visit(overloaded{
                          [](const PassivePolicy&) { return CaseId::passive; },
                          [](const ReactivePolicy&) { return CaseId::reactive; },
                          [](const AnticipatoryPolicy&) { return CaseId::anticipatory; },
                      },
                      policy);
}

void validate_policy(const LoadPolicy& policy, const EnergyParams& energy) {
    require(std::isfinite(base_load_of(policy)) && base_load_of(policy) > 0.0,
            "base load P0 must be positive");
    std::visit(overloaded{
                   [](const PassivePolicy&) {},
                   [&](const ReactivePolicy& p) {
                       require(p.shed_fraction >= 0.0 && p.shed_fraction < 1.0,
                               "reactive shed_fraction must lie in [0, 1)");
                       require(energy.critical_level <= p.engage_below &&
                                   p.engage_below < p.release_above &&
                                   p.release_above <= energy.capacity,
                               "reactive thresholds must satisfy E_min <= E_on < E_off <= E_max");
                   },
                   [](const AnticipatoryPolicy& p) {
                       require(p.shed_fraction >= 0.0 && p.shed_fraction < 1.0,
                               "anticipatory shed_fraction must lie in [0, 1)");
                       require(std::isfinite(p.horizon) && p.horizon > 0.0,
                               "anticipatory horizon must be positive");
                       require(std::isfinite(p.target_level), "anticipatory target must be finite");
                       require(std::isfinite(p.gain) && p.gain >= 0.0,
                               "anticipatory gain k_p must be non-negative");
                   },
               },
               policy);
}

LoadPolicy PolicySet::for_case(CaseId id) const {
    switch (id) {
        case CaseId::passive:
            return passive;
        case CaseId::reactive:
            return reactive;
        case CaseId::anticipatory:
            return anticipatory;
    }
    return passive;
}

void ScenarioConfig::validate() const {
    energy.validate();
    solar.validate();
    for (CaseId id : all_cases) {
        validate_policy(policies.for_case(id), energy);
    }
    try {
        disturbance.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    if (disturbance.kind == DisturbanceSignal::Kind::pulse) {
        require(disturbance.magnitude >= 0.0 && disturbance.magnitude <= 1.0,
                "disturbance magnitude must lie in [0, 1]");
        require(disturbance.onset >= integrator.t_start &&
                    disturbance.onset + disturbance.duration <= integrator.t_end,
                "disturbance window must lie inside [t_start, t_end]");
    }
    integrator.step_count();
    metrics.validate();
}

double solar_input(double t, const SolarProfile& profile, const DisturbanceSignal& disturbance) noexcept {
    return solar_shape(t, profile) * evaluate_disturbance(disturbance, t, 1.0);
}

double solar_energy(const SolarProfile& profile, double from, double to) {
    if (to < from) {
        return -solar_energy(profile, to, from);
    }
    if (profile.shape_exponent == 0.0) {
        return profile.peak_power * (to - from);
    }
    // Integrate piecewise between zero crossings, where the clamped sine is
    // smooth.
    const GaussLegendre16& rule = gauss_legendre16();
    const double half = 0.5 * profile.period;
    double total = 0.0;
    double lo = from;
    while (lo < to) {
        double next_crossing = (std::floor(lo / half) + 1.0) * half;
        if (next_crossing <= lo) {
            next_crossing += half;
        }
        const double hi = std::min(next_crossing, to);
        const double mid = 0.5 * (lo + hi);
        if (std::sin(2.0 * std::numbers::pi * mid / profile.period) > 0.0) {
            const double half_width = 0.5 * (hi - lo);
            double piece = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                piece += rule.weights[i] * solar_shape(mid + half_width * rule.nodes[i], profile);
            }
            total += half_width * piece;
        }
        lo = hi;
    }
    return total;
}

double risk_of_energy(double energy, const RiskMap& map) noexcept {
    const double r = (map.reference_level - energy) / (map.reference_level - map.critical_level);
    return std::clamp(r, 0.0, 1.0);
}

bool shedding_decision(double t, double energy, bool prev_shedding, const LoadPolicy& policy,
                       const SolarProfile& solar) {
    return std::visit(overloaded{
                          [](const PassivePolicy&) { return false; },
                          [&](const ReactivePolicy& p) {
                              if (energy < p.engage_below) {
                                  return true;
                              }
                              if (energy > p.release_above) {
                                  return false;
                              }
                              return prev_shedding;
                          },
                          [&](const AnticipatoryPolicy& p) {
                              const double forecast = energy + solar_energy(solar, t, t + p.horizon) -
                                                      p.base_load * p.horizon;
                              return forecast < p.target_level;
                          },
                      },
                      policy);
}

double delivered_load(double energy, bool shedding, const LoadPolicy& policy) noexcept {
    return std::visit(overloaded{
                          [](const PassivePolicy& p) { return p.base_load; },
                          [&](const ReactivePolicy& p) {
                              return shedding ? p.base_load * (1.0 - p.shed_fraction) : p.base_load;
                          },
                          [&](const AnticipatoryPolicy& p) {
                              double load = shedding ? p.base_load * (1.0 - p.shed_fraction) : p.base_load;
                              load -= p.gain * std::max(0.0, p.target_level - energy);
                              return std::clamp(load, p.base_load * (1.0 - p.shed_fraction), p.base_load);
                          },
                      },
                      policy);
}

LoadDecision load_power(double t, double energy, bool prev_shedding, const LoadPolicy& policy,
                        const SolarProfile& solar) {
    const bool shedding = shedding_decision(t, energy, prev_shedding, policy, solar);
    return {delivered_load(energy, shedding, policy), shedding};
}

DynamicalSystem build_system(const ScenarioConfig& config, const LoadPolicy& policy) {
    config.validate();
    validate_policy(policy, config.energy);
    const SolarProfile solar = config.solar;
    const double capacity = config.energy.capacity;
    const RiskMap risk_map = RiskMap::from(config.energy);

    DynamicalSystem system;
    system.dimension = 1;
    system.disturbance_neutral = 1.0;
    system.state_names = {"E"};
    system.rhs = [solar, policy, capacity](double t, const StateVector& x, double d, Mode mode) {
        const double e = x[0];
        double net = solar_shape(t, solar) * d - delivered_load(e, mode != 0, policy);
        if ((e >= capacity && net > 0.0) || (e <= 0.0 && net < 0.0)) {
            net = 0.0;
        }
        return StateVector{net};
    };
    if (!std::holds_alternative<PassivePolicy>(policy)) {
        system.update_mode = [solar, policy](double t, const StateVector& x, Mode previous) -> Mode {
            return shedding_decision(t, x[0], previous != 0, policy, solar) ? 1 : 0;
        };
    }
    system.project = [capacity](StateVector& x) {
        const double clamped = std::clamp(x[0], 0.0, capacity);
        const bool changed = clamped != x[0];
        x[0] = clamped;
        return changed;
    };
    system.observables.push_back({"P_in", [solar](const SamplePoint& p) {
                                      return solar_shape(p.t, solar) * p.disturbance;
                                  }});
    // At a mode switch the load jumps; record the mean of the one-sided
    // values so trapezoidal sums match what the integrator applied.
    system.observables.push_back({"P_load", [policy](const SamplePoint& p) {
                                      const double before = delivered_load(p.x[0], p.mode_before != 0, policy);
                                      if (p.mode_before == p.mode_after) {
                                          return before;
                                      }
                                      const double after = delivered_load(p.x[0], p.mode_after != 0, policy);
                                      return 0.5 * (before + after);
                                  }});
    system.observables.push_back(
        {"r", [risk_map](const SamplePoint& p) { return risk_of_energy(p.x[0], risk_map); }});
    return system;
}

DynamicalSystem build_case(CaseId id, const ScenarioConfig& config) {
    return build_system(config, config.policies.for_case(id));
}

DynamicalSystem build_case(CaseId id, const ScenarioConfig& config, const LoadPolicy& policy) {
    if (case_of(policy) != id) {
        throw ConfigError("policy of type '" + std::string(to_string(case_of(policy))) +
                          "' does not match case '" + std::string(to_string(id)) + "'");
    }
    return build_system(config, policy);
}

CaseRun run_policy(const LoadPolicy& policy, const ScenarioConfig& config) {
    const DynamicalSystem system = build_system(config, policy);
    IntegrationResult result = integrate(system, StateVector{config.energy.initial_level},
                                         config.disturbance, config.integrator);
    const Trajectory& energy = result.states.front();
    bool touched_bound = false;
    for (double e : energy.values()) {
        if (e <= 0.0 || e >= config.energy.capacity) {
            touched_bound = true;
            break;
        }
    }
    const double t0 = config.disturbance.kind == DisturbanceSignal::Kind::pulse
                          ? config.disturbance.onset
                          : config.integrator.t_start;
    const Trajectory& risk = result.observable("r");
    ResilienceReport report = assemble_report(risk, t0, config.metrics);
    return CaseRun{case_of(policy),
                   energy,
                   result.observable("P_in"),
                   result.observable("P_load"),
                   risk,
                   std::move(result.modes),
                   std::move(report),
                   touched_bound || result.projections > 0,
                   std::move(result.warnings)};
}

CaseRun run_case(CaseId id, const ScenarioConfig& config) {
    return run_policy(config.policies.for_case(id), config);
}

ComparisonResult compare_cases(const ScenarioConfig& config) {
    config.validate();
    std::vector<std::future<CaseRun>> pending;
    for (CaseId id : all_cases) {
        pending.push_back(std::async(std::launch::async, [id, &config] { return run_case(id, config); }));
    }
    ComparisonResult out;
    for (auto& f : pending) {
        out.runs.push_back(f.get());
    }
    const ResilienceReport& passive = out.runs[0].report;
    const ResilienceReport& reactive = out.runs[1].report;
    const ResilienceReport& anticipatory = out.runs[2].report;
    out.peak_ordering = passive.r0 >= reactive.r0 && reactive.r0 >= anticipatory.r0;
    out.impact_ordering = passive.impact_numeric > reactive.impact_numeric &&
                          reactive.impact_numeric > anticipatory.impact_numeric;
    return out;
}

}  // namespace riskdyn
