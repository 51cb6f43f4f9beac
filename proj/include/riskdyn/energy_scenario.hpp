#pragma once

#include <array>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "riskdyn/dynamics.hpp"
#include "riskdyn/metrics.hpp"
#include "riskdyn/trajectory.hpp"

namespace riskdyn {

enum class CaseId { passive, reactive, anticipatory };

inline constexpr std::array<CaseId, 3> all_cases{CaseId::passive, CaseId::reactive,
                                                 CaseId::anticipatory};

std::string_view to_string(CaseId id) noexcept;
/// Throws ParameterError for unknown names.
CaseId parse_case(std::string_view name);

/// Storage levels in joules.
struct EnergyParams {
    double capacity = 100.0;        // E_max
    double critical_level = 10.0;   // E_min
    double reference_level = 60.0;  // E_ref, where risk starts to rise
    double initial_level = 70.0;    // E_init

    void validate() const;
    bool operator==(const EnergyParams&) const = default;
};

/// P_in(t) = peak_power * max(0, sin(2 pi t / period))^shape_exponent.
/// A shape exponent of 0 gives a flat profile at peak_power.
struct SolarProfile {
    double peak_power = 8.0;
    double period = 12.0;
    double shape_exponent = 2.0;

    void validate() const;
    bool operator==(const SolarProfile&) const = default;
};

/// Piecewise-linear risk map: 1 at or below the critical level, 0 at or above
/// the reference level.
struct RiskMap {
    double reference_level;
    double critical_level;

    static RiskMap from(const EnergyParams& energy) {
        return {energy.reference_level, energy.critical_level};
    }
};

struct PassivePolicy {
    double base_load = 1.8;
    bool operator==(const PassivePolicy&) const = default;
};

/// Sheds when storage falls below engage_below and holds the shed until
/// storage rises above release_above.
struct ReactivePolicy {
    double base_load = 1.8;
    double engage_below = 55.0;
    double release_above = 65.0;
    double shed_fraction = 0.5;
    bool operator==(const ReactivePolicy&) const = default;
};

/// Sheds ahead of time when the storage forecast over `horizon` falls below
/// target_level, and trims load in proportion to the shortfall below target.
struct AnticipatoryPolicy {
    double base_load = 1.8;
    double horizon = 6.0;
    double target_level = 65.0;
    double shed_fraction = 0.5;
    double gain = 0.1;  // W per J of shortfall
    bool operator==(const AnticipatoryPolicy&) const = default;
};

using LoadPolicy = std::variant<PassivePolicy, ReactivePolicy, AnticipatoryPolicy>;

CaseId case_of(const LoadPolicy& policy) noexcept;
void validate_policy(const LoadPolicy& policy, const EnergyParams& energy);

struct PolicySet {
    PassivePolicy passive;
    ReactivePolicy reactive;
    AnticipatoryPolicy anticipatory;

    LoadPolicy for_case(CaseId id) const;
    bool operator==(const PolicySet&) const = default;
};

struct ScenarioConfig {
    EnergyParams energy;
    SolarProfile solar;
    PolicySet policies;
    /// Multiplies P_in; neutral value 1.
    DisturbanceSignal disturbance = DisturbanceSignal::pulse(18.0, 24.0, 0.3);
    IntegratorConfig integrator{0.01, 0.0, 144.0};
    MetricsConfig metrics;

    void validate() const;
    bool operator==(const ScenarioConfig&) const = default;
};

double solar_input(double t, const SolarProfile& profile, const DisturbanceSignal& disturbance) noexcept;

/// Undisturbed solar energy delivered over [from, to].
double solar_energy(const SolarProfile& profile, double from, double to);

double risk_of_energy(double energy, const RiskMap& map) noexcept;

struct LoadDecision {
    double power;
    bool shedding;
};

/// Discrete shedding decision taken at the start of a step.
bool shedding_decision(double t, double energy, bool prev_shedding, const LoadPolicy& policy,
                       const SolarProfile& solar);

/// Load drawn for a given shedding state; always within
/// [base_load * (1 - shed_fraction), base_load].
double delivered_load(double energy, bool shedding, const LoadPolicy& policy) noexcept;

LoadDecision load_power(double t, double energy, bool prev_shedding, const LoadPolicy& policy,
                        const SolarProfile& solar);

/// One-dimensional storage system dE/dt = P_in(t) d(t) - P_load(t, E), with
/// E held in [0, capacity]. Observables: P_in, P_load, r.
DynamicalSystem build_system(const ScenarioConfig& config, const LoadPolicy& policy);
DynamicalSystem build_case(CaseId id, const ScenarioConfig& config);
/// Throws ConfigError when the policy variant does not belong to `id`.
DynamicalSystem build_case(CaseId id, const ScenarioConfig& config, const LoadPolicy& policy);

struct CaseRun {
    CaseId case_id;
    Trajectory energy;
    Trajectory solar_input;
    Trajectory load;
    Trajectory risk;
    std::vector<Mode> shedding;
    ResilienceReport report;
    /// True when the storage touched either bound during the run.
    bool saturated = false;
    std::vector<std::string> warnings;
};

CaseRun run_case(CaseId id, const ScenarioConfig& config);
CaseRun run_policy(const LoadPolicy& policy, const ScenarioConfig& config);

struct ComparisonResult {
    std::vector<CaseRun> runs;  // passive, reactive, anticipatory
    bool peak_ordering = false;    // r0 non-increasing across cases
    bool impact_ordering = false;  // impact strictly decreasing across cases

    const CaseRun& run(CaseId id) const { return runs.at(static_cast<std::size_t>(id)); }
};

ComparisonResult compare_cases(const ScenarioConfig& config);

}  // namespace riskdyn
