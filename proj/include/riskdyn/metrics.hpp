#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "riskdyn/trajectory.hpp"

namespace riskdyn {

enum class BaselineMode { zero, steady_state };

struct MetricsConfig {
    BaselineMode baseline_mode = BaselineMode::steady_state;
    /// Used only in steady_state mode.
    double tail_fraction = 0.25;
    /// Recovery samples are fitted while deviation > fit_floor_ratio * r0.
    double fit_floor_ratio = 0.05;
    std::size_t min_fit_samples = 10;
    bool tail_correction = true;
    /// Absolute end time of the impact integral; end of trajectory if empty.
    std::optional<double> horizon;
    /// Half-width of the recovery band around the baseline (risk units).
    double recovery_band = 0.02;

    void validate() const;
    bool operator==(const MetricsConfig&) const = default;
};

struct PeakDeviation {
    double r0;
    double t_peak;
    std::size_t index;
};

struct DampingFit {
    double lambda_hat;
    double fit_quality;  // R^2 of the log-linear regression
    std::size_t samples;
};

struct ImpactEstimate {
    double total;
    double quadrature;
    double tail;
    bool tail_applied;
};

/// Realisation of the resilience functional over one risk trajectory. Metrics
/// that could not be computed are empty and carry a reason.
struct ResilienceReport {
    double t0 = 0.0;
    double baseline = 0.0;
    double r0 = 0.0;
    double t_peak = 0.0;

    std::optional<double> lambda_hat;
    std::optional<double> fit_quality;
    std::size_t fit_samples = 0;
    std::string damping_absent_reason;

    double impact_numeric = 0.0;
    double impact_quadrature = 0.0;
    double impact_tail = 0.0;
    bool tail_applied = false;
    std::string tail_skipped_reason;

    /// r0 / lambda_hat, present exactly when lambda_hat is.
    std::optional<double> impact_closed_form;

    std::optional<double> recovery_time;

    bool operator==(const ResilienceReport&) const = default;
};

/// Largest deviation above baseline at or after t0, clamped below at zero.
/// Ties resolve to the earliest sample.
PeakDeviation peak_deviation(const Trajectory& traj, double t0, double baseline);

/// Effective damping from an ordinary least-squares fit of
/// ln(value - baseline) against time over the recovery segment that starts at
/// t_peak and ends before the deviation first drops to the floor.
DampingFit estimate_damping(const Trajectory& traj, double t_peak, double baseline,
                            const MetricsConfig& config);

/// Trapezoidal integral of max(value - baseline, 0) from t0 to the horizon,
/// plus deviation(horizon) / lambda_hat when tail correction is enabled and a
/// damping estimate is supplied.
ImpactEstimate cumulative_impact(const Trajectory& traj, double t0, double baseline,
                                 const MetricsConfig& config,
                                 std::optional<double> lambda_hat = std::nullopt);

double closed_form_impact(double r0, double lambda);

/// First sample time at or after `from` after which |value - baseline| stays
/// within band through the end; empty when the trajectory never settles.
std::optional<double> recovery_time(const Trajectory& traj, double from, double baseline,
                                    double band);

double resolve_baseline(const Trajectory& traj, const MetricsConfig& config);

ResilienceReport assemble_report(const Trajectory& traj, double t0, const MetricsConfig& config);

}  // namespace riskdyn
