#include "riskdyn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "riskdyn/errors.hpp"

namespace riskdyn {

namespace {

std::size_t onset_index(const Trajectory& traj, double t0) {
    const TimeGrid& grid = traj.grid();
    if (!std::isfinite(t0)) {
        throw ParameterError("onset time must be finite");
    }
    if (t0 < grid.t_start() - 1e-9 * grid.dt()) {
        std::ostringstream msg;
        msg << "onset t0=" << t0 << " precedes the trajectory start " << grid.t_start();
        throw ParameterError(msg.str());
    }
    const std::size_t index = grid.first_index_at_or_after(t0);
    if (index >= grid.size()) {
        std::ostringstream msg;
        msg << "onset t0=" << t0 << " lies beyond the trajectory end " << grid.t_end();
        throw ParameterError(msg.str());
    }
    return index;
}

}  // namespace

void MetricsConfig::validate() const {
    if (baseline_mode == BaselineMode::steady_state && !(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
        throw ConfigError("tail_fraction must lie in (0, 1]");
    }
    if (!(fit_floor_ratio > 0.0 && fit_floor_ratio < 1.0)) {
        throw ConfigError("fit_floor_ratio must lie in (0, 1)");
    }
    if (min_fit_samples < 3) {
        throw ConfigError("min_fit_samples must be at least 3");
    }
    if (horizon && !std::isfinite(*horizon)) {
        throw ConfigError("horizon must be finite");
    }
    if (!(recovery_band > 0.0) || !std::isfinite(recovery_band)) {
        throw ConfigError("recovery_band must be positive");
    }
}

PeakDeviation peak_deviation(const Trajectory& traj, double t0, double baseline) {
    const std::size_t first = onset_index(traj, t0);
    std::size_t best = first;
    double best_dev = traj[first] - baseline;
    for (std::size_t k = first + 1; k < traj.size(); ++k) {
        const double dev = traj[k] - baseline;
        if (dev > best_dev) {
            best_dev = dev;
            best = k;
        }
    }
    return {std::max(best_dev, 0.0), traj.time(best), best};
}

DampingFit estimate_damping(const Trajectory& traj, double t_peak, double baseline,
                            const MetricsConfig& config) {
    config.validate();
    const std::size_t peak = onset_index(traj, t_peak);
    const double r0 = traj[peak] - baseline;
    if (!(r0 > 0.0)) {
        throw ParameterError("damping estimation needs a positive peak deviation");
    }
    const double floor = config.fit_floor_ratio * r0;

    // Regress on offsets (k - peak) * dt so the fit is exactly invariant
    // under shifts of the time axis.
    std::size_t end = peak;
    while (end < traj.size() && traj[end] - baseline > floor) {
        ++end;
    }
    const std::size_t n = end - peak;
    if (n < config.min_fit_samples) {
        std::ostringstream msg;
        msg << "recovery segment holds " << n << " samples above the fit floor, need "
            << config.min_fit_samples;
        throw InsufficientRecoveryData(msg.str());
    }

    const double dt = traj.grid().dt();
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t k = peak; k < end; ++k) {
        mean_x += static_cast<double>(k - peak) * dt;
        mean_y += std::log(traj[k] - baseline);
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t k = peak; k < end; ++k) {
        const double dx = static_cast<double>(k - peak) * dt - mean_x;
        const double dy = std::log(traj[k] - baseline) - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    const double slope = sxy / sxx;
    if (!(-slope > 0.0)) {
        throw NoDamping("log-deviation does not decay over the recovery segment");
    }
    double r_squared = 1.0;
    if (syy > 0.0) {
        const double ss_res = std::max(syy - slope * sxy, 0.0);
        r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
    }
    return {-slope, r_squared, n};
}

ImpactEstimate cumulative_impact(const Trajectory& traj, double t0, double baseline,
                                 const MetricsConfig& config, std::optional<double> lambda_hat) {
    config.validate();
    const std::size_t first = onset_index(traj, t0);
    std::size_t last = traj.size() - 1;
    if (config.horizon) {
        const TimeGrid& grid = traj.grid();
        if (*config.horizon < traj.time(first)) {
            throw ParameterError("impact horizon precedes the onset");
        }
        if (*config.horizon > grid.t_end() + 1e-9 * grid.dt()) {
            throw ParameterError("impact horizon lies beyond the trajectory end");
        }
        const double position = (*config.horizon - grid.t_start()) / grid.dt();
        last = static_cast<std::size_t>(std::floor(position + 1e-9));
    }

    auto exposure = [&](std::size_t k) { return std::max(traj[k] - baseline, 0.0); };
    double sum = 0.0;
    for (std::size_t k = first; k < last; ++k) {
        sum += exposure(k) + exposure(k + 1);
    }
    ImpactEstimate out{};
    out.quadrature = 0.5 * traj.grid().dt() * sum;
    if (config.tail_correction && lambda_hat && *lambda_hat > 0.0) {
        out.tail = exposure(last) / *lambda_hat;
        out.tail_applied = true;
    }
    out.total = out.quadrature + out.tail;
    return out;
}

double closed_form_impact(double r0, double lambda) {
    if (!(lambda > 0.0)) {
        throw ParameterError("closed-form impact requires lambda > 0");
    }
    if (!(r0 >= 0.0)) {
        throw ParameterError("closed-form impact requires r0 >= 0");
    }
    return r0 / lambda;
}

std::optional<double> recovery_time(const Trajectory& traj, double from, double baseline,
                                    double band) {
    if (!(band > 0.0)) {
        throw ParameterError("recovery band must be positive");
    }
    const std::size_t first = onset_index(traj, from);
    std::size_t k = traj.size();
    while (k > first && std::abs(traj[k - 1] - baseline) <= band) {
        --k;
    }
    if (k == traj.size()) {
        return std::nullopt;
    }
    return traj.time(k);
}

double resolve_baseline(const Trajectory& traj, const MetricsConfig& config) {
    if (config.baseline_mode == BaselineMode::zero) {
        return 0.0;
    }
    return estimate_steady_state(traj, config.tail_fraction).level;
}

ResilienceReport assemble_report(const Trajectory& traj, double t0, const MetricsConfig& config) {
    config.validate();
    ResilienceReport report;
    report.t0 = t0;
    report.baseline = resolve_baseline(traj, config);

    const PeakDeviation peak = peak_deviation(traj, t0, report.baseline);
    report.r0 = peak.r0;
    report.t_peak = peak.t_peak;

    if (peak.r0 > 0.0) {
        try {
            const DampingFit fit = estimate_damping(traj, peak.t_peak, report.baseline, config);
            report.lambda_hat = fit.lambda_hat;
            report.fit_quality = fit.fit_quality;
            report.fit_samples = fit.samples;
        } catch (const InsufficientRecoveryData& e) {
            report.damping_absent_reason = std::string("insufficient recovery data: ") + e.what();
        } catch (const NoDamping& e) {
            report.damping_absent_reason = std::string("no damping: ") + e.what();
        }
    } else {
        report.damping_absent_reason = "no deviation above baseline";
    }

    const ImpactEstimate impact =
        cumulative_impact(traj, t0, report.baseline, config, report.lambda_hat);
    report.impact_numeric = impact.total;
    report.impact_quadrature = impact.quadrature;
    report.impact_tail = impact.tail;
    report.tail_applied = impact.tail_applied;
    if (!impact.tail_applied) {
        report.tail_skipped_reason =
            config.tail_correction ? "damping estimate unavailable" : "tail correction disabled";
    }

    if (report.lambda_hat) {
        report.impact_closed_form = closed_form_impact(report.r0, *report.lambda_hat);
    }

    report.recovery_time =
        recovery_time(traj, report.t_peak, report.baseline, config.recovery_band);
    return report;
}

}  // namespace riskdyn
