#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "riskdyn/energy_scenario.hpp"
#include "riskdyn/metrics.hpp"
#include "riskdyn/trajectory.hpp"

namespace riskdyn {

inline constexpr const char* artifact_version = "0.1.0";

/// Columnar time series as stored on disk: a `t` column followed by named
/// value columns. Times are kept verbatim so a read/write cycle is lossless.
struct TrajectoryTable {
    std::vector<double> times;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data;  // one vector per column

    static TrajectoryTable from_trajectories(const std::vector<std::string>& names,
                                             const std::vector<Trajectory>& series);

    /// Uniform grid implied by the time column.
    TimeGrid grid() const;
    bool has_column(const std::string& name) const;
    /// Throws ParameterError when the column does not exist.
    Trajectory column(const std::string& name) const;

    bool operator==(const TrajectoryTable&) const = default;
};

/// Columns t, E, P_in, P_load, r.
TrajectoryTable table_from_run(const CaseRun& run);

void write_trajectory_csv(std::ostream& out, const TrajectoryTable& table);
/// Throws ParseError (with line number) on ragged rows, non-numeric or
/// non-finite cells, non-increasing or non-uniform time.
TrajectoryTable read_trajectory_csv(std::istream& in);

TrajectoryTable load_trajectory_csv(const std::string& path);
void save_trajectory_csv(const std::string& path, const TrajectoryTable& table);

struct ReportProvenance {
    std::string source;  // case name or input file
    std::string config_digest;
    bool operator==(const ReportProvenance&) const = default;
};

struct ReportDocument {
    ReportProvenance provenance;
    ResilienceReport report;
    bool operator==(const ReportDocument&) const = default;
};

std::string serialize_report(const ReportDocument& doc);
ReportDocument parse_report(std::istream& in);

struct PlotSeries {
    std::string label;
    std::optional<Trajectory> energy;
    Trajectory risk;
};

struct PlotWindow {
    double start;
    double end;
};

/// SVG with a risk panel and, when any series carries energy, an energy panel
/// above it. All series must share one time grid.
void emit_plot(std::ostream& out, const std::vector<PlotSeries>& series,
               std::optional<PlotWindow> disturbance = std::nullopt);

}  // namespace riskdyn
