#include "riskdyn/io_formats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <sstream>

#include "riskdyn/errors.hpp"
#include "riskdyn/keyvalue.hpp"

namespace riskdyn {

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        cells.push_back(line.substr(pos, comma == std::string_view::npos ? comma : comma - pos));
        if (comma == std::string_view::npos) {
            return cells;
        }
        pos = comma + 1;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

constexpr double grid_tolerance = 1e-9;

}  // namespace

TrajectoryTable TrajectoryTable::from_trajectories(const std::vector<std::string>& names,
                                                   const std::vector<Trajectory>& series) {
    if (names.size() != series.size() || series.empty()) {
        throw ParameterError("trajectory table needs one name per series and at least one series");
    }
    TrajectoryTable table;
    const TimeGrid& grid = series.front().grid();
    for (const auto& s : series) {
        if (!(s.grid() == grid)) {
            throw ParameterError("trajectory table series do not share a time grid");
        }
    }
    table.times.reserve(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        table.times.push_back(grid.time(k));
    }
    table.columns = names;
    for (const auto& s : series) {
        table.data.emplace_back(s.values().begin(), s.values().end());
    }
    return table;
}

TimeGrid TrajectoryTable::grid() const {
    if (times.size() < 2) {
        throw ConstructionError("a trajectory needs at least two samples");
    }
    const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    return {times.front(), dt, times.size()};
}

bool TrajectoryTable::has_column(const std::string& name) const {
    for (const auto& c : columns) {
        if (c == name) {
            return true;
        }
    }
    return false;
}

Trajectory TrajectoryTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) {
            return {grid(), data[i]};
        }
    }
    throw ParameterError("no column '" + name + "' in trajectory table");
}

TrajectoryTable table_from_run(const CaseRun& run) {
    return TrajectoryTable::from_trajectories({"E", "P_in", "P_load", "r"},
                                              {run.energy, run.solar_input, run.load, run.risk});
}

void write_trajectory_csv(std::ostream& out, const TrajectoryTable& table) {
    out << "t";
    for (const auto& c : table.columns) {
        out << ',' << c;
    }
    out << '\n';
    for (std::size_t k = 0; k < table.times.size(); ++k) {
        out << format_g17(table.times[k]);
        for (const auto& col : table.data) {
            out << ',' << format_g17(col[k]);
        }
        out << '\n';
    }
}

TrajectoryTable read_trajectory_csv(std::istream& in) {
    TrajectoryTable table;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view view = trim(line);
        if (view.empty() || view.front() == '#') {
            continue;
        }
        const auto cells = split_commas(view);
        if (!have_header) {
            if (trim(cells.front()) != "t") {
                throw ParseError(line_no, "first column must be 't'");
            }
            if (cells.size() < 2) {
                throw ParseError(line_no, "header has no value columns");
            }
            for (std::size_t i = 1; i < cells.size(); ++i) {
                const std::string name(trim(cells[i]));
                if (name.empty()) {
                    throw ParseError(line_no, "empty column name");
                }
                if (table.has_column(name) || name == "t") {
                    throw ParseError(line_no, "duplicate column '" + name + "'");
                }
                table.columns.push_back(name);
            }
            table.data.resize(table.columns.size());
            have_header = true;
            continue;
        }
        if (cells.size() != table.columns.size() + 1) {
            throw ParseError(line_no, "expected " + std::to_string(table.columns.size() + 1) +
                                          " cells, found " + std::to_string(cells.size()));
        }
        std::vector<double> row(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (!parse_finite_double(trim(cells[i]), row[i])) {
                const std::string name = i == 0 ? "t" : table.columns[i - 1];
                throw ParseError(line_no, "column '" + name + "': '" + std::string(trim(cells[i])) +
                                              "' is not a finite number");
            }
        }
        if (!table.times.empty()) {
            const double step = row[0] - table.times.back();
            if (!(step > 0.0)) {
                throw ParseError(line_no, "time is not strictly increasing");
            }
            if (table.times.size() >= 2) {
                const double first = table.times[1] - table.times[0];
                const double rounding = 8.0 * std::numeric_limits<double>::epsilon() *
                                        std::max(std::abs(row[0]), std::abs(table.times.front()));
                if (std::abs(step - first) > grid_tolerance * first + rounding) {
                    throw ParseError(line_no, "time step is not uniform");
                }
            }
        }
        table.times.push_back(row[0]);
        for (std::size_t i = 1; i < row.size(); ++i) {
            table.data[i - 1].push_back(row[i]);
        }
    }
    if (!have_header) {
        throw ParseError(std::max<std::size_t>(line_no, 1), "missing header");
    }
    if (table.times.size() < 2) {
        throw ParseError(line_no, "a trajectory needs at least two samples");
    }
    return table;
}

TrajectoryTable load_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read '" + path + "'");
    }
    try {
        return read_trajectory_csv(in);
    } catch (const ParseError& e) {
        throw ParseError(e.line(), path + ": " + e.detail());
    }
}

void save_trajectory_csv(const std::string& path, const TrajectoryTable& table) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write '" + path + "'");
    }
    write_trajectory_csv(out, table);
    if (!out) {
        throw IoError("write to '" + path + "' failed");
    }
}

namespace {

constexpr std::string_view absent_prefix = "absent";
constexpr const char* unsettled_reason = "does not settle within the recovery band";

std::string absent(const std::string& reason) {
    return reason.empty() ? std::string(absent_prefix) : std::string(absent_prefix) + ": " + reason;
}

std::string optional_value(const std::optional<double>& v, const std::string& reason) {
    return v ? format_g17(*v) : absent(reason);
}

double read_number(const KeyValueDocument& doc, std::string_view key) {
    const auto& e = doc.require("report", key);
    double v = 0.0;
    if (!parse_finite_double(e.value, v)) {
        throw ParseError(e.line, std::string(key) + ": expected a finite number");
    }
    return v;
}

std::optional<double> read_optional(const KeyValueDocument& doc, std::string_view key) {
    const auto& e = doc.require("report", key);
    if (e.value.starts_with(absent_prefix)) {
        return std::nullopt;
    }
    double v = 0.0;
    if (!parse_finite_double(e.value, v)) {
        throw ParseError(e.line, std::string(key) + ": expected a finite number or 'absent'");
    }
    return v;
}

bool read_bool(const KeyValueDocument& doc, std::string_view key) {
    const auto& e = doc.require("report", key);
    if (e.value == "true") {
        return true;
    }
    if (e.value == "false") {
        return false;
    }
    throw ParseError(e.line, std::string(key) + ": expected true or false");
}

}  // namespace

std::string serialize_report(const ReportDocument& doc) {
    const ResilienceReport& r = doc.report;
    KeyValueDocument kv;
    kv.set("provenance", "artifact_version", artifact_version);
    kv.set("provenance", "source", doc.provenance.source);
    kv.set("provenance", "config_digest", doc.provenance.config_digest);

    kv.set("report", "t0_s", format_g17(r.t0));
    kv.set("report", "baseline", format_g17(r.baseline));
    kv.set("report", "r0", format_g17(r.r0));
    kv.set("report", "t_peak_s", format_g17(r.t_peak));
    kv.set("report", "lambda_hat_per_s", optional_value(r.lambda_hat, r.damping_absent_reason));
    kv.set("report", "fit_quality", optional_value(r.fit_quality, r.damping_absent_reason));
    kv.set("report", "fit_samples", std::to_string(r.fit_samples));
    kv.set("report", "damping_absent_reason", r.damping_absent_reason);
    kv.set("report", "impact_numeric", format_g17(r.impact_numeric));
    kv.set("report", "impact_quadrature", format_g17(r.impact_quadrature));
    kv.set("report", "impact_tail", format_g17(r.impact_tail));
    kv.set("report", "tail_applied", r.tail_applied ? "true" : "false");
    kv.set("report", "tail_skipped_reason", r.tail_skipped_reason);
    kv.set("report", "impact_closed_form", optional_value(r.impact_closed_form, r.damping_absent_reason));
    kv.set("report", "recovery_time_s", optional_value(r.recovery_time, unsettled_reason));

    std::ostringstream out;
    kv.write(out, {"riskdyn resilience report", "times in s, risk dimensionless, impact in s"});
    return out.str();
}

ReportDocument parse_report(std::istream& in) {
    const KeyValueDocument kv = KeyValueDocument::parse(in);
    const auto& version = kv.require("provenance", "artifact_version");
    if (version.value != artifact_version) {
        throw ParseError(version.line, "unsupported artifact_version '" + version.value + "'");
    }
    ReportDocument doc;
    doc.provenance.source = kv.require("provenance", "source").value;
    doc.provenance.config_digest = kv.require("provenance", "config_digest").value;

    ResilienceReport& r = doc.report;
    r.t0 = read_number(kv, "t0_s");
    r.baseline = read_number(kv, "baseline");
    r.r0 = read_number(kv, "r0");
    r.t_peak = read_number(kv, "t_peak_s");
    r.lambda_hat = read_optional(kv, "lambda_hat_per_s");
    r.fit_quality = read_optional(kv, "fit_quality");
    const auto& samples = kv.require("report", "fit_samples");
    double n = 0.0;
    if (!parse_finite_double(samples.value, n) || n < 0.0 || n != std::floor(n)) {
        throw ParseError(samples.line, "fit_samples: expected a non-negative integer");
    }
    r.fit_samples = static_cast<std::size_t>(n);
    r.damping_absent_reason = kv.require("report", "damping_absent_reason").value;
    r.impact_numeric = read_number(kv, "impact_numeric");
    r.impact_quadrature = read_number(kv, "impact_quadrature");
    r.impact_tail = read_number(kv, "impact_tail");
    r.tail_applied = read_bool(kv, "tail_applied");
    r.tail_skipped_reason = kv.require("report", "tail_skipped_reason").value;
    r.impact_closed_form = read_optional(kv, "impact_closed_form");
    r.recovery_time = read_optional(kv, "recovery_time_s");
    return doc;
}

}  // namespace riskdyn
