#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "riskdyn/config.hpp"
#include "riskdyn/energy_scenario.hpp"
#include "riskdyn/errors.hpp"
#include "riskdyn/io_formats.hpp"
#include "riskdyn/keyvalue.hpp"

namespace riskdyn::cli {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string case_name;
    std::string config = "default";
    std::string out;
    std::vector<std::string> inputs;
    std::optional<double> t0;
    std::vector<std::string> overrides;
    bool plot = false;
    std::string param;
    std::string range;
};

std::string one_line(std::string text) {
    for (char& c : text) {
        if (c == '\n' || c == '\r') {
            c = ' ';
        }
    }
    while (!text.empty() && text.back() == ' ') {
        text.pop_back();
    }
    return text;
}

ScenarioConfig load_config(const Options& o) {
    return apply_overrides(load_scenario(o.config), o.overrides);
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError("cannot create output directory '" + dir + "'");
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    out << text;
    if (!out) {
        throw IoError("write to '" + path.string() + "' failed");
    }
}

std::optional<PlotWindow> disturbance_window(const ScenarioConfig& config) {
    if (config.disturbance.kind != DisturbanceSignal::Kind::pulse) {
        return std::nullopt;
    }
    return PlotWindow{config.disturbance.onset, config.disturbance.onset + config.disturbance.duration};
}

std::string plot_text(const std::vector<const CaseRun*>& runs, const ScenarioConfig& config) {
    std::vector<PlotSeries> series;
    for (const auto* run : runs) {
        series.push_back({std::string(to_string(run->case_id)), run->energy, run->risk});
    }
    std::ostringstream svg;
    emit_plot(svg, series, disturbance_window(config));
    return svg.str();
}

void write_run(const fs::path& dir, const CaseRun& run, const ScenarioConfig& config) {
    const std::string name(to_string(run.case_id));
    std::ostringstream csv;
    write_trajectory_csv(csv, table_from_run(run));
    write_text(dir / ("trajectory_" + name + ".csv"), csv.str());
    write_text(dir / ("report_" + name + ".txt"),
               serialize_report({{name, config_digest(config)}, run.report}));
}

std::string optional_cell(const std::optional<double>& v) {
    return v ? format_g17(*v) : std::string();
}

int simulate(const Options& o, std::ostream& out, std::ostream& err) {
    const CaseId id = parse_case(o.case_name);
    const ScenarioConfig config = load_config(o);
    const CaseRun run = run_case(id, config);
    ensure_dir(o.out);
    write_run(o.out, run, config);
    if (o.plot) {
        write_text(fs::path(o.out) / ("plot_" + o.case_name + ".svg"), plot_text({&run}, config));
    }
    for (const auto& w : run.warnings) {
        err << "warning: " << w << '\n';
    }
    out << o.case_name << ": r0 = " << format_g17(run.report.r0)
        << ", impact = " << format_g17(run.report.impact_numeric) << '\n';
    return 0;
}

int analyze(const Options& o, std::ostream& out) {
    const ScenarioConfig config = load_config(o);
    const TrajectoryTable table = load_trajectory_csv(o.inputs.front());
    const Trajectory risk = table.column("r");
    const double t0 = o.t0.value_or(risk.grid().t_start());
    const ResilienceReport report = assemble_report(risk, t0, config.metrics);
    const std::string text = serialize_report({{o.inputs.front(), config_digest(config)}, report});
    if (o.out.empty()) {
        out << text;
    } else {
        write_text(o.out, text);
    }
    return 0;
}

std::string summary_text(const ComparisonResult& result, const ScenarioConfig& config) {
    KeyValueDocument doc;
    doc.set("provenance", "artifact_version", artifact_version);
    doc.set("provenance", "config_digest", config_digest(config));
    for (const auto& run : result.runs) {
        const std::string section(to_string(run.case_id));
        const ResilienceReport& r = run.report;
        doc.set(section, "r0", format_g17(r.r0));
        doc.set(section, "lambda_hat_per_s", r.lambda_hat ? format_g17(*r.lambda_hat) : "absent: " + r.damping_absent_reason);
        doc.set(section, "impact_numeric", format_g17(r.impact_numeric));
        doc.set(section, "impact_closed_form",
                r.impact_closed_form ? format_g17(*r.impact_closed_form) : "absent: " + r.damping_absent_reason);
        doc.set(section, "saturated", run.saturated ? "true" : "false");
    }
    doc.set("orderings", "peak_ordering", result.peak_ordering ? "true" : "false");
    doc.set("orderings", "impact_ordering", result.impact_ordering ? "true" : "false");
    std::ostringstream text;
    doc.write(text, {"riskdyn case comparison", "impact_closed_form is r0 / lambda_hat"});
    return text.str();
}

int compare(const Options& o, std::ostream& out) {
    const ScenarioConfig config = load_config(o);
    const ComparisonResult result = compare_cases(config);
    ensure_dir(o.out);
    std::vector<const CaseRun*> runs;
    for (const auto& run : result.runs) {
        write_run(o.out, run, config);
        runs.push_back(&run);
    }
    write_text(fs::path(o.out) / "summary.txt", summary_text(result, config));
    write_text(fs::path(o.out) / "plot.svg", plot_text(runs, config));

    out << std::left << std::setw(14) << "case" << std::setw(14) << "r0" << std::setw(14) << "lambda_hat"
        << std::setw(14) << "impact" << "r0/lambda_hat\n";
    for (const auto& run : result.runs) {
        const auto& r = run.report;
        out << std::setw(14) << to_string(run.case_id) << std::setw(14) << r.r0 << std::setw(14)
            << (r.lambda_hat ? std::to_string(*r.lambda_hat) : "absent") << std::setw(14) << r.impact_numeric
            << (r.impact_closed_form ? std::to_string(*r.impact_closed_form) : "absent") << '\n';
    }
    out << "peak_ordering = " << (result.peak_ordering ? "true" : "false")
        << "\nimpact_ordering = " << (result.impact_ordering ? "true" : "false") << '\n';
    return 0;
}

std::vector<double> parse_range(const std::string& text) {
    const auto a = text.find(':');
    const auto b = a == std::string::npos ? a : text.find(':', a + 1);
    if (b == std::string::npos || text.find(':', b + 1) != std::string::npos) {
        throw UsageError("--range must be start:stop:count");
    }
    double start = 0.0;
    double stop = 0.0;
    double count = 0.0;
    if (!parse_finite_double(std::string_view(text).substr(0, a), start) ||
        !parse_finite_double(std::string_view(text).substr(a + 1, b - a - 1), stop) ||
        !parse_finite_double(std::string_view(text).substr(b + 1), count)) {
        throw UsageError("--range fields must be finite numbers");
    }
    if (count < 1.0 || count != std::floor(count) || count > 1e6) {
        throw UsageError("--range count must be a positive integer");
    }
    if (stop < start) {
        throw UsageError("--range stop is below start");
    }
    const auto n = static_cast<std::size_t>(count);
    std::vector<double> values;
    for (std::size_t i = 0; i < n; ++i) {
        values.push_back(n == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    if (n > 1) {
        values.back() = stop;
    }
    return values;
}

int sweep(const Options& o, std::ostream& out) {
    const ScenarioConfig base = load_config(o);
    std::string key;
    try {
        key = resolve_config_key(config_document(base), o.param);
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    if (!is_sweepable(key)) {
        throw UsageError("parameter '" + key + "' is not sweepable");
    }
    const std::vector<double> values = parse_range(o.range);

    std::vector<ScenarioConfig> configs;
    for (double v : values) {
        configs.push_back(with_value(base, key, format_shortest(v)));
    }
    std::vector<std::future<ComparisonResult>> pending;
    for (const auto& c : configs) {
        pending.push_back(std::async(std::launch::async, [&c] { return compare_cases(c); }));
    }
    std::vector<ComparisonResult> results;
    for (auto& f : pending) {
        results.push_back(f.get());
    }

    std::ostringstream csv;
    csv << "value";
    for (CaseId id : all_cases) {
        const std::string n(to_string(id));
        csv << ',' << n << "_r0," << n << "_lambda_hat," << n << "_impact";
    }
    csv << ",peak_ordering,impact_ordering\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        csv << format_g17(values[i]);
        for (const auto& run : results[i].runs) {
            csv << ',' << format_g17(run.report.r0) << ',' << optional_cell(run.report.lambda_hat) << ','
                << format_g17(run.report.impact_numeric);
        }
        csv << ',' << (results[i].peak_ordering ? 1 : 0) << ',' << (results[i].impact_ordering ? 1 : 0) << '\n';
    }
    const fs::path path(o.out);
    if (path.has_parent_path()) {
        ensure_dir(path.parent_path().string());
    }
    write_text(path, csv.str());
    out << "swept " << key << " over " << values.size() << " value(s)\n";
    return 0;
}

int plot(const Options& o) {
    std::vector<PlotSeries> series;
    for (const auto& input : o.inputs) {
        const TrajectoryTable table = load_trajectory_csv(input);
        std::string label = fs::path(input).stem().string();
        if (label.starts_with("trajectory_")) {
            label = label.substr(11);
        }
        std::optional<Trajectory> energy;
        if (table.has_column("E")) {
            energy = table.column("E");
        }
        series.push_back({label, energy, table.column("r")});
    }
    std::optional<PlotWindow> window;
    if (!o.config.empty()) {
        window = disturbance_window(load_config(o));
    }
    std::ostringstream svg;
    emit_plot(svg, series, window);
    write_text(o.out, svg.str());
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Risk-trajectory resilience analysis for a solar-powered energy system", "riskdyn"};
    app.require_subcommand(1);

    const std::vector<std::string> case_names{"passive", "reactive", "anticipatory"};
    const auto set_help = "override a config value, e.g. --set dt=0.005 or --set reactive.shed_fraction=0.4";

    auto* sim = app.add_subcommand("simulate", "run one case and write its trajectory and report");
    sim->add_option("--case", o.case_name, "passive, reactive or anticipatory")
        ->required()
        ->check(CLI::IsMember(case_names));
    sim->add_option("--config", o.config, "config file, or 'default'");
    sim->add_option("--out", o.out, "output directory")->required();
    sim->add_option("--set", o.overrides, set_help);
    sim->add_flag("--plot", o.plot, "also write an SVG plot");

    auto* ana = app.add_subcommand("analyze", "compute the resilience report of an external trajectory");
    ana->add_option("--input", o.inputs, "CSV file with t and r columns")->required()->expected(1);
    ana->add_option("--t0", o.t0, "disturbance onset time (default: first sample)");
    ana->add_option("--config", o.config, "config file supplying [metrics], or 'default'");
    ana->add_option("--set", o.overrides, set_help);
    ana->add_option("--out", o.out, "report file (default: standard output)");

    auto* cmp = app.add_subcommand("compare", "run all three cases and compare them");
    cmp->add_option("--config", o.config, "config file, or 'default'");
    cmp->add_option("--out", o.out, "output directory")->required();
    cmp->add_option("--set", o.overrides, set_help);

    auto* swp = app.add_subcommand("sweep", "compare the cases over a range of one parameter");
    swp->add_option("--config", o.config, "config file, or 'default'");
    swp->add_option("--param", o.param, "parameter key, e.g. k_p or disturbance.magnitude")->required();
    swp->add_option("--range", o.range, "start:stop:count")->required();
    swp->add_option("--out", o.out, "output CSV file")->required();
    swp->add_option("--set", o.overrides, set_help);

    auto* plt = app.add_subcommand("emit-plot", "render trajectory CSV files as an SVG plot");
    plt->add_option("--input", o.inputs, "trajectory CSV (repeatable)")->required();
    plt->add_option("--out", o.out, "SVG file")->required();
    plt->add_option("--config", o.config, "config whose disturbance window is shaded");
    plt->add_option("--set", o.overrides, set_help);

    std::vector<std::string> argv_storage{"riskdyn"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage) {
        argv.push_back(a.data());
    }

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: usage: " << one_line(e.what()) << '\n';
        return 2;
    }

    try {
        if (sim->parsed()) {
            return simulate(o, out, err);
        }
        if (ana->parsed()) {
            return analyze(o, out);
        }
        if (cmp->parsed()) {
            return compare(o, out);
        }
        if (swp->parsed()) {
            return sweep(o, out);
        }
        if (plt->count("--config") == 0) {
            o.config.clear();
        }
        return plot(o);
    } catch (const UsageError& e) {
        err << "error: usage: " << one_line(e.what()) << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.category() << ": " << one_line(e.what()) << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: internal: " << one_line(e.what()) << '\n';
        return 1;
    }
}

}  // namespace riskdyn::cli
