#include "riskdyn/config.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "riskdyn/errors.hpp"

namespace riskdyn {

namespace {

constexpr std::array<std::string_view, 4> unit_suffixes{"_W_per_J", "_J", "_W", "_s"};

std::string_view strip_unit(std::string_view key) {
    for (auto suffix : unit_suffixes) {
        if (key.size() > suffix.size() && key.ends_with(suffix)) {
            return key.substr(0, key.size() - suffix.size());
        }
    }
    return key;
}

std::string num(double v) { return format_shortest(v); }

std::string count(std::size_t v) { return std::to_string(v); }

class Reader {
public:
    explicit Reader(const KeyValueDocument& doc) : doc_(doc) {}

    void number(std::string_view section, std::string_view key, double& out) const {
        if (const auto* e = entry(section, key)) {
            if (!parse_finite_double(e->value, out)) {
                fail(*e, section, "expected a finite number");
            }
        }
    }

    void integer(std::string_view section, std::string_view key, std::size_t& out) const {
        if (const auto* e = entry(section, key)) {
            double v = 0.0;
            if (!parse_finite_double(e->value, v) || v < 0.0 || v != std::floor(v) || v > 1e15) {
                fail(*e, section, "expected a non-negative integer");
            }
            out = static_cast<std::size_t>(v);
        }
    }

    void boolean(std::string_view section, std::string_view key, bool& out) const {
        if (const auto* e = entry(section, key)) {
            if (e->value == "true") {
                out = true;
            } else if (e->value == "false") {
                out = false;
            } else {
                fail(*e, section, "expected true or false");
            }
        }
    }

    const KeyValueDocument::Entry* entry(std::string_view section, std::string_view key) const {
        for (const auto& s : doc_.sections()) {
            if (s.name != section) {
                continue;
            }
            for (const auto& e : s.entries) {
                if (e.key == key) {
                    return &e;
                }
            }
        }
        return nullptr;
    }

    [[noreturn]] static void fail(const KeyValueDocument::Entry& e, std::string_view section,
                                  const std::string& what) {
        std::ostringstream msg;
        if (e.line > 0) {
            msg << "line " << e.line << ": ";
        }
        msg << section << "." << e.key << " = '" << e.value << "': " << what;
        throw ConfigError(msg.str());
    }

private:
    const KeyValueDocument& doc_;
};

}  // namespace

std::string default_config_text() {
    return serialize_config(ScenarioConfig{});
}

KeyValueDocument config_document(const ScenarioConfig& c) {
    KeyValueDocument doc;
    doc.set("energy", "E_max_J", num(c.energy.capacity));
    doc.set("energy", "E_min_J", num(c.energy.critical_level));
    doc.set("energy", "E_ref_J", num(c.energy.reference_level));
    doc.set("energy", "E_init_J", num(c.energy.initial_level));

    doc.set("solar", "P_peak_W", num(c.solar.peak_power));
    doc.set("solar", "period_s", num(c.solar.period));
    doc.set("solar", "shape_exponent", num(c.solar.shape_exponent));

    doc.set("load", "P0_W", num(c.policies.passive.base_load));

    doc.set("reactive", "E_on_J", num(c.policies.reactive.engage_below));
    doc.set("reactive", "E_off_J", num(c.policies.reactive.release_above));
    doc.set("reactive", "shed_fraction", num(c.policies.reactive.shed_fraction));

    doc.set("anticipatory", "horizon_s", num(c.policies.anticipatory.horizon));
    doc.set("anticipatory", "E_target_J", num(c.policies.anticipatory.target_level));
    doc.set("anticipatory", "shed_fraction", num(c.policies.anticipatory.shed_fraction));
    doc.set("anticipatory", "k_p_W_per_J", num(c.policies.anticipatory.gain));

    const bool pulse = c.disturbance.kind == DisturbanceSignal::Kind::pulse;
    doc.set("disturbance", "kind", pulse ? "pulse" : "none");
    doc.set("disturbance", "onset_s", num(c.disturbance.onset));
    doc.set("disturbance", "duration_s", num(c.disturbance.duration));
    doc.set("disturbance", "magnitude", num(c.disturbance.magnitude));

    doc.set("integrator", "dt_s", num(c.integrator.dt));
    doc.set("integrator", "t_start_s", num(c.integrator.t_start));
    doc.set("integrator", "t_end_s", num(c.integrator.t_end));
    doc.set("integrator", "max_steps", count(c.integrator.max_steps));

    const bool steady = c.metrics.baseline_mode == BaselineMode::steady_state;
    doc.set("metrics", "baseline_mode", steady ? "steady_state" : "zero");
    doc.set("metrics", "tail_fraction", num(c.metrics.tail_fraction));
    doc.set("metrics", "fit_floor_ratio", num(c.metrics.fit_floor_ratio));
    doc.set("metrics", "min_fit_samples", count(c.metrics.min_fit_samples));
    doc.set("metrics", "tail_correction", c.metrics.tail_correction ? "true" : "false");
    doc.set("metrics", "horizon_s", c.metrics.horizon ? num(*c.metrics.horizon) : "end");
    doc.set("metrics", "recovery_band", num(c.metrics.recovery_band));
    return doc;
}

ScenarioConfig scenario_from_document(const KeyValueDocument& doc) {
    const KeyValueDocument schema = config_document(ScenarioConfig{});
    for (const auto& section : doc.sections()) {
        for (const auto& e : section.entries) {
            if (!schema.find(section.name, e.key)) {
                std::ostringstream msg;
                if (e.line > 0) {
                    msg << "line " << e.line << ": ";
                }
                msg << "unknown config key " << section.name << "." << e.key;
                throw ConfigError(msg.str());
            }
        }
    }

    ScenarioConfig c;
    const Reader r(doc);
    r.number("energy", "E_max_J", c.energy.capacity);
    r.number("energy", "E_min_J", c.energy.critical_level);
    r.number("energy", "E_ref_J", c.energy.reference_level);
    r.number("energy", "E_init_J", c.energy.initial_level);

    r.number("solar", "P_peak_W", c.solar.peak_power);
    r.number("solar", "period_s", c.solar.period);
    r.number("solar", "shape_exponent", c.solar.shape_exponent);

    double base_load = c.policies.passive.base_load;
    r.number("load", "P0_W", base_load);
    c.policies.passive.base_load = base_load;
    c.policies.reactive.base_load = base_load;
    c.policies.anticipatory.base_load = base_load;

    r.number("reactive", "E_on_J", c.policies.reactive.engage_below);
    r.number("reactive", "E_off_J", c.policies.reactive.release_above);
    r.number("reactive", "shed_fraction", c.policies.reactive.shed_fraction);

    r.number("anticipatory", "horizon_s", c.policies.anticipatory.horizon);
    r.number("anticipatory", "E_target_J", c.policies.anticipatory.target_level);
    r.number("anticipatory", "shed_fraction", c.policies.anticipatory.shed_fraction);
    r.number("anticipatory", "k_p_W_per_J", c.policies.anticipatory.gain);

    if (const auto* e = r.entry("disturbance", "kind")) {
        if (e->value == "pulse") {
            c.disturbance.kind = DisturbanceSignal::Kind::pulse;
        } else if (e->value == "none") {
            c.disturbance.kind = DisturbanceSignal::Kind::none;
        } else {
            Reader::fail(*e, "disturbance", "expected pulse or none");
        }
    }
    r.number("disturbance", "onset_s", c.disturbance.onset);
    r.number("disturbance", "duration_s", c.disturbance.duration);
    r.number("disturbance", "magnitude", c.disturbance.magnitude);

    r.number("integrator", "dt_s", c.integrator.dt);
    r.number("integrator", "t_start_s", c.integrator.t_start);
    r.number("integrator", "t_end_s", c.integrator.t_end);
    r.integer("integrator", "max_steps", c.integrator.max_steps);

    if (const auto* e = r.entry("metrics", "baseline_mode")) {
        if (e->value == "steady_state") {
            c.metrics.baseline_mode = BaselineMode::steady_state;
        } else if (e->value == "zero") {
            c.metrics.baseline_mode = BaselineMode::zero;
        } else {
            Reader::fail(*e, "metrics", "expected steady_state or zero");
        }
    }
    r.number("metrics", "tail_fraction", c.metrics.tail_fraction);
    r.number("metrics", "fit_floor_ratio", c.metrics.fit_floor_ratio);
    r.integer("metrics", "min_fit_samples", c.metrics.min_fit_samples);
    r.boolean("metrics", "tail_correction", c.metrics.tail_correction);
    if (const auto* e = r.entry("metrics", "horizon_s")) {
        if (e->value == "end") {
            c.metrics.horizon.reset();
        } else {
            double h = 0.0;
            if (!parse_finite_double(e->value, h)) {
                Reader::fail(*e, "metrics", "expected a time or 'end'");
            }
            c.metrics.horizon = h;
        }
    }
    r.number("metrics", "recovery_band", c.metrics.recovery_band);

    c.validate();
    return c;
}

ScenarioConfig load_scenario(const std::string& source) {
    if (source == "default") {
        return ScenarioConfig{};
    }
    std::ifstream in(source);
    if (!in) {
        throw IoError("cannot read config file '" + source + "'");
    }
    try {
        return scenario_from_document(KeyValueDocument::parse(in));
    } catch (const ParseError& e) {
        throw ConfigError(source + ": " + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
    }
}

std::string resolve_config_key(const KeyValueDocument& doc, std::string_view name) {
    std::string_view section_part;
    std::string_view key_part = name;
    if (const auto dot = name.find('.'); dot != std::string_view::npos) {
        section_part = name.substr(0, dot);
        key_part = name.substr(dot + 1);
    }
    std::vector<std::string> matches;
    for (const auto& s : doc.sections()) {
        if (!section_part.empty() && s.name != section_part) {
            continue;
        }
        for (const auto& e : s.entries) {
            if (e.key == key_part || strip_unit(e.key) == key_part) {
                matches.push_back(s.name + "." + e.key);
            }
        }
    }
    if (matches.empty()) {
        throw ConfigError("unknown config key '" + std::string(name) + "'");
    }
    if (matches.size() > 1) {
        std::string list;
        for (const auto& m : matches) {
            list += (list.empty() ? "" : ", ") + m;
        }
        throw ConfigError("ambiguous config key '" + std::string(name) + "' (qualify as one of " +
                          list + ")");
    }
    return matches.front();
}

ScenarioConfig with_value(const ScenarioConfig& config, const std::string& qualified_key,
                          const std::string& value) {
    KeyValueDocument doc = config_document(config);
    const auto dot = qualified_key.find('.');
    doc.set(qualified_key.substr(0, dot), qualified_key.substr(dot + 1), value);
    return scenario_from_document(doc);
}

ScenarioConfig apply_overrides(const ScenarioConfig& config, const std::vector<std::string>& assignments) {
    KeyValueDocument doc = config_document(config);
    for (const auto& assignment : assignments) {
        const auto eq = assignment.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("override '" + assignment + "' is not of the form key=value");
        }
        const std::string key = resolve_config_key(doc, assignment.substr(0, eq));
        const auto dot = key.find('.');
        doc.set(key.substr(0, dot), key.substr(dot + 1), assignment.substr(eq + 1));
    }
    return scenario_from_document(doc);
}

bool is_sweepable(const std::string& qualified_key) {
    const auto dot = qualified_key.find('.');
    if (dot == std::string::npos) {
        return false;
    }
    const std::string section = qualified_key.substr(0, dot);
    const std::string key = qualified_key.substr(dot + 1);
    if (section == "integrator" || section == "metrics") {
        return false;
    }
    return !(section == "disturbance" && key == "kind");
}

std::string serialize_config(const ScenarioConfig& config) {
    std::ostringstream out;
    config_document(config).write(out, {"riskdyn scenario configuration",
                                        "energies in J, powers in W, times in s"});
    return out.str();
}

std::string text_digest(std::string_view text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string config_digest(const ScenarioConfig& config) {
    return text_digest(serialize_config(config));
}

}  // namespace riskdyn
