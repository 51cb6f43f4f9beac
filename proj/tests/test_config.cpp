#include <doctest.h>

#include <fstream>
#include <sstream>

#include "riskdyn/config.hpp"
#include "riskdyn/errors.hpp"

using namespace riskdyn;

namespace {

ScenarioConfig from_text(const std::string& text) {
    std::istringstream in(text);
    return scenario_from_document(KeyValueDocument::parse(in));
}

}  // namespace

TEST_CASE("key-value parsing") {
    std::istringstream in("# c\n[a]\nx = 1\ny=\n\n[b]\n z = two words \n");
    const auto doc = KeyValueDocument::parse(in);
    REQUIRE(doc.sections().size() == 2);
    CHECK(*doc.find("a", "x") == "1");
    CHECK(doc.find("a", "y")->empty());
    CHECK(*doc.find("b", "z") == "two words");
    CHECK(doc.find("b", "x") == nullptr);
    CHECK(doc.require("b", "z").line == 7);
    CHECK_THROWS_AS(doc.require("b", "q"), ParseError);

    auto line_of = [](const std::string& text) -> std::size_t {
        std::istringstream s(text);
        try {
            KeyValueDocument::parse(s);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    CHECK(line_of("x = 1\n") == 1);
    CHECK(line_of("[a]\nnovalue\n") == 2);
    CHECK(line_of("[a]\nx=1\nx=2\n") == 3);
    CHECK(line_of("[a]\n[a]\n") == 2);
    CHECK(line_of("[a\n") == 1);
    CHECK(line_of("[a]\n= 3\n") == 2);
}

TEST_CASE("number helpers") {
    double v = 0.0;
    CHECK(parse_finite_double("1.5", v));
    CHECK(v == 1.5);
    CHECK(parse_finite_double("+2", v));
    CHECK(v == 2.0);
    CHECK(parse_finite_double("-1e-3", v));
    CHECK_FALSE(parse_finite_double("nan", v));
    CHECK_FALSE(parse_finite_double("inf", v));
    CHECK_FALSE(parse_finite_double("1.5x", v));
    CHECK_FALSE(parse_finite_double("", v));
    CHECK(format_shortest(0.1) == "0.1");
    CHECK(format_g17(0.1) == "0.10000000000000001");
}

TEST_CASE("shipped default config matches the built-in defaults") {
    std::ifstream in(RISKDYN_DEFAULT_CONFIG);
    REQUIRE(in);
    std::stringstream text;
    text << in.rdbuf();
    CHECK(text.str() == default_config_text());
    CHECK(load_scenario(RISKDYN_DEFAULT_CONFIG) == ScenarioConfig{});
    CHECK(load_scenario("default") == ScenarioConfig{});
}

TEST_CASE("serialize and reload reproduces the config") {
    ScenarioConfig c;
    c.energy.initial_level = 71.25;
    c.policies.passive.base_load = 2.2;
    c.policies.reactive.base_load = 2.2;
    c.policies.anticipatory.base_load = 2.2;
    c.policies.anticipatory.gain = 0.3;
    c.disturbance = DisturbanceSignal::none();
    c.metrics.baseline_mode = BaselineMode::zero;
    c.metrics.horizon = 100.0;
    c.metrics.tail_correction = false;
    const std::string text = serialize_config(c);
    CHECK(from_text(text) == c);
    CHECK(serialize_config(from_text(text)) == text);
}

TEST_CASE("missing keys keep defaults and unknown keys are rejected") {
    const auto c = from_text("[energy]\nE_init_J = 65\n[load]\nP0_W = 2\n");
    CHECK(c.energy.initial_level == 65.0);
    CHECK(c.policies.reactive.base_load == 2.0);
    CHECK(c.policies.anticipatory.base_load == 2.0);
    CHECK(c.solar == SolarProfile{});
    CHECK_THROWS_AS(from_text("[energy]\nE_maximum = 1\n"), ConfigError);
    CHECK_THROWS_AS(from_text("[weather]\nrain = 1\n"), ConfigError);
    CHECK_THROWS_AS(from_text("[energy]\nE_max_J = lots\n"), ConfigError);
    CHECK_THROWS_AS(from_text("[metrics]\ntail_correction = maybe\n"), ConfigError);
    CHECK_THROWS_AS(from_text("[metrics]\nmin_fit_samples = 2.5\n"), ConfigError);
    CHECK_THROWS_AS(from_text("[energy]\nE_init_J = 500\n"), ConfigError);
    CHECK_THROWS_WITH_AS(from_text("[energy]\n\nE_max_J = x\n"), doctest::Contains("line 3"), ConfigError);
}

TEST_CASE("override key resolution") {
    const auto doc = config_document(ScenarioConfig{});
    CHECK(resolve_config_key(doc, "dt") == "integrator.dt_s");
    CHECK(resolve_config_key(doc, "dt_s") == "integrator.dt_s");
    CHECK(resolve_config_key(doc, "k_p") == "anticipatory.k_p_W_per_J");
    CHECK(resolve_config_key(doc, "magnitude") == "disturbance.magnitude");
    CHECK(resolve_config_key(doc, "reactive.shed_fraction") == "reactive.shed_fraction");
    CHECK(resolve_config_key(doc, "E_max") == "energy.E_max_J");
    CHECK_THROWS_AS(resolve_config_key(doc, "shed_fraction"), ConfigError);
    CHECK_THROWS_AS(resolve_config_key(doc, "horizon"), ConfigError);
    CHECK_THROWS_AS(resolve_config_key(doc, "nonsense"), ConfigError);
    CHECK_THROWS_AS(resolve_config_key(doc, "solar.dt"), ConfigError);
}

TEST_CASE("overrides") {
    const auto c = apply_overrides(ScenarioConfig{}, {"dt=0.005", "anticipatory.shed_fraction=0.25", "kind=none"});
    CHECK(c.integrator.dt == 0.005);
    CHECK(c.policies.anticipatory.shed_fraction == 0.25);
    CHECK(c.policies.reactive.shed_fraction == 0.5);
    CHECK(c.disturbance.kind == DisturbanceSignal::Kind::none);
    CHECK_THROWS_AS(apply_overrides(ScenarioConfig{}, {"dt"}), ConfigError);
    CHECK_THROWS_AS(apply_overrides(ScenarioConfig{}, {"dt=fast"}), ConfigError);
    CHECK_THROWS_AS(apply_overrides(ScenarioConfig{}, {"bogus=1"}), ConfigError);
}

TEST_CASE("sweepable keys") {
    CHECK(is_sweepable("anticipatory.k_p_W_per_J"));
    CHECK(is_sweepable("disturbance.magnitude"));
    CHECK(is_sweepable("reactive.shed_fraction"));
    CHECK_FALSE(is_sweepable("integrator.dt_s"));
    CHECK_FALSE(is_sweepable("metrics.tail_fraction"));
    CHECK_FALSE(is_sweepable("disturbance.kind"));
}

TEST_CASE("digest") {
    ScenarioConfig a;
    ScenarioConfig b;
    CHECK(config_digest(a) == config_digest(b));
    b.solar.period = 12.5;
    CHECK(config_digest(a) != config_digest(b));
    CHECK(config_digest(a).rfind("fnv1a64:", 0) == 0);
    CHECK(config_digest(a).size() == 8 + 16);
    // Reference vectors for 64-bit FNV-1a.
    CHECK(text_digest("") == "fnv1a64:cbf29ce484222325");
    CHECK(text_digest("a") == "fnv1a64:af63dc4c8601ec8c");
}
