#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "riskdyn/errors.hpp"
#include "riskdyn/metrics.hpp"

using namespace riskdyn;

namespace {

MetricsConfig zero_baseline() {
    MetricsConfig c;
    c.baseline_mode = BaselineMode::zero;
    return c;
}

Trajectory constant(double value, std::size_t n = 101, double dt = 0.1) {
    return {TimeGrid(0.0, dt, n), std::vector<double>(n, value)};
}

}  // namespace

TEST_CASE("metrics config validation") {
    MetricsConfig c;
    CHECK_NOTHROW(c.validate());
    c.fit_floor_ratio = 1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.fit_floor_ratio = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.min_fit_samples = 2;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.tail_fraction = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.recovery_band = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("peak_deviation") {
    SUBCASE("monotone decay peaks at onset") {
        const auto t = oracle::decay(2.0, 0.5, 0.0, 0.01, 2001);
        const auto p = peak_deviation(t, 0.0, 0.0);
        CHECK(p.r0 == 2.0);
        CHECK(p.t_peak == 0.0);
    }
    SUBCASE("constant at baseline") {
        CHECK(peak_deviation(constant(0.4), 0.0, 0.4).r0 == 0.0);
    }
    SUBCASE("ties resolve to the first sample") {
        const Trajectory t(TimeGrid(0.0, 1.0, 5), {0.0, 0.4, 0.9, 0.9, 0.3});
        const auto p = peak_deviation(t, 0.0, 0.0);
        CHECK(p.r0 == 0.9);
        CHECK(p.t_peak == 2.0);
        CHECK(p.index == 2);
    }
    SUBCASE("samples before t0 are ignored") {
        const Trajectory t(TimeGrid(0.0, 1.0, 5), {5.0, 0.4, 0.9, 0.1, 0.3});
        CHECK(peak_deviation(t, 1.0, 0.0).r0 == 0.9);
    }
    SUBCASE("below-baseline trajectory clamps to zero") {
        CHECK(peak_deviation(constant(-1.0), 0.0, 0.0).r0 == 0.0);
    }
    SUBCASE("t0 out of range") {
        CHECK_THROWS_AS(peak_deviation(constant(1.0), -1.0, 0.0), ParameterError);
        CHECK_THROWS_AS(peak_deviation(constant(1.0), 100.0, 0.0), ParameterError);
        CHECK_THROWS_AS(peak_deviation(constant(1.0), std::nan(""), 0.0), ParameterError);
    }
}

TEST_CASE("peak dominates every later deviation") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        const auto e = oracle::random_event(rng);
        const double base = e.traj[0];
        const auto p = peak_deviation(e.traj, e.t0, base);
        for (std::size_t k = e.traj.grid().first_index_at_or_after(e.t0); k < e.traj.size(); ++k) {
            CHECK(e.traj[k] - base <= p.r0);
        }
    }
}

TEST_CASE("estimate_damping") {
    const MetricsConfig cfg = zero_baseline();
    SUBCASE("pure exponential") {
        const auto t = oracle::decay(2.0, 0.5, 0.0, 0.01, 2001);
        const auto fit = estimate_damping(t, 0.0, 0.0, cfg);
        CHECK(oracle::rel_err(fit.lambda_hat, 0.5) < 1e-6);
        CHECK(fit.fit_quality > 0.999999);
    }
    SUBCASE("exponential around an operating point") {
        const double r_ss = 0.37;
        const auto t = oracle::decay(0.7, 1.2, 0.0, 0.01, 1001, r_ss);
        const auto fit = estimate_damping(t, 0.0, r_ss, cfg);
        CHECK(oracle::rel_err(fit.lambda_hat, 1.2) < 1e-6);
    }
    SUBCASE("fit stops at the floor") {
        const auto t = oracle::decay(1.0, 1.0, 0.0, 0.01, 1001);
        const auto fit = estimate_damping(t, 0.0, 0.0, cfg);
        // exp(-t) > 0.05 for t < ln 20
        CHECK(fit.samples == static_cast<std::size_t>(std::ceil(std::log(20.0) / 0.01)));
    }
    SUBCASE("growing trajectory has no damping") {
        const auto t = sample_function([](double x) { return std::exp(x); }, TimeGrid(0.0, 0.01, 301));
        CHECK_THROWS_AS(estimate_damping(t, 0.0, 0.0, cfg), NoDamping);
    }
    SUBCASE("too few samples above the floor") {
        const auto t = oracle::decay(1.0, 50.0, 0.0, 0.01, 301);
        CHECK_THROWS_AS(estimate_damping(t, 0.0, 0.0, cfg), InsufficientRecoveryData);
    }
}

TEST_CASE("cumulative_impact") {
    SUBCASE("exponential with tail matches r0 / lambda") {
        const auto t = oracle::decay(2.0, 0.5, 0.0, 1e-3, 40001);
        const auto imp = cumulative_impact(t, 0.0, 0.0, zero_baseline(), 0.5);
        CHECK(oracle::rel_err(imp.total, 4.0) < 1e-3);
        CHECK(imp.tail_applied);
        CHECK(imp.tail > 0.0);
    }
    SUBCASE("zero trajectory") {
        CHECK(cumulative_impact(constant(0.0), 0.0, 0.0, zero_baseline()).total == 0.0);
    }
    SUBCASE("rectangle without tail") {
        MetricsConfig c = zero_baseline();
        c.tail_correction = false;
        const auto imp = cumulative_impact(constant(0.3, 101, 0.1), 2.0, 0.1, c, 1.0);
        CHECK(imp.total == doctest::Approx(0.2 * 8.0).epsilon(1e-12));
        CHECK_FALSE(imp.tail_applied);
    }
    SUBCASE("undershoot is clamped") {
        const Trajectory t(TimeGrid(0.0, 1.0, 4), {1.0, -1.0, -1.0, 1.0});
        MetricsConfig c = zero_baseline();
        c.tail_correction = false;
        CHECK(cumulative_impact(t, 0.0, 0.0, c).total == doctest::Approx(1.0));
    }
    SUBCASE("finite horizon") {
        MetricsConfig c = zero_baseline();
        c.tail_correction = false;
        c.horizon = 5.0;
        CHECK(cumulative_impact(constant(1.0), 1.0, 0.0, c).total == doctest::Approx(4.0).epsilon(1e-12));
        c.horizon = 0.5;
        CHECK_THROWS_AS(cumulative_impact(constant(1.0), 1.0, 0.0, c), ParameterError);
        c.horizon = 50.0;
        CHECK_THROWS_AS(cumulative_impact(constant(1.0), 1.0, 0.0, c), ParameterError);
    }
}

TEST_CASE("closed_form_impact") {
    CHECK(closed_form_impact(2.0, 0.5) == 4.0);
    CHECK(closed_form_impact(0.0, 3.0) == 0.0);
    CHECK(closed_form_impact(1.0, 2.0) == closed_form_impact(2.0, 4.0));
    CHECK(closed_form_impact(1.0, 2.0) == 0.5);
    CHECK_THROWS_AS(closed_form_impact(1.0, 0.0), ParameterError);
    CHECK_THROWS_AS(closed_form_impact(-1.0, 1.0), ParameterError);
}

TEST_CASE("closed form is monotone in both arguments") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(1e-3, 1e3);
    for (int i = 0; i < 1000; ++i) {
        const double r0 = u(rng);
        double l1 = u(rng);
        double l2 = u(rng);
        if (l1 == l2) {
            continue;
        }
        if (l1 > l2) {
            std::swap(l1, l2);
        }
        CHECK(closed_form_impact(r0, l1) > closed_form_impact(r0, l2));
        double a = u(rng);
        double b = u(rng);
        if (a > b) {
            std::swap(a, b);
        }
        if (a < b) {
            CHECK(closed_form_impact(a, l1) < closed_form_impact(b, l1));
        }
    }
}

TEST_CASE("recovery_time") {
    SUBCASE("exponential enters the band at ln(100) / lambda") {
        const double dt = 1e-3;
        const auto t = oracle::decay(2.0, 0.5, 0.0, dt, 20001);
        const auto rt = recovery_time(t, 0.0, 0.0, 0.02);
        REQUIRE(rt.has_value());
        CHECK(std::abs(*rt - std::log(100.0) / 0.5) <= dt);
    }
    SUBCASE("already inside the band") {
        const auto rt = recovery_time(constant(0.5), 3.0, 0.5, 0.02);
        REQUIRE(rt.has_value());
        CHECK(*rt == doctest::Approx(3.0));
    }
    SUBCASE("never enters the band") {
        CHECK_FALSE(recovery_time(constant(0.7), 0.0, 0.5, 0.02).has_value());
    }
    SUBCASE("band must be positive") {
        CHECK_THROWS_AS(recovery_time(constant(0.5), 0.0, 0.5, 0.0), ParameterError);
    }
}

TEST_CASE("assemble_report") {
    SUBCASE("exponential") {
        const auto t = oracle::decay(2.0, 0.5, 0.0, 1e-3, 40001);
        const auto r = assemble_report(t, 0.0, zero_baseline());
        CHECK(r.r0 == 2.0);
        REQUIRE(r.lambda_hat.has_value());
        CHECK(oracle::rel_err(*r.lambda_hat, 0.5) < 1e-6);
        CHECK(oracle::rel_err(r.impact_numeric, 4.0) < 1e-3);
        REQUIRE(r.impact_closed_form.has_value());
        CHECK(*r.impact_closed_form == r.r0 / *r.lambda_hat);
        CHECK(r.tail_applied);
        CHECK(r.tail_skipped_reason.empty());
        CHECK(r.impact_numeric == r.impact_quadrature + r.impact_tail);
    }
    SUBCASE("zero trajectory") {
        const auto r = assemble_report(constant(0.0), 0.0, MetricsConfig{});
        CHECK(r.r0 == 0.0);
        CHECK_FALSE(r.lambda_hat.has_value());
        CHECK_FALSE(r.fit_quality.has_value());
        CHECK_FALSE(r.impact_closed_form.has_value());
        CHECK(r.damping_absent_reason == "no deviation above baseline");
        CHECK(r.impact_numeric == 0.0);
        CHECK_FALSE(r.tail_applied);
        CHECK(r.tail_skipped_reason == "damping estimate unavailable");
        REQUIRE(r.recovery_time.has_value());
        CHECK(*r.recovery_time == r.t_peak);
    }
    SUBCASE("growing trajectory flags damping absent") {
        const auto t = sample_function([](double x) { return std::exp(x); }, TimeGrid(0.0, 0.01, 301));
        const auto r = assemble_report(t, 0.0, zero_baseline());
        CHECK_FALSE(r.lambda_hat.has_value());
        CHECK_FALSE(r.damping_absent_reason.empty());
        CHECK(std::isfinite(r.impact_numeric));
    }
    SUBCASE("tail correction disabled") {
        MetricsConfig c = zero_baseline();
        c.tail_correction = false;
        const auto r = assemble_report(oracle::decay(2.0, 0.5, 0.0, 0.01, 1001), 0.0, c);
        CHECK(r.lambda_hat.has_value());
        CHECK(r.tail_skipped_reason == "tail correction disabled");
    }
    SUBCASE("t0 out of range") {
        CHECK_THROWS_AS(assemble_report(constant(0.0), 11.0, MetricsConfig{}), ParameterError);
        CHECK_THROWS_AS(assemble_report(constant(0.0), -0.5, MetricsConfig{}), ParameterError);
    }
    SUBCASE("t_peak never precedes t0") {
        std::mt19937_64 rng(9);
        for (int i = 0; i < 50; ++i) {
            const auto e = oracle::random_event(rng);
            const auto r = assemble_report(e.traj, e.t0, MetricsConfig{});
            CHECK(r.t_peak >= r.t0);
            CHECK(r.r0 >= 0.0);
            if (r.lambda_hat) {
                CHECK(*r.lambda_hat > 0.0);
            }
        }
    }
}

TEST_CASE("linear decay reports agree with the closed form") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const double r0 = 0.1 + 5.0 * u(rng);
        const double lambda = 0.2 + 2.0 * u(rng);
        const auto n = static_cast<std::size_t>(std::ceil(20.0 / lambda / 1e-3)) + 1;
        const auto t = oracle::decay(r0, lambda, 0.0, 1e-3, n);
        const auto r = assemble_report(t, 0.0, zero_baseline());
        REQUIRE(r.impact_closed_form.has_value());
        CHECK(std::abs(r.impact_numeric - r0 / lambda) / (r0 / lambda) <= 1e-3);
    }
}

TEST_CASE("scaling covariance and time-shift invariance") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const MetricsConfig cfg;
    for (int i = 0; i < 100; ++i) {
        const auto e = oracle::random_event(rng);
        const auto base = assemble_report(e.traj, e.t0, cfg);
        REQUIRE(base.lambda_hat.has_value());

        const double c = 0.1 + 10.0 * u(rng);
        std::vector<double> scaled(e.traj.values().begin(), e.traj.values().end());
        for (auto& v : scaled) {
            v = base.baseline + c * (v - base.baseline);
        }
        const auto s = assemble_report(Trajectory(e.traj.grid(), scaled), e.t0, cfg);
        REQUIRE(s.lambda_hat.has_value());
        CHECK(oracle::rel_err(s.r0, c * base.r0) <= 1e-9);
        CHECK(oracle::rel_err(s.impact_numeric, c * base.impact_numeric) <= 1e-9);
        CHECK(oracle::rel_err(*s.impact_closed_form, c * *base.impact_closed_form) <= 1e-9);
        CHECK(oracle::rel_err(*s.lambda_hat, *base.lambda_hat) <= 1e-9);

        const double delta = -100.0 + 200.0 * u(rng);
        const Trajectory moved(e.traj.grid().shifted(delta), std::vector<double>(e.traj.values().begin(), e.traj.values().end()));
        const double t0 = moved.grid().time(e.traj.grid().first_index_at_or_after(e.t0));
        const auto m = assemble_report(moved, t0, cfg);
        CHECK(std::abs(m.baseline - base.baseline) <= 1e-12);
        CHECK(std::abs(m.r0 - base.r0) <= 1e-12);
        CHECK(std::abs(*m.lambda_hat - *base.lambda_hat) <= 1e-12);
        CHECK(std::abs(*m.fit_quality - *base.fit_quality) <= 1e-12);
        CHECK(m.fit_samples == base.fit_samples);
        CHECK(std::abs(m.impact_numeric - base.impact_numeric) <= 1e-12);
        CHECK(std::abs(*m.impact_closed_form - *base.impact_closed_form) <= 1e-12);
        CHECK(std::abs((m.t_peak - t0) - (base.t_peak - e.t0)) <= 1e-9);
    }
}
