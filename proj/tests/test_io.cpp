#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "pressure_lab/error.hpp"
#include "pressure_lab/io.hpp"

using namespace pressure_lab;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::InvalidArgument;
}

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

markov::MarkovModel model_from(const std::string& text) {
    std::istringstream in(text);
    return io::parse_model(in);
}

io::ScenarioSpec spec_from(const std::string& text) {
    std::istringstream in(text);
    return io::parse_scenario(in);
}

analysis::PressureCurve curve_from(const std::string& text) {
    std::istringstream in(text);
    return io::parse_curve(in, "mem");
}

}  // namespace

TEST_CASE("model files") {
    const auto golden = model_from(
        "# golden mean shift\n"
        "markov n=2\n"
        "1 1\n"
        "1 0\n"
        "\n"
        "0 -0.5\n"
        "0.25 .\n");
    CHECK(golden.size() == 2);
    CHECK_FALSE(golden.has_edge(1, 1));
    CHECK(golden.find_edge(0, 1)->potential == -0.5);
    CHECK(markov::pressure(golden, 0.0) == doctest::Approx(std::log(std::numbers::phi)).epsilon(1e-12));

    std::ostringstream out;
    io::write_model(out, golden);
    const auto again = model_from(out.str());
    REQUIRE(again.size() == 2);
    for (const auto& e : golden.edges()) {
        const auto* f = again.find_edge(e.from, e.to);
        REQUIRE(f != nullptr);
        CHECK(f->potential == e.potential);
    }
    CHECK(again.edges().size() == golden.edges().size());

    CHECK(model_from("markov n=2\n1 1\n1 0\n0 0\n0 7\n").edges().size() == 3);
    CHECK(code_of([] { model_from("markov n=2\n1 1\n1\n0 0\n0 .\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { model_from("markov n=1\n2\n0\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { model_from("chain n=1\n1\n0\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { model_from("markov n=1\n1\n.\n"); }) == ErrorCode::ParseError);
    CHECK(message_of([] { model_from("markov n=2\n1 1\n1 0\n0 x\n0 .\n"); }).find("line 4") != std::string::npos);
}

TEST_CASE("parse_number") {
    CHECK(io::parse_number("1.5") == 1.5);
    CHECK(io::parse_number("log(2)") == std::numbers::ln2);
    CHECK(io::parse_number(" ln(3) ") == std::log(3.0));
    CHECK(code_of([] { io::parse_number("two"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { io::parse_number("log(2"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { io::parse_number("1.5x"); }) == ErrorCode::ParseError);
}

TEST_CASE("scenario files") {
    const auto spec = spec_from(
        "# example\n"
        "scenario = axiom_a\n"
        "entropies = log(2), log(3)\n");
    CHECK(spec.kind() == "axiom_a");
    const auto e = spec.numbers("entropies");
    REQUIRE(e.size() == 2);
    CHECK(e[1] == std::log(3.0));

    const auto built = io::build_scenario(spec);
    REQUIRE(built.scenario.predicted_kinks.size() == 1);
    CHECK(built.scenario.predicted_kinks[0] == doctest::Approx(0.2027).epsilon(1e-4));

    const auto sinks = io::build_scenario(spec_from("scenario = two_sinks\nN = 3\nthreshold = 0.2\nband = 0.05\n"));
    CHECK(sinks.analysis.kinks.slope_gap_threshold == 0.2);
    CHECK(sinks.analysis.band == 0.05);
    CHECK(sinks.scenario.predicted_kinks[0] == doctest::Approx(std::log(3.0)));

    CHECK(code_of([] { io::build_scenario(spec_from("scenario = two_sinks\nNN = 2\n")); }) ==
          ErrorCode::InvalidArgument);
    CHECK(code_of([] { io::build_scenario(spec_from("scenario = lorenz\n")); }) == ErrorCode::UnknownScenario);
    CHECK(code_of([] { io::build_scenario(spec_from("scenario = multi_attractor\nentropies = 0.7, 0.7\nh_star = 1\n")); }) ==
          ErrorCode::OrderingViolated);
    CHECK(code_of([] { io::build_scenario(spec_from("scenario = product\nalpha = 0.5\n")); }) ==
          ErrorCode::RationalAlpha);
    CHECK(code_of([] { spec_from("scenario = a\nscenario = b\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { spec_from("scenario two_sinks\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { spec_from("N = 2\n").kind(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("curve CSV") {
    const auto curve = analysis::sample_curve([](double t) { return std::log1p(std::exp(t)) / 3.0; }, -1.0, 2.0, 31);
    std::ostringstream out;
    io::write_curve(out, curve);
    CHECK(out.str().rfind("t,pressure\n", 0) == 0);
    const auto back = curve_from(out.str());
    CHECK(back.ts == curve.ts);
    CHECK(back.values == curve.values);

    CHECK(code_of([] { curve_from("t,pressure\n0,1\n1\n"); }) == ErrorCode::MalformedCurve);
    CHECK(code_of([] { curve_from("t,pressure\n0,1\n1,nan\n"); }) == ErrorCode::MalformedCurve);
    CHECK(code_of([] { curve_from("t,pressure\n0,1\n0,2\n"); }) == ErrorCode::MalformedCurve);
    CHECK(code_of([] { curve_from("t,pressure\n0,1\n1,x\n"); }) == ErrorCode::MalformedCurve);
    CHECK(message_of([] { curve_from("t,pressure\n0,1\n1,2\n0.5,3\n"); }).find("line 4") != std::string::npos);
    CHECK(message_of([] { curve_from("t,pressure\n0,1\n1,x\n"); }).find("line 3") != std::string::npos);
}

TEST_CASE("report JSON round trip") {
    analysis::TransitionReport report;
    report.kinks.push_back({0.6931471805599453, 0.0, 1.0, 1.0});
    report.freezing = analysis::Freezing{1.25, 0.0};
    report.classification = analysis::Classification::KinkAndFreezing;
    const std::string text = io::report_json(report);
    CHECK(text.find("\"kink_and_freezing\"") != std::string::npos);
    const auto back = io::parse_report(text);
    REQUIRE(back.kinks.size() == 1);
    CHECK(back.kinks[0].t == report.kinks[0].t);
    CHECK(back.kinks[0].right_slope == 1.0);
    REQUIRE(back.freezing.has_value());
    CHECK(back.freezing->t0 == 1.25);
    CHECK(back.classification == report.classification);
    CHECK(io::report_json(back) == text);

    analysis::TransitionReport smooth;
    const auto s = io::report_json(smooth);
    CHECK(s.find("\"freezing\": null") != std::string::npos);
    CHECK_FALSE(io::parse_report(s).freezing.has_value());
    CHECK(code_of([] { io::parse_report("{\"kinks\": 3}"); }) == ErrorCode::ParseError);
}

TEST_CASE("property: detect on an emitted curve reproduces the report") {
    for (const char* text : {"scenario = two_sinks\nN = 2\n", "scenario = multi_attractor\nentropies = 1, 0.5\nh_star = 1.2\n",
                             "scenario = axiom_a\nentropies = log(2), log(3), log(5)\n"}) {
        CAPTURE(text);
        const auto built = io::build_scenario(spec_from(text));
        const auto curve = analysis::sample_curve(
            [&](double t) { return scenarios::composite_pressure(built.scenario, t); }, -1.0, 2.0, 1001);
        const std::string direct = io::report_json(analysis::analyze(curve, built.analysis));
        std::ostringstream out;
        io::write_curve(out, curve);
        const auto reread = curve_from(out.str());
        CHECK(io::report_json(analysis::analyze(reread, built.analysis)) == direct);
    }
}
