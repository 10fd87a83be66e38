#pragma once

// Text formats: Markov model files, scenario files, curve CSV and report JSON.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pressure_lab/markov_core.hpp"
#include "pressure_lab/pressure_analysis.hpp"
#include "pressure_lab/scenarios.hpp"

namespace pressure_lab::io {

/// Header `markov n=<N>`, N adjacency rows of 0/1, then N potential rows where
/// forbidden edges may hold `.`. Blank lines and `#` comments are skipped.
markov::MarkovModel parse_model(std::istream& in);
markov::MarkovModel read_model(const std::filesystem::path& path);
void write_model(std::ostream& out, const markov::MarkovModel& model);

/// Parses a real literal or `log(<literal>)`.
double parse_number(const std::string& text);

/// key = value pairs; `scenario` selects the construction.
struct ScenarioSpec {
    std::map<std::string, std::string> values;

    const std::string& kind() const;
    std::optional<std::string> get(const std::string& key) const;
    double number(const std::string& key, double fallback) const;
    double number(const std::string& key) const;
    std::vector<double> numbers(const std::string& key) const;
};

ScenarioSpec parse_scenario(std::istream& in);
ScenarioSpec read_scenario(const std::filesystem::path& path);

struct BuiltScenario {
    scenarios::CompositeScenario scenario;
    analysis::AnalysisOptions analysis;
};

/// Builds the scenario selected by `scenario`. Throws UnknownScenario, or
/// InvalidArgument for missing or unrecognized keys.
BuiltScenario build_scenario(const ScenarioSpec& spec);

/// Named fibre potentials for the product scenario, scaled by `c`.
scenarios::PotentialXY product_potential(const std::string& name, double c);

void write_curve(std::ostream& out, const analysis::PressureCurve& curve);
void write_curve(const std::filesystem::path& path, const analysis::PressureCurve& curve);
/// Throws MalformedCurve naming the offending line.
analysis::PressureCurve parse_curve(std::istream& in, const std::string& source = {});
analysis::PressureCurve read_curve(const std::filesystem::path& path);

std::string report_json(const analysis::TransitionReport& report);
void write_report(const std::filesystem::path& path, const analysis::TransitionReport& report);
analysis::TransitionReport parse_report(const std::string& text);

}  // namespace pressure_lab::io
