#include "pressure_lab/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <set>
#include <sstream>

#include "pressure_lab/error.hpp"

namespace pressure_lab::io {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& s) { return trim(s.substr(0, s.find('#'))); }

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::optional<double> to_double(const std::string& s) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || s.empty()) return std::nullopt;
    return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
    return out;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

}  // namespace

// ---------------------------------------------------------------------------
// Model files

markov::MarkovModel parse_model(std::istream& in) {
    std::vector<std::pair<std::size_t, std::string>> lines;
    std::string raw;
    for (std::size_t number = 1; std::getline(in, raw); ++number) {
        auto s = strip_comment(raw);
        if (!s.empty()) lines.emplace_back(number, std::move(s));
    }
    if (lines.empty()) throw Error(ErrorCode::ParseError, "empty model file");
    std::istringstream header(lines[0].second);
    std::string tag, size_field;
    header >> tag >> size_field;
    if (tag != "markov" || size_field.rfind("n=", 0) != 0) parse_error(lines[0].first, "expected header 'markov n=<N>'");
    const auto n_value = to_double(size_field.substr(2));
    if (!n_value || *n_value < 1 || *n_value != std::floor(*n_value)) parse_error(lines[0].first, "bad state count");
    const auto n = static_cast<std::size_t>(*n_value);
    if (lines.size() != 1 + 2 * n) {
        throw Error(ErrorCode::ParseError, "expected " + std::to_string(2 * n) + " matrix rows after the header, found " +
                                               std::to_string(lines.size() - 1));
    }
    auto tokens = [&](std::size_t idx) {
        std::istringstream row(lines[idx].second);
        std::vector<std::string> out;
        for (std::string tok; row >> tok;) out.push_back(tok);
        if (out.size() != n) parse_error(lines[idx].first, "expected " + std::to_string(n) + " entries");
        return out;
    };
    std::vector<markov::Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        const auto adj = tokens(1 + i);
        const auto pot = tokens(1 + n + i);
        for (std::size_t j = 0; j < n; ++j) {
            if (adj[j] != "0" && adj[j] != "1") parse_error(lines[1 + i].first, "adjacency entries must be 0 or 1");
            if (adj[j] == "0") continue;
            const auto v = to_double(pot[j]);
            if (!v || !std::isfinite(*v)) parse_error(lines[1 + n + i].first, "allowed edge needs a finite potential");
            edges.push_back({i, j, *v, 0.0});
        }
    }
    return markov::MarkovModel(n, std::move(edges));
}

markov::MarkovModel read_model(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_model(in);
}

void write_model(std::ostream& out, const markov::MarkovModel& model) {
    const std::size_t n = model.size();
    out << "markov n=" << n << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) out << (j ? " " : "") << (model.has_edge(i, j) ? 1 : 0);
        out << '\n';
    }
    char buf[32];
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const auto* e = model.find_edge(i, j);
            if (e) {
                std::snprintf(buf, sizeof buf, "%.17g", e->potential);
            } else {
                std::snprintf(buf, sizeof buf, ".");
            }
            out << (j ? " " : "") << buf;
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Scenario files

double parse_number(const std::string& text) {
    const auto s = trim(text);
    for (const char* fn : {"log(", "ln("}) {
        const std::string prefix = fn;
        if (s.rfind(prefix, 0) == 0 && s.size() > prefix.size() && s.back() == ')') {
            const auto inner = to_double(trim(s.substr(prefix.size(), s.size() - prefix.size() - 1)));
            if (!inner || !(*inner > 0)) throw Error(ErrorCode::ParseError, "bad logarithm argument in '" + s + "'");
            return std::log(*inner);
        }
    }
    const auto v = to_double(s);
    if (!v) throw Error(ErrorCode::ParseError, "not a number: '" + s + "'");
    return *v;
}

const std::string& ScenarioSpec::kind() const {
    const auto it = values.find("scenario");
    if (it == values.end()) throw Error(ErrorCode::InvalidArgument, "scenario file lacks a 'scenario' key");
    return it->second;
}

std::optional<std::string> ScenarioSpec::get(const std::string& key) const {
    const auto it = values.find(key);
    if (it == values.end()) return std::nullopt;
    return it->second;
}

double ScenarioSpec::number(const std::string& key, double fallback) const {
    const auto v = get(key);
    return v ? parse_number(*v) : fallback;
}

double ScenarioSpec::number(const std::string& key) const {
    const auto v = get(key);
    if (!v) throw Error(ErrorCode::InvalidArgument, "missing required key '" + key + "'");
    return parse_number(*v);
}

std::vector<double> ScenarioSpec::numbers(const std::string& key) const {
    const auto v = get(key);
    if (!v) throw Error(ErrorCode::InvalidArgument, "missing required key '" + key + "'");
    std::vector<double> out;
    for (const auto& item : split(*v, ',')) out.push_back(parse_number(item));
    return out;
}

ScenarioSpec parse_scenario(std::istream& in) {
    ScenarioSpec spec;
    std::string raw;
    for (std::size_t number = 1; std::getline(in, raw); ++number) {
        const auto s = strip_comment(raw);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) parse_error(number, "expected 'key = value'");
        auto key = trim(s.substr(0, eq));
        auto value = trim(s.substr(eq + 1));
        if (key.empty() || value.empty()) parse_error(number, "empty key or value");
        if (!spec.values.emplace(key, value).second) parse_error(number, "duplicate key '" + key + "'");
    }
    return spec;
}

ScenarioSpec read_scenario(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_scenario(in);
}

scenarios::PotentialXY product_potential(const std::string& name, double c) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (name == "constant") return [c](double, double) { return c; };
    if (name == "cos_y") return [c](double, double y) { return c * std::cos(two_pi * y); };
    if (name == "cos_x") return [c](double x, double) { return c * std::cos(two_pi * x); };
    if (name == "cos_xy") return [c](double x, double y) { return c * std::cos(two_pi * (x + y)); };
    throw Error(ErrorCode::InvalidArgument,
                "unknown product potential '" + name + "' (constant, cos_x, cos_y, cos_xy)");
}

BuiltScenario build_scenario(const ScenarioSpec& spec) {
    const std::string& kind = spec.kind();
    std::set<std::string> allowed{"scenario", "plateau", "band", "threshold", "window"};
    auto allow = [&](std::initializer_list<const char*> keys) { allowed.insert(keys.begin(), keys.end()); };

    BuiltScenario out;
    if (kind == "two_sinks") {
        allow({"N", "period"});
        out.scenario = scenarios::build_two_sinks(static_cast<std::size_t>(spec.number("N", 2)),
                                                  static_cast<int>(spec.number("period", 1)));
    } else if (kind == "axiom_a") {
        allow({"entropies"});
        out.scenario = scenarios::build_axiom_a(spec.numbers("entropies"));
    } else if (kind == "multi_attractor") {
        allow({"entropies", "h_star"});
        out.scenario = scenarios::build_multi_attractor(spec.numbers("entropies"), spec.number("h_star"));
    } else if (kind == "product") {
        allow({"alpha", "potential", "c", "level"});
        const auto potential = product_potential(spec.get("potential").value_or("cos_y"), spec.number("c", 1.0));
        out.scenario = scenarios::build_product_example(spec.number("alpha", std::numbers::phi - 1.0), potential,
                                                        static_cast<int>(spec.number("level", 8)))
                           .scenario;
    } else if (kind == "neutral") {
        allow({"alpha_mp", "truncation"});
        out.scenario = scenarios::build_neutral(spec.number("alpha_mp", 0.5),
                                                static_cast<std::size_t>(spec.number("truncation", 4096)));
    } else if (kind == "hybrid") {
        allow({"lambda_min", "neutral_point"});
        out.scenario = scenarios::build_hybrid(spec.number("lambda_min", -0.3), spec.number("neutral_point", 1) != 0);
    } else {
        throw Error(ErrorCode::UnknownScenario,
                    "unknown scenario '" + kind + "' (two_sinks, axiom_a, multi_attractor, product, neutral, hybrid)");
    }
    for (const auto& [key, value] : spec.values) {
        if (!allowed.count(key)) throw Error(ErrorCode::InvalidArgument, "unknown key '" + key + "' for " + kind);
    }
    out.analysis.plateau_value = spec.number("plateau", out.scenario.freezing_plateau.value_or(0.0));
    out.analysis.band = spec.number("band", out.analysis.band);
    out.analysis.kinks.slope_gap_threshold = spec.number("threshold", out.analysis.kinks.slope_gap_threshold);
    const double window = spec.number("window", static_cast<double>(out.analysis.kinks.window));
    if (!(window >= 1) || window != std::floor(window)) throw Error(ErrorCode::InvalidArgument, "window must be a positive integer");
    out.analysis.kinks.window = static_cast<std::size_t>(window);
    return out;
}

// ---------------------------------------------------------------------------
// Curves and reports

void write_curve(std::ostream& out, const analysis::PressureCurve& curve) {
    out << "t,pressure\n";
    char buf[64];
    for (std::size_t i = 0; i < curve.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", curve.ts[i], curve.values[i]);
        out << buf;
    }
}

void write_curve(const std::filesystem::path& path, const analysis::PressureCurve& curve) {
    auto out = open_output(path);
    write_curve(out, curve);
}

analysis::PressureCurve parse_curve(std::istream& in, const std::string& source) {
    analysis::PressureCurve curve;
    curve.source = source;
    auto fail = [](std::size_t line, const std::string& what) {
        throw Error(ErrorCode::MalformedCurve, "line " + std::to_string(line) + ": " + what);
    };
    std::string raw;
    std::size_t number = 0;
    bool header = false;
    while (std::getline(in, raw)) {
        ++number;
        const auto s = trim(raw);
        if (s.empty()) continue;
        if (!header) {
            if (s != "t,pressure") fail(number, "expected header 't,pressure'");
            header = true;
            continue;
        }
        const auto fields = split(s, ',');
        if (fields.size() != 2) fail(number, "expected two comma-separated fields");
        const auto t = to_double(fields[0]);
        const auto p = to_double(fields[1]);
        if (!t || !p || !std::isfinite(*t) || !std::isfinite(*p)) fail(number, "fields must be finite reals");
        if (!curve.ts.empty() && !(*t > curve.ts.back())) fail(number, "t column is not strictly increasing");
        curve.ts.push_back(*t);
        curve.values.push_back(*p);
    }
    if (!header) throw Error(ErrorCode::MalformedCurve, "line 1: expected header 't,pressure'");
    return curve;
}

analysis::PressureCurve read_curve(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_curve(in, path.string());
}

std::string report_json(const analysis::TransitionReport& report) {
    nlohmann::ordered_json j;
    j["kinks"] = nlohmann::ordered_json::array();
    for (const auto& k : report.kinks) {
        j["kinks"].push_back({{"t", k.t}, {"left_slope", k.left_slope}, {"right_slope", k.right_slope}, {"gap", k.gap}});
    }
    if (report.freezing) {
        j["freezing"] = {{"t0", report.freezing->t0}, {"value", report.freezing->value}};
    } else {
        j["freezing"] = nullptr;
    }
    j["classification"] = std::string(analysis::to_string(report.classification));
    return j.dump(2) + "\n";
}

void write_report(const std::filesystem::path& path, const analysis::TransitionReport& report) {
    auto out = open_output(path);
    out << report_json(report);
}

analysis::TransitionReport parse_report(const std::string& text) {
    analysis::TransitionReport report;
    try {
        const auto j = nlohmann::json::parse(text);
        for (const auto& k : j.at("kinks")) {
            report.kinks.push_back({k.at("t").get<double>(), k.at("left_slope").get<double>(),
                                    k.at("right_slope").get<double>(), k.at("gap").get<double>()});
        }
        if (!j.at("freezing").is_null()) {
            report.freezing = analysis::Freezing{j["freezing"].at("t0").get<double>(), j["freezing"].at("value").get<double>()};
        }
        const auto c = analysis::classification_from_string(j.at("classification").get<std::string>());
        if (!c) throw Error(ErrorCode::ParseError, "unknown classification");
        report.classification = *c;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("report JSON: ") + e.what());
    }
    return report;
}

}  // namespace pressure_lab::io
