// pressure-lab: command-line front end.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "pressure_lab/claims.hpp"
#include "pressure_lab/error.hpp"
#include "pressure_lab/io.hpp"
#include "pressure_lab/log.hpp"
#include "pressure_lab/markov_core.hpp"
#include "pressure_lab/parallel.hpp"
#include "pressure_lab/pressure_analysis.hpp"
#include "pressure_lab/random_models.hpp"
#include "pressure_lab/scenarios.hpp"
#include "pressure_lab/smooth2d.hpp"

namespace pl = pressure_lab;

namespace {

constexpr int kExitFailedClaim = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct GridFlags {
    double t_min = -1.0;
    double t_max = 2.0;
    std::size_t t_steps = 1001;
    unsigned threads = 0;

    void add(CLI::App* cmd) {
        cmd->add_option("--t-min", t_min, "Lower end of the t grid")->capture_default_str();
        cmd->add_option("--t-max", t_max, "Upper end of the t grid")->capture_default_str();
        cmd->add_option("--t-steps", t_steps, "Number of grid points")->capture_default_str();
        cmd->add_option("--threads", threads, "Worker threads (0: logical cores)");
    }
    void validate() const {
        if (!(t_min < t_max)) throw pl::Error(pl::ErrorCode::InvalidArgument, "--t-min must be below --t-max");
        if (t_steps < 2) throw pl::Error(pl::ErrorCode::InvalidArgument, "--t-steps must be at least 2");
    }
};

struct MapFlags {
    std::string name;
    std::vector<std::string> params;

    void add(CLI::App* cmd) {
        cmd->add_option("--map", name, "Built-in map name")->required();
        cmd->add_option("--param", params, "Map parameter key=value (repeatable)");
    }
    pl::smooth2d::SmoothMap2D build() const {
        std::map<std::string, double> values;
        for (const auto& p : params) {
            const auto eq = p.find('=');
            if (eq == std::string::npos) throw pl::Error(pl::ErrorCode::InvalidArgument, "--param expects key=value, got '" + p + "'");
            values[p.substr(0, eq)] = pl::io::parse_number(p.substr(eq + 1));
        }
        return pl::smooth2d::make_map(name, values);
    }
};

std::string csv_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Writes to the file when a path is given, otherwise to stdout.
void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw pl::Error(pl::ErrorCode::InvalidArgument, "cannot write " + path);
    out << text;
    pl::log::info("wrote " + path);
}

void finish_analysis(const pl::analysis::PressureCurve& curve, const pl::analysis::AnalysisOptions& options,
                     const std::string& report_path) {
    const auto report = pl::analysis::analyze(curve, options);
    emit(report_path, pl::io::report_json(report));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topological pressure functions, phase transitions and their reference constructions"};
    app.require_subcommand(1);

    // scenario run
    auto* scenario = app.add_subcommand("scenario", "Composite scenarios");
    scenario->require_subcommand(1);
    auto* run = scenario->add_subcommand("run", "Sample a scenario's pressure curve and analyze it");
    std::string scenario_file, out_path, report_path;
    GridFlags grid;
    std::optional<double> threshold, plateau, band;
    run->add_option("file", scenario_file, "Scenario file (key = value)")->required();
    grid.add(run);
    run->add_option("--out", out_path, "Curve CSV output");
    run->add_option("--report", report_path, "Report JSON output (default: stdout)");
    run->add_option("--threshold", threshold, "Slope-gap threshold for kinks");
    run->add_option("--plateau", plateau, "Freezing plateau value");
    run->add_option("--band", band, "Freezing band half-width");

    // lyapunov
    auto* lyap = app.add_subcommand("lyapunov", "Lyapunov exponents of a built-in map");
    MapFlags lyap_map;
    lyap_map.add(lyap);
    std::size_t starts = 10, steps = 10000;
    std::uint64_t seed = 42;
    std::optional<double> x0, y0;
    std::string lyap_out;
    lyap->add_option("--starts", starts, "Number of random start points")->capture_default_str();
    lyap->add_option("--steps", steps, "Orbit length")->capture_default_str();
    lyap->add_option("--seed", seed, "Seed for start points")->capture_default_str();
    lyap->add_option("--x0", x0, "Single start point x (with --y0)");
    lyap->add_option("--y0", y0, "Single start point y (with --x0)");
    lyap->add_option("--out", lyap_out, "CSV output (default: stdout)");

    // orbits
    auto* orbits = app.add_subcommand("orbits", "Periodic points of a built-in map");
    MapFlags orbit_map;
    orbit_map.add(orbits);
    int period = 1;
    unsigned orbit_threads = 0;
    std::string orbit_out;
    orbits->add_option("--period", period, "Period n; lists Fix(f^n)")->capture_default_str();
    orbits->add_option("--threads", orbit_threads, "Worker threads (0: logical cores)");
    orbits->add_option("--out", orbit_out, "CSV output (default: stdout)");

    // pressure curve
    auto* pressure = app.add_subcommand("pressure", "Symbolic pressure");
    pressure->require_subcommand(1);
    auto* curve_cmd = pressure->add_subcommand("curve", "Pressure curve of a Markov model file");
    std::string model_file, curve_out;
    GridFlags curve_grid;
    curve_cmd->add_option("model", model_file, "Model file (markov n=<N>)")->required();
    curve_grid.add(curve_cmd);
    curve_cmd->add_option("--out", curve_out, "Curve CSV output (default: stdout)");

    // detect
    auto* detect = app.add_subcommand("detect", "Analyze an existing curve CSV");
    std::string detect_file, detect_report;
    std::optional<double> detect_threshold, detect_plateau, detect_band;
    detect->add_option("csv", detect_file, "Curve CSV (t,pressure)")->required();
    detect->add_option("--report", detect_report, "Report JSON output (default: stdout)");
    detect->add_option("--threshold", detect_threshold, "Slope-gap threshold for kinks");
    detect->add_option("--plateau", detect_plateau, "Freezing plateau value");
    detect->add_option("--band", detect_band, "Freezing band half-width");

    // reproduce
    auto* reproduce = app.add_subcommand("reproduce", "Run one reproduction recipe");
    std::string claim_id;
    unsigned claim_threads = 0;
    reproduce->add_option("claim", claim_id, "Claim id (see --list)");
    bool list_claims = false;
    reproduce->add_flag("--list", list_claims, "List claim ids");
    reproduce->add_option("--threads", claim_threads, "Worker threads (0: logical cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (run->parsed()) {
            grid.validate();
            auto built = pl::io::build_scenario(pl::io::read_scenario(scenario_file));
            if (threshold) built.analysis.kinks.slope_gap_threshold = *threshold;
            if (plateau) built.analysis.plateau_value = *plateau;
            if (band) built.analysis.band = *band;
            const auto& s = built.scenario;
            pl::log::info("scenario " + s.label + " with " + std::to_string(s.pieces.size()) + " pieces");
            const auto curve = pl::analysis::sample_curve(
                [&](double t) { return pl::scenarios::composite_pressure(s, t); }, grid.t_min, grid.t_max,
                grid.t_steps, grid.threads, s.label);
            if (!out_path.empty()) {
                pl::io::write_curve(out_path, curve);
                pl::log::info("wrote " + out_path);
            }
            finish_analysis(curve, built.analysis, report_path);
        } else if (lyap->parsed()) {
            const auto map = lyap_map.build();
            if (x0.has_value() != y0.has_value()) {
                throw pl::Error(pl::ErrorCode::InvalidArgument, "--x0 and --y0 must be given together");
            }
            if (steps < 1) throw pl::Error(pl::ErrorCode::InvalidArgument, "--steps must be positive");
            std::vector<pl::smooth2d::Vec2> points;
            if (x0) {
                points.push_back({*x0, *y0});
            } else {
                pl::Rng rng(seed);
                for (std::size_t i = 0; i < starts; ++i) {
                    const double x = rng.uniform();
                    points.push_back({x, rng.uniform()});
                }
            }
            std::vector<pl::smooth2d::LyapunovExponents> results(points.size());
            pl::parallel_for(points.size(), 0, [&](std::size_t i) {
                results[i] = pl::smooth2d::lyapunov_exponents(map, points[i], steps);
            });
            std::ostringstream csv;
            csv << "x0,y0,lambda1,lambda2,sum\n";
            for (std::size_t i = 0; i < points.size(); ++i) {
                const auto& r = results[i];
                csv << csv_number(points[i].x) << ',' << csv_number(points[i].y) << ',' << csv_number(r.lambda1) << ','
                    << csv_number(r.lambda2) << ',' << csv_number(r.lambda1 + r.lambda2) << '\n';
            }
            emit(lyap_out, csv.str());
        } else if (orbits->parsed()) {
            const auto map = orbit_map.build();
            pl::smooth2d::OrbitSearchOptions options;
            options.threads = orbit_threads;
            const auto set = pl::smooth2d::find_periodic_orbits(map, period, options);
            if (!set.complete()) {
                pl::log::warn("IncompleteOrbitSet: found " + std::to_string(set.fixed_point_count) + " of " +
                              std::to_string(*set.expected_count) + " points of period " + std::to_string(period));
            }
            std::ostringstream csv;
            csv << "x,y,lambda1,lambda2,phi\n";
            for (const auto& orbit : set.orbits) {
                for (const auto& p : orbit.points) {
                    const auto ev = pl::smooth2d::eigenvalues(map.jacobian_power(p, period));
                    const double n = static_cast<double>(period);
                    const double l1 = std::log(std::abs(ev.first)) / n;
                    const double l2 = std::log(std::abs(ev.second)) / n;
                    csv << csv_number(p.x) << ',' << csv_number(p.y) << ',' << csv_number(l1) << ',' << csv_number(l2)
                        << ',' << csv_number(pl::smooth2d::eigenvalue_potential(map, period, p)) << '\n';
                }
            }
            emit(orbit_out, csv.str());
        } else if (curve_cmd->parsed()) {
            curve_grid.validate();
            const auto model = pl::io::read_model(model_file);
            const auto curve = pl::analysis::sample_curve([&](double t) { return pl::markov::pressure(model, t); },
                                                          curve_grid.t_min, curve_grid.t_max, curve_grid.t_steps,
                                                          curve_grid.threads, model_file);
            std::ostringstream csv;
            pl::io::write_curve(csv, curve);
            emit(curve_out, csv.str());
        } else if (detect->parsed()) {
            const auto curve = pl::io::read_curve(detect_file);
            pl::analysis::AnalysisOptions options;
            if (detect_threshold) options.kinks.slope_gap_threshold = *detect_threshold;
            if (detect_plateau) options.plateau_value = *detect_plateau;
            if (detect_band) options.band = *detect_band;
            finish_analysis(curve, options, detect_report);
        } else if (reproduce->parsed()) {
            if (list_claims) {
                for (const auto& c : pl::claims::all_claims()) std::cout << c.id << "  " << c.title << '\n';
                return 0;
            }
            if (claim_id.empty()) throw pl::Error(pl::ErrorCode::InvalidArgument, "reproduce needs a claim id");
            const auto& claim = pl::claims::find_claim(claim_id);
            const auto result = pl::claims::run_claim(claim, claim_threads);
            std::cout << claim.id << ": " << claim.title << '\n';
            for (const auto& line : result.details) std::cout << "  " << line << '\n';
            std::printf("  runtime %.3f s (limit %.0f s)\n", result.seconds, result.runtime_limit);
            std::cout << (result.ok() ? "PASS" : "FAIL") << ' ' << claim.id << '\n';
            return result.ok() ? 0 : kExitFailedClaim;
        }
    } catch (const pl::Error& e) {
        std::cerr << "pressure-lab: " << e.what() << '\n';
        return pl::is_validation_error(e.code()) ? kExitValidation : kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "pressure-lab: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
