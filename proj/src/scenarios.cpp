#include "pressure_lab/scenarios.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pressure_lab/error.hpp"

namespace pressure_lab::scenarios {
namespace {

std::shared_ptr<const markov::MarkovModel> full_shift(std::size_t symbols, double potential) {
    std::vector<markov::Edge> edges;
    for (std::size_t i = 0; i < symbols; ++i) {
        for (std::size_t j = 0; j < symbols; ++j) edges.push_back({i, j, potential, 0.0});
    }
    return std::make_shared<const markov::MarkovModel>(symbols, std::move(edges));
}

Piece markov_piece(std::string label, std::shared_ptr<const markov::MarkovModel> model, double f_exponent) {
    Piece p;
    p.kind = PieceKind::Markov;
    p.label = std::move(label);
    p.model = std::move(model);
    p.f_exponent = f_exponent;
    return p;
}

Piece sink_piece(std::string label, double value, double f_exponent) {
    Piece p;
    p.kind = PieceKind::Sink;
    p.label = std::move(label);
    p.value = value;
    p.f_exponent = f_exponent;
    return p;
}

void check_entropy(double h) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        std::ostringstream msg;
        msg << "entropy " << h << " must be positive and finite";
        throw Error(ErrorCode::InvalidEntropy, msg.str());
    }
}

void finish(CompositeScenario& s) { s.predicted_kinks = s.predicted_envelope().breakpoints; }

// C-infinity step: 1 for r <= inner, 0 for r >= outer.
double plateau(double r, double inner, double outer) {
    if (r <= inner) return 1.0;
    if (r >= outer) return 0.0;
    auto psi = [](double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; };
    const double u = (outer - r) / (outer - inner);
    return psi(u) / (psi(u) + psi(1.0 - u));
}

void check_irrational(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
    // Convergents p/q of the continued fraction with q <= 100.
    double x = alpha;
    double p0 = 0.0, q0 = 1.0, p1 = 1.0, q1 = 0.0;
    for (int step = 0; step < 64; ++step) {
        const double a = std::floor(x);
        const double p = a * p1 + p0;
        const double q = a * q1 + q0;
        if (q > 100.0) break;
        if (std::abs(alpha - p / q) <= 1e-9) {
            std::ostringstream msg;
            msg << "alpha " << alpha << " is within 1e-9 of " << p << "/" << q;
            throw Error(ErrorCode::RationalAlpha, msg.str());
        }
        p0 = p1;
        q0 = q1;
        p1 = p;
        q1 = q;
        const double frac = x - a;
        if (frac < 1e-15) break;
        x = 1.0 / frac;
    }
}

}  // namespace

double Piece::pressure(double t) const {
    switch (kind) {
        case PieceKind::Markov: return markov::pressure(*model, t);
        case PieceKind::Sink: return value * t;
        case PieceKind::Neutral: return neutral->pressure(t);
    }
    return -std::numeric_limits<double>::infinity();
}

analysis::PiecewiseAffine CompositeScenario::predicted_envelope() const {
    if (!has_closed_form()) throw Error(ErrorCode::InvalidArgument, "scenario " + label + " has no closed-form branches");
    return analysis::upper_envelope(predicted_branches, constant_branch);
}

double CompositeScenario::lambda_min_f() const {
    double v = std::numeric_limits<double>::infinity();
    for (const auto& p : pieces) v = std::min(v, p.f_exponent);
    return v;
}

double CompositeScenario::lambda_max_f() const {
    double v = -std::numeric_limits<double>::infinity();
    for (const auto& p : pieces) v = std::max(v, p.f_exponent);
    return v;
}

double composite_pressure(const CompositeScenario& scenario, double t) {
    if (scenario.pieces.empty()) throw Error(ErrorCode::InvalidArgument, "scenario has no pieces");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : scenario.pieces) best = std::max(best, p.pressure(t));
    return best;
}

double sign_restricted_pressure(const CompositeScenario& scenario, double t, smooth2d::OrbitClass cls) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : scenario.pieces) {
        const bool non_expanding = p.f_exponent <= 0.0;
        if (non_expanding == (cls == smooth2d::OrbitClass::NonExpanding)) best = std::max(best, p.pressure(t));
    }
    return best;
}

markov::MarkovModel realize_entropy(double h, double potential) {
    check_entropy(h);
    const double growth = std::exp(h);
    const auto nearest = static_cast<std::size_t>(std::llround(growth));
    if (nearest >= 2 && std::abs(std::log(static_cast<double>(nearest)) - h) <= 1e-15 * h) {
        return *full_shift(nearest, potential);
    }
    const auto m = static_cast<std::size_t>(std::floor(growth));
    if (m < 1 || m > 4096) throw Error(ErrorCode::InvalidEntropy, "entropy outside the realizable range (0, log 4096]");
    auto build = [&](double loop) {
        std::vector<markov::Edge> edges;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) edges.push_back({i, j, potential, i == 0 && j == 0 ? loop : 0.0});
        }
        return markov::MarkovModel(m, std::move(edges));
    };
    if (m == 1) return build(h);
    // log rho is increasing in the loop weight; rho >= e^loop gives the bracket [0, h].
    auto excess = [&](double loop) { return markov::pressure(build(loop), 0.0) - h; };
    auto close = [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(a)); };
    auto [lo, hi] = boost::math::tools::bisect(excess, 0.0, h, close);
    const double loop = 0.5 * (lo + hi);
    if (std::abs(excess(loop)) > 1e-12) throw Error(ErrorCode::NoConvergence, "entropy bisection missed 1e-12");
    return build(loop);
}

CompositeScenario build_two_sinks(std::size_t chaotic_symbols, int period) {
    if (chaotic_symbols < 2) throw Error(ErrorCode::InvalidArgument, "two_sinks needs N >= 2 symbols");
    if (period < 1) throw Error(ErrorCode::InvalidArgument, "two_sinks needs period >= 1");
    constexpr double contraction = 0.5;
    const double h = std::log(static_cast<double>(chaotic_symbols));
    CompositeScenario s;
    s.label = "two_sinks";
    s.pieces.push_back(markov_piece("horseshoe", full_shift(chaotic_symbols, 0.0), h));
    s.pieces.push_back(sink_piece("sink_1", 1.0, std::log(contraction)));
    s.pieces.push_back(sink_piece("sink_2", 0.5, std::log(contraction)));
    s.predicted_branches = {{0.0, h}, {1.0, 0.0}, {0.5, 0.0}};
    finish(s);

    s.map = smooth2d::two_sinks_map(contraction);
    const smooth2d::Vec2 p1{0.25, 0.5};
    const smooth2d::Vec2 p2{0.75, 0.5};
    s.potential = smooth2d::Potential::function("two_sinks_plateau", [p1, p2](smooth2d::Vec2 x) {
        return plateau(smooth2d::norm(x - p1), 0.1, 0.2) + 0.5 * plateau(smooth2d::norm(x - p2), 0.1, 0.2);
    });
    return s;
}

CompositeScenario build_axiom_a(const std::vector<double>& entropies) {
    if (entropies.size() < 2) throw Error(ErrorCode::InvalidArgument, "axiom_a needs at least two entropies");
    for (double h : entropies) check_entropy(h);
    CompositeScenario s;
    s.label = "axiom_a";
    for (std::size_t i = 0; i < entropies.size(); ++i) {
        const double phi = i == 0 ? 1.0 : -1.0;
        auto model = std::make_shared<const markov::MarkovModel>(realize_entropy(entropies[i], phi));
        s.pieces.push_back(markov_piece("basic_set_" + std::to_string(i + 1), std::move(model), entropies[i]));
        s.predicted_branches.push_back({phi, entropies[i]});
    }
    finish(s);
    return s;
}

CompositeScenario build_multi_attractor(const std::vector<double>& entropies, double h_star) {
    if (entropies.empty()) throw Error(ErrorCode::InvalidArgument, "multi_attractor needs at least one entropy");
    for (double h : entropies) check_entropy(h);
    check_entropy(h_star);
    const std::size_t k = entropies.size();
    for (std::size_t i = 0; i + 1 < k; ++i) {
        if (!(entropies[i] > entropies[i + 1])) {
            std::ostringstream msg;
            msg << "h" << i + 1 << " > h" << i + 2 << " fails (" << entropies[i] << " <= " << entropies[i + 1] << ")";
            throw Error(ErrorCode::OrderingViolated, msg.str());
        }
    }
    double previous = h_star - entropies[0];
    for (std::size_t i = 0; i + 1 < k; ++i) {
        const double gap = entropies[i] - entropies[i + 1];
        if (!(previous < gap)) {
            std::ostringstream msg;
            if (i == 0) {
                msg << "h_star - h1 < h1 - h2 fails (" << previous << " >= " << gap << ")";
            } else {
                msg << "h" << i << " - h" << i + 1 << " < h" << i + 1 << " - h" << i + 2 << " fails (" << previous
                    << " >= " << gap << ")";
            }
            throw Error(ErrorCode::OrderingViolated, msg.str());
        }
        previous = gap;
    }

    CompositeScenario s;
    s.label = "multi_attractor";
    auto star = std::make_shared<const markov::MarkovModel>(realize_entropy(h_star, 0.0));
    s.pieces.push_back(markov_piece("maximal_entropy_set", std::move(star), h_star));
    s.constant_branch = h_star;
    for (std::size_t i = 0; i < k; ++i) {
        const double phi = static_cast<double>(i + 1);
        auto model = std::make_shared<const markov::MarkovModel>(realize_entropy(entropies[i], phi));
        s.pieces.push_back(markov_piece("attractor_" + std::to_string(i + 1), std::move(model), entropies[i]));
        s.predicted_branches.push_back({phi, entropies[i]});
    }
    finish(s);
    return s;
}

ProductReduction build_product_example(double alpha, PotentialXY potential, int level) {
    check_irrational(alpha);
    if (level < 1 || level > 16) throw Error(ErrorCode::InvalidArgument, "refinement level must be in [1, 16]");
    if (!potential) throw Error(ErrorCode::InvalidArgument, "product example needs a potential");

    // Periodic trapezoid rule in y: spectrally accurate for smooth periodic fibres.
    constexpr int fibre_points = 256;
    auto reduced = [potential](double x) {
        double sum = 0.0;
        for (int j = 0; j < fibre_points; ++j) sum += potential(x, static_cast<double>(j) / fibre_points);
        return sum / fibre_points;
    };

    const std::size_t n = std::size_t{1} << level;
    const double cell = 1.0 / static_cast<double>(2 * n);
    std::vector<markov::Edge> edges;
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t b = 0; b < 2; ++b) {
            const double mid = (static_cast<double>(2 * k + b) + 0.5) * cell;
            const double value = reduced(mid);
            if (!std::isfinite(value)) throw Error(ErrorCode::InvalidArgument, "potential is not finite on the grid");
            edges.push_back({k, ((k << 1) | b) & (n - 1), value, 0.0});
        }
    }
    ProductReduction out;
    out.scenario.label = "product";
    auto model = std::make_shared<const markov::MarkovModel>(n, std::move(edges));
    out.scenario.pieces.push_back(markov_piece("doubling_refinement", std::move(model), std::numbers::ln2));
    out.scenario.map = smooth2d::product_map(alpha);
    out.scenario.potential =
        smooth2d::Potential::function("product_potential", [potential](smooth2d::Vec2 p) { return potential(p.x, p.y); });
    out.reduced_potential = reduced;
    return out;
}

CompositeScenario build_hybrid(double lambda_min, bool with_neutral_point) {
    if (!(lambda_min <= 0.0 && lambda_min > -std::numbers::ln2)) {
        throw Error(ErrorCode::InvalidArgument, "hybrid lambda_min must lie in (-log 2, 0]");
    }
    CompositeScenario s;
    s.label = "hybrid";
    s.pieces.push_back(markov_piece("expanding_set", full_shift(2, -std::numbers::ln2), std::numbers::ln2));
    s.pieces.push_back(sink_piece("contracting_point", -lambda_min, lambda_min));
    s.predicted_branches = {{-std::numbers::ln2, std::numbers::ln2}, {-lambda_min, 0.0}};
    if (with_neutral_point) {
        s.pieces.push_back(sink_piece("neutral_point", 0.0, 0.0));
        s.predicted_branches.push_back({0.0, 0.0});
    }
    finish(s);
    s.map = smooth2d::hybrid_map(lambda_min);
    s.potential = smooth2d::Potential::geometric();
    return s;
}

double PiecewiseLinearMarkovMap::slope(std::size_t i) const {
    double image = 0.0;
    for (std::size_t j = first.at(i); j <= last.at(i); ++j) image += lengths.at(j);
    return image / lengths.at(i);
}

markov::MarkovModel PiecewiseLinearMarkovMap::model() const {
    std::vector<markov::Edge> edges;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        const double phi = -std::log(slope(i));
        for (std::size_t j = first[i]; j <= last[i]; ++j) edges.push_back({i, j, phi, 0.0});
    }
    return markov::MarkovModel(lengths.size(), std::move(edges));
}

PiecewiseLinearMarkovMap random_pl_markov_map(Rng& rng, std::size_t max_states) {
    if (max_states < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 states");
    for (int attempt = 0; attempt < 10000; ++attempt) {
        const std::size_t n = 2 + rng.index(max_states - 1);
        PiecewiseLinearMarkovMap map;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            map.lengths.push_back(rng.uniform(0.2, 1.0));
            total += map.lengths.back();
        }
        for (double& l : map.lengths) l /= total;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t a = rng.index(n);
            map.first.push_back(a);
            map.last.push_back(a + rng.index(n - a));
        }
        if (map.model().is_irreducible()) return map;
    }
    throw Error(ErrorCode::NoConvergence, "could not draw an irreducible interval map");
}

double margulis_ruelle_gap(const PiecewiseLinearMarkovMap& map, double t) {
    const auto model = map.model();
    const auto mu = markov::equilibrium_measure(model, t);
    return -markov::integral_of_potential(mu, model) - markov::markov_entropy(mu);
}

}  // namespace pressure_lab::scenarios
