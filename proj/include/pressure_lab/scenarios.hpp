#pragma once

// Composite systems whose pressure is the maximum of per-piece pressures,
// together with closed-form branch predictions for each construction.

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pressure_lab/markov_core.hpp"
#include "pressure_lab/pressure_analysis.hpp"
#include "pressure_lab/random_models.hpp"
#include "pressure_lab/smooth2d.hpp"

namespace pressure_lab::scenarios {

/// Markov approximation of the intermittent map x -> x + x^(1+alpha) mod 1
/// carrying the potential -log f'.
///
/// Partition points x_0 = 1 > x_1 = c > x_2 > ... where f(c) = 1 and x_{n+1}
/// is the left preimage of x_n. States are A_n = [x_{n+1}, x_n) for
/// n = 0..N-2 plus one lumped state [0, x_{N-1}) near the neutral point.
/// Edge potentials are exact log-ratios of interval lengths; the lumped
/// state's self-loop carries the zero exponent of the neutral fixed point.
class NeutralModel {
public:
    NeutralModel(double alpha, std::size_t states);

    double alpha() const noexcept { return alpha_; }
    std::size_t states() const noexcept { return states_; }
    /// x_0 .. x_N
    const std::vector<double>& partition() const noexcept { return xs_; }
    /// Length of the lumped interval, i.e. the part of [0,1) not resolved by
    /// the induced partition.
    double unassigned_mass() const noexcept { return xs_[states_ - 1]; }

    /// Pressure at t from the first-return (renewal) equation at state A_0.
    double pressure(double t) const;
    /// The same system as an explicit sparse model (for cross-checks).
    markov::MarkovModel markov_model() const;

private:
    double alpha_;
    std::size_t states_;
    std::vector<double> xs_;
    std::vector<double> first_edge_;  // A_0 -> A_m, m = 0..N-2
    double first_edge_lumped_ = 0.0;  // A_0 -> L
    std::vector<double> descent_;     // A_n -> A_{n-1}, n = 1..N-2 (index n)
    double lumped_loop_ = 0.0;        // L -> L
    double lumped_exit_ = 0.0;        // L -> A_{N-2}
    std::vector<double> return_sum_;  // potential along the loop A_0 -> A_m -> ... -> A_0
    double lumped_return_sum_ = 0.0;  // same through L, excluding the L -> L loops
};

enum class PieceKind { Markov, Sink, Neutral };

struct Piece {
    PieceKind kind = PieceKind::Sink;
    std::string label;
    std::shared_ptr<const markov::MarkovModel> model;   // Markov
    double value = 0.0;                                 // Sink: Birkhoff value of the potential
    std::shared_ptr<const NeutralModel> neutral;        // Neutral
    /// Lyapunov exponent along the dominating direction on the piece.
    double f_exponent = 0.0;

    double pressure(double t) const;
};

struct CompositeScenario {
    std::string label;
    std::vector<Piece> pieces;
    /// Empty when the pressure has no closed form (neutral, general product).
    std::vector<analysis::AffineBranch> predicted_branches;
    std::optional<double> constant_branch;
    std::vector<double> predicted_kinks;
    /// Plateau the curve freezes onto, when the construction predicts one.
    std::optional<double> freezing_plateau;

    /// Demonstration map and potential for orbit-level cross-checks.
    std::optional<smooth2d::SmoothMap2D> map;
    std::optional<smooth2d::Potential> potential;

    bool has_closed_form() const noexcept { return !predicted_branches.empty() || constant_branch.has_value(); }
    analysis::PiecewiseAffine predicted_envelope() const;
    double lambda_min_f() const;
    double lambda_max_f() const;
};

/// max over pieces of the piece pressure.
double composite_pressure(const CompositeScenario& scenario, double t);

/// max over the pieces of one exponent class (NonExpanding: f_exponent <= 0);
/// -infinity when the class is empty.
double sign_restricted_pressure(const CompositeScenario& scenario, double t, smooth2d::OrbitClass cls);

/// Irreducible model whose pressure at t is h + t * potential. Full m-shift
/// when h = log m; otherwise the full floor(e^h)-shift with an extra loop
/// weight on one state tuned by bisection (tolerance 1e-12).
markov::MarkovModel realize_entropy(double h, double potential);

CompositeScenario build_two_sinks(std::size_t chaotic_symbols, int period = 1);
CompositeScenario build_axiom_a(const std::vector<double>& entropies);
CompositeScenario build_multi_attractor(const std::vector<double>& entropies, double h_star);

using PotentialXY = std::function<double(double x, double y)>;

struct ProductReduction {
    CompositeScenario scenario;
    /// Fibre average phi~(x) = integral of phi(x, y) dy.
    std::function<double(double)> reduced_potential;
};

/// Doubling map times an irrational rotation; the pressure reduces to the
/// doubling map with the fibre-averaged potential, refined to 2^level states.
ProductReduction build_product_example(double alpha, PotentialXY potential, int level = 8);

CompositeScenario build_neutral(double alpha_mp, std::size_t truncation);

/// Expanding 2-shift (exponent log 2, potential -log 2) together with a
/// contracting fixed point of exponent lambda_min and, optionally, a neutral
/// fixed point. The potential is the geometric one, -lambda on each piece.
CompositeScenario build_hybrid(double lambda_min, bool with_neutral_point = true);

/// Piecewise-linear Markov interval map: interval i has length lengths[i]
/// and is mapped affinely onto the union of intervals first[i]..last[i].
struct PiecewiseLinearMarkovMap {
    std::vector<double> lengths;
    std::vector<std::size_t> first;
    std::vector<std::size_t> last;

    double slope(std::size_t i) const;
    /// Edges i -> j with potential -log slope(i).
    markov::MarkovModel model() const;
};

PiecewiseLinearMarkovMap random_pl_markov_map(Rng& rng, std::size_t max_states);

/// integral of log|f'| minus entropy for the equilibrium state of t * (-log|f'|).
double margulis_ruelle_gap(const PiecewiseLinearMarkovMap& map, double t);

}  // namespace pressure_lab::scenarios
