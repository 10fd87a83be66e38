#pragma once

// Exact thermodynamic formalism for finite-state Markov models. The pressure
// of t*phi is log of the Perron root of the weighted transition matrix
//
//     B(t)_ij = adjacency_ij * exp(log_weight_ij + t * potential_ij),
//
// and the equilibrium state is the Markov measure built from its Perron
// eigendata. Models are stored as sorted edge lists so that truncated
// countable-state approximations with a few thousand states stay cheap.

#include <cstddef>
#include <span>
#include <vector>

namespace pressure_lab::markov {

/// One allowed transition i -> j. `log_weight` is a t-independent weight
/// (zero for ordinary subshifts); scenario code uses it to tune entropies.
struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;
    double potential = 0.0;
    double log_weight = 0.0;
};

/// Nonnegative square matrix in compressed-row form.
class SparseMatrix {
public:
    struct Entry {
        std::size_t row;
        std::size_t col;
        double value;
    };

    SparseMatrix() = default;
    SparseMatrix(std::size_t n, std::vector<Entry> entries);

    static SparseMatrix from_dense(const std::vector<std::vector<double>>& rows);

    std::size_t size() const noexcept { return n_; }
    std::size_t nonzeros() const noexcept { return values_.size(); }
    SparseMatrix transposed() const;

    /// y = M x
    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> row_sums() const;
    bool is_irreducible() const;

    std::span<const std::size_t> row_offsets() const noexcept { return offsets_; }
    std::span<const std::size_t> columns() const noexcept { return cols_; }
    std::span<const double> values() const noexcept { return values_; }

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> offsets_{0};
    std::vector<std::size_t> cols_;
    std::vector<double> values_;
};

/// Finite weighted transition graph. Immutable after construction.
class MarkovModel {
public:
    MarkovModel(std::size_t n, std::vector<Edge> edges);

    /// Dense constructor; potential entries off the adjacency are ignored.
    static MarkovModel from_dense(const std::vector<std::vector<int>>& adjacency,
                                  const std::vector<std::vector<double>>& potential);

    std::size_t size() const noexcept { return n_; }
    std::span<const Edge> edges() const noexcept { return edges_; }
    std::span<const Edge> out_edges(std::size_t state) const;
    const Edge* find_edge(std::size_t from, std::size_t to) const;
    bool has_edge(std::size_t from, std::size_t to) const { return find_edge(from, to) != nullptr; }

    bool is_irreducible() const;
    double min_potential() const;
    double max_potential() const;

    /// Transposes adjacency, potential and log weights simultaneously.
    MarkovModel transposed() const;

    /// B(t) as defined above.
    SparseMatrix weighted_matrix(double t) const;

private:
    std::size_t n_;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_;
};

struct Transition {
    std::size_t from = 0;
    std::size_t to = 0;
    double probability = 0.0;
};

/// Stationary Markov measure: transition probabilities plus stationary vector.
struct MarkovMeasure {
    std::size_t n = 0;
    std::vector<Transition> transitions;  // sorted by (from, to)
    std::vector<double> stationary;

    /// Throws InvalidArgument unless rows sum to one (1e-12), the stationary
    /// vector is a probability vector (1e-12) and stationarity holds (1e-10).
    void validate() const;
};

/// Builds a measure from row-stochastic transitions; the stationary vector is
/// the Perron left vector of the transition matrix.
MarkovMeasure make_measure(std::size_t n, std::vector<Transition> transitions);

struct PerronData {
    double rho = 0.0;
    std::vector<double> right_vec;  // sums to 1
    std::vector<double> left_vec;   // sums to 1
    double residual = 0.0;          // ||B r - rho r||_inf for the normalised right vector
    std::size_t iterations = 0;
};

struct PerronOptions {
    double tolerance = 1e-12;
    std::size_t max_iterations = 1'000'000;
};

/// Leading eigenvalue and positive eigenvectors of a nonnegative irreducible
/// matrix by shifted power iteration from the all-ones vector.
PerronData perron_root(const SparseMatrix& matrix, const PerronOptions& options = {});

double pressure(const MarkovModel& model, double t);
MarkovMeasure equilibrium_measure(const MarkovModel& model, double t);

/// Kolmogorov-Sinai entropy of the stationary chain, in nats.
double markov_entropy(const MarkovMeasure& measure);

/// Integral of the edge potential; throws SupportMismatch if the measure
/// charges a transition the model forbids.
double integral_of_potential(const MarkovMeasure& measure, const MarkovModel& model);

/// Same for the t-independent log weights.
double integral_of_log_weight(const MarkovMeasure& measure, const MarkovModel& model);

/// d/dt pressure, i.e. the integral of the potential at the equilibrium state.
double pressure_derivative(const MarkovModel& model, double t);

}  // namespace pressure_lab::markov
