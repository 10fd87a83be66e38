#include "pressure_lab/markov_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "pressure_lab/error.hpp"

namespace pressure_lab::markov {
namespace {

bool all_reachable(std::size_t n, std::span<const std::size_t> offsets,
                   std::span<const std::size_t> cols) {
    if (n == 0) return false;
    std::vector<char> seen(n, 0);
    std::queue<std::size_t> frontier;
    frontier.push(0);
    seen[0] = 1;
    std::size_t count = 1;
    while (!frontier.empty()) {
        const std::size_t v = frontier.front();
        frontier.pop();
        for (std::size_t k = offsets[v]; k < offsets[v + 1]; ++k) {
            const std::size_t w = cols[k];
            if (!seen[w]) {
                seen[w] = 1;
                ++count;
                frontier.push(w);
            }
        }
    }
    return count == n;
}

double sum_of(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

void scale(std::span<double> v, double factor) {
    for (double& x : v) x *= factor;
}

struct Eigenpair {
    double value;
    std::vector<double> vec;
    double residual;
    std::size_t iterations;
};

// Power iteration on M + shift*I; the shift makes irreducible-but-periodic
// matrices primitive without changing eigenvectors.
Eigenpair dominant_pair(const SparseMatrix& m, const PerronOptions& options) {
    const std::size_t n = m.size();
    const auto sums = m.row_sums();
    const auto [lo, hi] = std::minmax_element(sums.begin(), sums.end());
    const double shift = 0.5 * (*lo + *hi);

    std::vector<double> x(n, 1.0 / static_cast<double>(n));
    std::vector<double> mx(n);
    double rho = 0.0;
    double rel_residual = std::numeric_limits<double>::infinity();
    for (std::size_t it = 1; it <= options.max_iterations; ++it) {
        m.multiply(x, mx);
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            num += x[i] * mx[i];
            den += x[i] * x[i];
        }
        rho = num / den;
        double res = 0.0;
        double xmax = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            res = std::max(res, std::abs(mx[i] - rho * x[i]));
            xmax = std::max(xmax, std::abs(x[i]));
        }
        if (!std::isfinite(rho) || !std::isfinite(res)) {
            throw Error(ErrorCode::NoConvergence, "power iteration produced a non-finite value");
        }
        rel_residual = res / (std::max(rho, std::numeric_limits<double>::min()) * xmax);
        if (rel_residual <= options.tolerance) {
            return {rho, x, res / sum_of(x), it};
        }
        for (std::size_t i = 0; i < n; ++i) mx[i] += shift * x[i];
        const double total = sum_of(mx);
        if (!(total > 0.0)) {
            throw Error(ErrorCode::NoConvergence, "power iteration collapsed to zero");
        }
        scale(mx, 1.0 / total);
        x.swap(mx);
    }
    std::ostringstream msg;
    msg << "relative residual " << rel_residual << " after " << options.max_iterations
        << " iterations";
    throw Error(ErrorCode::NoConvergence, msg.str());
}

}  // namespace

// ---------------------------------------------------------------------------
// SparseMatrix

SparseMatrix::SparseMatrix(std::size_t n, std::vector<Entry> entries) : n_(n) {
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    offsets_.assign(n + 1, 0);
    for (const auto& e : entries) {
        if (e.row >= n || e.col >= n) {
            throw Error(ErrorCode::InvalidArgument, "matrix entry index out of range");
        }
        if (e.value < 0.0 || !std::isfinite(e.value)) {
            throw Error(ErrorCode::InvalidArgument, "matrix entries must be finite and nonnegative");
        }
        if (e.value == 0.0) continue;
        cols_.push_back(e.col);
        values_.push_back(e.value);
        ++offsets_[e.row + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
}

SparseMatrix SparseMatrix::from_dense(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) throw Error(ErrorCode::InvalidArgument, "matrix is not square");
        for (std::size_t j = 0; j < n; ++j) {
            if (rows[i][j] != 0.0) entries.push_back({i, j, rows[i][j]});
        }
    }
    return SparseMatrix(n, std::move(entries));
}

SparseMatrix SparseMatrix::transposed() const {
    std::vector<Entry> entries;
    entries.reserve(values_.size());
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
            entries.push_back({cols_[k], i, values_[k]});
        }
    }
    return SparseMatrix(n_, std::move(entries));
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < n_; ++i) {
        double acc = 0.0;
        for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) acc += values_[k] * x[cols_[k]];
        y[i] = acc;
    }
}

std::vector<double> SparseMatrix::row_sums() const {
    std::vector<double> sums(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) sums[i] += values_[k];
    }
    return sums;
}

bool SparseMatrix::is_irreducible() const {
    if (!all_reachable(n_, offsets_, cols_)) return false;
    const SparseMatrix t = transposed();
    return all_reachable(n_, t.offsets_, t.cols_);
}

// ---------------------------------------------------------------------------
// MarkovModel

MarkovModel::MarkovModel(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "model needs at least one state");
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
        return a.from != b.from ? a.from < b.from : a.to < b.to;
    });
    offsets_.assign(n + 1, 0);
    for (std::size_t k = 0; k < edges_.size(); ++k) {
        const Edge& e = edges_[k];
        if (e.from >= n || e.to >= n) throw Error(ErrorCode::InvalidArgument, "edge index out of range");
        if (!std::isfinite(e.potential) || !std::isfinite(e.log_weight)) {
            throw Error(ErrorCode::InvalidArgument, "edge potential must be finite");
        }
        if (k > 0 && edges_[k - 1].from == e.from && edges_[k - 1].to == e.to) {
            throw Error(ErrorCode::InvalidArgument, "duplicate edge");
        }
        ++offsets_[e.from + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
}

MarkovModel MarkovModel::from_dense(const std::vector<std::vector<int>>& adjacency,
                                    const std::vector<std::vector<double>>& potential) {
    const std::size_t n = adjacency.size();
    if (potential.size() != n) throw Error(ErrorCode::InvalidArgument, "potential shape mismatch");
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        if (adjacency[i].size() != n || potential[i].size() != n) {
            throw Error(ErrorCode::InvalidArgument, "matrices must be square");
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (adjacency[i][j] != 0 && adjacency[i][j] != 1) {
                throw Error(ErrorCode::InvalidArgument, "adjacency entries must be 0 or 1");
            }
            if (adjacency[i][j] == 1) edges.push_back({i, j, potential[i][j], 0.0});
        }
    }
    return MarkovModel(n, std::move(edges));
}

std::span<const Edge> MarkovModel::out_edges(std::size_t state) const {
    return std::span<const Edge>(edges_).subspan(offsets_[state], offsets_[state + 1] - offsets_[state]);
}

const Edge* MarkovModel::find_edge(std::size_t from, std::size_t to) const {
    if (from >= n_) return nullptr;
    const auto row = out_edges(from);
    const auto it = std::lower_bound(row.begin(), row.end(), to,
                                     [](const Edge& e, std::size_t target) { return e.to < target; });
    return (it != row.end() && it->to == to) ? &*it : nullptr;
}

bool MarkovModel::is_irreducible() const {
    std::vector<SparseMatrix::Entry> structure;
    structure.reserve(edges_.size());
    for (const Edge& e : edges_) structure.push_back({e.from, e.to, 1.0});
    return SparseMatrix(n_, std::move(structure)).is_irreducible();
}

double MarkovModel::min_potential() const {
    double v = std::numeric_limits<double>::infinity();
    for (const Edge& e : edges_) v = std::min(v, e.potential);
    return v;
}

double MarkovModel::max_potential() const {
    double v = -std::numeric_limits<double>::infinity();
    for (const Edge& e : edges_) v = std::max(v, e.potential);
    return v;
}

MarkovModel MarkovModel::transposed() const {
    std::vector<Edge> edges;
    edges.reserve(edges_.size());
    for (const Edge& e : edges_) edges.push_back({e.to, e.from, e.potential, e.log_weight});
    return MarkovModel(n_, std::move(edges));
}

SparseMatrix MarkovModel::weighted_matrix(double t) const {
    std::vector<SparseMatrix::Entry> entries;
    entries.reserve(edges_.size());
    for (const Edge& e : edges_) {
        const double w = std::exp(e.log_weight + t * e.potential);
        if (!std::isfinite(w)) {
            throw Error(ErrorCode::NumericalOverflow, "edge weight exp(log_weight + t*potential) overflows");
        }
        entries.push_back({e.from, e.to, w});
    }
    return SparseMatrix(n_, std::move(entries));
}

// ---------------------------------------------------------------------------
// Measures

void MarkovMeasure::validate() const {
    if (stationary.size() != n) throw Error(ErrorCode::InvalidArgument, "stationary vector has wrong length");
    std::vector<double> row(n, 0.0);
    std::vector<double> pushed(n, 0.0);
    for (const Transition& tr : transitions) {
        if (tr.from >= n || tr.to >= n) throw Error(ErrorCode::InvalidArgument, "transition index out of range");
        if (tr.probability < 0.0) throw Error(ErrorCode::InvalidArgument, "negative transition probability");
        row[tr.from] += tr.probability;
        pushed[tr.to] += stationary[tr.from] * tr.probability;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(row[i] - 1.0) > 1e-12) throw Error(ErrorCode::InvalidArgument, "transition rows must sum to 1");
        if (stationary[i] < 0.0) throw Error(ErrorCode::InvalidArgument, "stationary vector must be nonnegative");
        total += stationary[i];
    }
    if (std::abs(total - 1.0) > 1e-12) throw Error(ErrorCode::InvalidArgument, "stationary vector must sum to 1");
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(pushed[i] - stationary[i]) > 1e-10) {
            throw Error(ErrorCode::InvalidArgument, "stationary vector is not invariant");
        }
    }
}

MarkovMeasure make_measure(std::size_t n, std::vector<Transition> transitions) {
    std::sort(transitions.begin(), transitions.end(), [](const Transition& a, const Transition& b) {
        return a.from != b.from ? a.from < b.from : a.to < b.to;
    });
    std::vector<SparseMatrix::Entry> entries;
    entries.reserve(transitions.size());
    for (const Transition& tr : transitions) entries.push_back({tr.from, tr.to, tr.probability});
    const SparseMatrix p(n, std::move(entries));
    if (!p.is_irreducible()) {
        throw Error(ErrorCode::NonIrreducible, "transition matrix is not irreducible");
    }
    auto stationary = dominant_pair(p.transposed(), PerronOptions{}).vec;
    scale(stationary, 1.0 / sum_of(stationary));
    MarkovMeasure m{n, std::move(transitions), std::move(stationary)};
    return m;
}

PerronData perron_root(const SparseMatrix& matrix, const PerronOptions& options) {
    if (matrix.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty matrix");
    if (!matrix.is_irreducible()) {
        throw Error(ErrorCode::NonIrreducible, "matrix is not irreducible");
    }
    Eigenpair right = dominant_pair(matrix, options);
    Eigenpair left = dominant_pair(matrix.transposed(), options);
    scale(right.vec, 1.0 / sum_of(right.vec));
    scale(left.vec, 1.0 / sum_of(left.vec));

    std::vector<double> br(matrix.size());
    matrix.multiply(right.vec, br);
    double residual = 0.0;
    for (std::size_t i = 0; i < br.size(); ++i) {
        residual = std::max(residual, std::abs(br[i] - right.value * right.vec[i]));
    }
    return {right.value, std::move(right.vec), std::move(left.vec), residual,
            std::max(right.iterations, left.iterations)};
}

double pressure(const MarkovModel& model, double t) {
    return std::log(perron_root(model.weighted_matrix(t)).rho);
}

MarkovMeasure equilibrium_measure(const MarkovModel& model, double t) {
    const SparseMatrix b = model.weighted_matrix(t);
    const PerronData pd = perron_root(b);
    const std::size_t n = model.size();

    MarkovMeasure m;
    m.n = n;
    m.transitions.reserve(b.nonzeros());
    const auto offsets = b.row_offsets();
    const auto cols = b.columns();
    const auto vals = b.values();
    for (std::size_t i = 0; i < n; ++i) {
        double row_total = 0.0;
        const std::size_t first = m.transitions.size();
        for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
            const double p = vals[k] * pd.right_vec[cols[k]] / (pd.rho * pd.right_vec[i]);
            m.transitions.push_back({i, cols[k], p});
            row_total += p;
        }
        for (std::size_t k = first; k < m.transitions.size(); ++k) m.transitions[k].probability /= row_total;
    }
    m.stationary.resize(n);
    for (std::size_t i = 0; i < n; ++i) m.stationary[i] = pd.left_vec[i] * pd.right_vec[i];
    scale(m.stationary, 1.0 / sum_of(m.stationary));
    return m;
}

double markov_entropy(const MarkovMeasure& measure) {
    double h = 0.0;
    for (const Transition& tr : measure.transitions) {
        if (tr.probability > 0.0) {
            h -= measure.stationary[tr.from] * tr.probability * std::log(tr.probability);
        }
    }
    return std::max(h, 0.0);
}

namespace {

template <typename Field>
double integrate_edges(const MarkovMeasure& measure, const MarkovModel& model, Field field) {
    if (measure.n != model.size()) {
        throw Error(ErrorCode::SupportMismatch, "measure and model have different state counts");
    }
    double acc = 0.0;
    for (const Transition& tr : measure.transitions) {
        const double mass = measure.stationary[tr.from] * tr.probability;
        if (mass <= 0.0) continue;
        const Edge* e = model.find_edge(tr.from, tr.to);
        if (e == nullptr) {
            std::ostringstream msg;
            msg << "measure charges forbidden edge " << tr.from << " -> " << tr.to;
            throw Error(ErrorCode::SupportMismatch, msg.str());
        }
        acc += mass * field(*e);
    }
    return acc;
}

}  // namespace

double integral_of_potential(const MarkovMeasure& measure, const MarkovModel& model) {
    return integrate_edges(measure, model, [](const Edge& e) { return e.potential; });
}

double integral_of_log_weight(const MarkovMeasure& measure, const MarkovModel& model) {
    return integrate_edges(measure, model, [](const Edge& e) { return e.log_weight; });
}

double pressure_derivative(const MarkovModel& model, double t) {
    return integral_of_potential(equilibrium_measure(model, t), model);
}

}  // namespace pressure_lab::markov
