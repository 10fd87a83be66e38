#include "pressure_lab/random_models.hpp"

#include <vector>

namespace pressure_lab::markov {

MarkovModel random_irreducible_model(Rng& rng, std::size_t max_states, double potential_scale) {
    const std::size_t n = 1 + rng.index(max_states);
    for (;;) {
        std::vector<Edge> edges;
        // A random Hamiltonian cycle guarantees irreducibility; extra edges
        // are added with probability 1/2.
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
        std::vector<char> present(n * n, 0);
        for (std::size_t i = 0; i < n; ++i) present[order[i] * n + order[(i + 1) % n]] = 1;
        for (std::size_t k = 0; k < n * n; ++k) {
            if (rng.uniform() < 0.5) present[k] = 1;
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (present[i * n + j]) {
                    edges.push_back({i, j, rng.uniform(-potential_scale, potential_scale), 0.0});
                }
            }
        }
        MarkovModel model(n, std::move(edges));
        if (model.is_irreducible()) return model;
    }
}

MarkovMeasure random_measure(const MarkovModel& model, Rng& rng) {
    const std::size_t n = model.size();
    for (;;) {
        std::vector<Transition> transitions;
        for (std::size_t i = 0; i < n; ++i) {
            const auto out = model.out_edges(i);
            std::vector<double> w(out.size());
            double total = 0.0;
            for (std::size_t k = 0; k < out.size(); ++k) {
                // Some edges are dropped so the support is a proper subgraph.
                w[k] = rng.uniform() < 0.25 ? 0.0 : rng.uniform(0.05, 1.0);
                total += w[k];
            }
            if (total == 0.0) {
                w[rng.index(out.size())] = 1.0;
                total = 1.0;
            }
            for (std::size_t k = 0; k < out.size(); ++k) {
                if (w[k] > 0.0) transitions.push_back({i, out[k].to, w[k] / total});
            }
        }
        try {
            return make_measure(n, std::move(transitions));
        } catch (const std::exception&) {
            // support not irreducible; redraw
        }
    }
}

}  // namespace pressure_lab::markov
