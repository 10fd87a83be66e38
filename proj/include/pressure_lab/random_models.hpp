#pragma once

#include <cstdint>
#include <random>

#include "pressure_lab/markov_core.hpp"

namespace pressure_lab {

/// Portable uniform draws on top of mt19937_64 (the standard distributions
/// are implementation-defined, which would break byte-identical outputs).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }
    std::uint64_t bits() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

namespace markov {

/// Random irreducible model with 1..max_states states and potentials in
/// [-potential_scale, potential_scale]; every state keeps at least one edge.
MarkovModel random_irreducible_model(Rng& rng, std::size_t max_states, double potential_scale = 1.0);

/// Random Markov measure supported on (a random subset of) the model's edges,
/// irreducible on the full state space.
MarkovMeasure random_measure(const MarkovModel& model, Rng& rng);

}  // namespace markov
}  // namespace pressure_lab
