#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "pressure_lab/error.hpp"
#include "pressure_lab/markov_core.hpp"
#include "pressure_lab/random_models.hpp"

using namespace pressure_lab;
using namespace pressure_lab::markov;

namespace {

const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

MarkovModel full_shift(std::size_t n, double c = 0.0) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) edges.push_back({i, j, c, 0.0});
    return MarkovModel(n, std::move(edges));
}

MarkovModel golden_mean(double phi11 = 0.0) {
    // states 0, 1; forbidden word "11" -> state 1 cannot follow itself.
    // Labelled so that the edge "1 -> 1" in the docs is state 0 -> 0 here.
    return MarkovModel::from_dense({{1, 1}, {1, 0}}, {{phi11, 0.0}, {0.0, 0.0}});
}

// Target-symbol potential on the full 2-shift.
MarkovModel target_potential_shift(double a, double b) {
    return MarkovModel::from_dense({{1, 1}, {1, 1}}, {{a, b}, {a, b}});
}

// Independent oracle: spectral radius by a general dense eigensolver.
double eigen_spectral_radius(const SparseMatrix& m) {
    const auto n = static_cast<Eigen::Index>(m.size());
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
    const auto off = m.row_offsets();
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t k = off[i]; k < off[i + 1]; ++k)
            dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m.columns()[k])) += m.values()[k];
    Eigen::EigenSolver<Eigen::MatrixXd> es(dense, false);
    double r = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) r = std::max(r, std::abs(es.eigenvalues()[i]));
    return r;
}

}  // namespace

TEST_CASE("perron_root: 1x1, all-ones and golden-mean matrices") {
    CHECK(perron_root(SparseMatrix::from_dense({{3.5}})).rho == doctest::Approx(3.5).epsilon(1e-14));

    const auto ones = perron_root(SparseMatrix::from_dense({{1, 1}, {1, 1}}));
    CHECK(ones.rho == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(ones.right_vec[0] == doctest::Approx(0.5));

    const auto golden = perron_root(SparseMatrix::from_dense({{1, 1}, {1, 0}}));
    CHECK(std::abs(golden.rho - kGolden) < 1e-11);
    CHECK(golden.residual <= 1e-10);
    CHECK(golden.right_vec[0] > 0.0);
    CHECK(golden.right_vec[1] > 0.0);
    CHECK(golden.left_vec[0] + golden.left_vec[1] == doctest::Approx(1.0));
}

TEST_CASE("perron_root handles periodic irreducible matrices") {
    const auto swap = perron_root(SparseMatrix::from_dense({{0, 1}, {1, 0}}));
    CHECK(swap.rho == doctest::Approx(1.0).epsilon(1e-12));
    const auto cycle3 = perron_root(SparseMatrix::from_dense({{0, 2, 0}, {0, 0, 3}, {0.5, 0, 0}}));
    CHECK(cycle3.rho == doctest::Approx(std::cbrt(3.0)).epsilon(1e-11));
}

TEST_CASE("perron_root rejects reducible input and reports non-convergence") {
    CHECK_THROWS_AS(perron_root(SparseMatrix::from_dense({{1, 1}, {0, 1}})), Error);
    try {
        perron_root(SparseMatrix::from_dense({{1, 1}, {0, 1}}));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonIrreducible);
    }
    try {
        perron_root(SparseMatrix::from_dense({{1, 1, 0}, {0, 1, 1}, {1e-6, 0, 1}}), PerronOptions{1e-12, 3});
        FAIL("expected NoConvergence");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoConvergence);
    }
}

TEST_CASE("perron_root agrees with a dense eigensolver on random models") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const auto model = random_irreducible_model(rng, 6, 2.0);
        const double t = rng.uniform(-2.0, 2.0);
        const auto b = model.weighted_matrix(t);
        const auto pd = perron_root(b);
        CHECK(pd.rho == doctest::Approx(eigen_spectral_radius(b)).epsilon(1e-10));
        CHECK(pd.residual <= 1e-10 * std::max(1.0, pd.rho));
        for (double v : pd.right_vec) CHECK(v > 0.0);
        for (double v : pd.left_vec) CHECK(v > 0.0);
    }
}

TEST_CASE("pressure examples") {
    for (double t : {-3.0, 0.0, 0.7, 5.0}) {
        CHECK(pressure(full_shift(2), t) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
        CHECK(pressure(full_shift(2, -0.4), t) == doctest::Approx(std::log(2.0) - 0.4 * t).epsilon(1e-12));
    }
    // Word-count oracle: #words of length n in the full 2-shift is 2^n.
    CHECK(pressure(full_shift(2), 0.0) == doctest::Approx(std::log(std::pow(2.0, 30)) / 30.0));
    CHECK(pressure(golden_mean(), 0.0) == doctest::Approx(std::log(kGolden)).epsilon(1e-12));
    CHECK(pressure(golden_mean(), 0.0) == doctest::Approx(0.4812118250596).epsilon(1e-11));
}

TEST_CASE("equilibrium_measure examples") {
    SUBCASE("uniform Bernoulli on the full 2-shift") {
        const auto m = equilibrium_measure(full_shift(2), 1.3);
        m.validate();
        for (const auto& tr : m.transitions) CHECK(tr.probability == doctest::Approx(0.5));
        CHECK(m.stationary[0] == doctest::Approx(0.5));
    }
    SUBCASE("target-symbol potential gives the two-state Gibbs weights") {
        const double a = 0.3, b = -1.1;
        const auto m = equilibrium_measure(target_potential_shift(a, b), 1.0);
        m.validate();
        const double z = std::exp(a) + std::exp(b);
        CHECK(m.stationary[0] == doctest::Approx(std::exp(a) / z).epsilon(1e-12));
        CHECK(m.stationary[1] == doctest::Approx(std::exp(b) / z).epsilon(1e-12));
    }
    SUBCASE("golden mean measure of maximal entropy") {
        // Direct eigenvector oracle: right vector (rho, 1), left vector (rho, 1)
        // for the symmetric matrix, so stationary is proportional to (rho^2, 1).
        const auto m = equilibrium_measure(golden_mean(), 0.0);
        m.validate();
        const double g2 = kGolden * kGolden;
        CHECK(m.stationary[0] == doctest::Approx(g2 / (g2 + 1.0)).epsilon(1e-11));
        CHECK(markov_entropy(m) == doctest::Approx(std::log(kGolden)).epsilon(1e-11));
    }
}

TEST_CASE("markov_entropy examples") {
    const auto model = full_shift(2);
    auto bernoulli = [&](double p) {
        return make_measure(2, {{0, 0, p}, {0, 1, 1 - p}, {1, 0, p}, {1, 1, 1 - p}});
    };
    CHECK(markov_entropy(bernoulli(0.5)) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    const double oracle = -(0.25 * std::log(0.25) + 0.75 * std::log(0.75));
    CHECK(markov_entropy(bernoulli(0.25)) == doctest::Approx(oracle).epsilon(1e-13));
    CHECK(markov_entropy(bernoulli(0.25)) == doctest::Approx(0.5623351446).epsilon(1e-9));
    CHECK(markov_entropy(make_measure(1, {{0, 0, 1.0}})) == 0.0);
    (void)model;
}

TEST_CASE("integral_of_potential examples and support check") {
    const auto half = make_measure(2, {{0, 0, 0.5}, {0, 1, 0.5}, {1, 0, 0.5}, {1, 1, 0.5}});
    CHECK(integral_of_potential(half, full_shift(2, 0.8)) == doctest::Approx(0.8));
    CHECK(integral_of_potential(half, target_potential_shift(0.0, 1.0)) == doctest::Approx(0.5));

    try {
        integral_of_potential(half, golden_mean());
        FAIL("expected SupportMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SupportMismatch);
    }
}

TEST_CASE("integral_of_potential matches a sampled Birkhoff average") {
    const auto model = golden_mean(1.0);
    const auto mme = equilibrium_measure(model, 0.0);
    const double exact = integral_of_potential(mme, model);

    // Oracle: simulate the chain for 1e6 steps and average phi along the path.
    Rng rng(2024);
    std::size_t state = 0;
    double sum = 0.0;
    const std::size_t steps = 1'000'000;
    for (std::size_t k = 0; k < steps; ++k) {
        double u = rng.uniform();
        std::size_t next = state;
        for (const auto& tr : mme.transitions) {
            if (tr.from != state) continue;
            next = tr.to;
            if (u < tr.probability) break;
            u -= tr.probability;
        }
        sum += model.find_edge(state, next)->potential;
        state = next;
    }
    CHECK(std::abs(sum / steps - exact) < 3e-3);
    CHECK(exact == doctest::Approx(mme.stationary[0] * mme.transitions[0].probability));
}

TEST_CASE("pressure_derivative examples") {
    for (double t : {-1.0, 0.0, 2.0}) {
        CHECK(pressure_derivative(full_shift(3, -0.25), t) == doctest::Approx(-0.25));
        CHECK(std::abs(pressure_derivative(golden_mean(), t)) < 1e-15);
    }
    CHECK(pressure_derivative(target_potential_shift(0.0, 1.0), 0.0) == doctest::Approx(0.5));
}

TEST_CASE("property: variational principle on random models") {
    Rng rng(99);
    for (int m = 0; m < 40; ++m) {
        const auto model = random_irreducible_model(rng, 5);
        for (double t : {-1.5, 0.0, 0.8}) {
            const double p = pressure(model, t);
            for (int k = 0; k < 5; ++k) {
                const auto nu = random_measure(model, rng);
                nu.validate();
                CHECK(markov_entropy(nu) + t * integral_of_potential(nu, model) <= p + 1e-8);
            }
            const auto eq = equilibrium_measure(model, t);
            eq.validate();
            CHECK(markov_entropy(eq) + t * integral_of_potential(eq, model) == doctest::Approx(p).epsilon(1e-9));
            CHECK(markov_entropy(eq) <= std::log(static_cast<double>(model.size())) + 1e-12);
        }
    }
}

TEST_CASE("property: convexity, monotonicity and transposition invariance") {
    Rng rng(5);
    for (int m = 0; m < 30; ++m) {
        const auto model = random_irreducible_model(rng, 5);
        const auto transposed = model.transposed();
        std::vector<double> grid;
        for (int i = 0; i <= 40; ++i) grid.push_back(pressure(model, -2.0 + 0.1 * i));
        for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
            CHECK(grid[i] <= 0.5 * (grid[i - 1] + grid[i + 1]) + 1e-9);
        }
        for (double t : {-1.0, 0.5, 1.7}) {
            CHECK(pressure(transposed, t) == doctest::Approx(pressure(model, t)).epsilon(1e-11));
        }
    }
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) edges.push_back({i, j, -0.1 * static_cast<double>(i + j), 0.0});
    const MarkovModel nonpositive(3, edges);
    double prev = pressure(nonpositive, 0.0);
    for (int i = 1; i <= 20; ++i) {
        const double cur = pressure(nonpositive, 0.2 * i);
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
}

TEST_CASE("property: derivative matches central differences") {
    Rng rng(11);
    for (int m = 0; m < 10; ++m) {
        const auto model = random_irreducible_model(rng, 5);
        for (int i = 0; i <= 20; ++i) {
            const double t = -2.0 + 0.2 * i;
            const double h = 1e-4;
            const double fd = (pressure(model, t + h) - pressure(model, t - h)) / (2 * h);
            CHECK(std::abs(pressure_derivative(model, t) - fd) <= 1e-5);
        }
    }
}

TEST_CASE("model construction validation") {
    CHECK_THROWS_AS(MarkovModel(0, {}), Error);
    CHECK_THROWS_AS(MarkovModel(2, {{0, 2, 0.0, 0.0}}), Error);
    CHECK_THROWS_AS(MarkovModel(2, {{0, 1, 0.0, 0.0}, {0, 1, 1.0, 0.0}}), Error);
    CHECK_THROWS_AS(MarkovModel::from_dense({{2}}, {{0.0}}), Error);
    CHECK_FALSE(MarkovModel::from_dense({{1, 1}, {0, 1}}, {{0, 0}, {0, 0}}).is_irreducible());
    try {
        pressure(MarkovModel::from_dense({{1, 1}, {0, 1}}, {{0, 0}, {0, 0}}), 0.0);
        FAIL("expected NonIrreducible");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonIrreducible);
    }
}
