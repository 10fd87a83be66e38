#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "pressure_lab/error.hpp"
#include "pressure_lab/scenarios.hpp"

namespace pressure_lab::scenarios {
namespace {

// Solves g(x) = target for increasing g on [lo, hi].
template <class G>
double invert_increasing(G g, double target, double lo, double hi) {
    std::uintmax_t iterations = 200;
    auto [a, b] = boost::math::tools::toms748_solve([&](double x) { return g(x) - target; }, lo, hi,
                                                    boost::math::tools::eps_tolerance<double>(52), iterations);
    return 0.5 * (a + b);
}

double log_sum_exp(const std::vector<double>& terms) {
    const double top = *std::max_element(terms.begin(), terms.end());
    if (!std::isfinite(top)) return top;
    double s = 0.0;
    for (double v : terms) s += std::exp(v - top);
    return top + std::log(s);
}

}  // namespace

NeutralModel::NeutralModel(double alpha, std::size_t states) : alpha_(alpha), states_(states) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha_mp must lie in (0, 1)");
    if (states < 2) throw Error(ErrorCode::InvalidArgument, "neutral model needs at least 2 states");
    const double a = alpha;
    auto f = [a](double x) { return x + std::pow(x, 1.0 + a); };
    auto df = [a](double x) { return 1.0 + (1.0 + a) * std::pow(x, a); };

    xs_.resize(states + 1);
    xs_[0] = 1.0;
    for (std::size_t n = 0; n < states; ++n) xs_[n + 1] = invert_increasing(f, xs_[n], 0.0, xs_[n]);
    // |A_n| = x_n - x_{n+1} = x_{n+1}^(1+a); the logarithm avoids the cancellation.
    auto log_len = [&](std::size_t n) { return (1.0 + a) * std::log(xs_[n + 1]); };

    const double c = xs_[1];
    auto right_inverse = [&](double y) { return invert_increasing(f, 1.0 + y, c, 1.0); };
    auto mean_inverse_slope = [&](double lo, double hi) {
        using boost::math::quadrature::gauss;
        const double integral = gauss<double, 8>::integrate([&](double y) { return 1.0 / df(right_inverse(y)); }, lo, hi);
        return integral / (hi - lo);
    };

    first_edge_.resize(states - 1);
    for (std::size_t m = 0; m + 1 < states; ++m) first_edge_[m] = std::log(mean_inverse_slope(xs_[m + 1], xs_[m]));
    first_edge_lumped_ = std::log(mean_inverse_slope(0.0, xs_[states - 1]));

    descent_.assign(states - 1, 0.0);
    for (std::size_t n = 1; n + 1 < states; ++n) descent_[n] = log_len(n) - log_len(n - 1);
    // The lumped interval contains the neutral fixed point; its self-loop
    // carries that point's exponent, zero.
    lumped_loop_ = 0.0;
    lumped_exit_ = log_len(states - 1) - log_len(states - 2);

    return_sum_.resize(states - 1);
    double down = 0.0;
    for (std::size_t m = 0; m + 1 < states; ++m) {
        if (m > 0) down += descent_[m];
        return_sum_[m] = first_edge_[m] + down;
    }
    lumped_return_sum_ = first_edge_lumped_ + lumped_exit_ + down;
}

double NeutralModel::pressure(double t) const {
    const std::size_t n = states_;
    std::vector<double> terms(n);
    const double floor = t * lumped_loop_;
    // log of the first-return generating function at e^{-p}; decreasing in p.
    auto g = [&](double p) {
        for (std::size_t m = 0; m + 1 < n; ++m) terms[m] = t * return_sum_[m] - p * static_cast<double>(m + 1);
        terms[n - 1] = t * lumped_return_sum_ - p * static_cast<double>(n) - std::log(-std::expm1(floor - p));
        return log_sum_exp(terms);
    };
    // Geometric bracketing of the root above the pole at p = floor; the root
    // can sit many orders of magnitude above it when t > 1.
    auto q = [&](double s) { return g(floor + s); };
    double lo = 1.0;
    double hi = 1.0;
    if (q(1.0) > 0.0) {
        while (q(hi) > 0.0) {
            lo = hi;
            hi *= 2.0;
            if (!std::isfinite(hi)) throw Error(ErrorCode::NumericalOverflow, "renewal equation has no finite root");
        }
    } else {
        while (q(lo) <= 0.0) {
            hi = lo;
            lo *= 0.5;
            if (lo < 1e-300) return floor + hi;
        }
    }
    std::uintmax_t iterations = 200;
    auto [a, b] = boost::math::tools::toms748_solve(q, lo, hi, boost::math::tools::eps_tolerance<double>(50),
                                                    iterations);
    if (iterations >= 200) throw Error(ErrorCode::NoConvergence, "renewal root did not converge");
    return floor + 0.5 * (a + b);
}

markov::MarkovModel NeutralModel::markov_model() const {
    const std::size_t n = states_;
    const std::size_t lumped = n - 1;
    std::vector<markov::Edge> edges;
    for (std::size_t m = 0; m + 1 < n; ++m) edges.push_back({0, m, first_edge_[m], 0.0});
    edges.push_back({0, lumped, first_edge_lumped_, 0.0});
    for (std::size_t k = 1; k + 1 < n; ++k) edges.push_back({k, k - 1, descent_[k], 0.0});
    edges.push_back({lumped, lumped, lumped_loop_, 0.0});
    edges.push_back({lumped, n - 2, lumped_exit_, 0.0});
    return markov::MarkovModel(n, std::move(edges));
}

CompositeScenario build_neutral(double alpha_mp, std::size_t truncation) {
    if (truncation < 256) throw Error(ErrorCode::InvalidArgument, "truncation must be at least 256 states");
    auto model = std::make_shared<const NeutralModel>(alpha_mp, truncation);
    if (model->unassigned_mass() > 1e-3) {
        std::ostringstream msg;
        msg << "induced partition leaves mass " << model->unassigned_mass() << " > 1e-3 unassigned; raise truncation";
        throw Error(ErrorCode::TruncationTooCoarse, msg.str());
    }
    CompositeScenario s;
    s.label = "neutral";
    Piece p;
    p.kind = PieceKind::Neutral;
    p.label = "manneville_pomeau";
    p.neutral = std::move(model);
    p.f_exponent = 0.0;
    s.pieces.push_back(std::move(p));
    s.freezing_plateau = 0.0;
    return s;
}

}  // namespace pressure_lab::scenarios
