#include "pressure_lab/pressure_analysis.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "pressure_lab/error.hpp"
#include "pressure_lab/parallel.hpp"

namespace pressure_lab::analysis {
namespace {

using Rational = boost::multiprecision::cpp_rational;

struct ExactLine {
    Rational slope;
    Rational intercept;
    AffineBranch source;
};

// Abscissa where two lines with different slopes cross.
Rational crossing(const ExactLine& p, const ExactLine& q) {
    return (p.intercept - q.intercept) / (q.slope - p.slope);
}

}  // namespace

double PiecewiseAffine::operator()(double t) const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : pieces) best = std::max(best, p(t));
    return best;
}

PiecewiseAffine upper_envelope(std::span<const AffineBranch> branches, std::optional<double> constant) {
    std::vector<AffineBranch> all(branches.begin(), branches.end());
    if (constant) all.push_back({0.0, *constant});
    if (all.empty()) throw Error(ErrorCode::InvalidArgument, "upper_envelope needs at least one branch");
    for (const auto& b : all) {
        if (!std::isfinite(b.slope) || !std::isfinite(b.intercept)) {
            throw Error(ErrorCode::InvalidArgument, "branch coefficients must be finite");
        }
    }
    std::sort(all.begin(), all.end(), [](const AffineBranch& a, const AffineBranch& b) {
        return a.slope != b.slope ? a.slope < b.slope : a.intercept > b.intercept;
    });

    std::vector<ExactLine> hull;
    for (const auto& b : all) {
        if (!hull.empty() && hull.back().source.slope == b.slope) continue;  // dominated parallel line
        ExactLine line{Rational(b.slope), Rational(b.intercept), b};
        while (hull.size() >= 2 &&
               crossing(hull[hull.size() - 2], line) <= crossing(hull[hull.size() - 2], hull.back())) {
            hull.pop_back();
        }
        hull.push_back(std::move(line));
    }

    // Merge breakpoints that coincide to within 1e-10 by dropping the piece
    // squeezed between them.
    std::vector<std::size_t> kept{0};
    std::vector<double> breaks;
    for (std::size_t i = 1; i < hull.size(); ++i) {
        double bp = static_cast<double>(crossing(hull[kept.back()], hull[i]));
        while (!breaks.empty() && bp - breaks.back() <= 1e-10) {
            kept.pop_back();
            breaks.pop_back();
            bp = static_cast<double>(crossing(hull[kept.back()], hull[i]));
        }
        breaks.push_back(bp);
        kept.push_back(i);
    }
    PiecewiseAffine env;
    for (std::size_t k : kept) env.pieces.push_back(hull[k].source);
    env.breakpoints = std::move(breaks);
    return env;
}

// ---------------------------------------------------------------------------
// Curves

void PressureCurve::validate() const {
    if (ts.size() != values.size()) throw Error(ErrorCode::MalformedCurve, "t and pressure columns differ in length");
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (!std::isfinite(ts[i]) || !std::isfinite(values[i])) {
            std::ostringstream msg;
            msg << "non-finite entry at grid index " << i;
            throw Error(ErrorCode::MalformedCurve, msg.str());
        }
        if (i > 0 && !(ts[i] > ts[i - 1])) {
            std::ostringstream msg;
            msg << "grid is not strictly increasing at index " << i;
            throw Error(ErrorCode::MalformedCurve, msg.str());
        }
    }
}

double PressureCurve::convexity_defect() const {
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < ts.size(); ++i) {
        const double hl = ts[i] - ts[i - 1];
        const double hr = ts[i + 1] - ts[i];
        const double chord = (hr * values[i - 1] + hl * values[i + 1]) / (hl + hr);
        worst = std::max(worst, values[i] - chord);
    }
    return worst;
}

double PressureCurve::convexity_tolerance() const { return std::max(10.0 * value_tolerance, 1e-9); }

std::vector<double> linspace(double lo, double hi, std::size_t count) {
    if (count < 2 || !(lo < hi)) throw Error(ErrorCode::InvalidArgument, "linspace needs lo < hi and count >= 2");
    std::vector<double> out(count);
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) out[i] = lo + step * static_cast<double>(i);
    out.back() = hi;
    return out;
}

PressureCurve sample_curve(const std::function<double(double)>& f, double t_min, double t_max,
                           std::size_t steps, unsigned threads, std::string source, double value_tolerance) {
    PressureCurve c;
    c.ts = linspace(t_min, t_max, steps);
    c.values.resize(steps);
    parallel_for(steps, threads, [&](std::size_t i) { c.values[i] = f(c.ts[i]); });
    c.source = std::move(source);
    c.value_tolerance = value_tolerance;
    return c;
}

// ---------------------------------------------------------------------------
// Kinks

std::vector<Kink> detect_kinks(const PressureCurve& curve, const KinkOptions& options) {
    curve.validate();
    const std::size_t n = curve.size();
    if (n < 5) throw Error(ErrorCode::InvalidArgument, "kink detection needs at least 5 grid points");
    if (options.window < 1) throw Error(ErrorCode::InvalidArgument, "secant window must be >= 1");
    if (curve.convexity_defect() > curve.convexity_tolerance()) {
        std::ostringstream msg;
        msg << "midpoint-convexity defect " << curve.convexity_defect() << " exceeds "
            << curve.convexity_tolerance();
        throw Error(ErrorCode::CurveNotConvex, msg.str());
    }
    const auto& t = curve.ts;
    const auto& p = curve.values;
    std::vector<double> slope(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) slope[i] = (p[i + 1] - p[i]) / (t[i + 1] - t[i]);
    // jump[i]: slope increment at node i (1 <= i <= n-2).
    std::vector<double> jump(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) jump[i] = slope[i] - slope[i - 1];

    // A kink inside segment [t_i, t_{i+1}] puts its whole slope jump on nodes i, i+1.
    std::vector<std::pair<double, std::size_t>> candidates;
    for (std::size_t i = 1; i + 2 < n; ++i) {
        const double mass = jump[i] + jump[i + 1];
        if (mass > 0.5 * options.slope_gap_threshold) candidates.emplace_back(mass, i);
    }
    std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::vector<char> blocked(n, 0);
    std::vector<std::size_t> picks;
    for (const auto& [mass, i] : candidates) {
        if (blocked[i]) continue;
        picks.push_back(i);
        blocked[i - 1] = blocked[i] = blocked[i + 1] = 1;
    }
    std::sort(picks.begin(), picks.end());

    std::vector<Kink> kinks;
    const std::size_t w = options.window;
    for (std::size_t k = 0; k < picks.size(); ++k) {
        const std::size_t i = picks[k];
        std::size_t lo = i >= w ? i - w : 0;
        if (k > 0) lo = std::max(lo, picks[k - 1] + 1);
        std::size_t hi = std::min(n - 1, i + 1 + w);
        if (k + 1 < picks.size()) hi = std::min(hi, picks[k + 1]);
        if (lo >= i || hi <= i + 1) continue;
        const double left = (p[i] - p[lo]) / (t[i] - t[lo]);
        const double right = (p[hi] - p[i + 1]) / (t[hi] - t[i + 1]);
        const double gap = right - left;
        if (!(gap > options.slope_gap_threshold)) continue;
        double where = (p[i + 1] - p[i] + left * t[i] - right * t[i + 1]) / (left - right);
        where = std::clamp(where, t[i], t[i + 1]);
        kinks.push_back({where, left, right, gap});
    }
    return kinks;
}

std::optional<Freezing> detect_freezing(const PressureCurve& curve, double plateau_value, double band) {
    curve.validate();
    const std::size_t n = curve.size();
    if (n == 0) return std::nullopt;
    std::size_t start = n;
    while (start > 0 && std::abs(curve.values[start - 1] - plateau_value) <= band) --start;
    if (start == n) return std::nullopt;
    if (start > 0) {
        bool above = false;
        for (std::size_t i = 0; i < start; ++i) above = above || curve.values[i] > plateau_value + band;
        if (!above) return std::nullopt;
    }
    return Freezing{curve.ts[start], plateau_value};
}

std::string_view to_string(Classification c) noexcept {
    switch (c) {
        case Classification::AnalyticCompatible: return "analytic_compatible";
        case Classification::Kink: return "kink";
        case Classification::Freezing: return "freezing";
        case Classification::KinkAndFreezing: return "kink_and_freezing";
    }
    return "analytic_compatible";
}

std::optional<Classification> classification_from_string(std::string_view s) noexcept {
    for (auto c : {Classification::AnalyticCompatible, Classification::Kink, Classification::Freezing,
                   Classification::KinkAndFreezing}) {
        if (to_string(c) == s) return c;
    }
    return std::nullopt;
}

namespace {

bool is_affine(const PressureCurve& curve) {
    const double t0 = curve.ts.front();
    const double t1 = curve.ts.back();
    const double p0 = curve.values.front();
    const double p1 = curve.values.back();
    double worst = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double chord = p0 + (p1 - p0) * (curve.ts[i] - t0) / (t1 - t0);
        worst = std::max(worst, std::abs(curve.values[i] - chord));
    }
    return worst <= curve.convexity_tolerance();
}

}  // namespace

TransitionReport analyze(const PressureCurve& curve, const AnalysisOptions& options) {
    TransitionReport report;
    report.kinks = detect_kinks(curve, options.kinks);
    if (!is_affine(curve)) report.freezing = detect_freezing(curve, options.plateau_value, options.band);

    bool kink_elsewhere = false;
    if (report.freezing) {
        const auto it = std::lower_bound(curve.ts.begin(), curve.ts.end(), report.freezing->t0);
        const auto idx = static_cast<std::size_t>(it - curve.ts.begin());
        const std::size_t back = std::min(idx, options.kinks.window);
        const double onset = curve.ts[idx - back];
        for (const Kink& k : report.kinks) kink_elsewhere = kink_elsewhere || k.t < onset;
        report.classification = kink_elsewhere ? Classification::KinkAndFreezing : Classification::Freezing;
    } else {
        report.classification = report.kinks.empty() ? Classification::AnalyticCompatible : Classification::Kink;
    }
    return report;
}

std::vector<double> legendre_transform(const PressureCurve& curve, std::span<const double> alphas) {
    curve.validate();
    std::vector<double> out;
    out.reserve(alphas.size());
    for (double a : alphas) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < curve.size(); ++i) best = std::min(best, curve.values[i] - curve.ts[i] * a);
        out.push_back(best);
    }
    return out;
}

}  // namespace pressure_lab::analysis
