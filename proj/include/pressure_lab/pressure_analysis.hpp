#pragma once

// Curve-level analysis of sampled pressure functions: exact upper envelopes of
// affine branches, convexity validation, kink and freezing detection, and the
// Legendre transform.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pressure_lab::analysis {

/// t -> intercept + slope * t. The intercept is an entropy, the slope an
/// integral of the potential.
struct AffineBranch {
    double slope = 0.0;
    double intercept = 0.0;

    double operator()(double t) const { return intercept + slope * t; }
    friend bool operator==(const AffineBranch&, const AffineBranch&) = default;
};

/// Convex piecewise-affine function; pieces ordered by increasing slope and
/// pieces[i] is active on [breakpoints[i-1], breakpoints[i]].
struct PiecewiseAffine {
    std::vector<AffineBranch> pieces;
    std::vector<double> breakpoints;

    double operator()(double t) const;
};

/// Exact upper envelope. Hull predicates are evaluated in rational arithmetic
/// on the exact values of the doubles; breakpoints closer than 1e-10 are merged.
PiecewiseAffine upper_envelope(std::span<const AffineBranch> branches,
                               std::optional<double> constant = std::nullopt);

struct PressureCurve {
    std::vector<double> ts;
    std::vector<double> values;
    double value_tolerance = 1e-12;
    std::string source;

    std::size_t size() const noexcept { return ts.size(); }
    /// Throws MalformedCurve for size mismatch, non-finite entries or a grid
    /// that is not strictly increasing.
    void validate() const;
    /// Largest amount by which a point lies above the chord of its neighbours.
    double convexity_defect() const;
    double convexity_tolerance() const;
};

std::vector<double> linspace(double lo, double hi, std::size_t count);

/// Samples f on linspace(t_min, t_max, steps); evaluation fans out over
/// `threads` workers (0 = hardware concurrency), results kept in grid order.
PressureCurve sample_curve(const std::function<double(double)>& f, double t_min, double t_max,
                           std::size_t steps, unsigned threads = 1, std::string source = {},
                           double value_tolerance = 1e-12);

struct Kink {
    double t = 0.0;
    double left_slope = 0.0;
    double right_slope = 0.0;
    double gap = 0.0;
};

struct Freezing {
    double t0 = 0.0;
    double value = 0.0;
};

enum class Classification { AnalyticCompatible, Kink, Freezing, KinkAndFreezing };

std::string_view to_string(Classification c) noexcept;
std::optional<Classification> classification_from_string(std::string_view s) noexcept;

struct TransitionReport {
    std::vector<Kink> kinks;
    std::optional<Freezing> freezing;
    Classification classification = Classification::AnalyticCompatible;
};

struct KinkOptions {
    double slope_gap_threshold = 0.1;
    std::size_t window = 3;
};

/// Kinks located from concentrated jumps of consecutive secant slopes; the
/// reported one-sided slopes are secants over `window` points on each side.
/// Throws CurveNotConvex when the convexity invariant fails.
std::vector<Kink> detect_kinks(const PressureCurve& curve, const KinkOptions& options = {});

/// Smallest grid t0 with |P(t) - plateau| <= band for every grid t >= t0,
/// provided the curve is above plateau + band somewhere before t0 (or t0 is
/// the first grid point).
std::optional<Freezing> detect_freezing(const PressureCurve& curve, double plateau_value, double band);

struct AnalysisOptions {
    KinkOptions kinks;
    double plateau_value = 0.0;
    double band = 0.02;
};

/// Kink and freezing detection plus classification. A freezing plateau only
/// counts when the curve is not affine overall; kinks at or after the
/// freezing onset are attributed to it.
TransitionReport analyze(const PressureCurve& curve, const AnalysisOptions& options = {});

/// E(alpha) = min over grid t of P(t) - t * alpha.
std::vector<double> legendre_transform(const PressureCurve& curve, std::span<const double> alphas);

}  // namespace pressure_lab::analysis
