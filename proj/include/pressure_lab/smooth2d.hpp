#pragma once

// Orbit and derivative-cocycle computations for explicit maps of the
// 2-torus (or of the square / cylinder, per axis): Lyapunov exponents,
// Oseledets directions, domination checks, geometric-type potentials,
// periodic orbits and periodic-orbit pressure estimates.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pressure_lab::smooth2d {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 normalized(Vec2 a) { return (1.0 / norm(a)) * a; }
inline Vec2 perpendicular(Vec2 a) { return {-a.y, a.x}; }

/// Angle in [0, pi/2] between the lines spanned by a and b.
double line_angle(Vec2 a, Vec2 b);

/// Row-major 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }
    Mat2 transposed() const { return {a, c, b, d}; }
    /// Operator 2-norm (largest singular value).
    double norm() const;

    friend Vec2 operator*(const Mat2& m, Vec2 v) { return {m.a * v.x + m.b * v.y, m.c * v.x + m.d * v.y}; }
    friend Mat2 operator*(const Mat2& m, const Mat2& n) {
        return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
    }
    friend Mat2 operator-(const Mat2& m, const Mat2& n) { return {m.a - n.a, m.b - n.b, m.c - n.c, m.d - n.d}; }
};

/// Eigenvalues of a real 2x2 matrix. For a complex pair both entries hold the
/// common modulus and `complex_pair` is set.
struct Eigen2 {
    double first = 0.0;   // largest |.| (signed when real)
    double second = 0.0;
    bool complex_pair = false;
};
Eigen2 eigenvalues(const Mat2& m);

/// Unit eigenvector of the eigenvalue with largest modulus (real case only).
std::optional<Vec2> dominant_eigenvector(const Mat2& m);

using Point = Vec2;

/// A smooth map given by a lift to R^2 and its Jacobian. Coordinates along a
/// periodic axis are taken mod 1; other axes are left as they are.
class SmoothMap2D {
public:
    struct Definition {
        std::string name;
        std::function<Vec2(Vec2)> lift;
        std::function<Mat2(Vec2)> jacobian;
        std::function<Vec2(Vec2)> inverse_lift;  // empty when not invertible
        std::map<std::string, double> parameters;
        bool periodic_x = true;
        bool periodic_y = true;
        bool area_preserving = false;
        std::optional<Mat2> linear_part;  // set for linear toral endomorphisms
    };

    explicit SmoothMap2D(Definition def);

    const std::string& name() const noexcept { return def_.name; }
    const std::map<std::string, double>& parameters() const noexcept { return def_.parameters; }
    bool invertible() const noexcept { return static_cast<bool>(def_.inverse_lift); }
    bool area_preserving() const noexcept { return def_.area_preserving; }
    bool periodic_x() const noexcept { return def_.periodic_x; }
    bool periodic_y() const noexcept { return def_.periodic_y; }
    const std::optional<Mat2>& linear_part() const noexcept { return def_.linear_part; }

    Vec2 operator()(Vec2 p) const { return reduce(def_.lift(p)); }
    Vec2 lift(Vec2 p) const { return def_.lift(p); }
    Mat2 jacobian(Vec2 p) const { return def_.jacobian(p); }
    /// Preimage, reduced; throws InvalidArgument for non-invertible maps.
    Vec2 inverse(Vec2 p) const;

    /// Reduces periodic coordinates into [0, 1).
    Vec2 reduce(Vec2 p) const;
    /// Shortest displacement from a to b; periodic components in (-1/2, 1/2].
    Vec2 displacement(Vec2 a, Vec2 b) const;
    double distance(Vec2 a, Vec2 b) const { return norm(displacement(a, b)); }

    /// Jacobian of f^k at p: Df(f^{k-1} p) ... Df(p).
    Mat2 jacobian_power(Vec2 p, int k) const;

private:
    Definition def_;
};

std::vector<Vec2> orbit(const SmoothMap2D& map, Vec2 x0, std::size_t length);

// ---------------------------------------------------------------------------
// Potentials

/// Potential on a smooth map: constant, explicit function, the geometric
/// potential -log||Df|F||, or the eigenvalue potential -(1/k) log|lambda(Df^k)|.
struct Potential {
    enum class Kind { Constant, Function, Geometric, Eigenvalue };

    Kind kind = Kind::Constant;
    std::string id;
    double value = 0.0;
    std::function<double(Vec2)> fn;
    int k = 1;

    static Potential constant(double c);
    static Potential function(std::string id, std::function<double(Vec2)> fn);
    static Potential geometric();
    static Potential eigenvalue(int k);
};

// ---------------------------------------------------------------------------
// Lyapunov exponents and splittings

struct LyapunovExponents {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
};

/// QR-reorthogonalised cocycle product along n steps from x0 (stride 1).
LyapunovExponents lyapunov_exponents(const SmoothMap2D& map, Vec2 x0, std::size_t n);

struct SplittingEstimate {
    std::vector<Vec2> points;
    std::vector<Vec2> e_dirs;
    std::vector<Vec2> f_dirs;
    std::optional<int> k_dom;
    double equivariance_residual = 0.0;  // max angle between Df*F_x and F_{f(x)}

    /// Index of a point within distance tol, if any.
    std::optional<std::size_t> find(const SmoothMap2D& map, Vec2 x, double tol = 1e-12) const;
};

inline constexpr std::size_t kOseledetsHorizon = 100;

/// F by forward push of a generic vector, E as the orthogonal complement of the
/// adjoint (transpose) push from the future. A point is covered when it has
/// `horizon` steps of history and of future; invertible maps get their
/// history from the inverse, others only cover orbit[horizon..].
SplittingEstimate oseledets_directions(const SmoothMap2D& map, const std::vector<Vec2>& orbit,
                                       std::size_t horizon = kOseledetsHorizon);

struct DominationResult {
    std::vector<bool> dominated;
    std::vector<double> ratios;
    bool global = false;
};

/// ||Df^k(x)u|| / ||Df^k(x)w|| < 1/2 for unit u in E_x, w in F_x.
DominationResult domination_check(const SmoothMap2D& map, const SplittingEstimate& splitting, int k);

/// Smallest k <= k_max that passes domination_check globally.
std::optional<int> domination_time(const SmoothMap2D& map, const SplittingEstimate& splitting, int k_max);

/// -log ||Df(x) F_x||; throws MissingDirection if x is not a splitting point.
double geometric_potential(const SmoothMap2D& map, const SplittingEstimate& splitting, Vec2 x);

/// -(1/k) log |lambda| for the eigenvalue of Df^k(x) of largest modulus.
double eigenvalue_potential(const SmoothMap2D& map, int k, Vec2 x);

// ---------------------------------------------------------------------------
// Periodic orbits

struct PeriodicOrbit {
    int period = 1;               // minimal period
    std::vector<Vec2> points;     // starts at the lexicographically smallest point
    Mat2 multiplier_matrix;       // Df^period at points[0]
    std::map<std::string, double> birkhoff_cache;  // potential id -> orbit average

    /// (1/period) log|dominant multiplier eigenvalue|: the F-exponent.
    double f_exponent() const;
};

struct OrbitSearchOptions {
    int seed_grid = 0;  // 0: 4 * 2^n capped at 512
    int max_newton_iterations = 60;
    double tolerance = 1e-10;
    int max_period = 12;
    unsigned threads = 0;
};

struct OrbitSet {
    int n = 1;
    std::vector<PeriodicOrbit> orbits;  // every orbit whose period divides n
    std::size_t fixed_point_count = 0;  // #Fix(f^n) found
    std::optional<std::size_t> expected_count;  // trace formula, when known
    std::size_t dropped_seeds = 0;

    bool complete() const { return !expected_count || *expected_count == fixed_point_count; }
};

/// |det(A^n - I)| for linear toral maps.
std::optional<std::size_t> trace_formula_count(const SmoothMap2D& map, int n);

/// Newton's method on f^n(x) = x + deck translation from a uniform seed grid.
/// Throws DegenerateMap if a root has a singular Newton matrix.
OrbitSet find_periodic_orbits(const SmoothMap2D& map, int n, const OrbitSearchOptions& options = {});

/// Birkhoff average of the potential over one period, cached by potential id.
double orbit_average(const SmoothMap2D& map, PeriodicOrbit& orbit, const Potential& potential);

/// Per-point potential values along the orbit.
std::vector<double> orbit_potential_values(const SmoothMap2D& map, const PeriodicOrbit& orbit,
                                           const Potential& potential);

/// (1/n) log sum_{p in Fix(f^n)} exp(t S_n phi(p)).
double orbit_pressure_estimate(const SmoothMap2D& map, OrbitSet& orbits, const Potential& potential, double t);
double orbit_pressure_estimate(const SmoothMap2D& map, const Potential& potential, double t, int n);

enum class OrbitClass { Expanding, NonExpanding };

/// Same estimator restricted to orbits with F-exponent > 0 (Expanding) or
/// <= 0 (NonExpanding). Returns -infinity when the class is empty.
double constrained_pressure_estimate(const SmoothMap2D& map, OrbitSet& orbits, const Potential& potential,
                                     double t, OrbitClass cls);

double birkhoff_average(const SmoothMap2D& map, const Potential& potential, Vec2 x0, std::size_t n);

// ---------------------------------------------------------------------------
// Built-in maps

SmoothMap2D identity_map();
SmoothMap2D cat_map();
/// Cat map composed with the area-preserving shear y -> y + eps/(2 pi) sin(2 pi x).
SmoothMap2D perturbed_cat_map(double eps);
/// Chirikov standard map x' = x + y', y' = y + k/(2 pi) sin(2 pi x).
SmoothMap2D standard_map(double k);
/// (2x mod 1, y + alpha mod 1).
SmoothMap2D product_map(double alpha);
/// diag(2, 1/2) on the cylinder (x periodic).
SmoothMap2D diagonal_map();
/// Rotation by theta about (1/2, 1/2) in the plane.
SmoothMap2D rotation_map(double theta);
/// Diffeomorphism of the square with sinks at (1/4, 1/2) and (3/4, 1/2).
SmoothMap2D two_sinks_map(double contraction = 0.5);
/// (h(x), y/2) with h(x) = 2x + a/(2 pi) sin(2 pi x), a chosen so that the
/// fixed point x = 0 has F-exponent lambda_min.
SmoothMap2D hybrid_map(double lambda_min);

/// Builds a registered map; throws UnknownMap for unknown names or parameters.
SmoothMap2D make_map(const std::string& name, const std::map<std::string, double>& params = {});
std::vector<std::string> builtin_map_names();

}  // namespace pressure_lab::smooth2d
