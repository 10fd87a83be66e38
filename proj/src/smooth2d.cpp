#include "pressure_lab/smooth2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pressure_lab/error.hpp"
#include "pressure_lab/log.hpp"
#include "pressure_lab/parallel.hpp"

namespace pressure_lab::smooth2d {

// ---------------------------------------------------------------------------
// Linear algebra

double line_angle(Vec2 a, Vec2 b) {
    const double c = std::abs(cross(a, b));
    const double d = std::abs(dot(a, b));
    return std::atan2(c, d);
}

double Mat2::norm() const {
    const double s = std::hypot(a + d, c - b);
    const double t = std::hypot(a - d, b + c);
    return 0.5 * (s + t);
}

Eigen2 eigenvalues(const Mat2& m) {
    const double tr = m.trace();
    const double det = m.det();
    const double disc = tr * tr - 4.0 * det;
    if (disc < 0.0) {
        const double modulus = std::sqrt(std::abs(det));
        return {modulus, modulus, true};
    }
    const double root = std::sqrt(disc);
    const double q = 0.5 * (tr + std::copysign(root, tr));
    if (q == 0.0) return {0.0, 0.0, false};
    return {q, det / q, false};
}

std::optional<Vec2> dominant_eigenvector(const Mat2& m) {
    const Eigen2 ev = eigenvalues(m);
    if (ev.complex_pair) return std::nullopt;
    const double lambda = ev.first;
    const Vec2 v1{m.b, lambda - m.a};
    const Vec2 v2{lambda - m.d, m.c};
    const Vec2 v = norm(v1) >= norm(v2) ? v1 : v2;
    if (norm(v) == 0.0) return Vec2{1.0, 0.0};
    return normalized(v);
}

// ---------------------------------------------------------------------------
// SmoothMap2D

SmoothMap2D::SmoothMap2D(Definition def) : def_(std::move(def)) {
    if (!def_.lift || !def_.jacobian) {
        throw Error(ErrorCode::InvalidArgument, "map needs both a lift and a Jacobian");
    }
}

namespace {

double wrap_unit(double v) {
    double r = v - std::floor(v);
    if (r >= 1.0) r = 0.0;
    return r;
}

double wrap_half(double d) {
    double r = d - std::round(d);
    if (r <= -0.5) r += 1.0;
    return r;
}

}  // namespace

Vec2 SmoothMap2D::inverse(Vec2 p) const {
    if (!def_.inverse_lift) throw Error(ErrorCode::InvalidArgument, "map '" + def_.name + "' is not invertible");
    return reduce(def_.inverse_lift(p));
}

Vec2 SmoothMap2D::reduce(Vec2 p) const {
    return {def_.periodic_x ? wrap_unit(p.x) : p.x, def_.periodic_y ? wrap_unit(p.y) : p.y};
}

Vec2 SmoothMap2D::displacement(Vec2 a, Vec2 b) const {
    Vec2 d = b - a;
    if (def_.periodic_x) d.x = wrap_half(d.x);
    if (def_.periodic_y) d.y = wrap_half(d.y);
    return d;
}

Mat2 SmoothMap2D::jacobian_power(Vec2 p, int k) const {
    Mat2 m = Mat2::identity();
    for (int i = 0; i < k; ++i) {
        m = jacobian(p) * m;
        p = (*this)(p);
    }
    return m;
}

std::vector<Vec2> orbit(const SmoothMap2D& map, Vec2 x0, std::size_t length) {
    std::vector<Vec2> pts;
    pts.reserve(length);
    Vec2 p = map.reduce(x0);
    for (std::size_t i = 0; i < length; ++i) {
        pts.push_back(p);
        p = map(p);
    }
    return pts;
}

// ---------------------------------------------------------------------------
// Potentials

Potential Potential::constant(double c) {
    Potential p;
    p.kind = Kind::Constant;
    std::ostringstream id;
    id.precision(17);
    id << "const:" << c;
    p.id = id.str();
    p.value = c;
    return p;
}

Potential Potential::function(std::string id, std::function<double(Vec2)> fn) {
    Potential p;
    p.kind = Kind::Function;
    p.id = std::move(id);
    p.fn = std::move(fn);
    return p;
}

Potential Potential::geometric() {
    Potential p;
    p.kind = Kind::Geometric;
    p.id = "geometric";
    return p;
}

Potential Potential::eigenvalue(int k) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "eigenvalue potential needs k >= 1");
    Potential p;
    p.kind = Kind::Eigenvalue;
    p.id = "eigenvalue:" + std::to_string(k);
    p.k = k;
    return p;
}

// ---------------------------------------------------------------------------
// Lyapunov exponents

namespace {

struct QrAccumulator {
    Vec2 q1{1.0, 0.0};
    Vec2 q2{0.0, 1.0};
    double sum1 = 0.0;
    double sum2 = 0.0;

    void step(const Mat2& j) {
        const Vec2 m1 = j * q1;
        const Vec2 m2 = j * q2;
        const double r11 = norm(m1);
        // |det| of the 2x2 step equals r11 * r22; avoids cancellation in r22.
        const double r22 = std::abs(j.det() * cross(q1, q2)) / r11;
        if (!std::isfinite(r11) || !std::isfinite(r22) || r11 == 0.0) {
            throw Error(ErrorCode::NumericalOverflow, "cocycle product left the representable range");
        }
        q1 = (1.0 / r11) * m1;
        q2 = perpendicular(q1);
        if (dot(q2, m2) < 0.0) q2 = -1.0 * q2;
        sum1 += std::log(r11);
        sum2 += (r22 > 0.0) ? std::log(r22) : -std::numeric_limits<double>::infinity();
    }
};

}  // namespace

LyapunovExponents lyapunov_exponents(const SmoothMap2D& map, Vec2 x0, std::size_t n) {
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "lyapunov_exponents needs n >= 1");
    QrAccumulator qr;
    Vec2 p = map.reduce(x0);
    for (std::size_t i = 0; i < n; ++i) {
        qr.step(map.jacobian(p));
        p = map(p);
    }
    double l1 = qr.sum1 / static_cast<double>(n);
    double l2 = qr.sum2 / static_cast<double>(n);
    if (l1 < l2) std::swap(l1, l2);
    return {l1, l2};
}

// ---------------------------------------------------------------------------
// Splittings

std::optional<std::size_t> SplittingEstimate::find(const SmoothMap2D& map, Vec2 x, double tol) const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (map.distance(points[i], x) <= tol) return i;
    }
    return std::nullopt;
}

SplittingEstimate oseledets_directions(const SmoothMap2D& map, const std::vector<Vec2>& input,
                                       std::size_t horizon) {
    if (input.size() < 2 * horizon) {
        std::ostringstream msg;
        msg << "orbit of length " << input.size() << " is shorter than twice the horizon " << horizon;
        throw Error(ErrorCode::InvalidArgument, msg.str());
    }
    // Extended orbit: optional history from the inverse, then the input, then
    // `horizon` forward iterates.
    std::vector<Vec2> ext;
    std::size_t history = 0;
    if (map.invertible()) {
        std::vector<Vec2> back;
        Vec2 p = input.front();
        for (std::size_t i = 0; i < horizon; ++i) {
            p = map.inverse(p);
            back.push_back(p);
        }
        ext.assign(back.rbegin(), back.rend());
        history = horizon;
    }
    ext.insert(ext.end(), input.begin(), input.end());
    {
        Vec2 p = map(input.back());
        for (std::size_t i = 0; i < horizon; ++i) {
            ext.push_back(p);
            p = map(p);
        }
    }
    const std::size_t total = ext.size();

    QrAccumulator qr;
    for (std::size_t i = 0; i + 1 < total; ++i) qr.step(map.jacobian(ext[i]));
    if (std::exp(qr.sum1 - qr.sum2) < 1.01) {
        throw Error(ErrorCode::DegenerateSplitting,
                    "singular values of the cocycle product stay within ratio 1.01; no splitting");
    }

    // Forward push of a generic vector gives F; transpose push from the end gives E-perp.
    std::vector<Vec2> fwd(total);
    fwd[0] = Vec2{std::cos(1.0), std::sin(1.0)};
    for (std::size_t i = 0; i + 1 < total; ++i) fwd[i + 1] = normalized(map.jacobian(ext[i]) * fwd[i]);
    std::vector<Vec2> adj(total);
    adj[total - 1] = Vec2{std::cos(2.0), std::sin(2.0)};
    for (std::size_t i = total - 1; i-- > 0;) adj[i] = normalized(map.jacobian(ext[i]).transposed() * adj[i + 1]);

    SplittingEstimate est;
    for (std::size_t j = 0; j < total; ++j) {
        const bool has_past = j >= horizon && j >= history;
        const bool has_future = j + horizon < total;
        if (!has_past || !has_future || j - history >= input.size()) continue;
        est.points.push_back(ext[j]);
        est.f_dirs.push_back(fwd[j]);
        est.e_dirs.push_back(perpendicular(adj[j]));
    }
    if (est.points.empty()) {
        throw Error(ErrorCode::InvalidArgument, "orbit too short to cover any point with the horizon");
    }
    double residual = 0.0;
    for (std::size_t i = 0; i + 1 < est.points.size(); ++i) {
        if (map.distance(map(est.points[i]), est.points[i + 1]) > 1e-9) continue;
        const Mat2 j = map.jacobian(est.points[i]);
        residual = std::max(residual, line_angle(j * est.f_dirs[i], est.f_dirs[i + 1]));
        residual = std::max(residual, line_angle(j * est.e_dirs[i], est.e_dirs[i + 1]));
    }
    est.equivariance_residual = residual;
    return est;
}

DominationResult domination_check(const SmoothMap2D& map, const SplittingEstimate& splitting, int k) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "domination time k must be >= 1");
    DominationResult result;
    result.global = !splitting.points.empty();
    for (std::size_t i = 0; i < splitting.points.size(); ++i) {
        const Mat2 m = map.jacobian_power(splitting.points[i], k);
        const double nu = norm(m * normalized(splitting.e_dirs[i]));
        const double nw = norm(m * normalized(splitting.f_dirs[i]));
        double ratio = std::numeric_limits<double>::infinity();
        bool ok = false;
        if (nw >= 1e-300) {
            ratio = nu / nw;
            ok = ratio < 0.5;
        }
        result.ratios.push_back(ratio);
        result.dominated.push_back(ok);
        result.global = result.global && ok;
    }
    return result;
}

std::optional<int> domination_time(const SmoothMap2D& map, const SplittingEstimate& splitting, int k_max) {
    for (int k = 1; k <= k_max; ++k) {
        if (domination_check(map, splitting, k).global) return k;
    }
    return std::nullopt;
}

double geometric_potential(const SmoothMap2D& map, const SplittingEstimate& splitting, Vec2 x) {
    const auto idx = splitting.find(map, x);
    if (!idx) throw Error(ErrorCode::MissingDirection, "point is not covered by the splitting estimate");
    return -std::log(norm(map.jacobian(x) * splitting.f_dirs[*idx]));
}

double eigenvalue_potential(const SmoothMap2D& map, int k, Vec2 x) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "eigenvalue potential needs k >= 1");
    const Mat2 m = map.jacobian_power(map.reduce(x), k);
    const Eigen2 ev = eigenvalues(m);
    const double kk = static_cast<double>(k);
    if (ev.complex_pair) return -0.5 * std::log(std::abs(m.det())) / kk;
    return -std::log(std::abs(ev.first)) / kk;
}

// ---------------------------------------------------------------------------
// Periodic orbits

double PeriodicOrbit::f_exponent() const {
    return std::log(std::abs(eigenvalues(multiplier_matrix).first)) / static_cast<double>(period);
}

std::optional<std::size_t> trace_formula_count(const SmoothMap2D& map, int n) {
    if (!map.linear_part() || !map.periodic_x() || !map.periodic_y()) return std::nullopt;
    Mat2 p = Mat2::identity();
    for (int i = 0; i < n; ++i) p = *map.linear_part() * p;
    const double count = std::abs((p - Mat2::identity()).det());
    if (count == 0.0) return std::nullopt;
    return static_cast<std::size_t>(std::llround(count));
}

namespace {

struct SeedResult {
    enum class Status { Dropped, Root, Degenerate } status = Status::Dropped;
    Vec2 root;
};

SeedResult newton_seed(const SmoothMap2D& map, Vec2 z, int n, const OrbitSearchOptions& opt) {
    for (int it = 0; it < opt.max_newton_iterations; ++it) {
        Vec2 w = z;
        Mat2 j = Mat2::identity();
        for (int s = 0; s < n; ++s) {
            j = map.jacobian(w) * j;
            w = map(w);
        }
        const Vec2 g = map.displacement(z, w);
        if (!std::isfinite(g.x) || !std::isfinite(g.y)) return {};
        const Mat2 nm = j - Mat2::identity();
        const double det = nm.det();
        const double scale = std::max(1.0, j.norm() * j.norm());
        const double gnorm = std::max(std::abs(g.x), std::abs(g.y));
        const bool singular = std::abs(det) <= 1e-12 * scale;
        if (gnorm <= 1e-14) {
            return {singular ? SeedResult::Status::Degenerate : SeedResult::Status::Root, z};
        }
        if (singular) return {};
        const Vec2 step{(nm.d * g.x - nm.b * g.y) / det, (-nm.c * g.x + nm.a * g.y) / det};
        z = map.reduce(z - step);
        if (std::abs(z.x) > 1e3 || std::abs(z.y) > 1e3) return {};
        if (std::max(std::abs(step.x), std::abs(step.y)) <= 1e-15) {
            Vec2 check = z;
            for (int s = 0; s < n; ++s) check = map(check);
            if (map.distance(z, check) <= opt.tolerance) {
                return {singular ? SeedResult::Status::Degenerate : SeedResult::Status::Root, z};
            }
            return {};
        }
    }
    Vec2 check = z;
    Mat2 j = Mat2::identity();
    for (int s = 0; s < n; ++s) {
        j = map.jacobian(check) * j;
        check = map(check);
    }
    if (map.distance(z, check) <= opt.tolerance) {
        const double scale = std::max(1.0, j.norm() * j.norm());
        const bool singular = std::abs((j - Mat2::identity()).det()) <= 1e-12 * scale;
        return {singular ? SeedResult::Status::Degenerate : SeedResult::Status::Root, z};
    }
    return {};
}

// Key used for canonical ordering: coordinates within 1e-9 of 1 on a
// periodic axis are identified with 0.
Vec2 canonical_key(const SmoothMap2D& map, Vec2 p) {
    if (map.periodic_x() && p.x > 1.0 - 1e-9) p.x = 0.0;
    if (map.periodic_y() && p.y > 1.0 - 1e-9) p.y = 0.0;
    return p;
}

// Lexicographic order treating coordinates within 1e-9 as equal, so that
// orbit points sharing an x coordinate are ranked by y despite round-off.
bool key_less(Vec2 a, Vec2 b) { return std::abs(a.x - b.x) > 1e-9 ? a.x < b.x : a.y < b.y - 1e-9; }

}  // namespace

OrbitSet find_periodic_orbits(const SmoothMap2D& map, int n, const OrbitSearchOptions& options) {
    if (n < 1 || n > options.max_period) {
        std::ostringstream msg;
        msg << "period " << n << " outside [1, " << options.max_period << "]";
        throw Error(ErrorCode::InvalidArgument, msg.str());
    }
    const int m = options.seed_grid > 0 ? options.seed_grid : std::min(4 << n, 512);
    const std::size_t seeds = static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
    std::vector<SeedResult> results(seeds);
    parallel_for(seeds, options.threads, [&](std::size_t idx) {
        const double x = (static_cast<double>(idx / m) + 0.5) / m;
        const double y = (static_cast<double>(idx % m) + 0.5) / m;
        results[idx] = newton_seed(map, Vec2{x, y}, n, options);
    });

    OrbitSet set;
    set.n = n;
    set.expected_count = trace_formula_count(map, n);
    struct Candidate {
        Vec2 key;
        PeriodicOrbit orbit;
    };
    std::vector<Candidate> candidates;
    for (const SeedResult& r : results) {
        if (r.status == SeedResult::Status::Degenerate) {
            throw Error(ErrorCode::DegenerateMap,
                        "Newton matrix Df^n - I is singular at a periodic point; orbits are not isolated");
        }
        if (r.status != SeedResult::Status::Root) {
            ++set.dropped_seeds;
            continue;
        }
        std::vector<Vec2> pts{r.root};
        Vec2 q = map(r.root);
        int period = n;
        for (int d = 1; d <= n; ++d) {
            if (n % d == 0 && map.distance(q, r.root) <= 1e-8) {
                period = d;
                break;
            }
            pts.push_back(q);
            q = map(q);
        }
        pts.resize(static_cast<std::size_t>(period));
        // Iterating the root amplifies its error by the expansion rate, so
        // every orbit point gets its own Newton polish.
        for (Vec2& p : pts) {
            const SeedResult polished = newton_seed(map, p, period, options);
            if (polished.status == SeedResult::Status::Root && map.distance(polished.root, p) <= 1e-8) p = polished.root;
        }
        std::size_t best = 0;
        for (std::size_t i = 1; i < pts.size(); ++i) {
            if (key_less(canonical_key(map, pts[i]), canonical_key(map, pts[best]))) best = i;
        }
        std::rotate(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(best), pts.end());
        PeriodicOrbit orbit;
        orbit.period = period;
        orbit.points = std::move(pts);
        candidates.push_back({canonical_key(map, orbit.points.front()), std::move(orbit)});
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return key_less(a.key, b.key); });
    for (const Candidate& c : candidates) {
        bool duplicate = false;
        for (auto it = set.orbits.rbegin(); it != set.orbits.rend(); ++it) {
            const Vec2 other = canonical_key(map, it->points.front());
            if (c.key.x - other.x > 1e-8) break;
            if (it->period == c.orbit.period && map.distance(other, c.key) <= 1e-8) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) set.orbits.push_back(c.orbit);
    }
    for (PeriodicOrbit& o : set.orbits) {
        o.multiplier_matrix = map.jacobian_power(o.points.front(), o.period);
        set.fixed_point_count += static_cast<std::size_t>(o.period);
    }
    return set;
}

std::vector<double> orbit_potential_values(const SmoothMap2D& map, const PeriodicOrbit& orbit,
                                           const Potential& potential) {
    std::vector<double> values;
    values.reserve(orbit.points.size());
    for (const Vec2& p : orbit.points) {
        switch (potential.kind) {
            case Potential::Kind::Constant: values.push_back(potential.value); break;
            case Potential::Kind::Function: values.push_back(potential.fn(p)); break;
            case Potential::Kind::Eigenvalue: values.push_back(eigenvalue_potential(map, potential.k, p)); break;
            case Potential::Kind::Geometric: {
                const Mat2 j = map.jacobian(p);
                const auto f = dominant_eigenvector(map.jacobian_power(p, orbit.period));
                if (f) {
                    values.push_back(-std::log(norm(j * *f)));
                } else {
                    log::debug("geometric potential on an orbit without real splitting; using -log sqrt|det|");
                    values.push_back(-0.5 * std::log(std::abs(j.det())));
                }
                break;
            }
        }
    }
    return values;
}

double orbit_average(const SmoothMap2D& map, PeriodicOrbit& orbit, const Potential& potential) {
    if (const auto it = orbit.birkhoff_cache.find(potential.id); it != orbit.birkhoff_cache.end()) {
        return it->second;
    }
    const auto values = orbit_potential_values(map, orbit, potential);
    double sum = 0.0;
    for (double v : values) sum += v;
    const double avg = sum / static_cast<double>(orbit.period);
    if (!potential.id.empty()) orbit.birkhoff_cache[potential.id] = avg;
    return avg;
}

namespace {

double log_sum_exp(const std::vector<double>& terms) {
    if (terms.empty()) return -std::numeric_limits<double>::infinity();
    const double top = *std::max_element(terms.begin(), terms.end());
    double acc = 0.0;
    for (double v : terms) acc += std::exp(v - top);
    return top + std::log(acc);
}

double estimate_over(const SmoothMap2D& map, OrbitSet& orbits, const Potential& potential, double t,
                     const std::function<bool(const PeriodicOrbit&)>& keep) {
    const double n = static_cast<double>(orbits.n);
    std::vector<double> terms;
    for (PeriodicOrbit& o : orbits.orbits) {
        if (!keep(o)) continue;
        // An orbit of period d contributes d points, each with S_n phi = n * average.
        terms.push_back(std::log(static_cast<double>(o.period)) + t * n * orbit_average(map, o, potential));
    }
    return log_sum_exp(terms) / n;
}

}  // namespace

double orbit_pressure_estimate(const SmoothMap2D& map, OrbitSet& orbits, const Potential& potential, double t) {
    return estimate_over(map, orbits, potential, t, [](const PeriodicOrbit&) { return true; });
}

double orbit_pressure_estimate(const SmoothMap2D& map, const Potential& potential, double t, int n) {
    OrbitSet orbits = find_periodic_orbits(map, n);
    if (!orbits.complete()) {
        std::ostringstream msg;
        msg << "IncompleteOrbitSet: found " << orbits.fixed_point_count << " fixed points of f^" << n
            << ", trace formula gives " << *orbits.expected_count;
        log::warn(msg.str());
    }
    return orbit_pressure_estimate(map, orbits, potential, t);
}

double constrained_pressure_estimate(const SmoothMap2D& map, OrbitSet& orbits, const Potential& potential,
                                     double t, OrbitClass cls) {
    const double value = estimate_over(map, orbits, potential, t, [cls](const PeriodicOrbit& o) {
        const bool expanding = o.f_exponent() > 0.0;
        return cls == OrbitClass::Expanding ? expanding : !expanding;
    });
    if (std::isinf(value)) log::debug("EmptyClass: no periodic orbit in the requested class");
    return value;
}

double birkhoff_average(const SmoothMap2D& map, const Potential& potential, Vec2 x0, std::size_t n) {
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "birkhoff_average needs n >= 1");
    Vec2 p = map.reduce(x0);
    Vec2 f_dir{std::cos(1.0), std::sin(1.0)};
    if (potential.kind == Potential::Kind::Geometric && map.invertible()) {
        std::vector<Vec2> back{p};
        for (std::size_t i = 0; i < kOseledetsHorizon; ++i) back.push_back(map.inverse(back.back()));
        for (std::size_t i = back.size() - 1; i > 0; --i) f_dir = normalized(map.jacobian(back[i]) * f_dir);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        switch (potential.kind) {
            case Potential::Kind::Constant: sum += potential.value; break;
            case Potential::Kind::Function: sum += potential.fn(p); break;
            case Potential::Kind::Eigenvalue: sum += eigenvalue_potential(map, potential.k, p); break;
            case Potential::Kind::Geometric: {
                const Vec2 image = map.jacobian(p) * f_dir;
                const double len = norm(image);
                sum -= std::log(len);
                f_dir = (1.0 / len) * image;
                break;
            }
        }
        p = map(p);
    }
    return sum / static_cast<double>(n);
}

}  // namespace pressure_lab::smooth2d
