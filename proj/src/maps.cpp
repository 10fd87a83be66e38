#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "pressure_lab/error.hpp"
#include "pressure_lab/smooth2d.hpp"

namespace pressure_lab::smooth2d {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

SmoothMap2D identity_map() {
    SmoothMap2D::Definition d;
    d.name = "identity";
    d.lift = [](Vec2 p) { return p; };
    d.jacobian = [](Vec2) { return Mat2::identity(); };
    d.inverse_lift = [](Vec2 p) { return p; };
    d.area_preserving = true;
    d.linear_part = Mat2::identity();
    return SmoothMap2D(std::move(d));
}

SmoothMap2D cat_map() {
    SmoothMap2D::Definition d;
    d.name = "cat";
    d.lift = [](Vec2 p) { return Vec2{2.0 * p.x + p.y, p.x + p.y}; };
    d.jacobian = [](Vec2) { return Mat2{2.0, 1.0, 1.0, 1.0}; };
    d.inverse_lift = [](Vec2 p) { return Vec2{p.x - p.y, -p.x + 2.0 * p.y}; };
    d.area_preserving = true;
    d.linear_part = Mat2{2.0, 1.0, 1.0, 1.0};
    return SmoothMap2D(std::move(d));
}

SmoothMap2D perturbed_cat_map(double eps) {
    SmoothMap2D::Definition d;
    d.name = "perturbed_cat";
    d.parameters = {{"eps", eps}};
    d.lift = [eps](Vec2 p) {
        const double y = p.y + eps / kTwoPi * std::sin(kTwoPi * p.x);
        return Vec2{2.0 * p.x + y, p.x + y};
    };
    d.jacobian = [eps](Vec2 p) {
        const Mat2 shear{1.0, 0.0, eps * std::cos(kTwoPi * p.x), 1.0};
        return Mat2{2.0, 1.0, 1.0, 1.0} * shear;
    };
    d.inverse_lift = [eps](Vec2 p) {
        const Vec2 u{p.x - p.y, -p.x + 2.0 * p.y};
        return Vec2{u.x, u.y - eps / kTwoPi * std::sin(kTwoPi * u.x)};
    };
    d.area_preserving = true;
    return SmoothMap2D(std::move(d));
}

SmoothMap2D standard_map(double k) {
    SmoothMap2D::Definition d;
    d.name = "standard";
    d.parameters = {{"k", k}};
    d.lift = [k](Vec2 p) {
        const double y = p.y + k / kTwoPi * std::sin(kTwoPi * p.x);
        return Vec2{p.x + y, y};
    };
    d.jacobian = [k](Vec2 p) {
        const double c = k * std::cos(kTwoPi * p.x);
        return Mat2{1.0 + c, 1.0, c, 1.0};
    };
    d.inverse_lift = [k](Vec2 p) {
        const double x = p.x - p.y;
        return Vec2{x, p.y - k / kTwoPi * std::sin(kTwoPi * x)};
    };
    d.area_preserving = true;
    return SmoothMap2D(std::move(d));
}

SmoothMap2D product_map(double alpha) {
    SmoothMap2D::Definition d;
    d.name = "product";
    d.parameters = {{"alpha", alpha}};
    d.lift = [alpha](Vec2 p) { return Vec2{2.0 * p.x, p.y + alpha}; };
    d.jacobian = [](Vec2) { return Mat2{2.0, 0.0, 0.0, 1.0}; };
    return SmoothMap2D(std::move(d));
}

SmoothMap2D diagonal_map() {
    SmoothMap2D::Definition d;
    d.name = "diagonal";
    d.lift = [](Vec2 p) { return Vec2{2.0 * p.x, 0.5 * p.y}; };
    d.jacobian = [](Vec2) { return Mat2{2.0, 0.0, 0.0, 0.5}; };
    d.periodic_y = false;
    return SmoothMap2D(std::move(d));
}

SmoothMap2D rotation_map(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    SmoothMap2D::Definition d;
    d.name = "rotation";
    d.parameters = {{"theta", theta}};
    d.lift = [c, s](Vec2 p) {
        const Vec2 q = p - Vec2{0.5, 0.5};
        return Vec2{0.5 + c * q.x - s * q.y, 0.5 + s * q.x + c * q.y};
    };
    d.jacobian = [c, s](Vec2) { return Mat2{c, -s, s, c}; };
    d.inverse_lift = [c, s](Vec2 p) {
        const Vec2 q = p - Vec2{0.5, 0.5};
        return Vec2{0.5 + c * q.x + s * q.y, 0.5 - s * q.x + c * q.y};
    };
    d.periodic_x = false;
    d.periodic_y = false;
    d.area_preserving = true;
    return SmoothMap2D(std::move(d));
}

SmoothMap2D two_sinks_map(double contraction) {
    if (!(contraction > 0.0 && contraction < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "two_sinks contraction must lie in (0, 1)");
    }
    const double c = contraction;
    auto gx = [c](double x) { return x + c / (2.0 * kTwoPi) * std::sin(2.0 * kTwoPi * x); };
    SmoothMap2D::Definition d;
    d.name = "two_sinks";
    d.parameters = {{"contraction", c}};
    d.lift = [gx](Vec2 p) { return Vec2{gx(p.x), 0.5 + 0.5 * (p.y - 0.5)}; };
    d.jacobian = [c](Vec2 p) { return Mat2{1.0 + c * std::cos(2.0 * kTwoPi * p.x), 0.0, 0.0, 0.5}; };
    d.inverse_lift = [gx, c](Vec2 p) {
        // gx is an increasing diffeomorphism of [0, 1]; Newton from the identity.
        double x = p.x;
        for (int it = 0; it < 60; ++it) {
            const double step = (gx(x) - p.x) / (1.0 + c * std::cos(2.0 * kTwoPi * x));
            x -= step;
            if (std::abs(step) < 1e-16) break;
        }
        return Vec2{x, 0.5 + 2.0 * (p.y - 0.5)};
    };
    d.periodic_x = false;
    d.periodic_y = false;
    return SmoothMap2D(std::move(d));
}

SmoothMap2D hybrid_map(double lambda_min) {
    if (!(lambda_min > -std::log(2.0) && lambda_min < std::log(2.0))) {
        throw Error(ErrorCode::InvalidArgument, "hybrid lambda_min must lie in (-log 2, log 2)");
    }
    const double a = std::exp(lambda_min) - 2.0;
    SmoothMap2D::Definition d;
    d.name = "hybrid";
    d.parameters = {{"lambda_min", lambda_min}};
    d.lift = [a](Vec2 p) { return Vec2{2.0 * p.x + a / kTwoPi * std::sin(kTwoPi * p.x), 0.5 * p.y}; };
    d.jacobian = [a](Vec2 p) { return Mat2{2.0 + a * std::cos(kTwoPi * p.x), 0.0, 0.0, 0.5}; };
    d.periodic_y = false;
    return SmoothMap2D(std::move(d));
}

namespace {

double param_or(const std::map<std::string, double>& params, const std::string& key, double fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void check_params(const std::string& map, const std::map<std::string, double>& params,
                  std::set<std::string> allowed) {
    for (const auto& [key, value] : params) {
        if (!allowed.contains(key)) {
            throw Error(ErrorCode::InvalidArgument, "map '" + map + "' has no parameter '" + key + "'");
        }
    }
}

}  // namespace

SmoothMap2D make_map(const std::string& name, const std::map<std::string, double>& params) {
    if (name == "identity") {
        check_params(name, params, {});
        return identity_map();
    }
    if (name == "cat") {
        check_params(name, params, {});
        return cat_map();
    }
    if (name == "perturbed_cat") {
        check_params(name, params, {"eps"});
        return perturbed_cat_map(param_or(params, "eps", 0.05));
    }
    if (name == "standard") {
        check_params(name, params, {"k"});
        return standard_map(param_or(params, "k", 0.5));
    }
    if (name == "product") {
        check_params(name, params, {"alpha"});
        return product_map(param_or(params, "alpha", std::numbers::phi - 1.0));
    }
    if (name == "diagonal") {
        check_params(name, params, {});
        return diagonal_map();
    }
    if (name == "rotation") {
        check_params(name, params, {"theta"});
        return rotation_map(param_or(params, "theta", 1.0));
    }
    if (name == "two_sinks") {
        check_params(name, params, {"contraction"});
        return two_sinks_map(param_or(params, "contraction", 0.5));
    }
    if (name == "hybrid") {
        check_params(name, params, {"lambda_min"});
        return hybrid_map(param_or(params, "lambda_min", -0.3));
    }
    throw Error(ErrorCode::UnknownMap, "no built-in map named '" + name + "'");
}

std::vector<std::string> builtin_map_names() {
    return {"cat", "diagonal", "hybrid", "identity", "perturbed_cat", "product", "rotation", "standard", "two_sinks"};
}

}  // namespace pressure_lab::smooth2d
