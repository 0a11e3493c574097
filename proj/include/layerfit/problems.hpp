#pragma once

/**
 * @brief Built-in domains and test problems.
 *
 * All built-in domains are star-shaped about the origin with radius
 * function rho(t), either (rho cos t, rho sin t) or, for omega2,
 * (rho sin t, rho cos t), which runs clockwise.
 */

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "layerfit/error.hpp"
#include "layerfit/geometry.hpp"
#include "layerfit/operators.hpp"
#include "layerfit/pipeline.hpp"

namespace layerfit {

/// rho and its first two derivatives at t.
struct RadiusJet {
    double rho, d1, d2;
};

namespace detail {

template <class Radius>
ParametricBoundary polar_boundary(Radius radius, bool swap_xy, Orientation orientation, std::string label) {
    // (rho c, rho s) with (c, s) = (cos t, sin t), or (sin t, cos t) if swapped.
    auto trig = [swap_xy](double t) {
        const double c = std::cos(t), s = std::sin(t);
        return swap_xy ? std::pair{s, c} : std::pair{c, s};
    };
    auto dtrig = [swap_xy](double t) {
        const double c = std::cos(t), s = std::sin(t);
        return swap_xy ? std::pair{c, -s} : std::pair{-s, c};
    };
    auto eval = [=](double t) {
        const auto [u, v] = trig(t);
        const double r = radius(t).rho;
        return Vec2{r * u, r * v};
    };
    auto d1 = [=](double t) {
        const auto [u, v] = trig(t);
        const auto [du, dv] = dtrig(t);
        const RadiusJet j = radius(t);
        return Vec2{j.d1 * u + j.rho * du, j.d1 * v + j.rho * dv};
    };
    // (cos, sin)'' = -(cos, sin), likewise when swapped.
    auto d2 = [=](double t) {
        const auto [u, v] = trig(t);
        const auto [du, dv] = dtrig(t);
        const RadiusJet j = radius(t);
        return Vec2{j.d2 * u + 2.0 * j.d1 * du - j.rho * u, j.d2 * v + 2.0 * j.d1 * dv - j.rho * v};
    };
    return ParametricBoundary(2.0 * std::numbers::pi, eval, d1, d2, orientation, std::move(label));
}

} // namespace detail

inline ParametricBoundary circle(double radius) {
    if (!(radius > 0.0))
        throw Error("radius must be positive");
    return detail::polar_boundary([radius](double) { return RadiusJet{radius, 0.0, 0.0}; }, false,
                                  Orientation::Anticlockwise, "circle");
}

/// rho = beta + sin^2 t.
inline ParametricBoundary omega1(double beta) {
    if (!(beta > 0.0))
        throw Error("beta must be positive");
    return detail::polar_boundary(
        [beta](double t) {
            const double s = std::sin(t);
            return RadiusJet{beta + s * s, std::sin(2.0 * t), 2.0 * std::cos(2.0 * t)};
        },
        false, Orientation::Anticlockwise, "omega1");
}

inline double omega2_max_y(double beta) { return 2.5 * std::numbers::pi * std::numbers::pi + beta; }
inline double omega2_max_x(double beta) { return 2.25 * std::numbers::pi * std::numbers::pi + beta; }

/// rho = 2.5 pi^2 + beta - t^2 sin^2 t on (rho sin t, rho cos t), t in [0, 2 pi).
/// The curvature jumps at t = 0; evaluation there takes the t -> 0+ limit.
inline ParametricBoundary omega2(double beta) {
    if (!(beta > 0.0))
        throw Error("beta must be positive");
    const double top = omega2_max_y(beta);
    return detail::polar_boundary(
        [top](double t) {
            const double s = std::sin(t);
            const double s2t = std::sin(2.0 * t);
            return RadiusJet{top - t * t * s * s, -2.0 * t * s * s - t * t * s2t,
                             -2.0 * s * s - 4.0 * t * s2t - 2.0 * t * t * std::cos(2.0 * t)};
        },
        true, Orientation::Clockwise, "omega2");
}

/// rho = beta + cos^2 t, 0 < beta < 2.
inline ParametricBoundary omega3(double beta) {
    if (!(beta > 0.0 && beta < 2.0))
        throw Error("omega3 needs 0 < beta < 2");
    return detail::polar_boundary(
        [beta](double t) {
            const double c = std::cos(t);
            return RadiusJet{beta + c * c, -std::sin(2.0 * t), -2.0 * std::cos(2.0 * t)};
        },
        false, Orientation::Anticlockwise, "omega3");
}

struct TestCase {
    std::string label;
    ParametricBoundary boundary;
    ProblemData data;
    SolverConfig config;
    double beta = 0.5;
};

inline ProblemData unit_coefficients(Field f, double eps) {
    return {[](double, double) { return 1.0; }, [](double, double) { return 1.0; }, std::move(f), eps, 1.0};
}

/// Problems 1-3: -eps Laplace(u) + u_x + u = f with u = 0 on the boundary of
/// omega1, omega2, omega3 respectively.
///
/// Problem 3's source is supported on |y| <= beta, where it equals
/// (1 - y/beta)^4 (1 + y/beta)^4.
inline TestCase test_problem(int id, double beta, double eps = 1.0) {
    switch (id) {
    case 1: {
        const double top = (1.0 + beta) * (1.0 + beta);
        return {"problem 1", omega1(beta),
                unit_coefficients([top](double, double y) { return top - y * y; }, eps), SolverConfig{}, beta};
    }
    case 2: {
        const double mx = omega2_max_x(beta);
        const double my = omega2_max_y(beta);
        SolverConfig config;
        config.strip_width = 1.0;
        return {"problem 2", omega2(beta),
                unit_coefficients(
                    [mx, my](double x, double y) {
                        const double v = (1.0 - y * y / (my * my)) * (x / mx);
                        const double v2 = v * v;
                        return v2 * v2;
                    },
                    eps),
                config, beta};
    }
    case 3:
        return {"problem 3", omega3(beta),
                unit_coefficients(
                    [beta](double, double y) {
                        if (std::abs(y) > beta)
                            return 0.0;
                        const double p = (1.0 - y / beta) * (1.0 + y / beta);
                        const double p2 = p * p;
                        return p2 * p2;
                    },
                    eps),
                SolverConfig{}, beta};
    default:
        throw Error("unknown problem id " + std::to_string(id));
    }
}

/// Closed-form solution with the derivatives needed to build its source.
struct ExactSolution {
    Field u;
    Field u_x;
    Field laplacian;
};

/// Test case whose exact solution is u: f = -eps Laplace(u) + u_x + u.
inline TestCase manufactured_case(const ParametricBoundary& boundary, const ExactSolution& exact, double eps) {
    Field f = [exact, eps](double x, double y) {
        return -eps * exact.laplacian(x, y) + exact.u_x(x, y) + exact.u(x, y);
    };
    return {"manufactured", boundary, unit_coefficients(std::move(f), eps), SolverConfig{}, 0.0};
}

/// u = (1 - x^2 - y^2) e^x, which vanishes on the unit circle.
inline ExactSolution unit_circle_solution() {
    return {[](double x, double y) { return (1.0 - x * x - y * y) * std::exp(x); },
            [](double x, double y) { return (1.0 - x * x - y * y - 2.0 * x) * std::exp(x); },
            [](double x, double y) { return (1.0 - x * x - y * y - 4.0 * x - 4.0) * std::exp(x); }};
}

} // namespace layerfit
