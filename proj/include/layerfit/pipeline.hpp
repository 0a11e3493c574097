#pragma once

/**
 * @brief Two-phase solve: uniform outer grid, then Shishkin strip corrections.
 *
 * Phase one solves the upwind problem on the enclosing rectangle with u = 0
 * outside the domain. Phase two solves, per outflow arc, the boundary-fitted
 * problem on [0, R] x arc with u = 0 on the boundary and the bilinear outer
 * interpolant on the remaining strip edges. The global approximation uses
 * the strip interpolant inside the strips and the outer one elsewhere.
 */

#include <cmath>
#include <cstddef>
#include <ostream>
#include <vector>

#include "layerfit/error.hpp"
#include "layerfit/geometry.hpp"
#include "layerfit/grids.hpp"
#include "layerfit/interpolation.hpp"
#include "layerfit/linsolve.hpp"
#include "layerfit/operators.hpp"

namespace layerfit {

struct SolverConfig {
    double strip_width = 0.1;
    double c_star = 2.0;
    double delta_trim = 0.0; ///< 0 disables theta estimation
    double padding = 1e-3;
};

struct StripSolution {
    StripMesh mesh;
    std::vector<double> values;
    SolveReport report;
};

struct GlobalApproximation {
    ParametricBoundary boundary;
    RectGrid grid;
    std::vector<double> outer;
    SolveReport outer_report;
    std::vector<ParameterInterval> arcs;
    std::vector<StripSolution> strips;
    double width = 0.0;
    double theta = 0.0;
    StripLocator locator;
};

inline void validate(const SolverConfig& config) {
    if (!(config.strip_width > 0.0) || !std::isfinite(config.strip_width))
        throw Error("strip width must be positive and finite");
    if (!(config.c_star > 0.0) || !std::isfinite(config.c_star))
        throw Error("C* must be positive and finite");
    if (!(config.delta_trim >= 0.0) || !std::isfinite(config.delta_trim))
        throw Error("delta_trim must be non-negative");
    if (!(config.padding >= 0.0) || !std::isfinite(config.padding))
        throw Error("padding must be non-negative");
}

/// Checks the strip width against every outflow arc of the boundary.
inline void validate(const SolverConfig& config, const ParametricBoundary& boundary,
                     const std::vector<ParameterInterval>& arcs) {
    validate(config);
    for (const auto& arc : arcs)
        if (!(config.strip_width < strip_width_limit(boundary, arc)))
            throw Error("strip too wide");
}

inline GlobalApproximation solve_problem(const ParametricBoundary& boundary, const ProblemData& data, int n,
                                         const SolverConfig& config = {}) {
    if (!(data.eps > 0.0) || !(data.alpha > 0.0))
        throw Error("eps and alpha must be positive");
    GlobalApproximation out{boundary, build_rect_grid(boundary, n, config.padding), {}, {}, {}, {}, config.strip_width,
                            0.0, {}};
    out.arcs = outflow_arcs(boundary);
    validate(config, boundary, out.arcs);
    if (config.delta_trim > 0.0)
        out.theta = theta_min(boundary, out.arcs, config.delta_trim);

    auto outer = solve(assemble_outer(out.grid, data));
    out.outer = std::move(outer.x);
    out.outer_report = outer.report;

    for (const auto& arc : out.arcs) {
        StripSolution s;
        s.mesh = build_strip_mesh(boundary, arc, n, config.strip_width, data.eps, data.alpha, config.c_star,
                                  out.theta);
        std::vector<double> bc(s.mesh.node_count(), 0.0);
        for (int j = 0; j <= n; ++j) {
            const FrameSample f = frame(boundary, s.mesh.t[j]);
            for (int i = 1; i <= n; ++i) {
                if (i != n && j != 0 && j != n)
                    continue;
                const Vec2 p = f.point + s.mesh.r[i] * f.normal;
                bc[s.mesh.index(i, j)] = bilinear_eval(out.grid, out.outer, p.x, p.y);
            }
        }
        auto sol = solve(assemble_strip(s.mesh, boundary, data, bc));
        s.values = std::move(sol.x);
        // Dirichlet rows carry exactly the assigned data.
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i)
                if (i == 0 || i == n || j == 0 || j == n)
                    s.values[s.mesh.index(i, j)] = i == 0 ? 0.0 : bc[s.mesh.index(i, j)];
        s.report = sol.report;
        out.strips.push_back(std::move(s));
    }
    out.locator = StripLocator(boundary, out.arcs, config.strip_width);
    return out;
}

/// Points within this distance of the boundary polygon count as on the
/// closed domain.
inline double boundary_tolerance(const ParametricBoundary& boundary) {
    const BoundingBox& b = boundary.extent();
    return 1e-6 * std::max(b.max_x - b.min_x, b.max_y - b.min_y);
}

/// Value of the corrected approximation at a point of the closed domain.
inline double evaluate(const GlobalApproximation& approx, double x, double y) {
    const auto hit = approx.locator.locate({x, y});
    if (hit) {
        const auto& s = approx.strips[hit->arc];
        return bilinear_eval_strip(s.mesh, s.values, hit->coords.r, hit->coords.t);
    }
    if (!contains(approx.boundary, x, y) && polygon_distance(approx.boundary, x, y) > boundary_tolerance(approx.boundary))
        throw Error("point outside the domain");
    return bilinear_eval(approx.grid, approx.outer, x, y);
}

/// "x y u" lines on a (resolution x resolution) lattice over the enclosing
/// rectangle, u = 0 outside the domain.
inline void write_solution_lattice(std::ostream& os, const GlobalApproximation& approx, int resolution) {
    if (resolution < 2)
        throw Error("lattice resolution must be at least 2");
    const RectGrid& g = approx.grid;
    const auto old = os.precision(17);
    for (int j = 0; j < resolution; ++j) {
        const double y = g.min_y + j * g.ly() / (resolution - 1);
        for (int i = 0; i < resolution; ++i) {
            const double x = g.min_x + i * g.lx() / (resolution - 1);
            double u = 0.0;
            if (contains(approx.boundary, x, y))
                u = evaluate(approx, x, y);
            os << x << ' ' << y << ' ' << u << '\n';
        }
    }
    os.precision(old);
}

} // namespace layerfit
