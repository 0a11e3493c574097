#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "layerfit/error.hpp"
#include "layerfit/grids.hpp"

namespace layerfit {

namespace detail {

struct CellWeight {
    int cell;
    double w; ///< weight of the right node, in [0, 1]
};

// Offsets within 1e-10 of a node snap onto it so nodal values are reproduced
// exactly.
inline CellWeight snap(int cell, double w, int cells) {
    if (w < 1e-10) {
        w = 0.0;
    } else if (w > 1.0 - 1e-10) {
        w = 0.0;
        ++cell;
    }
    if (cell >= cells) {
        cell = cells - 1;
        w = 1.0;
    }
    return {cell, w};
}

inline CellWeight uniform_cell(double x, double lo, double length, int cells) {
    const double s = (x - lo) / length * cells;
    const double fl = std::floor(s);
    const int cell = std::clamp(static_cast<int>(fl), 0, cells - 1);
    return snap(cell, std::clamp(s - cell, 0.0, 1.0), cells);
}

inline CellWeight nonuniform_cell(double x, const std::vector<double>& nodes) {
    const int cells = static_cast<int>(nodes.size()) - 1;
    auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    int cell = static_cast<int>(it - nodes.begin()) - 1;
    cell = std::clamp(cell, 0, cells - 1);
    const double w = (x - nodes[cell]) / (nodes[cell + 1] - nodes[cell]);
    return snap(cell, std::clamp(w, 0.0, 1.0), cells);
}

inline double blend(const std::vector<double>& v, std::size_t stride, CellWeight cx, CellWeight cy) {
    const std::size_t i = static_cast<std::size_t>(cx.cell);
    const std::size_t j = static_cast<std::size_t>(cy.cell);
    const double v00 = v[j * stride + i];
    if (cx.w == 0.0 && cy.w == 0.0)
        return v00;
    const double v10 = v[j * stride + i + 1];
    const double v01 = v[(j + 1) * stride + i];
    const double v11 = v[(j + 1) * stride + i + 1];
    return (1.0 - cy.w) * ((1.0 - cx.w) * v00 + cx.w * v10) + cy.w * ((1.0 - cx.w) * v01 + cx.w * v11);
}

} // namespace detail

/// Tensor-product bilinear interpolant of grid nodal values.
inline double bilinear_eval(const RectGrid& grid, const std::vector<double>& values, double x, double y) {
    if (values.size() != grid.node_count())
        throw Error("nodal values do not match the grid");
    const double tol_x = 1e-12 * grid.lx();
    const double tol_y = 1e-12 * grid.ly();
    if (x < grid.min_x - tol_x || x > grid.max_x + tol_x || y < grid.min_y - tol_y || y > grid.max_y + tol_y)
        throw Error("point outside the enclosing rectangle");
    return detail::blend(values, static_cast<std::size_t>(grid.n + 1),
                         detail::uniform_cell(x, grid.min_x, grid.lx(), grid.n),
                         detail::uniform_cell(y, grid.min_y, grid.ly(), grid.n));
}

/// Bilinear interpolant on the (r, t) strip mesh, piecewise linear on the
/// Shishkin r-nodes.
inline double bilinear_eval_strip(const StripMesh& mesh, const std::vector<double>& values, double r, double t) {
    if (values.size() != mesh.node_count())
        throw Error("nodal values do not match the strip mesh");
    const double tol_r = 1e-12 * mesh.width;
    const double tol_t = 1e-12 * mesh.arc.length();
    if (r < -tol_r || r > mesh.width + tol_r || t < mesh.arc.begin - tol_t || t > mesh.arc.end + tol_t)
        throw Error("point outside the strip");
    return detail::blend(values, static_cast<std::size_t>(mesh.n + 1), detail::nonuniform_cell(r, mesh.r),
                         detail::nonuniform_cell(t, mesh.t));
}

} // namespace layerfit
