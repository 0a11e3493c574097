#pragma once

/**
 * @brief Uniform enclosing grid and per-arc Shishkin strip meshes.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "layerfit/error.hpp"
#include "layerfit/geometry.hpp"

namespace layerfit {

/// Uniform (n+1) x (n+1) node grid on a rectangle strictly enclosing the
/// domain. Node (i, j) sits at x_i = min_x + i L_x / n, y_j likewise, and is
/// stored at index j (n + 1) + i.
struct RectGrid {
    double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
    int n = 0;
    std::vector<std::uint8_t> inside;

    double lx() const { return max_x - min_x; }
    double ly() const { return max_y - min_y; }
    double hx() const { return lx() / n; }
    double hy() const { return ly() / n; }
    double x(int i) const { return min_x + i * lx() / n; }
    double y(int j) const { return min_y + j * ly() / n; }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(n + 1) + static_cast<std::size_t>(i);
    }
    std::size_t node_count() const { return static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 1); }
    bool is_inside(int i, int j) const { return inside[index(i, j)] != 0; }
};

inline RectGrid build_rect_grid(const ParametricBoundary& boundary, int n, double padding = 1e-3) {
    if (n < 4)
        throw Error("grid needs at least 4 cells per direction");
    if (!(padding >= 0.0))
        throw Error("padding must be non-negative");
    const BoundingBox& box = boundary.extent();
    const double pad = padding * std::max(box.max_x - box.min_x, box.max_y - box.min_y);
    RectGrid g;
    g.min_x = box.min_x - pad;
    g.max_x = box.max_x + pad;
    g.min_y = box.min_y - pad;
    g.max_y = box.max_y + pad;
    g.n = n;
    g.inside.assign(g.node_count(), 0);

    // Row scan: the winding number along y = y_j only changes at polygon
    // crossings, so each node is classified by the crossings to its right.
    // Nodes close to a crossing go through contains() for identical results.
    const auto& poly = boundary.polygon();
    const std::size_t np = poly.size();
    const double near = 1e-9 * std::max(1.0, g.lx());
    std::vector<std::pair<double, int>> crossings;
    for (int j = 0; j <= n; ++j) {
        const double y = g.y(j);
        crossings.clear();
        bool vertex_on_row = false;
        for (std::size_t k = 0; k < np; ++k) {
            const Vec2 a = poly[k];
            vertex_on_row = vertex_on_row || std::abs(a.y - y) < near;
            const Vec2 b = poly[(k + 1) % np];
            int dir = 0;
            if (a.y <= y && b.y > y)
                dir = 1;
            else if (a.y > y && b.y <= y)
                dir = -1;
            if (dir != 0)
                crossings.emplace_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y), dir);
        }
        std::sort(crossings.begin(), crossings.end());
        std::size_t c = 0;
        int right = 0;
        for (const auto& cr : crossings)
            right += cr.second;
        for (int i = 0; i <= n; ++i) {
            const double x = g.x(i);
            while (c < crossings.size() && crossings[c].first <= x) {
                right -= crossings[c].second;
                ++c;
            }
            const bool close = (c < crossings.size() && crossings[c].first - x < near) ||
                               (c > 0 && x - crossings[c - 1].first < near);
            const bool in = (close || vertex_on_row) ? contains(boundary, x, y) : right != 0;
            g.inside[g.index(i, j)] = in ? 1 : 0;
        }
    }
    return g;
}

/// sigma = min{R/2, C* (eps/alpha) ln N}.
inline double transition_point(double width, double eps, double alpha, double c_star, int n) {
    return std::min(width / 2.0, c_star * (eps / alpha) * std::log(static_cast<double>(n)));
}

/// Largest admissible strip width for one arc: the strip must stay within
/// the extent of the domain and inside the radius of curvature of the arc.
inline double strip_width_limit(const ParametricBoundary& boundary, const ParameterInterval& arc) {
    const BoundingBox& box = boundary.extent();
    double limit = std::min({box.max_x, std::abs(box.min_y), box.max_y});
    const double kmax = max_abs_curvature(boundary, arc);
    if (kmax > 0.0)
        limit = std::min(limit, 1.0 / kmax);
    return limit;
}

/// Tensor mesh on [0, R] x arc: piecewise uniform in r with n/2 cells on
/// each side of sigma, uniform in t. Node (i, j) = (r_i, t_j) is stored at
/// index j (n + 1) + i.
struct StripMesh {
    ParameterInterval arc;
    double width = 0.0;
    double sigma = 0.0;
    double theta = 0.0;
    double alpha = 1.0;
    double c_star = 2.0;
    int n = 0;
    std::vector<double> r;
    std::vector<double> t;

    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(n + 1) + static_cast<std::size_t>(i);
    }
    std::size_t node_count() const { return static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 1); }
};

inline StripMesh build_strip_mesh(const ParametricBoundary& boundary, const ParameterInterval& arc, int n,
                                  double width, double eps, double alpha, double c_star, double theta = 0.0) {
    if (n < 4 || n % 2 != 0)
        throw Error("strip mesh needs an even number of cells, at least 4");
    if (!(eps > 0.0) || !(alpha > 0.0) || !(c_star > 0.0))
        throw Error("eps, alpha and C* must be positive");
    if (!(width > 0.0) || !(width < strip_width_limit(boundary, arc)))
        throw Error("strip too wide");

    StripMesh m;
    m.arc = arc;
    m.width = width;
    m.sigma = transition_point(width, eps, alpha, c_star, n);
    m.theta = theta;
    m.alpha = alpha;
    m.c_star = c_star;
    m.n = n;

    const int half = n / 2;
    const double fine = 2.0 * m.sigma / n;
    const double coarse = 2.0 * (width - m.sigma) / n;
    m.r.resize(n + 1);
    for (int i = 0; i < half; ++i)
        m.r[i] = i * fine;
    m.r[half] = m.sigma;
    for (int i = half + 1; i < n; ++i)
        m.r[i] = m.sigma + (i - half) * coarse;
    m.r[n] = width;

    m.t.resize(n + 1);
    for (int j = 0; j < n; ++j)
        m.t[j] = arc.begin + j * arc.length() / n;
    m.t[n] = arc.end;
    return m;
}

struct StripHit {
    std::size_t arc = 0;
    CurvilinearPoint coords;
};

/// Region test for the union of strips {0 <= r <= R} over several arcs.
class StripLocator {
  public:
    StripLocator() = default;
    StripLocator(const ParametricBoundary& boundary, const std::vector<ParameterInterval>& arcs, double width) {
        inverters_.reserve(arcs.size());
        for (const auto& arc : arcs)
            inverters_.emplace_back(boundary, arc, width);
    }

    /// First arc whose strip contains p. Propagates inversion failures.
    std::optional<StripHit> locate(Vec2 p) const {
        for (std::size_t k = 0; k < inverters_.size(); ++k)
            if (auto c = inverters_[k].invert(p))
                return StripHit{k, *c};
        return std::nullopt;
    }

    std::size_t arc_count() const { return inverters_.size(); }

  private:
    std::vector<ArcInverter> inverters_;
};

inline std::optional<StripHit> strip_membership(const ParametricBoundary& boundary,
                                                const std::vector<ParameterInterval>& arcs, double width, double x,
                                                double y) {
    return StripLocator(boundary, arcs, width).locate({x, y});
}

/// Debug dump: one "r t x y" line per strip node.
inline void write_strip_mesh(std::ostream& os, const ParametricBoundary& boundary, const StripMesh& mesh) {
    const auto old = os.precision(17);
    for (int j = 0; j <= mesh.n; ++j) {
        const FrameSample f = frame(boundary, mesh.t[j]);
        for (int i = 0; i <= mesh.n; ++i) {
            const Vec2 p = f.point + mesh.r[i] * f.normal;
            os << mesh.r[i] << ' ' << mesh.t[j] << ' ' << p.x << ' ' << p.y << '\n';
        }
    }
    os.precision(old);
}

} // namespace layerfit
