#pragma once

/**
 * @brief Upwind finite difference systems for the outer grid and the strips.
 *
 * Both assemblers produce row-compressed systems whose rows have a positive
 * diagonal and nonpositive off-diagonals with nonnegative row sums, so the
 * discrete operators are inverse-monotone.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "layerfit/error.hpp"
#include "layerfit/geometry.hpp"
#include "layerfit/grids.hpp"

namespace layerfit {

using Field = std::function<double(double, double)>;

/// -eps Laplace(u) + a u_x + b u = f with a >= alpha > 0 and b >= 0.
struct ProblemData {
    Field a;
    Field b;
    Field f;
    double eps = 1.0;
    double alpha = 1.0;
};

class SparseSystem {
  public:
    SparseSystem() = default;
    explicit SparseSystem(std::size_t n) : n_(n), rhs_(n, 0.0), dirichlet_(n, 0) {
        row_ptr_.reserve(n + 1);
        row_ptr_.push_back(0);
    }

    std::size_t size() const { return n_; }
    std::size_t nonzeros() const { return cols_.size(); }
    const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
    const std::vector<std::size_t>& cols() const { return cols_; }
    const std::vector<double>& values() const { return vals_; }
    std::vector<double>& values() { return vals_; }
    const std::vector<double>& rhs() const { return rhs_; }
    std::vector<double>& rhs() { return rhs_; }
    bool is_dirichlet(std::size_t row) const { return dirichlet_[row] != 0; }

    /// Rows must be appended in order. Duplicate columns are summed.
    void add_row(std::vector<std::pair<std::size_t, double>> entries, double rhs, bool dirichlet = false) {
        const std::size_t row = row_ptr_.size() - 1;
        if (row >= n_)
            throw Error("too many rows");
        std::sort(entries.begin(), entries.end(),
                  [](const auto& l, const auto& r) { return l.first < r.first; });
        for (std::size_t k = 0; k < entries.size(); ++k) {
            if (entries[k].first >= n_)
                throw Error("column out of range");
            if (!cols_.empty() && cols_.size() > row_ptr_.back() && cols_.back() == entries[k].first)
                vals_.back() += entries[k].second;
            else {
                cols_.push_back(entries[k].first);
                vals_.push_back(entries[k].second);
            }
        }
        row_ptr_.push_back(cols_.size());
        rhs_[row] = rhs;
        dirichlet_[row] = dirichlet ? 1 : 0;
    }

    void add_dirichlet_row(std::size_t row_expected, double value) {
        add_row({{row_expected, 1.0}}, value, true);
    }

    double diagonal(std::size_t row) const {
        for (std::size_t k = row_ptr_[row]; k < row_ptr_[row + 1]; ++k)
            if (cols_[k] == row)
                return vals_[k];
        return 0.0;
    }

    double coefficient(std::size_t row, std::size_t col) const {
        for (std::size_t k = row_ptr_[row]; k < row_ptr_[row + 1]; ++k)
            if (cols_[k] == col)
                return vals_[k];
        return 0.0;
    }

    bool complete() const { return row_ptr_.size() == n_ + 1; }

  private:
    std::size_t n_ = 0;
    std::vector<std::size_t> row_ptr_;
    std::vector<std::size_t> cols_;
    std::vector<double> vals_;
    std::vector<double> rhs_;
    std::vector<std::uint8_t> dirichlet_;
};

inline std::vector<double> matvec(const SparseSystem& sys, const std::vector<double>& z) {
    if (z.size() != sys.size())
        throw Error("dimension mismatch");
    std::vector<double> out(sys.size(), 0.0);
    const auto& rp = sys.row_ptr();
    const auto& c = sys.cols();
    const auto& v = sys.values();
    for (std::size_t row = 0; row < sys.size(); ++row) {
        double s = 0.0;
        for (std::size_t k = rp[row]; k < rp[row + 1]; ++k)
            s += v[k] * z[c[k]];
        out[row] = s;
    }
    return out;
}

/// Row of the first M-matrix violation, or -1 when every row has a positive
/// diagonal, nonpositive off-diagonals and a nonnegative row sum.
inline std::ptrdiff_t find_non_monotone_row(const SparseSystem& sys) {
    const auto& rp = sys.row_ptr();
    const auto& c = sys.cols();
    const auto& v = sys.values();
    for (std::size_t row = 0; row < sys.size(); ++row) {
        double diag = 0.0, sum = 0.0, mag = 0.0;
        bool ok = true;
        for (std::size_t k = rp[row]; k < rp[row + 1]; ++k) {
            sum += v[k];
            mag += std::abs(v[k]);
            if (c[k] == row)
                diag = v[k];
            else if (v[k] > 0.0)
                ok = false;
        }
        if (!ok || !(diag > 0.0) || sum < -1e-12 * mag)
            return static_cast<std::ptrdiff_t>(row);
    }
    return -1;
}

/// Matrix-market style triplet dump ("row col value", 0-based).
inline void write_triplets(std::ostream& os, const SparseSystem& sys) {
    const auto old = os.precision(17);
    const auto& rp = sys.row_ptr();
    for (std::size_t row = 0; row < sys.size(); ++row)
        for (std::size_t k = rp[row]; k < rp[row + 1]; ++k)
            os << row << ' ' << sys.cols()[k] << ' ' << sys.values()[k] << '\n';
    os.precision(old);
}

namespace detail {

inline void check_coefficients(const ProblemData& data, double a, double b) {
    if (!(a >= data.alpha) || !(b >= 0.0))
        throw Error("coefficient bound violated");
}

} // namespace detail

/// -eps (dxx + dyy) + a D-x + b on inside nodes, identity rows elsewhere.
inline SparseSystem assemble_outer(const RectGrid& grid, const ProblemData& data) {
    const int n = grid.n;
    const double hx = grid.hx();
    const double hy = grid.hy();
    const double ex = data.eps / (hx * hx);
    const double ey = data.eps / (hy * hy);
    SparseSystem sys(grid.node_count());
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            const std::size_t id = grid.index(i, j);
            if (!grid.is_inside(i, j)) {
                sys.add_dirichlet_row(id, 0.0);
                continue;
            }
            if (i == 0 || j == 0 || i == n || j == n)
                throw Error("domain touches the enclosing rectangle");
            const double x = grid.x(i);
            const double y = grid.y(j);
            const double a = data.a(x, y);
            const double b = data.b(x, y);
            detail::check_coefficients(data, a, b);
            sys.add_row({{grid.index(i - 1, j), -ex - a / hx},
                         {grid.index(i + 1, j), -ex},
                         {grid.index(i, j - 1), -ey},
                         {grid.index(i, j + 1), -ey},
                         {id, 2.0 * ex + 2.0 * ey + a / hx + b}},
                        data.f(x, y));
        }
    }
    return sys;
}

/// Strip operator in (r, t):
///   -eps/eta (eta u_r)_r + a n1 u_r - eps zeta (zeta u_t)_t + a n2 zeta u_t + b u
/// with eta = 1 - kappa r and zeta = 1/(tau eta), both convection terms
/// upwinded by the sign of their coefficient.
///
/// boundary_values supplies Dirichlet data on r = R and on the arc-end
/// columns t = t_0, t_n (indexed like the mesh); r = 0 nodes are set to 0.
inline SparseSystem assemble_strip(const StripMesh& mesh, const ParametricBoundary& boundary,
                                   const ProblemData& data, const std::vector<double>& boundary_values) {
    const int n = mesh.n;
    if (boundary_values.size() != mesh.node_count())
        throw Error("strip boundary data has the wrong size");

    std::vector<FrameSample> node_frame(n + 1), half_frame(n);
    for (int j = 0; j <= n; ++j)
        node_frame[j] = frame(boundary, mesh.t[j]);
    for (int j = 0; j < n; ++j)
        half_frame[j] = frame(boundary, 0.5 * (mesh.t[j] + mesh.t[j + 1]));

    auto eta = [](const FrameSample& f, double r) { return 1.0 - f.kappa * r; };
    for (int j = 0; j <= n; ++j)
        if (!(eta(node_frame[j], mesh.width) > 0.0))
            throw Error("strip exceeds curvature radius");
    for (int j = 0; j < n; ++j)
        if (!(eta(half_frame[j], mesh.width) > 0.0))
            throw Error("strip exceeds curvature radius");

    const double k = mesh.arc.length() / n;
    SparseSystem sys(mesh.node_count());
    for (int j = 0; j <= n; ++j) {
        const FrameSample& fj = node_frame[j];
        for (int i = 0; i <= n; ++i) {
            const std::size_t id = mesh.index(i, j);
            if (i == 0) {
                sys.add_dirichlet_row(id, 0.0);
                continue;
            }
            if (i == n || j == 0 || j == n) {
                sys.add_dirichlet_row(id, boundary_values[id]);
                continue;
            }
            const double r = mesh.r[i];
            const Vec2 p = fj.point + r * fj.normal;
            const double a = data.a(p.x, p.y);
            const double b = data.b(p.x, p.y);
            detail::check_coefficients(data, a, b);

            const double h_w = mesh.r[i] - mesh.r[i - 1];
            const double h_e = mesh.r[i + 1] - mesh.r[i];
            const double h_bar = 0.5 * (h_w + h_e);
            const double eta_c = eta(fj, r);
            const double eta_w = eta(fj, 0.5 * (mesh.r[i - 1] + r));
            const double eta_e = eta(fj, 0.5 * (r + mesh.r[i + 1]));
            const double zeta_c = 1.0 / (fj.tau * eta_c);
            const double zeta_s = 1.0 / (half_frame[j - 1].tau * eta(half_frame[j - 1], r));
            const double zeta_n = 1.0 / (half_frame[j].tau * eta(half_frame[j], r));

            double west = -data.eps * eta_w / (eta_c * h_bar * h_w);
            double east = -data.eps * eta_e / (eta_c * h_bar * h_e);
            double south = -data.eps * zeta_c * zeta_s / (k * k);
            double north = -data.eps * zeta_c * zeta_n / (k * k);
            double diag = -(west + east + south + north) + b;

            const double c_r = a * fj.normal.x;
            if (c_r < 0.0) {
                east += c_r / h_e;
                diag -= c_r / h_e;
            } else {
                west -= c_r / h_w;
                diag += c_r / h_w;
            }
            const double c_t = a * fj.normal.y * zeta_c;
            if (c_t < 0.0) {
                north += c_t / k;
                diag -= c_t / k;
            } else {
                south -= c_t / k;
                diag += c_t / k;
            }
            sys.add_row({{mesh.index(i - 1, j), west},
                         {mesh.index(i + 1, j), east},
                         {mesh.index(i, j - 1), south},
                         {mesh.index(i, j + 1), north},
                         {id, diag}},
                        data.f(p.x, p.y));
        }
    }
    if (const auto bad = find_non_monotone_row(sys); bad >= 0)
        throw Error("non-monotone row " + std::to_string(bad));
    return sys;
}

} // namespace layerfit
