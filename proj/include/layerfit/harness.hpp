#pragma once

/**
 * @brief Double-mesh convergence estimates.
 *
 * D^N_eps compares the approximations computed with N and 2N cells: the
 * outer interpolants on the union of both grids' interior nodes outside the
 * strips, and the strip interpolants on the union of both strip node sets.
 * Orders are p = log2(D^N / D^2N); the uniform row takes the maximum of D
 * over eps before forming the ratio.
 */

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "layerfit/error.hpp"
#include "layerfit/interpolation.hpp"
#include "layerfit/pipeline.hpp"
#include "layerfit/problems.hpp"

namespace layerfit {

inline double two_mesh_difference(const GlobalApproximation& coarse, const GlobalApproximation& fine) {
    if (coarse.arcs.size() != fine.arcs.size() || coarse.width != fine.width)
        throw Error("approximations use different strips");
    double d = 0.0;

    // Outer part. Nodes that fail inversion near a characteristic point
    // count as outside the strip.
    auto outer_nodes = [&](const RectGrid& g) {
        for (int j = 0; j <= g.n; ++j)
            for (int i = 0; i <= g.n; ++i) {
                if (!g.is_inside(i, j))
                    continue;
                const double x = g.x(i), y = g.y(j);
                bool in_strip = false;
                try {
                    const auto hit = fine.locator.locate({x, y});
                    in_strip = hit && hit->coords.r < fine.width;
                } catch (const Error&) {
                    in_strip = false;
                }
                if (in_strip)
                    continue;
                d = std::max(d, std::abs(bilinear_eval(coarse.grid, coarse.outer, x, y) -
                                         bilinear_eval(fine.grid, fine.outer, x, y)));
            }
    };
    outer_nodes(coarse.grid);
    outer_nodes(fine.grid);

    for (std::size_t k = 0; k < coarse.strips.size(); ++k) {
        const auto& sc = coarse.strips[k];
        const auto& sf = fine.strips[k];
        for (const StripSolution* s : {&sc, &sf})
            for (double t : s->mesh.t)
                for (double r : s->mesh.r)
                    d = std::max(d, std::abs(bilinear_eval_strip(sc.mesh, sc.values, r, t) -
                                             bilinear_eval_strip(sf.mesh, sf.values, r, t)));
    }
    return d;
}

inline double two_mesh_difference(const TestCase& tc, double eps, int n, const SolverConfig& config) {
    ProblemData data = tc.data;
    data.eps = eps;
    const auto coarse = solve_problem(tc.boundary, data, n, config);
    const auto fine = solve_problem(tc.boundary, data, 2 * n, config);
    return two_mesh_difference(coarse, fine);
}

/// Max |U - u| over the nodes that carry the global approximation: outer
/// nodes inside the domain and outside the strips, and all strip nodes.
inline double max_nodal_error(const GlobalApproximation& approx, const Field& u) {
    double err = 0.0;
    const RectGrid& g = approx.grid;
    for (int j = 0; j <= g.n; ++j)
        for (int i = 0; i <= g.n; ++i) {
            if (!g.is_inside(i, j))
                continue;
            const double x = g.x(i), y = g.y(j);
            bool in_strip = false;
            try {
                in_strip = approx.locator.locate({x, y}).has_value();
            } catch (const Error&) {
                in_strip = false;
            }
            if (!in_strip)
                err = std::max(err, std::abs(approx.outer[g.index(i, j)] - u(x, y)));
        }
    for (const auto& s : approx.strips)
        for (int j = 0; j <= s.mesh.n; ++j) {
            const FrameSample f = frame(approx.boundary, s.mesh.t[j]);
            for (int i = 0; i <= s.mesh.n; ++i) {
                const Vec2 p = f.point + s.mesh.r[i] * f.normal;
                err = std::max(err, std::abs(s.values[s.mesh.index(i, j)] - u(p.x, p.y)));
            }
        }
    return err;
}

/// log2(d_coarse / d_fine).
inline double convergence_order(double d_coarse, double d_fine) { return std::log2(d_coarse / d_fine); }

struct ConvergenceTable {
    std::vector<double> eps;
    std::vector<int> n;
    /// d[e][k] = D^{n[k]}_{eps[e]}; empty when a run failed.
    std::vector<std::vector<std::optional<double>>> d;
    /// p[e][k] for k < n.size() - 1.
    std::vector<std::vector<std::optional<double>>> p;
    std::vector<std::optional<double>> uniform_d;
    std::vector<std::optional<double>> uniform_p;
    std::vector<std::string> failures;
};

namespace detail {

inline std::optional<double> order_of(const std::optional<double>& dc, const std::optional<double>& df) {
    if (!dc || !df || !(*df > 0.0))
        return std::nullopt;
    return convergence_order(*dc, *df);
}

// Runs jobs 0..count-1 on `workers` threads. Each job writes only its own
// result slot, so output is independent of scheduling.
inline void run_parallel(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& job) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (workers == 1) {
        for (std::size_t k = 0; k < count; ++k)
            job(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < count; k = next++)
                job(k);
        });
}

} // namespace detail

/// Fills D from per-cell values and derives the order rows.
inline void finish_table(ConvergenceTable& table) {
    const std::size_t ne = table.eps.size();
    const std::size_t nn = table.n.size();
    table.p.assign(ne, std::vector<std::optional<double>>(nn > 0 ? nn - 1 : 0));
    table.uniform_d.assign(nn, std::nullopt);
    table.uniform_p.assign(nn > 0 ? nn - 1 : 0, std::nullopt);
    for (std::size_t e = 0; e < ne; ++e)
        for (std::size_t k = 0; k + 1 < nn; ++k)
            table.p[e][k] = detail::order_of(table.d[e][k], table.d[e][k + 1]);
    for (std::size_t k = 0; k < nn; ++k)
        for (std::size_t e = 0; e < ne; ++e)
            if (table.d[e][k])
                table.uniform_d[k] = std::max(table.uniform_d[k].value_or(0.0), *table.d[e][k]);
    for (std::size_t k = 0; k + 1 < nn; ++k)
        table.uniform_p[k] = detail::order_of(table.uniform_d[k], table.uniform_d[k + 1]);
}

/// Double-mesh table over eps_list x n_list. n_list must be consecutive
/// doublings. Each (eps, N) solve and each difference is an independent job.
inline ConvergenceTable order_table(const TestCase& tc, const std::vector<double>& eps_list,
                                    const std::vector<int>& n_list, const SolverConfig& config, unsigned jobs = 1,
                                    std::ostream* log = nullptr) {
    if (eps_list.empty() || n_list.empty())
        throw Error("empty parameter list");
    for (std::size_t k = 0; k + 1 < n_list.size(); ++k)
        if (n_list[k + 1] != 2 * n_list[k])
            throw Error("N list must be consecutive doublings");
    validate(config);

    ConvergenceTable table;
    table.eps = eps_list;
    table.n = n_list;
    std::vector<int> solve_n = n_list;
    solve_n.push_back(2 * n_list.back());

    const std::size_t ne = eps_list.size();
    const std::size_t ns = solve_n.size();
    std::vector<std::optional<GlobalApproximation>> runs(ne * ns);
    std::vector<std::string> errors(ne * ns);
    detail::run_parallel(ne * ns, jobs, [&](std::size_t job) {
        const std::size_t e = job / ns;
        const std::size_t k = job % ns;
        try {
            ProblemData data = tc.data;
            data.eps = eps_list[e];
            runs[job].emplace(solve_problem(tc.boundary, data, solve_n[k], config));
        } catch (const std::exception& ex) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "eps=%.17g N=%d: ", eps_list[e], solve_n[k]);
            errors[job] = buf + std::string(ex.what());
        }
    });

    table.d.assign(ne, std::vector<std::optional<double>>(n_list.size()));
    std::vector<std::string> diff_errors(ne * n_list.size());
    detail::run_parallel(ne * n_list.size(), jobs, [&](std::size_t job) {
        const std::size_t e = job / n_list.size();
        const std::size_t k = job % n_list.size();
        const auto& coarse = runs[e * ns + k];
        const auto& fine = runs[e * ns + k + 1];
        if (!coarse || !fine)
            return;
        try {
            table.d[e][k] = two_mesh_difference(*coarse, *fine);
        } catch (const std::exception& ex) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "eps=%.17g N=%d: ", eps_list[e], n_list[k]);
            diff_errors[job] = buf + std::string(ex.what());
        }
    });

    for (const auto* list : {&errors, &diff_errors})
        for (const auto& msg : *list)
            if (!msg.empty()) {
                table.failures.push_back(msg);
                if (log)
                    *log << "missing cell: " << msg << '\n';
            }
    finish_table(table);
    return table;
}

/// Long-form CSV: "eps,N,D,p" per cell, then "uniform" rows. Missing values
/// are empty fields.
inline void write_csv(std::ostream& os, const ConvergenceTable& table) {
    auto num = [](const std::optional<double>& v) {
        if (!v)
            return std::string{};
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", *v);
        return std::string(buf);
    };
    os << "eps,N,D,p\n";
    for (std::size_t e = 0; e < table.eps.size(); ++e)
        for (std::size_t k = 0; k < table.n.size(); ++k)
            os << num(table.eps[e]) << ',' << table.n[k] << ',' << num(table.d[e][k]) << ','
               << (k < table.p[e].size() ? num(table.p[e][k]) : std::string{}) << '\n';
    for (std::size_t k = 0; k < table.n.size(); ++k)
        os << "uniform," << table.n[k] << ',' << num(table.uniform_d[k]) << ','
           << (k < table.uniform_p.size() ? num(table.uniform_p[k]) : std::string{}) << '\n';
}

/// Fixed-width order table: one row per eps, one column per N with a
/// defined order, and a final p_uniform row.
inline void write_text(std::ostream& os, const ConvergenceTable& table) {
    char buf[64];
    os << "  eps | N  ";
    for (std::size_t k = 0; k < table.uniform_p.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%9d", table.n[k]);
        os << buf;
    }
    os << '\n';
    auto cell = [&](const std::optional<double>& v) {
        if (v)
            std::snprintf(buf, sizeof buf, "%9.4f", *v);
        else
            std::snprintf(buf, sizeof buf, "%9s", "-");
        return std::string(buf);
    };
    for (std::size_t e = 0; e < table.eps.size(); ++e) {
        std::snprintf(buf, sizeof buf, "%10.6f ", table.eps[e]);
        os << buf;
        for (const auto& v : table.p[e])
            os << cell(v);
        os << '\n';
    }
    os << "p_uniform  ";
    for (const auto& v : table.uniform_p)
        os << cell(v);
    os << '\n';
}

} // namespace layerfit
