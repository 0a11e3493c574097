#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "layerfit/linsolve.hpp"
#include "layerfit/pipeline.hpp"
#include "layerfit/problems.hpp"
#include "oracles.hpp"

using namespace layerfit;

namespace {

// Random diagonally dominant sparse M-matrix-like system with a few
// Dirichlet rows, plus its dense copy.
std::pair<SparseSystem, oracle::Dense> random_system(std::mt19937& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> col(0, n - 1);
    SparseSystem s(n);
    oracle::Dense a(n, std::vector<double>(n, 0.0));
    for (std::size_t row = 0; row < n; ++row) {
        if (u(rng) < 0.05) {
            s.add_dirichlet_row(row, u(rng));
            a[row][row] = 1.0;
            continue;
        }
        std::vector<std::pair<std::size_t, double>> e;
        double off = 0.0;
        for (int k = 0; k < 5; ++k) {
            const std::size_t c = col(rng);
            if (c == row)
                continue;
            const double v = -u(rng) * std::pow(10.0, 4.0 * u(rng));
            e.emplace_back(c, v);
            a[row][c] += v;
            off += std::abs(v);
        }
        const double d = off + u(rng) + 1e-3;
        e.emplace_back(row, d);
        a[row][row] += d;
        s.add_row(e, 2.0 * u(rng) - 1.0);
    }
    return {s, a};
}

} // namespace

TEST(Linsolve, MatchesDenseGaussianElimination) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 5 + rng() % 196;
        const auto [s, a] = random_system(rng, n);
        const auto sol = solve(s);
        const auto ref = oracle::gauss_solve(a, s.rhs());
        double scale = 0.0, err = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            scale = std::max(scale, std::abs(ref[k]));
            err = std::max(err, std::abs(sol.x[k] - ref[k]));
        }
        EXPECT_LE(err, 1e-9 * scale) << "n=" << n;
        EXPECT_LE(sol.report.residual_norm, 1e-10);
    }
}

TEST(Linsolve, DirichletRowsAreExact) {
    SparseSystem s(3);
    s.add_dirichlet_row(0, 0.25);
    s.add_row({{0, -1.0}, {1, 3.0}, {2, -1.0}}, 1.0);
    s.add_dirichlet_row(2, -0.5);
    const auto sol = solve(s);
    EXPECT_EQ(sol.x[0], 0.25);
    EXPECT_EQ(sol.x[2], -0.5);
    EXPECT_NEAR(sol.x[1], (1.0 + 0.25 - 0.5) / 3.0, 1e-15);
}

TEST(Linsolve, SingularSystemRejected) {
    SparseSystem s(2);
    s.add_row({{0, 1.0}, {1, -1.0}}, 1.0);
    s.add_row({{0, -1.0}, {1, 1.0}}, 1.0);
    EXPECT_THROW(solve(s), Error);
    SparseSystem z(2);
    z.add_row({{1, 1.0}}, 0.0);
    z.add_row({{1, 1.0}}, 0.0);
    EXPECT_THROW(solve(z), Error);
}

TEST(Linsolve, IncompleteSystemRejected) {
    SparseSystem s(2);
    s.add_dirichlet_row(0, 1.0);
    EXPECT_THROW(solve(s), Error);
}

TEST(Linsolve, RowScalingEquivariance) {
    std::mt19937 rng(5);
    const auto [s, a] = random_system(rng, 60);
    SparseSystem t(60);
    for (std::size_t row = 0; row < 60; ++row) {
        const double f = std::ldexp(1.0, static_cast<int>(row % 7) - 3);
        std::vector<std::pair<std::size_t, double>> e;
        for (std::size_t k = s.row_ptr()[row]; k < s.row_ptr()[row + 1]; ++k)
            e.emplace_back(s.cols()[k], f * s.values()[k]);
        t.add_row(e, f * s.rhs()[row], s.is_dirichlet(row));
    }
    EXPECT_EQ(solve(s).x, solve(t).x);
}

TEST(Linsolve, DiscreteMaximumPrinciple) {
    // f >= 0 gives U >= 0 for the monotone outer and strip operators.
    for (int id : {1, 2, 3}) {
        const auto tc = test_problem(id, 0.5);
        for (double eps : {1.0, std::ldexp(1.0, -10), std::ldexp(1.0, -20)}) {
            ProblemData d = tc.data;
            d.eps = eps;
            const auto approx = solve_problem(tc.boundary, d, 16, tc.config);
            for (double v : approx.outer)
                EXPECT_GE(v, -1e-12);
            for (const auto& s : approx.strips)
                for (double v : s.values)
                    EXPECT_GE(v, -1e-12);
        }
    }
}
