#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "layerfit/harness.hpp"
#include "layerfit/pipeline.hpp"
#include "layerfit/problems.hpp"

using namespace layerfit;
using std::numbers::pi;

TEST(Pipeline, ConfigValidation) {
    SolverConfig c;
    EXPECT_NO_THROW(validate(c));
    c.strip_width = -1.0;
    EXPECT_THROW(validate(c), Error);
    c = {};
    c.c_star = 0.0;
    EXPECT_THROW(validate(c), Error);
    c = {};
    c.strip_width = 0.2; // beyond 1/|kappa| = 1/6 on omega1's outflow arc
    const auto b = omega1(0.5);
    EXPECT_THROW(validate(c, b, outflow_arcs(b)), Error);
    const auto tc = test_problem(1, 0.5);
    EXPECT_THROW(solve_problem(tc.boundary, tc.data, 16, c), Error);
}

TEST(Pipeline, ZeroSourceGivesZero) {
    auto tc = test_problem(1, 0.5);
    tc.data.f = [](double, double) { return 0.0; };
    const auto a = solve_problem(tc.boundary, tc.data, 16, tc.config);
    for (double v : a.outer)
        EXPECT_EQ(v, 0.0);
    for (const auto& s : a.strips)
        for (double v : s.values)
            EXPECT_EQ(v, 0.0);
}

TEST(Pipeline, StripBoundaryDataComesFromOuterInterpolant) {
    const auto tc = test_problem(1, 0.5);
    ProblemData d = tc.data;
    d.eps = 1e-3;
    const int n = 16;
    const auto a = solve_problem(tc.boundary, d, n, tc.config);
    ASSERT_EQ(a.strips.size(), 1u);
    const auto& s = a.strips[0];
    for (int j = 0; j <= n; ++j) {
        EXPECT_EQ(s.values[s.mesh.index(0, j)], 0.0);
        const Vec2 p = to_cartesian(tc.boundary, {s.mesh.r[n], s.mesh.t[j]});
        EXPECT_EQ(s.values[s.mesh.index(n, j)], bilinear_eval(a.grid, a.outer, p.x, p.y));
    }
    for (int i = 1; i <= n; ++i) {
        const Vec2 p = to_cartesian(tc.boundary, {s.mesh.r[i], s.mesh.t[0]});
        EXPECT_EQ(s.values[s.mesh.index(i, 0)], bilinear_eval(a.grid, a.outer, p.x, p.y));
    }
}

TEST(Pipeline, EvaluateSwitchesBetweenStripAndOuter) {
    const auto tc = test_problem(1, 0.5);
    ProblemData d = tc.data;
    d.eps = 1e-4;
    const auto a = solve_problem(tc.boundary, d, 32, tc.config);
    // (beta, 0) is on the outflow boundary: the strip gives exactly 0.
    EXPECT_EQ(evaluate(a, 0.5, 0.0), 0.0);
    // just inside the layer the strip solution is used
    const auto& s = a.strips[0];
    const double r = s.mesh.r[3];
    EXPECT_NEAR(evaluate(a, 0.5 - r, 0.0), bilinear_eval_strip(s.mesh, s.values, r, 2.0 * pi), 1e-12);
    // away from the strip the outer interpolant is used
    EXPECT_EQ(evaluate(a, -0.5, 0.0), bilinear_eval(a.grid, a.outer, -0.5, 0.0));
    EXPECT_THROW(evaluate(a, 5.0, 5.0), Error);
}

TEST(Pipeline, ReducedSolutionAtSmallEps) {
    // For eps -> 0 the solution away from layers solves v_x + v = f along
    // y = const, entering with v = 0 at the inflow point. On y = 0 of
    // omega1 the inflow point is x = -beta and f = 2.25, so
    // v(0, 0) = 2.25 (1 - e^-0.5).
    const auto tc = test_problem(1, 0.5);
    ProblemData d = tc.data;
    d.eps = std::ldexp(1.0, -20);
    const auto a = solve_problem(tc.boundary, d, 128, tc.config);
    EXPECT_NEAR(evaluate(a, 0.0, 0.0), 2.25 * (1.0 - std::exp(-0.5)), 0.03);
}

TEST(Pipeline, ManufacturedSolutionConverges) {
    const auto ex = unit_circle_solution();
    for (double eps : {1.0, 0.5}) {
        const auto tc = manufactured_case(circle(1.0), ex, eps);
        double prev = 0.0;
        for (int n : {32, 64, 128}) {
            const auto a = solve_problem(tc.boundary, tc.data, n, tc.config);
            const double e = max_nodal_error(a, ex.u);
            if (prev > 0.0) {
                EXPECT_GE(std::log2(prev / e), 0.8) << "eps=" << eps << " N=" << n;
            }
            prev = e;
        }
    }
}

TEST(Pipeline, Omega3StripIsDisconnected) {
    const auto tc = test_problem(3, 0.5);
    const auto a = solve_problem(tc.boundary, tc.data, 16, tc.config);
    EXPECT_EQ(a.strips.size(), 3u);
    EXPECT_EQ(a.locator.arc_count(), 3u);
}

TEST(Pipeline, ThetaRecordedWithTrim) {
    const auto tc = test_problem(1, 0.5);
    SolverConfig c = tc.config;
    c.delta_trim = 0.2;
    const auto a = solve_problem(tc.boundary, tc.data, 16, c);
    EXPECT_GT(a.theta, 0.0);
    EXPECT_LE(a.theta, 1.0);
    EXPECT_EQ(a.strips[0].mesh.theta, a.theta);
}

TEST(Pipeline, SolutionLatticeDump) {
    const auto tc = test_problem(1, 0.5);
    const auto a = solve_problem(tc.boundary, tc.data, 16, tc.config);
    std::ostringstream os;
    write_solution_lattice(os, a, 11);
    std::istringstream is(os.str());
    double x, y, u;
    int count = 0, inside = 0;
    while (is >> x >> y >> u) {
        ++count;
        if (contains(tc.boundary, x, y)) {
            ++inside;
        } else {
            EXPECT_EQ(u, 0.0);
        }
    }
    EXPECT_EQ(count, 121);
    EXPECT_GT(inside, 10);
    EXPECT_THROW(write_solution_lattice(os, a, 1), Error);
}
