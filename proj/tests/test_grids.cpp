#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "layerfit/grids.hpp"
#include "layerfit/problems.hpp"

using namespace layerfit;
using std::numbers::pi;

TEST(Grids, RectGridEnclosesDomain) {
    for (const auto& b : {omega1(0.5), omega2(0.5), omega3(0.5)}) {
        const auto g = build_rect_grid(b, 32);
        const auto& box = b.extent();
        EXPECT_LT(g.min_x, box.min_x);
        EXPECT_GT(g.max_x, box.max_x);
        EXPECT_LT(g.min_y, box.min_y);
        EXPECT_GT(g.max_y, box.max_y);
        for (int k = 0; k <= g.n; ++k) {
            EXPECT_FALSE(g.is_inside(k, 0));
            EXPECT_FALSE(g.is_inside(k, g.n));
            EXPECT_FALSE(g.is_inside(0, k));
            EXPECT_FALSE(g.is_inside(g.n, k));
        }
    }
}

TEST(Grids, RowScanAgreesWithContains) {
    for (const auto& b : {omega1(0.5), omega2(0.5), omega3(0.5), circle(1.0)}) {
        for (int n : {8, 16, 64, 100}) {
            const auto g = build_rect_grid(b, n);
            for (int j = 0; j <= n; ++j)
                for (int i = 0; i <= n; ++i)
                    ASSERT_EQ(g.is_inside(i, j), contains(b, g.x(i), g.y(j)))
                        << b.label() << " n=" << n << " (" << i << ',' << j << ')';
        }
    }
}

TEST(Grids, NodeCoordinatesAreUniform) {
    const auto g = build_rect_grid(circle(1.0), 16, 0.0);
    EXPECT_DOUBLE_EQ(g.x(0), -1.0);
    EXPECT_DOUBLE_EQ(g.x(16), 1.0);
    EXPECT_DOUBLE_EQ(g.hx(), 2.0 / 16.0);
    EXPECT_EQ(g.index(3, 2), 2u * 17u + 3u);
    EXPECT_THROW(build_rect_grid(circle(1.0), 2), Error);
}

TEST(Grids, TransitionPointFormula) {
    EXPECT_EQ(transition_point(0.1, 1.0, 1.0, 2.0, 64), 0.05);
    EXPECT_EQ(transition_point(0.1, 1e-6, 1.0, 2.0, 64), 2.0 * (1e-6 / 1.0) * std::log(64.0));
    EXPECT_EQ(transition_point(0.1, std::ldexp(1.0, -20), 1.0, 2.0, 128),
              2.0 * std::ldexp(1.0, -20) * std::log(128.0));
}

TEST(Grids, StripMeshIsPiecewiseUniform) {
    const auto b = omega1(0.5);
    const auto arc = outflow_arcs(b)[0];
    for (double eps : {1.0, 1e-2, 1e-6}) {
        for (int n : {8, 16, 64}) {
            const auto m = build_strip_mesh(b, arc, n, 0.1, eps, 1.0, 2.0);
            EXPECT_EQ(m.sigma, transition_point(0.1, eps, 1.0, 2.0, n));
            ASSERT_EQ(m.r.size(), static_cast<std::size_t>(n + 1));
            EXPECT_EQ(m.r[0], 0.0);
            EXPECT_EQ(m.r[n / 2], m.sigma);
            EXPECT_EQ(m.r[n], 0.1);
            const double fine = 2.0 * m.sigma / n;
            const double coarse = 2.0 * (0.1 - m.sigma) / n;
            for (int i = 1; i <= n; ++i) {
                const double h = m.r[i] - m.r[i - 1];
                EXPECT_NEAR(h, i <= n / 2 ? fine : coarse, 1e-14);
            }
            EXPECT_EQ(m.t.front(), arc.begin);
            EXPECT_EQ(m.t.back(), arc.end);
        }
    }
}

TEST(Grids, StripMeshPreconditions) {
    const auto b = omega1(0.5);
    const auto arc = outflow_arcs(b)[0];
    EXPECT_THROW(build_strip_mesh(b, arc, 7, 0.1, 1.0, 1.0, 2.0), Error);
    EXPECT_THROW(build_strip_mesh(b, arc, 2, 0.1, 1.0, 1.0, 2.0), Error);
    // kappa = -6 at t = 0 caps the width below 1/6
    EXPECT_NEAR(strip_width_limit(b, arc), 1.0 / 6.0, 1e-6);
    EXPECT_THROW(build_strip_mesh(b, arc, 8, 0.2, 1.0, 1.0, 2.0), Error);
    EXPECT_NO_THROW(build_strip_mesh(b, arc, 8, 0.16, 1.0, 1.0, 2.0));
}

TEST(Grids, StripMembership) {
    const auto b = circle(1.0);
    const auto arcs = outflow_arcs(b);
    const StripLocator loc(b, arcs, 0.1);
    EXPECT_EQ(loc.arc_count(), 1u);
    EXPECT_TRUE(loc.locate({0.95, 0.0}).has_value());
    EXPECT_TRUE(loc.locate({0.9, 0.0}).has_value()); // r = R belongs to the strip
    EXPECT_FALSE(loc.locate({0.85, 0.0}).has_value());
    EXPECT_FALSE(loc.locate({-0.95, 0.0}).has_value());
    const auto hit = strip_membership(b, arcs, 0.1, 0.0, -0.95);
    ASSERT_TRUE(hit.has_value());
    EXPECT_NEAR(hit->coords.r, 0.05, 1e-12);
}

TEST(Grids, StripMeshDump) {
    const auto b = circle(1.0);
    const auto m = build_strip_mesh(b, outflow_arcs(b)[0], 4, 0.1, 1.0, 1.0, 2.0);
    std::ostringstream os;
    write_strip_mesh(os, b, m);
    std::istringstream is(os.str());
    int lines = 0;
    double r, t, x, y;
    while (is >> r >> t >> x >> y) {
        EXPECT_NEAR(std::hypot(x, y), 1.0 - r, 1e-12);
        ++lines;
    }
    EXPECT_EQ(lines, 25);
}
