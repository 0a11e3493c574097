#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "layerfit/harness.hpp"

using namespace layerfit;

namespace {

ConvergenceTable synthetic(std::vector<double> eps, std::vector<int> n,
                           std::vector<std::vector<std::optional<double>>> d) {
    ConvergenceTable t;
    t.eps = std::move(eps);
    t.n = std::move(n);
    t.d = std::move(d);
    finish_table(t);
    return t;
}

} // namespace

TEST(Harness, HalvingGivesOrderOne) {
    const auto t = synthetic({1.0}, {8, 16, 32, 64}, {{0.8, 0.4, 0.2, 0.1}});
    for (const auto& p : t.p[0])
        EXPECT_EQ(*p, 1.0);
    EXPECT_EQ(t.uniform_p, t.p[0]);
    EXPECT_EQ(t.uniform_d, t.d[0]);
}

TEST(Harness, UniformRowIsColumnMaxBeforeLog) {
    const auto t = synthetic({1.0, 0.5}, {8, 16}, {{0.8, 0.1}, {0.4, 0.3}});
    EXPECT_EQ(*t.uniform_d[0], 0.8);
    EXPECT_EQ(*t.uniform_d[1], 0.3);
    EXPECT_DOUBLE_EQ(*t.uniform_p[0], std::log2(0.8 / 0.3));
    const auto swapped = synthetic({0.5, 1.0}, {8, 16}, {{0.4, 0.3}, {0.8, 0.1}});
    EXPECT_EQ(swapped.uniform_d, t.uniform_d);
    EXPECT_EQ(swapped.uniform_p, t.uniform_p);
}

TEST(Harness, MissingCellsStayMissing) {
    const auto t = synthetic({1.0, 0.5}, {8, 16, 32}, {{0.8, std::nullopt, 0.2}, {0.4, 0.2, 0.0}});
    EXPECT_FALSE(t.p[0][0]);
    EXPECT_FALSE(t.p[0][1]);
    EXPECT_EQ(*t.p[1][0], 1.0);
    EXPECT_FALSE(t.p[1][1]); // D^2N = 0
    EXPECT_EQ(*t.uniform_d[1], 0.2);
}

TEST(Harness, OrderNegatesWhenSwapped) {
    EXPECT_DOUBLE_EQ(convergence_order(0.3, 0.1), -convergence_order(0.1, 0.3));
}

TEST(Harness, CsvAndTextLayout) {
    const auto t = synthetic({1.0, 0.0625}, {8, 16}, {{0.5, 0.25}, {0.4, std::nullopt}});
    std::ostringstream csv;
    write_csv(csv, t);
    EXPECT_EQ(csv.str(), "eps,N,D,p\n"
                         "1,8,0.5,1\n"
                         "1,16,0.25,\n"
                         "0.0625,8,0.40000000000000002,\n"
                         "0.0625,16,,\n"
                         "uniform,8,0.5,1\n"
                         "uniform,16,0.25,\n");
    std::ostringstream txt;
    write_text(txt, t);
    const std::string s = txt.str();
    EXPECT_NE(s.find("  1.000000    1.0000"), std::string::npos) << s;
    EXPECT_NE(s.find("  0.062500         -"), std::string::npos) << s;
    EXPECT_NE(s.find("p_uniform     1.0000"), std::string::npos) << s;
}

TEST(Harness, ZeroSourceGivesZeroDifference) {
    auto tc = test_problem(1, 0.5);
    tc.data.f = [](double, double) { return 0.0; };
    EXPECT_EQ(two_mesh_difference(tc, 1e-3, 8, tc.config), 0.0);
}

TEST(Harness, ClassicalRegimeHalves) {
    const auto ex = unit_circle_solution();
    const auto tc = manufactured_case(circle(1.0), ex, 1.0);
    const double d32 = two_mesh_difference(tc, 1.0, 32, tc.config);
    const double d64 = two_mesh_difference(tc, 1.0, 64, tc.config);
    EXPECT_GT(d32 / d64, 2.0 * 0.75);
    EXPECT_LT(d32 / d64, 2.0 * 1.25);
}

TEST(Harness, TableRejectsBadLists) {
    const auto tc = test_problem(1, 0.5);
    EXPECT_THROW(order_table(tc, {1.0}, {8, 32}, tc.config), Error);
    EXPECT_THROW(order_table(tc, {}, {8, 16}, tc.config), Error);
}

TEST(Harness, TableIsIndependentOfParallelism) {
    const auto tc = test_problem(1, 0.5);
    const std::vector<double> eps{1.0, std::ldexp(1.0, -8)};
    std::ostringstream a, b;
    write_csv(a, order_table(tc, eps, {8, 16}, tc.config, 1));
    write_csv(b, order_table(tc, eps, {8, 16}, tc.config, 4));
    EXPECT_EQ(a.str(), b.str());
}

TEST(Harness, SingleEpsUniformRowEqualsThatRow) {
    const auto tc = test_problem(1, 0.5);
    const auto t = order_table(tc, {std::ldexp(1.0, -12)}, {8, 16, 32}, tc.config);
    EXPECT_TRUE(t.failures.empty());
    EXPECT_EQ(t.uniform_p, t.p[0]);
    for (const auto& p : t.p[0])
        ASSERT_TRUE(p.has_value());
}

TEST(Harness, ClassicalUpwindOrderBand) {
    // eps large enough that sigma = R/2, so the strip mesh is uniform and
    // the scheme is plain upwinding. Per-step orders oscillate with the
    // irregular boundary offsets of the outer grid, so the band applies to
    // the mean order over the N range.
    const auto tc = test_problem(1, 0.5);
    const auto t = order_table(tc, {1.0, 0.25}, {32, 64, 128}, tc.config);
    for (std::size_t e = 0; e < t.eps.size(); ++e) {
        ASSERT_TRUE(t.d[e][0] && t.d[e][2]);
        const double mean = std::log2(*t.d[e][0] / *t.d[e][2]) / 2.0;
        EXPECT_GE(mean, 0.5) << "eps=" << t.eps[e];
        EXPECT_LE(mean, 2.2) << "eps=" << t.eps[e];
    }
}
