#pragma once

/**
 * @brief Direct solution of assembled systems with a verified residual.
 *
 * Rows are equilibrated by their diagonal, factorized with a sparse LU
 * (COLAMD ordering) and the residual of the equilibrated system is checked
 * against rtol ||D^-1 rhs||_inf + atol. A few steps of iterative refinement
 * with the same factors are taken before giving up.
 */

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "layerfit/error.hpp"
#include "layerfit/operators.hpp"

namespace layerfit {

struct SolveReport {
    double residual_norm = 0.0;
    int iterations = 0; ///< refinement steps after the direct solve
    std::string method;
};

struct LinearSolution {
    std::vector<double> x;
    SolveReport report;
};

inline LinearSolution solve(const SparseSystem& system, double rtol = 1e-10, double atol = 1e-12) {
    using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
    const auto n = static_cast<Eigen::Index>(system.size());
    if (!system.complete())
        throw Error("system is incomplete");

    const auto& rp = system.row_ptr();
    const auto& cols = system.cols();
    const auto& vals = system.values();

    Eigen::VectorXd scale(n);
    for (Eigen::Index row = 0; row < n; ++row) {
        const double d = system.diagonal(static_cast<std::size_t>(row));
        if (!(d > 0.0) || !std::isfinite(d))
            throw Error("singular system");
        scale[row] = 1.0 / d;
    }

    std::vector<Eigen::Triplet<double, int>> triplets;
    triplets.reserve(system.nonzeros());
    for (Eigen::Index row = 0; row < n; ++row)
        for (std::size_t k = rp[row]; k < rp[row + 1]; ++k)
            triplets.emplace_back(static_cast<int>(row), static_cast<int>(cols[k]), vals[k] * scale[row]);
    SpMat A(n, n);
    A.setFromTriplets(triplets.begin(), triplets.end());
    A.makeCompressed();

    Eigen::VectorXd b(n);
    for (Eigen::Index row = 0; row < n; ++row)
        b[row] = system.rhs()[static_cast<std::size_t>(row)] * scale[row];

    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success)
        throw Error("singular system");

    Eigen::VectorXd x = lu.solve(b);
    if (lu.info() != Eigen::Success || !x.allFinite())
        throw Error("singular system");

    const double tol = rtol * b.lpNorm<Eigen::Infinity>() + atol;
    Eigen::VectorXd r = b - A * x;
    double res = r.lpNorm<Eigen::Infinity>();
    std::vector<double> history{res};
    int steps = 0;
    while (res > tol && steps < 5) {
        x += lu.solve(r);
        r = b - A * x;
        res = r.lpNorm<Eigen::Infinity>();
        history.push_back(res);
        ++steps;
    }
    if (!(res <= tol)) {
        std::ostringstream msg;
        msg << "refinement did not reach the residual tolerance " << tol << "; residual history:";
        for (double h : history)
            msg << ' ' << h;
        throw Error(msg.str());
    }

    LinearSolution out;
    out.x.assign(x.data(), x.data() + n);
    out.report.residual_norm = res;
    out.report.iterations = steps;
    out.report.method = steps == 0 ? "sparse-lu" : "sparse-lu+refinement";
    return out;
}

} // namespace layerfit
