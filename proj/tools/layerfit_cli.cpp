// Command-line front end: single solves, order tables, geometry reports and
// a manufactured-solution check.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "layerfit/layerfit.hpp"

namespace fs = std::filesystem;
using namespace layerfit;

namespace {

struct RunConfig {
    int problem = 1;
    double beta = 0.5;
    std::optional<double> width;
    double c_star = 2.0;
    double delta_trim = 0.0;
    double padding = 1e-3;
    std::string out = ".";
};

struct Range {
    int first = 0, last = 0, step = 1;
};

Range parse_range(const std::string& text, int default_step) {
    Range r;
    r.step = default_step;
    char sep = 0;
    std::istringstream is(text);
    if (!(is >> r.first >> sep) || sep != ':' || !(is >> r.last))
        throw Error("bad range '" + text + "', expected a:b or a:b:step");
    if (is >> sep) {
        if (sep != ':' || !(is >> r.step))
            throw Error("bad range '" + text + "'");
    }
    if (r.step <= 0 || r.last < r.first)
        throw Error("bad range '" + text + "'");
    return r;
}

void add_common(CLI::App* app, RunConfig& rc) {
    app->add_option("--problem", rc.problem, "test problem id (1, 2 or 3)")->capture_default_str();
    app->add_option("--beta", rc.beta, "domain parameter")->capture_default_str();
    app->add_option("--R", rc.width, "strip width (default: 0.1, or 1 for problem 2)");
    app->add_option("--cstar", rc.c_star, "Shishkin constant C*")->capture_default_str();
    app->add_option("--delta-trim", rc.delta_trim, "arc trim for theta estimation (0 = off)")->capture_default_str();
    app->add_option("--padding", rc.padding, "relative padding of the enclosing rectangle")->capture_default_str();
}

TestCase make_case(const RunConfig& rc) {
    TestCase tc = test_problem(rc.problem, rc.beta);
    if (rc.width)
        tc.config.strip_width = *rc.width;
    tc.config.c_star = rc.c_star;
    tc.config.delta_trim = rc.delta_trim;
    tc.config.padding = rc.padding;
    validate(tc.config, tc.boundary, outflow_arcs(tc.boundary));
    return tc;
}

fs::path output_dir(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec)
        throw Error("cannot create output directory " + dir + ": " + ec.message());
    return p;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p);
    if (!os)
        throw Error("cannot write " + p.string());
    return os;
}

void report(const char* what, const SolveReport& r) {
    std::fprintf(stderr, "%s: %s, residual %.3e, %d refinement steps\n", what, r.method.c_str(), r.residual_norm,
                 r.iterations);
}

int run_solve(const RunConfig& rc, double eps, int n, int lattice, bool dump_mesh, bool dump_matrix) {
    const TestCase tc = make_case(rc);
    const fs::path dir = output_dir(rc.out);
    ProblemData data = tc.data;
    data.eps = eps;
    const auto approx = solve_problem(tc.boundary, data, n, tc.config);
    report("outer", approx.outer_report);
    for (std::size_t k = 0; k < approx.strips.size(); ++k) {
        const auto& s = approx.strips[k];
        std::fprintf(stderr, "strip %zu: t in [%.6f, %.6f], sigma %.6e\n", k, s.mesh.arc.begin, s.mesh.arc.end,
                     s.mesh.sigma);
        report("strip", s.report);
    }

    {
        auto os = open_out(dir / "solution.txt");
        write_solution_lattice(os, approx, lattice);
    }
    if (dump_mesh)
        for (std::size_t k = 0; k < approx.strips.size(); ++k) {
            auto os = open_out(dir / ("strip_mesh_" + std::to_string(k) + ".txt"));
            write_strip_mesh(os, tc.boundary, approx.strips[k].mesh);
        }
    if (dump_matrix) {
        {
            auto os = open_out(dir / "outer_matrix.txt");
            write_triplets(os, assemble_outer(approx.grid, data));
        }
        for (std::size_t k = 0; k < approx.strips.size(); ++k) {
            const auto& s = approx.strips[k];
            auto os = open_out(dir / ("strip_matrix_" + std::to_string(k) + ".txt"));
            write_triplets(os, assemble_strip(s.mesh, tc.boundary, data, s.values));
        }
    }
    std::fprintf(stderr, "wrote %s\n", (dir / "solution.txt").string().c_str());
    return 0;
}

int run_table(const RunConfig& rc, const std::string& eps_pows, const std::string& n_pows, unsigned jobs) {
    const TestCase tc = make_case(rc);
    const Range er = parse_range(eps_pows, 1);
    const Range nr = parse_range(n_pows, 1);
    if (nr.step != 1)
        throw Error("N powers must be consecutive");
    std::vector<double> eps;
    for (int i = er.first; i <= er.last; i += er.step)
        eps.push_back(std::ldexp(1.0, -i));
    std::vector<int> ns;
    for (int j = nr.first; j <= nr.last; ++j)
        ns.push_back(1 << j);

    const fs::path dir = output_dir(rc.out);
    const auto table = order_table(tc, eps, ns, tc.config, jobs, &std::cerr);
    {
        auto os = open_out(dir / "table.csv");
        write_csv(os, table);
    }
    {
        auto os = open_out(dir / "table.txt");
        write_text(os, table);
    }
    write_text(std::cout, table);
    std::fprintf(stderr, "wrote %s\n", (dir / "table.csv").string().c_str());
    return table.failures.empty() ? 0 : 1;
}

const char* kind_name(CharacteristicKind k) { return k == CharacteristicKind::Internal ? "internal" : "external"; }

int run_geometry(const RunConfig& rc) {
    const TestCase tc = make_case(rc);
    const auto& b = tc.boundary;
    const auto cps = find_characteristic_points(b);
    std::printf("domain: %s, beta = %g, orientation: %s\n", b.label().c_str(), rc.beta,
                b.orientation() == Orientation::Anticlockwise ? "anticlockwise" : "clockwise");
    std::printf("characteristic points: %zu\n", cps.size());
    for (const auto& c : cps)
        std::printf("  t = %.12f  (% .12f, % .12f)  %s  kappa = % .9f\n", c.t, c.point.x, c.point.y, kind_name(c.kind),
                    c.kappa);
    const auto arcs = outflow_arcs(b, cps);
    std::printf("outflow arcs: %zu\n", arcs.size());
    for (const auto& a : arcs) {
        double kmin = INFINITY, kmax = -INFINITY;
        for (int k = 0; k <= 4096; ++k) {
            const double kap = frame(b, a.begin + a.length() * k / 4096.0).kappa;
            kmin = std::min(kmin, kap);
            kmax = std::max(kmax, kap);
        }
        std::printf("  [%.12f, %.12f]  kappa in [% .6f, % .6f]  width limit %.6f\n", a.begin, a.end, kmin, kmax,
                    strip_width_limit(b, a));
    }
    if (rc.delta_trim > 0.0)
        std::printf("theta_min (trim %g): %.9f\n", rc.delta_trim, theta_min(b, arcs, rc.delta_trim));
    return 0;
}

int run_validate(const std::string& n_pows, const std::vector<double>& eps_list, double min_order) {
    const Range nr = parse_range(n_pows, 1);
    const auto exact = unit_circle_solution();
    bool ok = true;
    std::printf("manufactured u = (1 - x^2 - y^2) e^x on the unit circle\n");
    for (double eps : eps_list) {
        const TestCase tc = manufactured_case(circle(1.0), exact, eps);
        double prev = 0.0;
        for (int j = nr.first; j <= nr.last; ++j) {
            const int n = 1 << j;
            const double err = max_nodal_error(solve_problem(tc.boundary, tc.data, n, tc.config), exact.u);
            if (prev > 0.0) {
                const double p = std::log2(prev / err);
                ok = ok && p >= min_order;
                std::printf("eps = %-8g N = %-5d error = %.6e  order = %.4f\n", eps, n, err, p);
            } else {
                std::printf("eps = %-8g N = %-5d error = %.6e\n", eps, n, err);
            }
            prev = err;
        }
    }
    std::printf("%s (minimum order %.2f)\n", ok ? "PASS" : "FAIL", min_order);
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fitted-strip solver for singularly perturbed convection-diffusion on smooth domains"};
    app.set_config("--config", "", "key=value file with defaults; flags override");
    app.require_subcommand(1);

    RunConfig rc;

    auto* solve_cmd = app.add_subcommand("solve", "one (eps, N) run and a solution lattice dump");
    add_common(solve_cmd, rc);
    double eps = 1e-3;
    int n = 64, lattice = 201;
    bool dump_mesh = false, dump_matrix = false;
    solve_cmd->add_option("--eps", eps, "singular perturbation parameter")->capture_default_str();
    solve_cmd->add_option("--N", n, "cells per direction")->capture_default_str();
    solve_cmd->add_option("--lattice", lattice, "points per side of the solution dump")->capture_default_str();
    solve_cmd->add_option("--out", rc.out, "output directory")->capture_default_str();
    solve_cmd->add_flag("--dump-mesh", dump_mesh, "write strip meshes");
    solve_cmd->add_flag("--dump-matrix", dump_matrix, "write assembled matrices as triplets");

    auto* table_cmd = app.add_subcommand("table", "double-mesh order table");
    add_common(table_cmd, rc);
    std::string eps_pows = "0:20:4", n_pows = "3:7";
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    table_cmd->add_option("--eps-pows", eps_pows, "eps = 2^-i for i in a:b[:step]")->capture_default_str();
    table_cmd->add_option("--N-pows", n_pows, "N = 2^j for j in a:b")->capture_default_str();
    table_cmd->add_option("--jobs", jobs, "worker threads")->capture_default_str();
    table_cmd->add_option("--out", rc.out, "output directory")->capture_default_str();

    auto* geometry_cmd = app.add_subcommand("geometry", "characteristic points, outflow arcs and curvature");
    add_common(geometry_cmd, rc);

    auto* validate_cmd = app.add_subcommand("validate", "manufactured-solution convergence on the unit circle");
    std::string v_pows = "5:7";
    std::vector<double> v_eps{1.0, 0.5};
    double min_order = 0.8;
    validate_cmd->add_option("--N-pows", v_pows, "N = 2^j for j in a:b")->capture_default_str();
    validate_cmd->add_option("--eps", v_eps, "eps values")->capture_default_str();
    validate_cmd->add_option("--min-order", min_order, "required observed order")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve_cmd)
            return run_solve(rc, eps, n, lattice, dump_mesh, dump_matrix);
        if (*table_cmd)
            return run_table(rc, eps_pows, n_pows, jobs);
        if (*geometry_cmd)
            return run_geometry(rc);
        if (*validate_cmd)
            return run_validate(v_pows, v_eps, min_order);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
