// Experiment runner: every subcommand writes CSV rows
//   parameters,N,time_factor_s,time_solve_s,iters,error
// to stdout or --output.

#include <CLI11.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "arrowhead/arrowhead.hpp"

using namespace arrowhead;

namespace {

struct Common {
    std::string output;
    std::uint64_t seed = 42;
    int threads = 0;
    int repeats = 5;
    bool deterministic = false;
};

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(const Common& c) : deterministic_(c.deterministic)
    {
        if (!c.output.empty()) {
            file_.open(c.output);
            if (!file_) {
                throw std::runtime_error("cannot open output file '" + c.output + "'");
            }
        }
        out() << "parameters,N,time_factor_s,time_solve_s,iters,error\n";
    }

    void row(const std::string& params, std::size_t n, double t_factor, double t_solve, std::size_t iters, double error)
    {
        out() << params << ',' << n << ',' << time(t_factor) << ',' << time(t_solve) << ',' << iters << ','
              << fmt(error) << '\n';
        out().flush();
    }

private:
    std::ostream& out() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
    std::string time(double t) const { return deterministic_ ? "0" : fmt(t); }

    std::ofstream file_;
    bool deterministic_;
};

/// Median wall time of `repeats` runs after one warmup run.
template <class Fn>
double median_time(int repeats, Fn&& fn)
{
    fn();
    std::vector<double> t;
    for (int i = 0; i < std::max(repeats, 1); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    std::sort(t.begin(), t.end());
    const std::size_t h = t.size() / 2;
    return t.size() % 2 == 1 ? t[h] : 0.5 * (t[h - 1] + t[h]);
}

std::string params(std::initializer_list<std::pair<const char*, std::string>> kv)
{
    std::string s;
    for (const auto& [k, v] : kv) {
        if (!s.empty()) {
            s += ';';
        }
        s += k;
        s += '=';
        s += v;
    }
    return s;
}

// u with u'' = -k^2 u satisfying the boundary conditions on [-1, 1].
struct Manufactured1D {
    double k;
    bool cosine;
    double shift;

    static Manufactured1D for_bc(BoundaryConditions bc)
    {
        const double pi = std::numbers::pi;
        if (bc.all_dirichlet()) {
            return {pi, false, 0.0};
        }
        if (bc.all_neumann()) {
            return {pi, true, 0.0};
        }
        return {pi / 4.0, bc.left == EndCondition::Neumann, 1.0};
    }

    double operator()(double x) const
    {
        const double t = k * (x + shift);
        return cosine ? std::cos(t) : std::sin(t);
    }
};

std::vector<double> sampled_legendre(const Mesh1D& mesh, std::size_t points, const std::function<double(double)>& f)
{
    const TransformPlan plan(mesh, points);
    std::vector<double> v(plan.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = f(plan.grid()[i]);
    }
    return plan.analysis(v);
}

double max_error_1d(const Space1D& s, std::span<const double> u, const Manufactured1D& exact)
{
    const Mesh1D& mesh = s.mesh();
    double err = 0.0;
    for (std::size_t e = 0; e < mesh.elements(); ++e) {
        for (int i = 0; i <= 16; ++i) {
            const double x = mesh.from_reference(e, -1.0 + i / 8.0);
            err = std::max(err, std::abs(evaluate(s, u, x) - exact(x)));
        }
    }
    return err;
}

std::vector<std::size_t> doubling(std::size_t lo, std::size_t hi)
{
    std::vector<std::size_t> out;
    for (std::size_t p = lo; p <= hi; p *= 2) {
        out.push_back(p);
    }
    return out;
}

Matrix read_grid_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        std::vector<double> r;
        double v;
        while (ls >> v) {
            r.push_back(v);
        }
        rows.push_back(std::move(r));
    }
    Matrix out(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        detail::require_size(rows[i].size(), out.cols(), "grid CSV row length");
        std::copy(rows[i].begin(), rows[i].end(), out.row(i).begin());
    }
    return out;
}

void write_grid_csv(const std::string& path, const Matrix& v)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    for (std::size_t i = 0; i < v.rows(); ++i) {
        for (std::size_t j = 0; j < v.cols(); ++j) {
            out << (j ? "," : "") << fmt(v(i, j));
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------------------

struct Solve1dArgs {
    std::size_t n = 8;
    std::size_t p = 32;
    double omega = 1.0;
    std::string bc = "dirichlet";
};

void run_solve1d(const Common& c, const Solve1dArgs& a)
{
    const BoundaryConditions bc = parse_boundary_conditions(a.bc);
    const Space1D s(Mesh1D::uniform(-1.0, 1.0, a.n), a.p, bc);
    const Manufactured1D exact = Manufactured1D::for_bc(bc);
    const double w2 = a.omega * a.omega;
    const std::vector<double> f_leg =
        sampled_legendre(s.mesh(), a.p + 1, [&](double x) { return (exact.k * exact.k + w2) * exact(x); });

    const Operators1D ops = assemble_operators(s, a.omega);
    const B3Arrowhead mat = axpy_shift(ops.laplacian, w2, ops.mass);
    const std::vector<double> rhs = assemble_rhs_1d(ops, f_leg);
    const ReverseCholeskyFactor factor = reverse_cholesky(mat);
    std::vector<double> u = factor.solve(rhs);

    const double tf = median_time(c.repeats, [&] { (void)reverse_cholesky(mat); });
    const double ts = median_time(c.repeats, [&] { u = factor.solve(rhs); });
    CsvWriter csv(c);
    csv.row(params({{"n", std::to_string(a.n)}, {"p", std::to_string(a.p)}, {"omega", fmt(a.omega)}, {"bc", a.bc}}),
            s.dimension(), tf, ts, 0, max_error_1d(s, u, exact));
}

struct Solve2dArgs {
    std::size_t n = 2;
    std::size_t p = 20;
    double omega = 0.0;
    double eps = 1e-10;
    std::string bc = "dirichlet";
    std::string manufactured = "sin";
    std::string rhs_file;
    std::string values_out;
};

void run_solve2d(const Common& c, const Solve2dArgs& a)
{
    const BoundaryConditions bc = parse_boundary_conditions(a.bc);
    const Space1D s(Mesh1D::uniform(-1.0, 1.0, a.n), a.p, bc);
    const TransformPlan grid(s.mesh(), a.p + 1);
    const Manufactured1D m1 = Manufactured1D::for_bc(bc);
    auto exact = [&](double x, double y) { return m1(x) * m1(y); };

    Matrix f_values;
    bool has_exact = false;
    if (!a.rhs_file.empty()) {
        f_values = read_grid_csv(a.rhs_file);
        detail::require_size(f_values.rows(), grid.size(), "rhs grid rows");
        detail::require_size(f_values.cols(), grid.size(), "rhs grid columns");
    } else if (a.manufactured == "sin") {
        const double scale = 2.0 * m1.k * m1.k + a.omega * a.omega;
        f_values = VariableCoefficient2D::sample(grid, grid, [&](double x, double y) { return scale * exact(x, y); });
        has_exact = true;
    } else if (a.manufactured == "indicator") {
        f_values = VariableCoefficient2D::sample(grid, grid, [](double x, double y) {
            return std::abs(x) < 0.5 && std::abs(y) < 0.5 ? 1.0 : 0.0;
        });
    } else {
        throw std::invalid_argument("unknown manufactured solution '" + a.manufactured + "'");
    }
    const Matrix f_leg = analysis_2d(grid, grid, f_values);

    const ScreenedPoisson2D solver(s, s, a.omega, a.eps);
    const Matrix load = assemble_rhs_2d(solver.x, solver.y, f_leg);
    Matrix u = solver.solve_load(load);
    const double tf = median_time(c.repeats, [&] { const ScreenedPoisson2D again(s, s, a.omega, a.eps); });
    const double ts = median_time(c.repeats, [&] { u = solver.solve_load(load); });

    const Matrix values = hatbubble_to_values(grid, grid, solver.x.conversion, solver.y.conversion, u);
    double err = std::numeric_limits<double>::quiet_NaN();
    if (has_exact) {
        err = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            for (std::size_t j = 0; j < grid.size(); ++j) {
                err = std::max(err, std::abs(values(i, j) - exact(grid.grid()[i], grid.grid()[j])));
            }
        }
    }
    if (!a.values_out.empty()) {
        write_grid_csv(a.values_out, values);
    }
    CsvWriter csv(c);
    csv.row(params({{"n", std::to_string(a.n)},
                    {"p", std::to_string(a.p)},
                    {"omega", fmt(a.omega)},
                    {"eps", fmt(a.eps)},
                    {"bc", a.bc},
                    {"rhs", a.rhs_file.empty() ? a.manufactured : "file"}}),
            s.dimension() * s.dimension(), tf, ts, solver.plan.iterations(), err);
}

struct Scaling1dArgs {
    std::vector<std::size_t> n{8};
    std::size_t p_min = 2;
    std::size_t p_max = 4096;
    double omega = 1.0;
    std::string bc = "dirichlet";
};

void run_scaling1d(const Common& c, const Scaling1dArgs& a)
{
    const BoundaryConditions bc = parse_boundary_conditions(a.bc);
    CsvWriter csv(c);
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    for (std::size_t n : a.n) {
        for (std::size_t p : doubling(a.p_min, a.p_max)) {
            const Space1D s(Mesh1D::uniform(-1.0, 1.0, n), p, bc);
            const Operators1D ops = assemble_operators(s, a.omega);
            const B3Arrowhead mat = axpy_shift(ops.laplacian, a.omega * a.omega, ops.mass);
            std::vector<double> b(s.dimension());
            for (double& v : b) {
                v = ud(rng);
            }
            ReverseCholeskyFactor factor = reverse_cholesky(mat);
            std::vector<double> x;
            const double tf = median_time(c.repeats, [&] { factor = reverse_cholesky(mat); });
            const double ts = median_time(c.repeats, [&] { x = factor.solve(b); });
            std::vector<double> r = mat.multiply(x);
            double rn = 0.0;
            double bn = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) {
                rn += (r[i] - b[i]) * (r[i] - b[i]);
                bn += b[i] * b[i];
            }
            csv.row(params({{"n", std::to_string(n)}, {"p", std::to_string(p)}, {"omega", fmt(a.omega)}, {"bc", a.bc}}),
                    s.dimension(), tf, ts, 0, std::sqrt(rn / bn));
        }
    }
}

struct Scaling2dArgs {
    std::size_t n = 2;
    std::size_t p_min = 4;
    std::size_t p_max = 256;
    double omega = 0.0;
    double eps = 1e-10;
};

void run_scaling2d(const Common& c, const Scaling2dArgs& a)
{
    CsvWriter csv(c);
    const double pi = std::numbers::pi;
    for (std::size_t p : doubling(a.p_min, a.p_max)) {
        const Space1D s(Mesh1D::uniform(-1.0, 1.0, a.n), p);
        const TransformPlan grid(s.mesh(), p + 1);
        auto exact = [&](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); };
        const double scale = 2.0 * pi * pi + a.omega * a.omega;
        const Matrix f_leg = analysis_2d(
            grid, grid, VariableCoefficient2D::sample(grid, grid, [&](double x, double y) { return scale * exact(x, y); }));
        const ScreenedPoisson2D solver(s, s, a.omega, a.eps);
        const Matrix load = assemble_rhs_2d(solver.x, solver.y, f_leg);
        Matrix u;
        const double tf = median_time(c.repeats, [&] { const ScreenedPoisson2D again(s, s, a.omega, a.eps); });
        const double ts = median_time(c.repeats, [&] { u = solver.solve_load(load); });
        const Matrix values = hatbubble_to_values(grid, grid, solver.x.conversion, solver.y.conversion, u);
        double err = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            for (std::size_t j = 0; j < grid.size(); ++j) {
                err = std::max(err, std::abs(values(i, j) - exact(grid.grid()[i], grid.grid()[j])));
            }
        }
        csv.row(params({{"n", std::to_string(a.n)}, {"p", std::to_string(p)}, {"omega", fmt(a.omega)}, {"eps", fmt(a.eps)}}),
                s.dimension() * s.dimension(), tf, ts, solver.plan.iterations(), err);
    }
}

struct BurgersArgs {
    std::size_t n = 9;
    std::vector<std::size_t> p{12};
    std::size_t steps = 50;
    double dt = 1e-3;
    double viscosity = 0.1;
    double eps = 1e-12;
    bool no_convection = false;
    std::string values_out;
};

void run_burgers(const Common& c, const BurgersArgs& a)
{
    if (a.n % 3 != 0) {
        throw std::invalid_argument("burgers: --n must be a multiple of 3 so the initial box is mesh-aligned");
    }
    CsvWriter csv(c);
    for (std::size_t p : a.p) {
        const Space1D s(Mesh1D::uniform(-1.0, 1.0, a.n), p);
        BurgersConfig cfg;
        cfg.dt = a.dt;
        cfg.viscosity = a.viscosity;
        cfg.adi_tolerance = a.eps;
        cfg.include_convection = !a.no_convection;
        const auto t0 = std::chrono::steady_clock::now();
        const BurgersStepper stepper(s, cfg);
        const double tf = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        BurgersState st = stepper.initial_state(box_indicator(s, -1.0 / 3.0, 1.0 / 3.0, -1.0 / 3.0, 1.0 / 3.0));
        std::vector<double> times;
        double boundary = 0.0;
        for (std::size_t k = 0; k < a.steps; ++k) {
            const auto s0 = std::chrono::steady_clock::now();
            st = stepper.step(std::move(st));
            times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - s0).count());
            boundary = std::max(boundary, stepper.boundary_max(st));
        }
        // first step is the warmup
        if (times.size() > 1) {
            times.erase(times.begin());
        }
        std::sort(times.begin(), times.end());
        const double ts = times.empty() ? 0.0 : times[times.size() / 2];
        if (!a.values_out.empty()) {
            write_grid_csv(a.values_out, synthesis_2d(stepper.transform(), stepper.transform(), st.u));
        }
        csv.row(params({{"n", std::to_string(a.n)},
                        {"p", std::to_string(p)},
                        {"steps", std::to_string(a.steps)},
                        {"dt", fmt(a.dt)},
                        {"viscosity", fmt(a.viscosity)},
                        {"convection", a.no_convection ? "off" : "on"}}),
                s.dimension(), tf, ts, stepper.adi().iterations(), boundary);
    }
}

struct PcgArgs {
    std::vector<std::size_t> m{1, 2, 3};
    std::vector<std::size_t> p{8, 16, 32};
    double rel_tol = 1e-8;
    double precond_tol = 1e-4;
    std::size_t max_iter = 200;
};

void run_pcg_table(const Common& c, const PcgArgs& a)
{
    CsvWriter csv(c);
    PcgConfig cfg;
    cfg.rel_tol = a.rel_tol;
    cfg.precond_tol = a.precond_tol;
    cfg.max_iter = a.max_iter;
    for (std::size_t m : a.m) {
        for (std::size_t p : a.p) {
            const auto t0 = std::chrono::steady_clock::now();
            const GradedLogProblem problem(m, p, cfg);
            const double tf = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            PcgResult r = problem.solve();
            const double ts = median_time(c.repeats, [&] { r = problem.solve(); });
            const std::size_t cells = problem.space().elements();
            csv.row(params({{"m", std::to_string(m)}, {"p", std::to_string(p)}, {"cells", std::to_string(cells * cells)}}),
                    problem.space().dimension() * problem.space().dimension(), tf, ts, r.iterations, r.relative_residual);
        }
    }
}

struct SpectrumArgs {
    std::vector<std::size_t> n{2, 4, 8};
    std::vector<std::size_t> p{3, 5, 8};
    std::vector<double> omega{0.0, 1.0, 10.0};
    std::vector<std::string> bc{"dirichlet", "neumann"};
    double eps = 1e-10;
};

/// Returns the number of violated intervals.
int run_spectrum_check(const Common& c, const SpectrumArgs& a)
{
    CsvWriter csv(c);
    int violations = 0;
    for (const std::string& bcs : a.bc) {
        const BoundaryConditions bc = parse_boundary_conditions(bcs);
        for (std::size_t n : a.n) {
            for (std::size_t p : a.p) {
                for (double omega : a.omega) {
                    if (bc.all_neumann() && omega == 0.0) {
                        continue;
                    }
                    const Space1D s(Mesh1D::uniform(-1.0, 1.0, n), p, bc);
                    const Operators1D ops = assemble_operators(s, omega);
                    const SpectralInterval iv =
                        lemma_spectrum_bounds(s.mesh().min_width(), p, omega, bc, s.mesh().length());
                    const Matrix md = ops.mass.to_dense();
                    const Matrix sd = ops.shifted.to_dense();
                    Eigen::MatrixXd me(md.rows(), md.cols());
                    Eigen::MatrixXd se(sd.rows(), sd.cols());
                    for (std::size_t i = 0; i < md.rows(); ++i) {
                        for (std::size_t j = 0; j < md.cols(); ++j) {
                            me(i, j) = md(i, j);
                            se(i, j) = sd(i, j);
                        }
                    }
                    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(me, se, Eigen::EigenvaluesOnly);
                    const double lo = es.eigenvalues().minCoeff();
                    const double hi = es.eigenvalues().maxCoeff();
                    // relative amount by which the dense spectrum leaves the interval
                    const double excess = std::max({0.0, (iv.lo - lo) / iv.lo, (hi - iv.hi) / iv.hi});
                    if (excess > 1e-12) {
                        ++violations;
                    }
                    const SpectralInterval ab = screened_poisson_interval(s, omega);
                    const std::size_t j = adi_shifts(ab, ab.negated(), a.eps).iterations;
                    csv.row(params({{"n", std::to_string(n)},
                                    {"p", std::to_string(p)},
                                    {"omega", fmt(omega)},
                                    {"bc", bcs},
                                    {"lemma_lo", fmt(iv.lo)},
                                    {"lemma_hi", fmt(iv.hi)},
                                    {"dense_lo", fmt(lo)},
                                    {"dense_hi", fmt(hi)}}),
                            s.dimension(), 0.0, 0.0, j, excess);
                }
            }
        }
    }
    return violations;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"arrowhead: hp-FEM solvers with banded arrowhead factorisations, ADI and fast transforms.\n"
                 "Every subcommand writes CSV with columns parameters,N,time_factor_s,time_solve_s,iters,error."};
    app.require_subcommand(1);
    app.fallthrough();

    Common common;
    app.add_option("-o,--output", common.output, "Write CSV to this file instead of stdout");
    app.add_option("--seed", common.seed, "Seed for randomised inputs")->capture_default_str();
    app.add_option("--threads", common.threads, "Worker threads (default: ARROWHEAD_THREADS or all cores)");
    app.add_option("--repeats", common.repeats, "Timed repetitions after one warmup; the median is reported")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_flag("--deterministic", common.deterministic, "Write 0 in the timing columns so output is reproducible");

    Solve1dArgs s1;
    auto* solve1d = app.add_subcommand("solve1d", "Screened Poisson in 1D against a manufactured solution");
    solve1d->add_option("--n", s1.n, "Elements")->capture_default_str();
    solve1d->add_option("--p", s1.p, "Polynomial degree")->capture_default_str();
    solve1d->add_option("--omega", s1.omega, "Screening parameter")->capture_default_str();
    solve1d->add_option("--bc", s1.bc, "dirichlet | neumann | dirichlet-neumann | neumann-dirichlet")
        ->capture_default_str();

    Solve2dArgs s2;
    auto* solve2d = app.add_subcommand("solve2d", "Screened Poisson on [-1,1]^2 via ADI");
    solve2d->add_option("--n", s2.n, "Elements per axis")->capture_default_str();
    solve2d->add_option("--p", s2.p, "Polynomial degree")->capture_default_str();
    solve2d->add_option("--omega", s2.omega, "Screening parameter")->capture_default_str();
    solve2d->add_option("--eps", s2.eps, "ADI tolerance")->capture_default_str();
    solve2d->add_option("--bc", s2.bc, "Boundary conditions on both axes")->capture_default_str();
    solve2d->add_option("--manufactured", s2.manufactured, "sin (error reported) | indicator of |x|,|y| < 1/2")
        ->capture_default_str();
    solve2d->add_option("--rhs-file", s2.rhs_file,
                        "CSV of f on the tensor Chebyshev grid with p+1 points per element (overrides --manufactured)");
    solve2d->add_option("--values-out", s2.values_out, "Write the solution on the same grid as CSV");

    Scaling1dArgs sc1;
    auto* scaling1d = app.add_subcommand("scaling1d", "Factorise and solve timings in 1D for doubling p");
    scaling1d->add_option("--n", sc1.n, "Element counts (comma separated)")->delimiter(',')->capture_default_str();
    scaling1d->add_option("--p-min", sc1.p_min, "Smallest degree")->capture_default_str();
    scaling1d->add_option("--p-max", sc1.p_max, "Largest degree")->capture_default_str();
    scaling1d->add_option("--omega", sc1.omega, "Screening parameter")->capture_default_str();
    scaling1d->add_option("--bc", sc1.bc, "Boundary conditions")->capture_default_str();

    Scaling2dArgs sc2;
    auto* scaling2d = app.add_subcommand("scaling2d", "ADI setup and solve timings in 2D for doubling p");
    scaling2d->add_option("--n", sc2.n, "Elements per axis")->capture_default_str();
    scaling2d->add_option("--p-min", sc2.p_min, "Smallest degree")->capture_default_str();
    scaling2d->add_option("--p-max", sc2.p_max, "Largest degree")->capture_default_str();
    scaling2d->add_option("--omega", sc2.omega, "Screening parameter")->capture_default_str();
    scaling2d->add_option("--eps", sc2.eps, "ADI tolerance")->capture_default_str();

    BurgersArgs bu;
    auto* burgers = app.add_subcommand("burgers", "Viscous Burgers from a box initial condition");
    burgers->add_option("--n", bu.n, "Elements per axis (multiple of 3)")->capture_default_str();
    burgers->add_option("--p", bu.p, "Degrees (comma separated)")->delimiter(',')->capture_default_str();
    burgers->add_option("--steps", bu.steps, "Time steps")->capture_default_str();
    burgers->add_option("--dt", bu.dt, "Time step")->capture_default_str();
    burgers->add_option("--viscosity", bu.viscosity, "Viscosity epsilon")->capture_default_str();
    burgers->add_option("--eps", bu.eps, "ADI tolerance")->capture_default_str();
    burgers->add_flag("--no-convection", bu.no_convection, "Drop u u_x (heat equation)");
    burgers->add_option("--values-out", bu.values_out, "Write final grid values as CSV");

    PcgArgs pc;
    auto* pcg = app.add_subcommand("pcg-table", "PCG iterations for (-Delta - 10 log r) u = 1 on graded meshes");
    pcg->add_option("--m", pc.m, "Grading depths (comma separated)")->delimiter(',')->capture_default_str();
    pcg->add_option("--p", pc.p, "Degrees (comma separated)")->delimiter(',')->capture_default_str();
    pcg->add_option("--rel-tol", pc.rel_tol, "PCG relative residual tolerance")->capture_default_str();
    pcg->add_option("--precond-tol", pc.precond_tol, "ADI tolerance of the preconditioner")->capture_default_str();
    pcg->add_option("--max-iter", pc.max_iter, "Iteration limit")->capture_default_str();

    SpectrumArgs sp;
    auto* spectrum = app.add_subcommand("spectrum-check", "Dense pencil spectra against the analytic interval");
    spectrum->add_option("--n", sp.n, "Element counts")->delimiter(',')->capture_default_str();
    spectrum->add_option("--p", sp.p, "Degrees")->delimiter(',')->capture_default_str();
    spectrum->add_option("--omega", sp.omega, "Screening parameters")->delimiter(',')->capture_default_str();
    spectrum->add_option("--bc", sp.bc, "Boundary conditions")->delimiter(',')->capture_default_str();
    spectrum->add_option("--eps", sp.eps, "ADI tolerance for the reported iteration count")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    if (common.threads > 0) {
        set_num_threads(common.threads);
    } else {
        configure_threads_from_env();
    }

    try {
        if (*solve1d) {
            run_solve1d(common, s1);
        } else if (*solve2d) {
            run_solve2d(common, s2);
        } else if (*scaling1d) {
            run_scaling1d(common, sc1);
        } else if (*scaling2d) {
            run_scaling2d(common, sc2);
        } else if (*burgers) {
            run_burgers(common, bu);
        } else if (*pcg) {
            run_pcg_table(common, pc);
        } else if (*spectrum) {
            const int bad = run_spectrum_check(common, sp);
            if (bad > 0) {
                std::cerr << "spectrum-check: " << bad << " interval(s) violated\n";
                return 1;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
