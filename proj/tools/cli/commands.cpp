#include "cli/commands.hpp"

#include "cli/config.hpp"

#include <dualgal/duality_core.hpp>
#include <dualgal/errors.hpp>
#include <dualgal/problems.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <variant>

namespace dualgal::cli {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

using Cell = std::variant<double, int, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::pair<std::string, Cell>> summary;
};

std::string cell_text(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<int>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
}

nlohmann::ordered_json cell_json(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* i = std::get_if<int>(&c)) return *i;
    return std::get<std::string>(c);
}

void write_csv(const Table& t, std::ostream& os) {
    for (std::size_t k = 0; k < t.columns.size(); ++k) os << (k ? "," : "") << t.columns[k];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << cell_text(row[k]);
        os << '\n';
    }
    for (const auto& [key, value] : t.summary) os << "# " << key << " = " << cell_text(value) << '\n';
}

void write_json(const Table& t, std::ostream& os) {
    nlohmann::ordered_json doc;
    doc["columns"] = t.columns;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        auto r = nlohmann::ordered_json::array();
        for (const auto& c : row) r.push_back(cell_json(c));
        rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    auto summary = nlohmann::ordered_json::object();
    for (const auto& [key, value] : t.summary) summary[key] = cell_json(value);
    doc["summary"] = std::move(summary);
    os << doc.dump(1) << '\n';
}

void emit(const Table& t, const ExperimentConfig& cfg, std::ostream& out) {
    auto write = [&](std::ostream& os) {
        if (cfg.format == OutputFormat::json) {
            write_json(t, os);
        } else {
            write_csv(t, os);
        }
    };
    if (cfg.output_path.empty()) {
        write(out);
        return;
    }
    std::ofstream file(cfg.output_path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write '" + cfg.output_path + "'");
    write(file);
    if (!file.flush()) throw std::runtime_error("write failed for '" + cfg.output_path + "'");
    for (const auto& [key, value] : t.summary) out << key << " = " << cell_text(value) << '\n';
    out << "wrote " << cfg.output_path << '\n';
}

std::string family_name(BasisFamily f) {
    switch (f) {
        case BasisFamily::bspline: return "bspline";
        case BasisFamily::repu: return "repu";
        case BasisFamily::polynomial: return "polynomial";
    }
    return "unknown";
}

double grid_point(int k, int count, double hi) {
    return k == count - 1 ? hi : hi * static_cast<double>(k) / (count - 1);
}

int cmd_solve(ExperimentConfig cfg, std::ostream& out) {
    const BasisConfig lam{cfg.family, cfg.q, *cfg.n, {}};
    const BasisConfig mu{cfg.family, cfg.p, *cfg.n, {}};
    AssemblyOptions opts;
    opts.workers = cfg.workers;
    const auto solved = solve_problem(cfg.problem, lam, mu, opts);
    const ExactSolution exact(cfg.problem);
    const auto& spec = cfg.problem;
    const auto& sol = solved.solution;

    Table t;
    const int nx = cfg.eval_grid;
    MaxErrors maxe;
    if (spec.kind == ProblemKind::ivp_ode) {
        t.columns = {"t", "u_exact", "u_H", "q_exact", "q_H"};
        for (int i = 0; i < nx; ++i) {
            const double tt = grid_point(i, nx, spec.T);
            const auto h = dtp_eval(sol, tt);
            const auto e = exact(0.0, tt);
            // The IVP has no flux field; q columns carry du/dt and zero.
            t.rows.push_back({tt, e.u, h.u, e.u_x, 0.0});
        }
        maxe = max_errors(sol, exact, nx);
    } else if (is_transient(spec.kind)) {
        const int nt = cfg.eval_grid_t;
        t.columns = {"x", "t", "u_exact", "u_H", "q_exact", "q_H"};
        for (int j = 0; j < nt; ++j) {
            const double tt = grid_point(j, nt, spec.T);
            for (int i = 0; i < nx; ++i) {
                const double x = grid_point(i, nx, 1.0);
                const auto h = dtp_eval(sol, x, tt);
                const auto e = exact(x, tt);
                t.rows.push_back({x, tt, e.u, h.u, e.u_x, h.q});
            }
        }
        maxe = max_errors(sol, exact, nx, nt, spec.T);
    } else {
        t.columns = {"x", "u_exact", "u_H", "q_exact", "q_H"};
        for (int i = 0; i < nx; ++i) {
            const double x = grid_point(i, nx, 1.0);
            const auto h = dtp_eval(sol, x);
            const auto e = exact(x, 0.0);
            t.rows.push_back({x, e.u, h.u, e.u_x, h.q});
        }
        maxe = max_errors(sol, exact, nx);
    }
    const auto err = error_norms(sol, exact);
    t.summary = {{"kind", std::string(to_string(spec.kind))},
                 {"family", family_name(cfg.family)},
                 {"p", cfg.p},
                 {"q", cfg.q},
                 {"n", *cfg.n},
                 {"dof", static_cast<int>(solved.system.K.rows())},
                 {"E_u", err.E_u},
                 {"E_q", err.E_q},
                 {"max_err_u", maxe.u},
                 {"max_err_q", maxe.q},
                 {"max_rel_u", maxe.relative_u()},
                 {"max_rel_q", maxe.relative_q()},
                 {"residual", solved.report.residual},
                 {"rank", solved.report.rank_estimate},
                 {"method", std::string(to_string(solved.report.method))}};
    emit(t, cfg, out);
    return exit_ok;
}

int cmd_converge(ExperimentConfig cfg, std::ostream& out) {
    StudyOptions opts;
    opts.workers = cfg.workers;
    opts.fit_points = cfg.fit_points;
    const auto rec = convergence_study(cfg.problem, cfg.family, cfg.p, cfg.q, cfg.n_list, opts);
    Table t;
    t.columns = {"n", "dof", "E_u", "E_q", "residual", "method"};
    for (const auto& l : rec.levels) {
        t.rows.push_back({l.n, l.errors.dof, l.errors.E_u, l.errors.E_q, l.residual,
                          std::string(to_string(l.method))});
    }
    t.summary = {{"kind", std::string(to_string(cfg.problem.kind))},
                 {"family", family_name(cfg.family)},
                 {"p", cfg.p},
                 {"q", cfg.q},
                 {"fit_points", cfg.fit_points},
                 {"rate_u", rec.rate_u},
                 {"rate_q", rec.rate_q}};
    emit(t, cfg, out);
    return exit_ok;
}

Eigen::MatrixXd parse_matrix(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::stringstream ss(text);
    std::string row;
    while (std::getline(ss, row, ';')) rows.push_back(parse_double_list(row, "rows"));
    if (rows.empty()) throw ConfigError("--rows: empty matrix");
    Eigen::MatrixXd A(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.front().size()) throw ConfigError("--rows: ragged matrix");
        for (std::size_t j = 0; j < rows[i].size(); ++j) A(i, j) = rows[i][j];
    }
    return A;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::Vector2d parse_point(const std::string& text, const std::string& flag) {
    const auto v = parse_double_list(text, flag);
    if (v.size() != 2) throw ConfigError(flag + ": expected two comma-separated numbers");
    return {v[0], v[1]};
}

std::vector<Eigen::Vector2d> parse_polygon(const std::string& text) {
    if (text == "unit-square") return {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    if (text == "triangle") return {{0, 0}, {1, 0}, {0, 1}};
    if (text == "pentagon") {
        std::vector<Eigen::Vector2d> p;
        for (int k = 0; k < 5; ++k) {
            const double th = std::numbers::pi / 2 + 2 * std::numbers::pi * k / 5;
            p.emplace_back(std::cos(th), std::sin(th));
        }
        return p;
    }
    std::vector<Eigen::Vector2d> p;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) p.push_back(parse_point(item, "--poly"));
    if (p.size() < 3) throw ConfigError("--poly: need unit-square, triangle, pentagon or at least three 'x,y' vertices");
    return p;
}

struct DemoArgs {
    std::string name;
    double beta = 10.0;
    std::string base = "1,1";
    std::string rows = "1,2,3;4,5,6";
    std::string rhs = "6,15";
    std::string poly = "unit-square";
    std::string point = "0.5,0.5";
    double a = -1.0;
    double T = 1.0;
    double u0 = 1.0;
    std::string lambda_T = "0,5";
    int n = 16;
    int degree = 3;
    int steps = 1000;
};

int cmd_demo(const DemoArgs& d, std::ostream& out) {
    auto line = [&out](const std::string& key, const std::string& value) {
        out << key << " = " << value << '\n';
    };
    auto vec = [](const Eigen::VectorXd& v) {
        std::string s;
        for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_double(v[i]);
        return s;
    };

    if (d.name == "linear") {
        const Eigen::MatrixXd A = parse_matrix(d.rows);
        const Eigen::VectorXd b = to_vector(parse_double_list(d.rhs, "--rhs"));
        if (b.size() != A.rows()) throw ConfigError("--rhs length must match the number of rows");
        const auto r = solve_linear_dual(A, b);
        line("lambda", vec(r.lambda_star));
        line("x_H", vec(r.x_H));
        line("residual", format_double(r.residual));
    } else if (d.name == "quadratic") {
        const auto r = solve_quadratic_pair(d.beta, parse_point(d.base, "--base"));
        line("lambda", vec(r.lambda_star));
        line("x", format_double(r.x));
        line("y", format_double(r.y));
        line("residual_1", format_double(r.x * r.x + r.y * r.y - 3.0));
        line("residual_2", format_double(r.x * r.x - r.y * r.y - 1.0));
        line("iterations", std::to_string(r.iterations));
    } else if (d.name == "maxent") {
        const auto poly = parse_polygon(d.poly);
        const Eigen::Vector2d p = parse_point(d.point, "--point");
        const auto r = maxent_coordinates(poly, p);
        Eigen::Vector2d recon = Eigen::Vector2d::Zero();
        for (std::size_t k = 0; k < poly.size(); ++k) recon += r.phi[static_cast<Eigen::Index>(k)] * poly[k];
        line("phi", vec(r.phi));
        line("lambda", vec(r.lambda_star));
        line("partition_sum_residual", format_double(r.phi.sum() - 1.0));
        line("reproduction_residual", format_double((recon - p).norm()));
        line("iterations", std::to_string(r.iterations));
    } else if (d.name == "ivp") {
        const auto terminal = parse_double_list(d.lambda_T, "--lambda-T");
        std::vector<PrimalSolution> sols;
        for (double lt : terminal) {
            const auto spec = ProblemSpec::ivp(d.a, d.u0, d.T, lt);
            const BasisConfig cfg{BasisFamily::bspline, d.degree, d.n, {}};
            sols.push_back(solve_problem(spec, cfg, cfg).solution);
        }
        out << "t,u_exact";
        for (double lt : terminal) out << ",u_H(lambda_T=" << format_double(lt) << ")";
        out << '\n';
        for (int k = 0; k <= 10; ++k) {
            const double t = d.T * k / 10.0;
            out << format_double(t) << ',' << format_double(d.u0 * std::exp(d.a * t));
            for (const auto& s : sols) out << ',' << format_double(dtp_eval(s, t).u);
            out << '\n';
        }
        for (double lt : terminal) {
            const auto c = ivp_dual_closed_form(d.a, d.u0, lt, d.T, 0.0);
            line("closed_form lambda(0) at lambda_T=" + format_double(lt), format_double(c.lambda));
        }
    } else if (d.name == "adjoint") {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.9f", adjoint_sensitivity(d.a, d.T, d.steps));
        line("dF/dp", buf);
        line("closed_form", format_double(adjoint_sensitivity_closed_form(d.a, d.T)));
    } else {
        throw ConfigError("unknown demo '" + d.name + "' (linear, quadratic, maxent, ivp, adjoint)");
    }
    return exit_ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dual variational Galerkin solver for model ODE/PDE problems", "dualgal"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string format;
    auto* solve = app.add_subcommand("solve", "Single solve; writes the primal fields on a grid");
    auto* converge = app.add_subcommand("converge", "Refinement sweep with fitted convergence rates");
    for (auto* sub : {solve, converge}) {
        sub->add_option("--config", config_path, "key = value configuration file")->required();
        sub->add_option("--out", out_path, "Output file (default: standard output)");
        sub->add_option("--format", format, "csv or json");
    }

    DemoArgs demo_args;
    auto* demo = app.add_subcommand("demo", "Finite-dimensional and ODE demonstrations");
    demo->add_option("name", demo_args.name, "linear, quadratic, maxent, ivp or adjoint")->required();
    demo->add_option("--beta", demo_args.beta, "quadratic: penalty weight");
    demo->add_option("--base", demo_args.base, "quadratic: base point x,y");
    demo->add_option("--rows", demo_args.rows, "linear: matrix rows, 'a,b,c;d,e,f'");
    demo->add_option("--rhs", demo_args.rhs, "linear: right-hand side");
    demo->add_option("--poly", demo_args.poly, "maxent: unit-square, triangle, pentagon or 'x,y;x,y;...'");
    demo->add_option("--point", demo_args.point, "maxent: evaluation point x,y");
    demo->add_option("--a", demo_args.a, "ivp/adjoint: rate a");
    demo->add_option("--T", demo_args.T, "ivp/adjoint: terminal time");
    demo->add_option("--u0", demo_args.u0, "ivp: initial value");
    demo->add_option("--lambda-T", demo_args.lambda_T, "ivp: terminal values to compare");
    demo->add_option("--n", demo_args.n, "ivp: knot spans");
    demo->add_option("--degree", demo_args.degree, "ivp: B-spline degree");
    demo->add_option("--steps", demo_args.steps, "adjoint: Runge-Kutta steps");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "dualgal: " << e.what() << '\n';
        return exit_config;
    }

    try {
        if (demo->parsed()) return cmd_demo(demo_args, out);
        const bool sweep = converge->parsed();
        ExperimentConfig cfg = load_config(config_path, sweep);
        if (!out_path.empty()) cfg.output_path = out_path;
        if (!format.empty()) cfg.format = parse_format(format);
        return sweep ? cmd_converge(std::move(cfg), out) : cmd_solve(std::move(cfg), out);
    } catch (const ConfigError& e) {
        err << "dualgal: config error: " << e.what() << '\n';
        return exit_config;
    } catch (const ArgumentError& e) {
        err << "dualgal: invalid argument: " << e.what() << '\n';
        return exit_config;
    } catch (const DomainError& e) {
        err << "dualgal: invalid argument: " << e.what() << '\n';
        return exit_config;
    } catch (const InconsistentSystem& e) {
        err << "dualgal: solver error: " << e.what() << '\n';
        return exit_solver;
    } catch (const SingularDtP& e) {
        err << "dualgal: solver error: " << e.what() << '\n';
        return exit_solver;
    } catch (const NoConvergence& e) {
        err << "dualgal: solver error: " << e.what() << '\n';
        return exit_solver;
    } catch (const Degenerate& e) {
        err << "dualgal: solver error: " << e.what() << '\n';
        return exit_solver;
    } catch (const std::exception& e) {
        err << "dualgal: " << e.what() << '\n';
        return exit_failure;
    }
}

}  // namespace dualgal::cli
