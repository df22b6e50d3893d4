// pslet: single solves, benchmark table reproduction and parameter scans.

#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "pslet/pslet.hpp"

#ifndef PSLET_BASELINE_PATH
#define PSLET_BASELINE_PATH "data/baseline_tables.csv"
#endif

namespace wb = pslet::workbench;

namespace {

enum exit_code
{
    ok = 0,
    validation = 2,
    numerical = 3,
    deviation = 4
};

struct ModelArgs
{
    std::string potential{"spiked"};
    double a{1000.0};
    double b{2.0};
    double c{1.0};
    double l{0.0};
    int n_r{0};
    int order{4};
    std::vector<std::string> pade;
    std::string convention{"half"};
    bool oracle{false};
    double tol{1e-12};
    std::string format{"text"};
};

void add_model_options(CLI::App* cmd, ModelArgs& m)
{
    cmd->add_option("--potential", m.potential, "spiked | tcoulomb | ho | coulomb")
        ->check(CLI::IsMember({"spiked", "tcoulomb", "ho", "coulomb"}));
    cmd->add_option("--a", m.a, "spike strength");
    cmd->add_option("--b", m.b, "spike exponent");
    cmd->add_option("--c", m.c, "truncation parameter");
    cmd->add_option("--l", m.l, "angular momentum");
    cmd->add_option("--nr", m.n_r, "radial quantum number");
    cmd->add_option("--order", m.order, "highest correction in the truncated sum");
    cmd->add_option("--pade", m.pade, "Pade degrees N,M (repeatable)");
    cmd->add_option("--convention", m.convention, "half | doubled")->check(CLI::IsMember({"half", "doubled"}));
    cmd->add_flag("--oracle", m.oracle, "also run the Numerov shooting solver");
    cmd->add_option("--tol", m.tol, "tolerance of the expansion-point solve");
    cmd->add_option("--format", m.format, "json | csv | text")->check(CLI::IsMember({"json", "csv", "text"}));
}

wb::RunSpec to_spec(ModelArgs const& m)
{
    using namespace pslet;
    auto const conv = m.convention == "doubled" ? scale_convention::doubled : scale_convention::half_kinetic;
    wb::RunSpec s;
    if (m.potential == "spiked") {
        s.model = spiked_ho(m.a, m.b, conv);
    } else if (m.potential == "tcoulomb") {
        s.model = truncated_coulomb(m.c, conv);
    } else if (m.potential == "ho") {
        s.model = pure_ho(conv);
    } else {
        s.model = pure_coulomb(conv);
    }
    s.l = m.l;
    s.n_r = m.n_r;
    s.order = m.order;
    s.oracle = m.oracle;
    s.tol = m.tol;
    if (!m.pade.empty()) {
        s.pade.clear();
        for (auto const& p : m.pade) {
            auto comma = p.find(',');
            if (comma == std::string::npos) throw validation_error("workbench", "--pade expects N,M");
            try {
                s.pade.push_back({std::stoi(p.substr(0, comma)), std::stoi(p.substr(comma + 1))});
            } catch (std::exception const&) {
                throw validation_error("workbench", "--pade expects N,M");
            }
        }
    }
    return s;
}

int report(pslet::error const& e)
{
    std::cerr << "error [" << e.module() << "]: " << e.what() << '\n';
    if (dynamic_cast<pslet::numerical_error const*>(&e)) return numerical;
    return validation;
}

void write_or_print(std::string const& path, std::string const& text)
{
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw pslet::validation_error("workbench", "cannot write " + path);
    out << text;
}

std::string table_text(std::vector<wb::TableRowResult> const& rows)
{
    std::ostringstream os;
    os << "row  params                  E_P            E[3/3]         E[3/4]         oracle         ref E_N     ok\n";
    for (auto const& r : rows) {
        auto const& m = r.ref.model;
        std::string params = m.kind == pslet::potential_kind::spiked_ho
                                 ? "a=" + wb::fmt9(m.a) + " b=" + wb::fmt9(m.b)
                                 : "c=" + wb::fmt9(m.c) + " " + r.ref.state;
        char line[256];
        if (!r.record) {
            std::snprintf(line, sizeof line, "%-4d %-22s  %s\n", r.ref.row, params.c_str(), r.error.c_str());
        } else {
            auto v = [](std::optional<double> x) { return x ? *x : std::nan(""); };
            std::snprintf(line, sizeof line, "%-4d %-22s  %-14.9g %-14.9g %-14.9g %-14.9g %-11s %s\n", r.ref.row,
                          params.c_str(), r.record->e_p, v(r.record->pade_value(3, 3)), v(r.record->pade_value(3, 4)),
                          v(r.record->oracle), r.ref.e_n.text.c_str(), r.passes() ? "yes" : "NO");
        }
        os << line;
    }
    return os.str();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Shifted large-l expansion workbench"};
    app.require_subcommand(1);

    ModelArgs solve_args;
    auto* solve = app.add_subcommand("solve", "solve one state");
    add_model_options(solve, solve_args);

    int table_id = 1;
    std::string baseline = PSLET_BASELINE_PATH;
    std::string table_format = "text";
    std::string out_prefix;
    bool no_oracle = false;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    auto* table = app.add_subcommand("table", "reproduce a benchmark table against the stored reference values");
    table->add_option("id", table_id, "table number 1-4")->required()->check(CLI::Range(1, 4));
    table->add_option("--baseline", baseline, "reference CSV");
    table->add_option("--format", table_format, "json | csv | text")->check(CLI::IsMember({"json", "csv", "text"}));
    table->add_option("--out", out_prefix, "write PREFIX.csv and PREFIX.json instead of printing");
    table->add_flag("--no-oracle", no_oracle, "skip the numerical integration column");
    table->add_option("--jobs", jobs, "rows solved concurrently");

    ModelArgs scan_args;
    std::string sweep = "b";
    std::vector<double> values;
    double from = 0.0, to = 0.0;
    int points = 0;
    bool log_spacing = false;
    auto* scan = app.add_subcommand("scan", "sweep one parameter");
    add_model_options(scan, scan_args);
    scan->add_option("--sweep", sweep, "a | b | c | l")->check(CLI::IsMember({"a", "b", "c", "l"}));
    scan->add_option("--values", values, "explicit sweep values")->delimiter(',');
    scan->add_option("--from", from, "first value");
    scan->add_option("--to", to, "last value");
    scan->add_option("--points", points, "number of values between --from and --to");
    scan->add_flag("--log", log_spacing, "geometric spacing");
    scan->add_option("--jobs", jobs, "values solved concurrently");

    try {
        app.parse(argc, argv);
    } catch (CLI::CallForHelp const& e) {
        return app.exit(e);
    } catch (CLI::CallForAllHelp const& e) {
        return app.exit(e);
    } catch (CLI::ParseError const& e) {
        app.exit(e);
        return validation;
    }

    try {
        if (*solve) {
            auto const spec = to_spec(solve_args);
            auto const rec = wb::cmd_solve(spec);
            if (solve_args.format == "json") {
                std::cout << wb::to_json(rec).dump(2) << '\n';
            } else if (solve_args.format == "csv") {
                std::cout << wb::csv_header(spec) << '\n' << wb::csv_row(rec) << '\n';
            } else {
                std::cout << wb::to_text(rec);
            }
            return ok;
        }

        if (*table) {
            auto const rows = wb::load_baseline(baseline);
            auto const result = wb::cmd_table(table_id, rows, !no_oracle, jobs);
            std::string csv = wb::table_csv_header() + "\n";
            for (auto const& r : result) csv += wb::table_csv_row(r) + "\n";
            std::string const js = wb::table_json(result).dump(2) + "\n";
            if (!out_prefix.empty()) {
                write_or_print(out_prefix + ".csv", csv);
                write_or_print(out_prefix + ".json", js);
            } else if (table_format == "csv") {
                std::cout << csv;
            } else if (table_format == "json") {
                std::cout << js;
            } else {
                std::cout << table_text(result);
            }
            return wb::table_passes(result) ? ok : deviation;
        }

        if (*scan) {
            auto const base = to_spec(scan_args);
            if (values.empty()) {
                if (points < 1) throw pslet::validation_error("workbench", "scan needs --values or --from/--to/--points");
                for (int i = 0; i < points; ++i) {
                    double const t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
                    values.push_back(log_spacing ? from * std::pow(to / from, t) : from + t * (to - from));
                }
            }
            auto const param = sweep == "a"   ? wb::sweep_parameter::a
                               : sweep == "b" ? wb::sweep_parameter::b
                               : sweep == "c" ? wb::sweep_parameter::c
                                              : wb::sweep_parameter::l;
            auto const rows = wb::cmd_scan(base, param, values, jobs);
            bool any_failed = false;
            if (scan_args.format == "json") {
                auto arr = wb::json::array();
                for (auto const& r : rows) {
                    arr.push_back({{"value", r.value},
                                   {"result", r.record ? wb::to_json(*r.record) : wb::json(nullptr)},
                                   {"error", r.error}});
                    any_failed |= !r.record;
                }
                std::cout << arr.dump(2) << '\n';
            } else {
                std::cout << wb::csv_header(base) << ",error\n";
                for (auto const& r : rows) {
                    if (r.record) {
                        std::cout << wb::csv_row(*r.record) << ",\n";
                    } else {
                        any_failed = true;
                        std::cout << "# " << sweep << "=" << wb::fmt9(r.value) << " " << r.error << '\n';
                    }
                }
            }
            return any_failed ? numerical : ok;
        }
    } catch (pslet::error const& e) {
        return report(e);
    }
    return ok;
}
