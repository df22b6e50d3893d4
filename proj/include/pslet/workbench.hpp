#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pslet/error.hpp"
#include "pslet/expansion.hpp"
#include "pslet/numerov.hpp"
#include "pslet/pade.hpp"
#include "pslet/potential.hpp"
#include "pslet/riccati.hpp"

namespace pslet::workbench {

using json = nlohmann::ordered_json;

struct PadePair
{
    int N{3};
    int M{3};
};

struct RunSpec
{
    PotentialModel model;
    double l{0.0};
    int n_r{0};
    int order{4}; ///< highest correction E^(K) in the truncated sum
    std::vector<PadePair> pade{{3, 3}, {3, 4}};
    bool oracle{false};
    double tol{1e-12};        ///< expansion-point solve
    double oracle_tol{1e-10}; ///< shooting energy tolerance
};

/// Throws validation_error if the RunSpec is unusable.
inline void validate(RunSpec const& s)
{
    pslet::validate(s.model);
    if (!(s.l >= 0.0)) throw validation_error("workbench", "l must be >= 0");
    if (s.n_r < 0) throw validation_error("workbench", "n_r must be >= 0");
    if (s.order < 0 || 2 * s.order + 4 > default_jet_cap) {
        throw validation_error("workbench", "order K must lie in [0, 30]");
    }
    for (auto const& p : s.pade) {
        if (p.N < 0 || p.M < 0 || 2 * (p.N + p.M) + 4 > default_jet_cap) {
            throw validation_error("workbench", "Pade degrees out of range");
        }
    }
    if (!(s.tol > 0.0) || !(s.oracle_tol > 0.0)) throw validation_error("workbench", "tolerances must be > 0");
}

struct PadeOutcome
{
    PadePair pair;
    std::optional<double> energy; ///< empty when the table was degenerate
    double condition{0.0};
    bool fell_back{false};       ///< degenerate table, truncated sum reported instead
    double value{0.0};            ///< energy or, on fallback, the truncated sum
};

struct ResultRecord
{
    RunSpec spec;
    double q0{0.0}, w{0.0}, beta{0.0}, lbar{0.0};
    double e_minus2{0.0};
    double e_minus1{0.0};
    double leading{0.0}; ///< convention factor applied
    std::vector<double> corrections;
    double e_p{0.0};
    std::vector<PadeOutcome> pade;
    std::optional<double> oracle;
    int oracle_nodes{-1};
    int smallest_term{-1};
    double root_residual{0.0};
    double recursion_residual{0.0};
    std::vector<double> rejected_roots;

    std::optional<double> pade_value(int N, int M) const
    {
        for (auto const& p : pade) {
            if (p.pair.N == N && p.pair.M == M) return p.energy;
        }
        return std::nullopt;
    }
};

/// solve_q0 -> Riccati recursion -> truncated sum -> Pade -> optional shooting oracle.
inline ResultRecord cmd_solve(RunSpec const& spec)
{
    validate(spec);
    int K = spec.order;
    for (auto const& p : spec.pade) K = std::max(K, p.N + p.M);

    ResultRecord r;
    r.spec = spec;
    auto const pt = solve_q0(spec.model, spec.l, spec.n_r, SolveOptions{spec.tol});
    r.q0 = pt.q0;
    r.w = pt.w;
    r.beta = pt.beta;
    r.lbar = pt.lbar;
    r.e_minus2 = pt.e_minus2;
    r.e_minus1 = pt.e_minus1();
    r.root_residual = pt.root_residual;
    r.rejected_roots = pt.rejected_roots;

    auto state = make_riccati_state(spec.model, pt, K);
    auto const series = energy_corrections(state, K);
    r.leading = series.convention_factor * series.leading();
    r.corrections = series.corrections;
    r.e_p = series.truncated(spec.order);
    r.smallest_term = series.smallest_term_index();
    r.recursion_residual = *std::max_element(state.residuals.begin(), state.residuals.end());

    for (auto const& pair : spec.pade) {
        PadeOutcome o;
        o.pair = pair;
        try {
            PadeApproximant fitted;
            o.energy = resummed_energy(series, pair.N, pair.M, &fitted);
            o.condition = fitted.condition;
            o.value = *o.energy;
        } catch (degenerate_table_error const&) {
            o.fell_back = true;
            o.value = series.truncated(pair.N + pair.M);
        }
        r.pade.push_back(o);
    }

    if (spec.oracle) {
        auto const shot = solve_bound_state(spec.model, spec.l, spec.n_r, spec.oracle_tol);
        r.oracle = shot.energy;
        r.oracle_nodes = shot.nodes;
    }
    return r;
}

// ---------------------------------------------------------------------------
// formatting

inline std::string fmt9(double v)
{
    if (!std::isfinite(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline json to_json(ResultRecord const& r)
{
    json inputs = {{"potential", to_string(r.spec.model.kind)},
                   {"a", r.spec.model.a},
                   {"b", r.spec.model.b},
                   {"c", r.spec.model.c},
                   {"l", r.spec.l},
                   {"n_r", r.spec.n_r},
                   {"order", r.spec.order},
                   {"convention", to_string(r.spec.model.convention)}};
    json pade = json::array();
    for (auto const& p : r.pade) {
        pade.push_back({{"N", p.pair.N},
                        {"M", p.pair.M},
                        {"energy", p.energy ? json(*p.energy) : json(nullptr)},
                        {"condition", p.condition},
                        {"fallback", p.fell_back}});
    }
    return json{{"inputs", inputs},
                {"q0", r.q0},
                {"w", r.w},
                {"beta", r.beta},
                {"lbar", r.lbar},
                {"e_minus2", r.e_minus2},
                {"leading", r.leading},
                {"corrections", r.corrections},
                {"E_P", r.e_p},
                {"pade", pade},
                {"oracle", r.oracle ? json(*r.oracle) : json(nullptr)},
                {"diagnostics",
                 {{"smallest_term_index", r.smallest_term},
                  {"e_minus1", r.e_minus1},
                  {"root_residual", r.root_residual},
                  {"recursion_residual", r.recursion_residual},
                  {"rejected_roots", r.rejected_roots}}}};
}

/// Fixed CSV columns for solve and scan output. Pade columns follow in request order.
inline std::string csv_header(RunSpec const& s)
{
    std::string h = "potential,a,b,c,l,n_r,convention,order,q0,w,beta,lbar,leading,E_P";
    for (auto const& p : s.pade) h += ",E[" + std::to_string(p.N) + "/" + std::to_string(p.M) + "]";
    h += ",oracle,smallest_term";
    return h;
}

inline std::string csv_row(ResultRecord const& r)
{
    std::ostringstream os;
    auto const& m = r.spec.model;
    os << to_string(m.kind) << ',' << fmt9(m.a) << ',' << fmt9(m.b) << ',' << fmt9(m.c) << ',' << fmt9(r.spec.l) << ','
       << r.spec.n_r << ',' << to_string(m.convention) << ',' << r.spec.order << ',' << fmt9(r.q0) << ','
       << fmt9(r.w) << ',' << fmt9(r.beta) << ',' << fmt9(r.lbar) << ',' << fmt9(r.leading) << ',' << fmt9(r.e_p);
    for (auto const& p : r.pade) os << ',' << (p.energy ? fmt9(*p.energy) : std::string{});
    os << ',' << (r.oracle ? fmt9(*r.oracle) : std::string{}) << ',' << r.smallest_term;
    return os.str();
}

inline std::string to_text(ResultRecord const& r)
{
    std::ostringstream os;
    os << "potential " << to_string(r.spec.model.kind) << "  l=" << fmt9(r.spec.l) << "  n_r=" << r.spec.n_r
       << "  convention=" << to_string(r.spec.model.convention) << '\n';
    os << "q0 = " << fmt9(r.q0) << "  w = " << fmt9(r.w) << "  beta = " << fmt9(r.beta) << "  lbar = " << fmt9(r.lbar)
       << '\n';
    os << "leading lbar^2 E(-2) = " << fmt9(r.leading) << '\n';
    for (std::size_t n = 0; n < r.corrections.size(); ++n) {
        os << "E(" << n << ") = " << fmt9(r.corrections[n]) << '\n';
    }
    os << "E_P (K=" << r.spec.order << ") = " << fmt9(r.e_p) << '\n';
    for (auto const& p : r.pade) {
        os << "E[" << p.pair.N << "/" << p.pair.M << "] = " << fmt9(p.value) << (p.fell_back ? "  (degenerate, truncated sum)" : "")
           << '\n';
    }
    if (r.oracle) os << "oracle (Numerov) = " << fmt9(*r.oracle) << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// reference tables

/// A printed reference value: the digits as they appear plus the parsed number.
struct PrintedValue
{
    std::string text;
    double value{0.0};
    bool present{false};

    /// One unit in the last printed place.
    double ulp() const
    {
        auto dot = text.find('.');
        if (dot == std::string::npos) return 1.0;
        auto digits = static_cast<int>(text.size() - dot - 1);
        return std::pow(10.0, -digits);
    }

    static PrintedValue parse(std::string const& s)
    {
        PrintedValue p;
        p.text = s;
        if (!s.empty()) {
            p.value = std::stod(s);
            p.present = true;
        }
        return p;
    }
};

struct BaselineRow
{
    int table{0};
    int row{0};
    PotentialModel model;
    int l{0};
    std::string state;
    PrintedValue e_p, e33, e34, e_n;
    bool bind_ep{true}, bind_pade{true}, bind_en{true};
    std::string note;
};

/// Minimal RFC-4180 field splitter (quoted fields, doubled quotes).
inline std::vector<std::string> split_csv_line(std::string const& line)
{
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char const ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string csv_quote(std::string const& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

inline constexpr char const* baseline_columns =
    "table,row,potential,a,b,c,l,state,convention,E_P,E33,E34,E_N,bind_EP,bind_pade,bind_EN,note";

inline std::vector<BaselineRow> load_baseline(std::istream& in)
{
    std::vector<BaselineRow> rows;
    std::string line;
    bool header = true;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            if (line.rfind(baseline_columns, 0) != 0) {
                throw validation_error("workbench", "unexpected baseline header");
            }
            header = false;
            continue;
        }
        auto f = split_csv_line(line);
        if (f.size() != 17) {
            throw validation_error("workbench", "baseline line " + std::to_string(lineno) + ": expected 17 fields");
        }
        BaselineRow r;
        r.table = std::stoi(f[0]);
        r.row = std::stoi(f[1]);
        auto const conv = f[8] == "doubled" ? scale_convention::doubled : scale_convention::half_kinetic;
        if (f[2] == "spiked") {
            r.model = spiked_ho(std::stod(f[3]), std::stod(f[4]), conv);
        } else if (f[2] == "tcoulomb") {
            r.model = truncated_coulomb(std::stod(f[5]), conv);
        } else {
            throw validation_error("workbench", "baseline line " + std::to_string(lineno) + ": unknown potential");
        }
        r.l = std::stoi(f[6]);
        r.state = f[7];
        r.e_p = PrintedValue::parse(f[9]);
        r.e33 = PrintedValue::parse(f[10]);
        r.e34 = PrintedValue::parse(f[11]);
        r.e_n = PrintedValue::parse(f[12]);
        r.bind_ep = f[13] == "1";
        r.bind_pade = f[14] == "1";
        r.bind_en = f[15] == "1";
        r.note = f[16];
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::vector<BaselineRow> load_baseline(std::string const& path)
{
    std::ifstream in(path);
    if (!in) throw validation_error("workbench", "cannot open baseline file " + path);
    return load_baseline(in);
}

/// Comparison rule for one table column.
struct Tolerance
{
    enum class kind
    {
        relative,
        absolute,
        printed_ulps
    } how{kind::relative};
    double amount{0.0};

    bool accepts(double ours, PrintedValue const& ref) const
    {
        double const d = std::abs(ours - ref.value);
        switch (how) {
            case kind::relative: return d <= amount * std::abs(ref.value);
            case kind::absolute: return d <= amount;
            case kind::printed_ulps: return d <= amount * ref.ulp() * (1.0 + 1e-9);
        }
        return false;
    }
};

struct TablePolicy
{
    Tolerance e_p, pade, e_n;
};

/// Binding tolerances per table. User tables with other ids get the table 1 policy.
inline TablePolicy policy_for(BaselineRow const& r)
{
    using K = Tolerance::kind;
    switch (r.table) {
        case 2:
            // Small spikes make the series nearly divergent; E_P then only agrees loosely.
            return {{K::relative, r.model.a >= 5.0 ? 5e-5 : 1e-3}, {K::relative, 1e-4}, {K::relative, 1e-5}};
        case 3: return {{K::absolute, 5e-6}, {K::relative, 1e-4}, {K::printed_ulps, 2.0}};
        case 4: return {{K::absolute, 1e-7}, {K::relative, 1e-4}, {K::printed_ulps, 2.0}};
        default: return {{K::relative, 5e-5}, {K::relative, 1e-4}, {K::printed_ulps, 2.0}};
    }
}

struct TableRowResult
{
    BaselineRow ref;
    std::optional<ResultRecord> record;
    std::string error;
    bool ok_ep{true}, ok_e33{true}, ok_e34{true}, ok_en{true};

    /// True if every binding cell is within tolerance (and the row ran).
    bool passes() const
    {
        if (!record) return false;
        return (!ref.bind_ep || ok_ep) && (!ref.bind_pade || (ok_e33 && ok_e34)) && (!ref.bind_en || ok_en);
    }
};

inline RunSpec spec_for(BaselineRow const& r, bool oracle)
{
    RunSpec s;
    s.model = r.model;
    s.l = r.l;
    s.order = 4;
    s.oracle = oracle;
    return s;
}

inline TableRowResult evaluate_row(BaselineRow const& ref, bool oracle)
{
    TableRowResult out;
    out.ref = ref;
    try {
        out.record = cmd_solve(spec_for(ref, oracle));
    } catch (error const& e) {
        out.error = e.module() + ": " + e.what();
        return out;
    }
    auto const pol = policy_for(ref);
    auto const& rec = *out.record;
    if (ref.e_p.present) out.ok_ep = pol.e_p.accepts(rec.e_p, ref.e_p);
    auto const p33 = rec.pade_value(3, 3);
    auto const p34 = rec.pade_value(3, 4);
    if (ref.e33.present) out.ok_e33 = p33 && pol.pade.accepts(*p33, ref.e33);
    if (ref.e34.present) out.ok_e34 = p34 && pol.pade.accepts(*p34, ref.e34);
    if (ref.e_n.present && oracle) out.ok_en = rec.oracle && pol.e_n.accepts(*rec.oracle, ref.e_n);
    return out;
}

/// Evaluates every row of table `id`. Rows run concurrently when `jobs` > 1;
/// results come back in baseline order.
inline std::vector<TableRowResult> cmd_table(int id, std::vector<BaselineRow> const& baseline, bool oracle = true,
                                             unsigned jobs = 1)
{
    std::vector<BaselineRow> rows;
    std::copy_if(baseline.begin(), baseline.end(), std::back_inserter(rows),
                 [id](BaselineRow const& r) { return r.table == id; });
    if (rows.empty()) throw validation_error("workbench", "no baseline rows for table " + std::to_string(id));

    std::vector<TableRowResult> out(rows.size());
    jobs = std::max(1u, jobs);
    for (std::size_t start = 0; start < rows.size(); start += jobs) {
        std::vector<std::future<TableRowResult>> batch;
        for (std::size_t i = start; i < std::min(rows.size(), start + jobs); ++i) {
            batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, evaluate_row,
                                       std::cref(rows[i]), oracle));
        }
        for (std::size_t k = 0; k < batch.size(); ++k) out[start + k] = batch[k].get();
    }
    return out;
}

inline bool table_passes(std::vector<TableRowResult> const& rows)
{
    return std::all_of(rows.begin(), rows.end(), [](TableRowResult const& r) { return r.passes(); });
}

inline std::string table_csv_header()
{
    return "table,row,potential,a,b,c,l,state,E_P,E33,E34,E_oracle,ref_E_P,ref_E33,ref_E34,ref_E_N,"
           "dev_E_P,dev_E33,dev_E34,dev_E_N,binding_ok,error";
}

inline std::string table_csv_row(TableRowResult const& r)
{
    std::ostringstream os;
    auto const& m = r.ref.model;
    os << r.ref.table << ',' << r.ref.row << ',' << to_string(m.kind) << ',' << fmt9(m.a) << ',' << fmt9(m.b) << ','
       << fmt9(m.c) << ',' << r.ref.l << ',' << r.ref.state << ',';
    auto opt = [](std::optional<double> v) { return v ? fmt9(*v) : std::string{}; };
    auto dev = [](std::optional<double> ours, PrintedValue const& ref) {
        return ours && ref.present ? fmt9(*ours - ref.value) : std::string{};
    };
    std::optional<double> ep, p33, p34, orc;
    if (r.record) {
        ep = r.record->e_p;
        p33 = r.record->pade_value(3, 3);
        p34 = r.record->pade_value(3, 4);
        orc = r.record->oracle;
    }
    os << opt(ep) << ',' << opt(p33) << ',' << opt(p34) << ',' << opt(orc) << ',' << r.ref.e_p.text << ','
       << r.ref.e33.text << ',' << r.ref.e34.text << ',' << r.ref.e_n.text << ',' << dev(ep, r.ref.e_p) << ','
       << dev(p33, r.ref.e33) << ',' << dev(p34, r.ref.e34) << ',' << dev(orc, r.ref.e_n) << ','
       << (r.passes() ? 1 : 0) << ',' << csv_quote(r.error);
    return os.str();
}

inline json table_json(std::vector<TableRowResult> const& rows)
{
    json arr = json::array();
    for (auto const& r : rows) {
        json ref = {{"E_P", r.ref.e_p.text}, {"E33", r.ref.e33.text}, {"E34", r.ref.e34.text}, {"E_N", r.ref.e_n.text},
                    {"binding", {{"E_P", r.ref.bind_ep}, {"pade", r.ref.bind_pade}, {"E_N", r.ref.bind_en}}},
                    {"note", r.ref.note}};
        json checks = {{"E_P", r.ok_ep}, {"E33", r.ok_e33}, {"E34", r.ok_e34}, {"E_N", r.ok_en}};
        arr.push_back({{"table", r.ref.table},
                       {"row", r.ref.row},
                       {"state", r.ref.state},
                       {"result", r.record ? to_json(*r.record) : json(nullptr)},
                       {"reference", ref},
                       {"checks", checks},
                       {"passes", r.passes()},
                       {"error", r.error}});
    }
    return arr;
}

// ---------------------------------------------------------------------------
// scans

enum class sweep_parameter
{
    a,
    b,
    c,
    l
};

inline RunSpec with_parameter(RunSpec s, sweep_parameter p, double v)
{
    switch (p) {
        case sweep_parameter::a: s.model.a = v; break;
        case sweep_parameter::b: s.model.b = v; break;
        case sweep_parameter::c: s.model.c = v; break;
        case sweep_parameter::l: s.l = v; break;
    }
    return s;
}

struct ScanRow
{
    double value{0.0};
    std::optional<ResultRecord> record;
    std::string error;
};

/// One independent solve per sweep value; failures are kept per row.
inline std::vector<ScanRow> cmd_scan(RunSpec const& base, sweep_parameter p, std::vector<double> const& values,
                                     unsigned jobs = 1)
{
    auto run = [&](double v) {
        ScanRow row;
        row.value = v;
        try {
            row.record = cmd_solve(with_parameter(base, p, v));
        } catch (error const& e) {
            row.error = e.module() + ": " + e.what();
        }
        return row;
    };
    std::vector<ScanRow> out(values.size());
    jobs = std::max(1u, jobs);
    for (std::size_t start = 0; start < values.size(); start += jobs) {
        std::vector<std::future<ScanRow>> batch;
        for (std::size_t i = start; i < std::min(values.size(), start + jobs); ++i) {
            batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, run, values[i]));
        }
        for (std::size_t k = 0; k < batch.size(); ++k) out[start + k] = batch[k].get();
    }
    return out;
}

} // namespace pslet::workbench
