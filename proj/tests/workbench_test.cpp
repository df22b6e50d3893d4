#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "pslet/workbench.hpp"

using namespace pslet;
namespace wb = pslet::workbench;

namespace {

wb::RunSpec spec_of(PotentialModel m, double l)
{
    wb::RunSpec s;
    s.model = m;
    s.l = l;
    return s;
}

std::vector<wb::BaselineRow> baseline()
{
    return wb::load_baseline(std::string(PSLET_BASELINE_PATH));
}

int run_cli(std::string const& args)
{
    std::string const cmd = std::string(PSLET_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    int const status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(CmdSolve, TableExamples)
{
    auto r1 = wb::cmd_solve(spec_of(spiked_ho(1000.0, 1.0, scale_convention::doubled), 0.0));
    EXPECT_NEAR(r1.e_p, 190.72330, 5e-5 * 190.7233);

    auto r2 = wb::cmd_solve(spec_of(truncated_coulomb(100.0), 2.0));
    EXPECT_NEAR(r2.e_p, -0.00703519, 1e-7);

    auto r3 = wb::cmd_solve(spec_of(pure_ho(), 0.0));
    EXPECT_NEAR(r3.e_p, 1.5, 1e-12);
    for (double c : r3.corrections) EXPECT_LT(std::abs(c), 1e-10);
    ASSERT_EQ(r3.pade.size(), 2u);
    EXPECT_NEAR(*r3.pade_value(3, 3), 1.5, 1e-12);
}

TEST(CmdSolve, SeriesLongEnoughForRequestedPade)
{
    auto s = spec_of(truncated_coulomb(5.0), 0.0);
    s.order = 2;
    s.pade = {{4, 4}};
    auto r = wb::cmd_solve(s);
    EXPECT_GE(r.corrections.size(), 9u);
    EXPECT_TRUE(r.pade_value(4, 4).has_value());
}

TEST(CmdSolve, ValidationAndModuleTags)
{
    auto s = spec_of(pure_ho(), -1.0);
    EXPECT_THROW(wb::cmd_solve(s), validation_error);
    s = spec_of(pure_ho(), 0.0);
    s.order = 40;
    EXPECT_THROW(wb::cmd_solve(s), validation_error);
    s = spec_of(pure_ho(), 0.0);
    s.n_r = 1;
    try {
        wb::cmd_solve(s);
        FAIL() << "expected an error";
    } catch (unsupported_state_error const& e) {
        EXPECT_EQ(e.module(), "riccati_engine");
    }
}

TEST(Output, JsonRoundTripIsByteIdentical)
{
    auto s = spec_of(spiked_ho(10.0, 2.5, scale_convention::doubled), 1.0);
    s.oracle = true;
    auto const text = wb::to_json(wb::cmd_solve(s)).dump(2);
    EXPECT_EQ(wb::json::parse(text).dump(2), text);
    auto const compact = wb::to_json(wb::cmd_solve(spec_of(truncated_coulomb(1.0), 0.0))).dump();
    EXPECT_EQ(wb::json::parse(compact).dump(), compact);
}

TEST(Output, CsvHeaderAndPrecision)
{
    auto s = spec_of(truncated_coulomb(10.0), 0.0);
    EXPECT_EQ(wb::csv_header(s),
              "potential,a,b,c,l,n_r,convention,order,q0,w,beta,lbar,leading,E_P,E[3/3],E[3/4],oracle,smallest_term");
    auto const row = wb::csv_row(wb::cmd_solve(s));
    auto fields = wb::split_csv_line(row);
    ASSERT_EQ(fields.size(), 18u);
    EXPECT_EQ(fields[0], "tcoulomb");
    EXPECT_EQ(fields[13], "-0.06373831"); // E_P to 9 significant digits
    EXPECT_EQ(fields[16], "");             // no oracle requested
    EXPECT_EQ(wb::fmt9(1.0 / 3.0), "0.333333333");
}

TEST(Baseline, CsvFieldSplitting)
{
    auto f = wb::split_csv_line(R"(1,"a, b","say ""hi""",)");
    ASSERT_EQ(f.size(), 4u);
    EXPECT_EQ(f[1], "a, b");
    EXPECT_EQ(f[2], "say \"hi\"");
    EXPECT_EQ(f[3], "");
    EXPECT_EQ(wb::csv_quote("a,b"), "\"a,b\"");
}

TEST(Baseline, ShippedFileShape)
{
    auto rows = baseline();
    auto count = [&](int t) { return std::count_if(rows.begin(), rows.end(), [t](auto const& r) { return r.table == t; }); };
    EXPECT_EQ(count(1), 14);
    EXPECT_EQ(count(2), 8);
    EXPECT_EQ(count(3), 12);
    EXPECT_EQ(count(4), 12);
    for (auto const& r : rows) {
        EXPECT_TRUE(r.e_p.present);
        EXPECT_TRUE(r.e_n.present);
        if (r.table >= 3) {
            EXPECT_LT(r.e_n.value, 0.0);
        }
    }
}

TEST(Baseline, PrintedPrecision)
{
    auto p = wb::PrintedValue::parse("-0.0637389");
    EXPECT_DOUBLE_EQ(p.ulp(), 1e-7);
    wb::Tolerance t{wb::Tolerance::kind::printed_ulps, 2.0};
    EXPECT_TRUE(t.accepts(-0.06373908, p));
    EXPECT_FALSE(t.accepts(-0.06373912, p));
    EXPECT_DOUBLE_EQ(wb::PrintedValue::parse("44.95549").ulp(), 1e-5);
}

TEST(Baseline, RejectsMalformedInput)
{
    std::istringstream no_header("1,2,3\n");
    EXPECT_THROW(wb::load_baseline(no_header), validation_error);
    std::istringstream short_row(std::string(wb::baseline_columns) + "\n1,1,spiked\n");
    EXPECT_THROW(wb::load_baseline(short_row), validation_error);
    EXPECT_THROW(wb::load_baseline(std::string("/nonexistent/file.csv")), validation_error);
}

TEST(CmdTable, RowCountsAndSpotValues)
{
    auto const rows = baseline();
    auto t1 = wb::cmd_table(1, rows, false, 4);
    ASSERT_EQ(t1.size(), 14u);
    EXPECT_NEAR(t1[2].record->e_p, 104.41022, 5e-5 * 104.41022);

    auto t3 = wb::cmd_table(3, rows, false, 4);
    ASSERT_EQ(t3.size(), 12u);
    EXPECT_NEAR(t3[5].record->e_p, -0.06819140, 5e-6);

    auto t4 = wb::cmd_table(4, rows, false, 4);
    EXPECT_NEAR(t4.back().record->e_p, -0.00362385, 1e-7);
    EXPECT_THROW(wb::cmd_table(7, rows), validation_error);
}

TEST(CmdTable, ParallelOutputIsOrdered)
{
    auto const rows = baseline();
    auto csv = [&](unsigned jobs) {
        std::string out;
        for (auto const& r : wb::cmd_table(4, rows, false, jobs)) out += wb::table_csv_row(r) + "\n";
        return out;
    };
    EXPECT_EQ(csv(1), csv(8));
}

TEST(CmdTable, FailingRowsAreRecordedNotThrown)
{
    std::istringstream in(std::string(wb::baseline_columns) +
                          "\n9,1,tcoulomb,0,0,5,0,1s,half,-0.1,,,-0.1,1,0,1,\n"
                          "9,2,spiked,1000,2.0,0,0,1s,doubled,65.25345,,,65.25346,1,0,1,\n");
    auto rows = wb::load_baseline(in);
    rows[0].model.c = -1.0; // invalid after load: the row must fail on its own
    auto res = wb::cmd_table(9, rows, false);
    ASSERT_EQ(res.size(), 2u);
    EXPECT_FALSE(res[0].record.has_value());
    EXPECT_FALSE(res[0].error.empty());
    EXPECT_TRUE(res[1].passes());
    EXPECT_FALSE(wb::table_passes(res));
}

TEST(CmdScan, TruncationRangeIsMonotone)
{
    auto s = spec_of(truncated_coulomb(20.0), 0.0);
    s.oracle = true;
    std::vector<double> cs{20.0, 30.0, 40.0, 50.0, 60.0};
    auto rows = wb::cmd_scan(s, wb::sweep_parameter::c, cs, 4);
    ASSERT_EQ(rows.size(), cs.size());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        ASSERT_TRUE(rows[i].record && rows[i - 1].record);
        EXPECT_GT(rows[i].record->e_p, rows[i - 1].record->e_p);
        EXPECT_GT(*rows[i].record->oracle, *rows[i - 1].record->oracle);
    }
}

TEST(CmdScan, SweepOverTableOneGrid)
{
    auto const ref = baseline();
    auto s = spec_of(spiked_ho(1000.0, 1.0, scale_convention::doubled), 0.0);
    std::vector<double> bs;
    std::vector<double> want;
    for (auto const& r : ref) {
        if (r.table != 1) continue;
        bs.push_back(r.model.b);
        want.push_back(r.e_p.value);
    }
    auto rows = wb::cmd_scan(s, wb::sweep_parameter::b, bs, 4);
    for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_NEAR(rows[i].record->e_p, want[i], 5e-5 * want[i]);
}

TEST(CmdScan, SinglePointEqualsSolve)
{
    auto s = spec_of(truncated_coulomb(5.0), 2.0);
    auto rows = wb::cmd_scan(s, wb::sweep_parameter::c, {5.0});
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(wb::to_json(*rows[0].record).dump(), wb::to_json(wb::cmd_solve(s)).dump());
    auto bad = wb::cmd_scan(s, wb::sweep_parameter::c, {-1.0, 5.0});
    EXPECT_FALSE(bad[0].record.has_value());
    EXPECT_TRUE(bad[1].record.has_value());
}

TEST(Cli, ExitCodes)
{
    EXPECT_EQ(run_cli("solve --potential ho --format json"), 0);
    EXPECT_EQ(run_cli("solve --potential tcoulomb --c 10 --pade 3,3 --pade 2,2 --format csv"), 0);
    EXPECT_EQ(run_cli("solve --potential spiked --a -1"), 2);
    EXPECT_EQ(run_cli("solve --potential nonsense"), 2);
    EXPECT_EQ(run_cli("solve --potential ho --pade 3"), 2);
    EXPECT_EQ(run_cli("solve --potential ho --nr 1"), 3);
    EXPECT_EQ(run_cli("table 4 --no-oracle"), 0);
    EXPECT_EQ(run_cli("scan --potential tcoulomb --sweep c --from 20 --to 60 --points 3"), 0);

    std::string const path = testing::TempDir() + "pslet_bad_baseline.csv";
    {
        std::ofstream out(path);
        out << wb::baseline_columns << "\n4,1,tcoulomb,0,0,50,0,1s,half,-0.02,,,-0.02,1,0,1,\n";
    }
    EXPECT_EQ(run_cli("table 4 --no-oracle --baseline " + path), 4);
}
