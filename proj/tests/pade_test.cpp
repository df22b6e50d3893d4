#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pslet/pade.hpp"

using namespace pslet;

TEST(FitPade, GeometricSeries)
{
    auto p = fit_pade(std::vector<double>{1.0, 1.0, 1.0}, 1, 1);
    ASSERT_EQ(p.num.size(), 2u);
    ASSERT_EQ(p.den.size(), 2u);
    EXPECT_NEAR(p.num[0], 1.0, 1e-15);
    EXPECT_NEAR(p.num[1], 0.0, 1e-15);
    EXPECT_EQ(p.den[0], 1.0);
    EXPECT_NEAR(p.den[1], -1.0, 1e-15);
    EXPECT_NEAR(p(0.5), 2.0, 1e-14);
}

TEST(FitPade, ConstantSeriesGivesConstant)
{
    std::vector<double> c(8, 0.0);
    c[0] = 1.0;
    for (auto [N, M] : {std::pair{3, 3}, {3, 4}, {0, 2}, {2, 0}}) {
        auto p = fit_pade(c, N, M);
        for (double x : {0.0, 0.3, 2.0}) EXPECT_NEAR(p(x), 1.0, 1e-15);
    }
}

TEST(FitPade, ExponentialThreeThree)
{
    std::vector<double> c(7);
    double f = 1.0;
    for (int k = 0; k < 7; ++k) {
        c[static_cast<std::size_t>(k)] = 1.0 / f;
        f *= k + 1;
    }
    auto p = fit_pade(c, 3, 3);
    double const x = 1.0;
    double const classic = (120 + 60 * x + 12 * x * x + x * x * x) / (120 - 60 * x + 12 * x * x - x * x * x);
    EXPECT_NEAR(p(x), classic, 1e-13);
    EXPECT_NEAR(p(x), std::exp(1.0), 3e-5);
}

TEST(FitPade, ZeroSeriesIsZeroFunction)
{
    std::vector<double> c(8, 0.0);
    auto p = fit_pade(c, 3, 4);
    EXPECT_EQ(p(0.7), 0.0);
    EXPECT_EQ(p.den[0], 1.0);
}

TEST(FitPade, ReproducesInputExpansion)
{
    std::mt19937 rng(5);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> c(8);
        for (double& v : c) v = g(rng);
        for (auto [N, M] : {std::pair{3, 3}, {3, 4}, {2, 2}, {4, 1}}) {
            PadeApproximant p;
            try {
                p = fit_pade(c, N, M);
            } catch (degenerate_table_error const&) {
                continue;
            }
            // q(x) c(x) - p(x) vanishes through x^(N+M), relative to the size of its terms.
            // Near-singular tables make the Maclaurin recurrence itself lose digits, so the
            // expansion is compared only where the denominator is tame.
            auto const need = static_cast<std::size_t>(N + M + 1);
            double err = 0.0, big = 0.0, qmax = 0.0;
            for (double q : p.den) qmax = std::max(qmax, std::abs(q));
            for (std::size_t i = 0; i < need; ++i) {
                double s = i < p.num.size() ? -p.num[i] : 0.0;
                double mag = std::abs(s);
                for (std::size_t j = 0; j < p.den.size() && j <= i; ++j) {
                    s += p.den[j] * c[i - j];
                    mag += std::abs(p.den[j] * c[i - j]);
                }
                err = std::max(err, std::abs(s));
                big = std::max(big, mag);
            }
            EXPECT_LE(err, 1e-9 * big) << trial << " [" << N << "/" << M << "]";
            if (qmax < 10.0) {
                auto mac = p.maclaurin(need);
                double cmax = 0.0;
                for (std::size_t i = 0; i < need; ++i) cmax = std::max(cmax, std::abs(c[i]));
                for (std::size_t i = 0; i < need; ++i) EXPECT_NEAR(mac[i], c[i], 1e-9 * cmax) << trial << " " << i;
            }
            EXPECT_EQ(p.den[0], 1.0);
        }
    }
}

TEST(FitPade, ExactRationalRecovered)
{
    // (1 + 2x) / (1 - 0.5x + 0.25x^2) has an exact [1/2] table.
    PadeApproximant r{{1.0, 2.0}, {1.0, -0.5, 0.25}, 1, 2, 1.0};
    auto c = r.maclaurin(8);
    auto p = fit_pade(c, 1, 2);
    EXPECT_NEAR(p.den[1], -0.5, 1e-12);
    EXPECT_NEAR(p.den[2], 0.25, 1e-12);
    EXPECT_NEAR(p.num[1], 2.0, 1e-12);
    // Higher tables of a rational function reduce to it.
    auto q = fit_pade(c, 3, 4);
    for (double x : {0.1, 0.4, -0.3}) EXPECT_NEAR(q(x), r(x), 1e-10);
}

TEST(FitPade, Errors)
{
    EXPECT_THROW(fit_pade(std::vector<double>{1.0, 2.0}, 1, 1), capacity_error);
    EXPECT_THROW(fit_pade(std::vector<double>{1.0, 2.0, 3.0}, -1, 1), validation_error);
    EXPECT_THROW(fit_pade(std::vector<double>{1.0, NAN, 3.0}, 1, 1), validation_error);
    // c = (1, 0, 1): the [1/1] matrix (c_1) is singular and [1/0] misses c_2.
    EXPECT_THROW(fit_pade(std::vector<double>{1.0, 0.0, 1.0}, 1, 1), degenerate_table_error);
}

TEST(ResummedEnergy, ZeroCorrectionsGiveLeadingTerm)
{
    EnergySeries e;
    e.e_minus2 = 1.5 / 2.25;
    e.lbar = 1.5;
    e.corrections.assign(8, 0.0);
    EXPECT_NEAR(resummed_energy(e, 3, 3), 1.5, 1e-15);
    EXPECT_NEAR(resummed_energy(e, 3, 4), 1.5, 1e-15);
    e.convention_factor = 2.0;
    EXPECT_NEAR(resummed_energy(e, 3, 4), 3.0, 1e-15);
}

TEST(ResummedEnergy, PadeColumnsForBenchmarks)
{
    auto solve = [](PotentialModel const& m, double l) {
        auto pt = solve_q0(m, l, 0);
        auto s = make_riccati_state(m, pt, 7);
        return energy_corrections(s, 7);
    };
    auto e1 = solve(spiked_ho(1000.0, 0.5, scale_convention::doubled), 0.0);
    EXPECT_NEAR(resummed_energy(e1, 3, 3), 415.889786, 1e-6);
    EXPECT_NEAR(resummed_energy(e1, 3, 4), 415.889786, 1e-6);

    auto e2 = solve(truncated_coulomb(10.0), 0.0);
    PadeApproximant fitted;
    double const v = resummed_energy(e2, 3, 3, &fitted);
    EXPECT_NEAR(v, -0.06373817, 1e-4 * 0.06373817);
    EXPECT_LT(fitted.condition, pade_condition_limit);
}
