#include <cmath>

#include <gtest/gtest.h>

#include "pslet/numerov.hpp"

using namespace pslet;

TEST(Numerov, OscillatorLevels)
{
    auto r = solve_bound_state(pure_ho(), 0.0, 0);
    EXPECT_NEAR(r.energy, 1.5, 1e-9);
    EXPECT_EQ(r.nodes, 0);
    for (int l : {1, 3}) EXPECT_NEAR(solve_bound_state(pure_ho(), l, 0).energy, l + 1.5, 1e-9);
    EXPECT_NEAR(solve_bound_state(pure_ho(), 0.0, 2).energy, 5.5, 1e-9);
}

TEST(Numerov, HydrogenLevels)
{
    EXPECT_NEAR(solve_bound_state(pure_coulomb(), 0.0, 0).energy, -0.5, 1e-8);
    EXPECT_NEAR(solve_bound_state(pure_coulomb(), 1.0, 0).energy, -0.125, 1e-8);
    EXPECT_NEAR(solve_bound_state(pure_coulomb(), 0.0, 1).energy, -0.125, 1e-8);
}

TEST(Numerov, BenchmarkStates)
{
    EXPECT_NEAR(solve_bound_state(truncated_coulomb(10.0), 0.0, 0).energy, -0.0637389, 1e-7);
    EXPECT_NEAR(solve_bound_state(spiked_ho(1000.0, 2.5, scale_convention::doubled), 0.0, 0).energy, 44.95549, 1e-5);
}

TEST(Numerov, ExactSpikedCase)
{
    double const lp = -0.5 + std::sqrt(0.25 + 1000.0);
    auto r = solve_bound_state(spiked_ho(1000.0, 2.0, scale_convention::doubled), 0.0, 0, 1e-11);
    EXPECT_NEAR(r.energy, 2.0 * (lp + 1.5), 1e-6);
    EXPECT_NEAR(r.energy, 65.2534584, 1e-6);
}

TEST(Numerov, NodeCountOfEigenfunction)
{
    for (int n_r = 0; n_r <= 3; ++n_r) {
        auto r = solve_bound_state(truncated_coulomb(1.0), 1.0, n_r);
        int changes = 0;
        // Ignore the deep tails where the amplitude sits at roundoff level.
        double peak = 0.0;
        for (double v : r.u) peak = std::max(peak, std::abs(v));
        double last = 0.0;
        for (double v : r.u) {
            if (std::abs(v) < 1e-10 * peak) continue;
            if (last != 0.0 && (v < 0.0) != (last < 0.0)) ++changes;
            last = v;
        }
        EXPECT_EQ(changes, n_r);
        EXPECT_EQ(r.nodes, n_r);
    }
}

TEST(Numerov, NormalizedEigenfunction)
{
    auto r = solve_bound_state(pure_ho(), 0.0, 0);
    // u = 2 pi^(-1/4) q e^(-q^2/2) for the 1s oscillator state.
    double const norm = 2.0 * std::pow(M_PI, -0.25);
    for (std::size_t i = 0; i < r.q.size(); i += 5000) {
        double const q = r.q[i];
        EXPECT_NEAR(std::abs(r.u[i]), norm * q * std::exp(-q * q / 2), 1e-6);
    }
}

// Halving the step should cut the error by about 2^4.
TEST(Numerov, FourthOrderConvergence)
{
    auto const m = pure_ho();
    auto grid = default_grid(m, 0.0, 1.5, 2000);
    auto err = [&](int steps) {
        RadialGrid g = grid;
        g.steps = steps;
        return std::abs(solve_bound_state(m, 0.0, 0, g, {1.0, 2.0}, 1e-14).energy - 1.5);
    };
    double const e1 = err(2000), e2 = err(4000);
    double const ratio = e1 / e2;
    EXPECT_GT(ratio, 12.0);
    EXPECT_LT(ratio, 20.0);
}

TEST(Numerov, BracketWidening)
{
    auto const m = truncated_coulomb(5.0);
    auto grid = default_grid(m, 0.0, -0.1, 100000);
    auto r = solve_bound_state(m, 0.0, 0, grid, {-0.3, -0.25});
    EXPECT_NEAR(r.energy, solve_bound_state(m, 0.0, 0).energy, 1e-8);
}

TEST(Numerov, Errors)
{
    RadialGrid bad{1.0, 0.5, 2000};
    EXPECT_THROW(solve_bound_state(pure_ho(), 0.0, 0, bad, {1.0, 2.0}), validation_error);
    RadialGrid coarse{0.1, 10.0, 10};
    EXPECT_THROW(solve_bound_state(pure_ho(), 0.0, 0, coarse, {1.0, 2.0}), validation_error);
    EXPECT_THROW(solve_bound_state(pure_ho(), -1.0, 0), validation_error);
    EXPECT_THROW(solve_bound_state(pure_ho(), 0.0, -1), validation_error);
}
