#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pslet/error.hpp"
#include "pslet/potential.hpp"

namespace pslet {

/// Radial grid, uniform in x = ln q.
///
/// The radial equation -u''/2 + [l(l+1)/(2q^2) + V(q)] u = E u becomes, with
/// u = sqrt(q) y(x),
///   y'' = [ (l + 1/2)^2 + 2 q^2 (V(q) - E) ] y,
/// which Numerov integrates without the 1/q^2 stiffness of a uniform q grid.
struct RadialGrid
{
    double q_min{1e-6};
    double q_max{50.0};
    int steps{200000};

    double h() const { return (std::log(q_max) - std::log(q_min)) / steps; }
    double at(int i) const { return q_min * std::exp(i * h()); }
};

struct ShootingResult
{
    double energy{0.0}; ///< in the model's reporting convention
    int nodes{0};
    int iterations{0};
    double matching_residual{0.0};
    RadialGrid grid;
    std::vector<double> q;
    std::vector<double> u; ///< reduced radial function, normalized to int u^2 dq = 1
};

inline constexpr double wkb_margin = 45.0;

namespace detail {

inline double effective_potential(PotentialModel const& m, double l, double q)
{
    return l * (l + 1.0) / (2.0 * q * q) + eval_value(m, q);
}

/// Integration of one trial energy on a fixed grid.
class numerov_shooter
{
  public:
    numerov_shooter(PotentialModel const& m, double l, RadialGrid const& g)
        : grid_(g)
        , h_(g.h())
        , n_(g.steps + 1)
        , base_(n_)
        , q2_(n_)
        , out_(n_)
        , in_(n_)
        , k_(n_)
    {
        if (!(g.q_min > 0.0) || !(g.q_max > g.q_min) || g.steps < 1000) {
            throw validation_error("reference_integrator", "grid needs 0 < q_min < q_max and steps >= 1000");
        }
        double const lh = (l + 0.5) * (l + 0.5);
        for (int i = 0; i < n_; ++i) {
            double const q = g.at(i);
            double const v = eval_value(m, q);
            if (!std::isfinite(v)) {
                throw domain_error("reference_integrator", "potential not finite on the grid");
            }
            q2_[idx(i)] = q * q;
            base_[idx(i)] = lh + 2.0 * q * q * v;
        }
    }

    struct trial
    {
        int nodes;
        double cusp;    ///< derivative jump at the matching point, sign-adjusted so > 0 means E too high
        double residual;
        int match;
    };

    trial run(double E)
    {
        for (int i = 0; i < n_; ++i) {
            k_[idx(i)] = base_[idx(i)] - 2.0 * q2_[idx(i)] * E;
        }
        int match = -1;
        for (int i = n_ - 1; i >= 0; --i) {
            if (k_[idx(i)] < 0.0) {
                match = i;
                break;
            }
        }
        if (match < 0) {
            match = static_cast<int>(std::min_element(k_.begin(), k_.end()) - k_.begin());
        }
        match = std::clamp(match, 2, n_ - 3);

        integrate_out(match + 1);
        integrate_in(match - 1);

        double const scale = out_[idx(match)] / in_[idx(match)];
        for (int i = match - 1; i < n_; ++i) {
            in_[idx(i)] *= scale;
        }

        int nodes = 0;
        for (int i = 0; i < match; ++i) {
            if ((out_[idx(i)] < 0.0) != (out_[idx(i + 1)] < 0.0)) ++nodes;
        }
        for (int i = match; i < n_ - 1; ++i) {
            if ((in_[idx(i)] < 0.0) != (in_[idx(i + 1)] < 0.0)) ++nodes;
        }

        double const ym = out_[idx(match)];
        double const am = a(match);
        double const jump =
            a(match - 1) * out_[idx(match - 1)] + a(match + 1) * in_[idx(match + 1)] - (12.0 - 10.0 * am) * ym;
        double const signed_jump = ym < 0.0 ? -jump : jump;
        double const denom = std::abs((12.0 - 10.0 * am) * ym);
        return trial{nodes, signed_jump, denom > 0.0 ? std::abs(jump) / denom : std::abs(jump), match};
    }

    /// sqrt(q) y on the grid after the last run, with the inward branch joined at `match`.
    std::vector<double> joined(int match) const
    {
        std::vector<double> u(idx(n_));
        for (int i = 0; i < n_; ++i) {
            double const y = i <= match ? out_[idx(i)] : in_[idx(i)];
            u[idx(i)] = std::sqrt(std::sqrt(q2_[idx(i)])) * y;
        }
        return u;
    }

    int size() const { return n_; }

  private:
    static std::size_t idx(int i) { return static_cast<std::size_t>(i); }
    double a(int i) const { return 1.0 - h_ * h_ * k_[idx(i)] / 12.0; }

    /// Two seed values in the forbidden (or centrifugal) region: the WKB growth ratio
    /// exp(int sqrt(k) dx) reduces to the power law q^(l+1/2) where only the centrifugal term matters.
    std::pair<double, double> seed(int i0, int i1) const
    {
        double const k0 = k_[idx(i0)];
        double const k1 = k_[idx(i1)];
        double ratio;
        if (k0 > 0.0 && k1 > 0.0) {
            ratio = std::exp(h_ * 0.5 * (std::sqrt(k0) + std::sqrt(k1)));
        } else {
            ratio = 1.0 + h_;
        }
        return {1e-30, 1e-30 * ratio};
    }

    void rescale(std::vector<double>& y, int from, int to)
    {
        for (int j = std::min(from, to); j <= std::max(from, to); ++j) y[idx(j)] *= 1e-200;
    }

    void integrate_out(int last)
    {
        auto [y0, y1] = seed(1, 0);
        out_[0] = y0;
        out_[1] = y1;
        for (int i = 1; i < last; ++i) {
            out_[idx(i + 1)] = ((12.0 - 10.0 * a(i)) * out_[idx(i)] - a(i - 1) * out_[idx(i - 1)]) / a(i + 1);
            if (std::abs(out_[idx(i + 1)]) > 1e200) rescale(out_, 0, i + 1);
        }
    }

    void integrate_in(int first)
    {
        auto [y0, y1] = seed(n_ - 2, n_ - 1);
        in_[idx(n_ - 1)] = y0;
        in_[idx(n_ - 2)] = y1;
        for (int i = n_ - 2; i > first; --i) {
            in_[idx(i - 1)] = ((12.0 - 10.0 * a(i)) * in_[idx(i)] - a(i + 1) * in_[idx(i + 1)]) / a(i - 1);
            if (std::abs(in_[idx(i - 1)]) > 1e200) rescale(in_, n_ - 1, i - 1);
        }
    }

    RadialGrid grid_;
    double h_;
    int n_;
    std::vector<double> base_, q2_, out_, in_, k_;
};

inline bool is_confining(PotentialModel const& m) { return is_oscillator_family(m); }

/// Minimum of the effective potential over a wide logarithmic scan, with its location.
inline std::pair<double, double> effective_minimum(PotentialModel const& m, double l)
{
    double best = std::numeric_limits<double>::infinity();
    double where = 1.0;
    for (double x = std::log(1e-4); x <= std::log(1e5); x += 1e-3) {
        double const q = std::exp(x);
        double const v = effective_potential(m, l, q);
        if (v < best) {
            best = v;
            where = q;
        }
    }
    return {best, where};
}

} // namespace detail

/// Grid covering the region where a state of energy `energy` (half-kinetic units) lives:
/// from the point where the WKB action inside the inner turning point reaches 45 (but not
/// below 1e-6 of that turning point) out to where the action beyond the outer turning point
/// reaches 45.
inline RadialGrid default_grid(PotentialModel const& m, double l, double energy, int steps = 200000)
{
    auto veff = [&](double q) { return detail::effective_potential(m, l, q); };
    auto [vmin, qmin_loc] = detail::effective_minimum(m, l);
    double const ratio = 1.0005;

    double q_in = qmin_loc;
    double q_out = qmin_loc;
    if (energy > vmin) {
        while (q_in > 1e-8 && veff(q_in / ratio) < energy) q_in /= ratio;
        while (q_out < 1e8 && veff(q_out * ratio) < energy) q_out *= ratio;
    }
    if (q_out >= 1e8) {
        throw no_bound_state_error("reference_integrator", "energy above the potential at large q");
    }

    auto action_step = [&](double q0, double q1) {
        double const k0 = std::max(0.0, 2.0 * (veff(q0) - energy));
        double const k1 = std::max(0.0, 2.0 * (veff(q1) - energy));
        return 0.5 * (std::sqrt(k0) + std::sqrt(k1)) * std::abs(q1 - q0);
    };

    double q_max = q_out;
    double action = 0.0;
    while (action < wkb_margin) {
        double const next = q_max * ratio;
        action += action_step(q_max, next);
        q_max = next;
        if (q_max > 1e8) {
            throw no_bound_state_error("reference_integrator", "state does not decay at large q");
        }
    }

    double q_min = q_in;
    double const floor = 1e-6 * q_in;
    action = 0.0;
    while (action < wkb_margin && q_min > floor) {
        double const next = q_min / ratio;
        action += action_step(next, q_min);
        q_min = next;
    }
    return RadialGrid{std::max(q_min, floor), q_max, steps};
}

/// Numerov shooting on a fixed grid. `bracket` is in the model's reporting convention and is
/// widened outward if it does not straddle the requested state. The energy is bisected using
/// the node count, and the sign of the derivative jump once the node count matches.
inline ShootingResult solve_bound_state(PotentialModel const& m, double l, int n_r, RadialGrid const& grid,
                                        std::pair<double, double> bracket, double tol = 1e-9)
{
    validate(m);
    if (!(l >= 0.0) || n_r < 0 || !(tol > 0.0)) {
        throw validation_error("reference_integrator", "solve_bound_state requires l >= 0, n_r >= 0, tol > 0");
    }
    double const factor = m.factor();
    double lo = std::min(bracket.first, bracket.second) / factor;
    double hi = std::max(bracket.first, bracket.second) / factor;
    double const itol = tol / factor;

    detail::numerov_shooter shooter(m, l, grid);
    auto too_high = [&](double E) {
        auto t = shooter.run(E);
        if (t.nodes != n_r) return t.nodes > n_r;
        return t.cusp > 0.0;
    };

    int widen = 0;
    while (too_high(lo)) {
        double const span = std::max(hi - lo, 1e-3 * std::max(1.0, std::abs(lo)));
        hi = lo;
        lo -= span;
        if (++widen > 60) throw no_eigenvalue_in_bracket_error("reference_integrator", "lower bracket exhausted");
    }
    while (!too_high(hi)) {
        double const span = std::max(hi - lo, 1e-3 * std::max(1.0, std::abs(hi)));
        lo = hi;
        hi += span;
        if (++widen > 60) throw no_eigenvalue_in_bracket_error("reference_integrator", "upper bracket exhausted");
    }

    int iterations = 0;
    while (hi - lo > itol && iterations < 200) {
        double const mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (too_high(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
        ++iterations;
    }

    double const E = 0.5 * (lo + hi);
    auto const t = shooter.run(E);
    if (t.nodes != n_r) {
        throw no_eigenvalue_in_bracket_error("reference_integrator", "converged energy has " + std::to_string(t.nodes) +
                                                                         " nodes, expected " + std::to_string(n_r));
    }

    ShootingResult res;
    res.energy = E * factor;
    res.nodes = t.nodes;
    res.iterations = iterations;
    res.matching_residual = t.residual;
    res.grid = grid;
    res.u = shooter.joined(t.match);
    res.q.resize(res.u.size());
    double norm = 0.0;
    double const h = grid.h();
    for (std::size_t i = 0; i < res.u.size(); ++i) {
        double const q = grid.at(static_cast<int>(i));
        res.q[i] = q;
        double const wgt = (i == 0 || i + 1 == res.u.size()) ? 0.5 : 1.0;
        norm += wgt * res.u[i] * res.u[i] * q * h; // dq = q dx
    }
    double const inv = 1.0 / std::sqrt(norm);
    for (double& v : res.u) v *= inv;
    return res;
}

/// Fully automatic solve: brackets the state by node counting on energy-adapted grids,
/// then bisects on the grid built for the upper end of the bracket.
inline ShootingResult solve_bound_state(PotentialModel const& m, double l, int n_r, double tol = 1e-9,
                                        int steps = 200000)
{
    validate(m);
    auto [vmin, qloc] = detail::effective_minimum(m, l);
    (void)qloc;
    double const factor = m.factor();

    auto nodes_at = [&](double E) {
        auto grid = default_grid(m, l, E, steps);
        detail::numerov_shooter shooter(m, l, grid);
        auto t = shooter.run(E);
        if (t.nodes != n_r) return t.nodes > n_r;
        return t.cusp > 0.0;
    };

    double lo = vmin;
    double hi;
    if (detail::is_confining(m)) {
        double gap = std::max(1.0, std::abs(vmin));
        hi = vmin + gap;
        int guard = 0;
        while (!nodes_at(hi)) {
            lo = hi;
            gap *= 2.0;
            hi = vmin + gap;
            if (++guard > 60) throw no_eigenvalue_in_bracket_error("reference_integrator", "no upper bracket");
        }
    } else {
        if (!(vmin < 0.0)) {
            throw no_bound_state_error("reference_integrator", "effective potential has no attractive well");
        }
        hi = 0.5 * vmin;
        int guard = 0;
        while (!nodes_at(hi)) {
            lo = hi;
            hi *= 0.5;
            if (++guard > 60) throw no_eigenvalue_in_bracket_error("reference_integrator", "no upper bracket");
        }
    }
    auto grid = default_grid(m, l, hi, steps);
    return solve_bound_state(m, l, n_r, grid, {lo * factor, hi * factor}, tol);
}

} // namespace pslet
