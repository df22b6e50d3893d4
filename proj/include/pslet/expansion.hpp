#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pslet/error.hpp"
#include "pslet/potential.hpp"

namespace pslet {

/// The expansion point and the quantities it fixes. `l` is real so that the
/// effective (non-integer) angular momentum of the b = 2 spiked oscillator
/// can be fed through the same machinery.
struct ExpansionPoint
{
    double q0{0.0};
    double w{0.0};
    double beta{0.0};
    double lbar{0.0};
    double bigQ{0.0}; ///< lbar^2
    double l{0.0};
    int n_r{0};
    double e_minus2{0.0}; ///< 1/(2 q0^2) + V(q0)/Q
    std::vector<double> rejected_roots;

    /// l - beta - sqrt(q0^3 V'(q0)); zero at an exact solve.
    double root_residual{0.0};

    /// [(2 beta + 1)/2 + (n_r + 1/2) w] / q0^2; vanishes by the choice of beta.
    double e_minus1() const { return ((2.0 * beta + 1.0) / 2.0 + (n_r + 0.5) * w) / (q0 * q0); }
};

/// sqrt(3 + q0 V''(q0) / V'(q0)) from a jet of order >= 2.
inline double frequency_w(TaylorJet const& jet)
{
    if (jet.order() < 2) {
        throw capacity_error("expansion_setup", "frequency needs a jet of order >= 2");
    }
    double const v1 = jet.coeffs[1];
    double const v2 = 2.0 * jet.coeffs[2];
    if (v1 == 0.0) {
        throw singular_point_error("expansion_setup", "V'(q0) = 0: frequency undefined");
    }
    double const radicand = 3.0 + jet.point * v2 / v1;
    if (!(radicand > 0.0)) {
        throw no_harmonic_minimum_error("expansion_setup", "3 + q0 V''/V' <= 0: no harmonic minimum");
    }
    return std::sqrt(radicand);
}

/// Lowest q0 at which V'(q0) > 0 can hold (the solver brackets strictly above it).
inline double admissible_q0_floor(PotentialModel const& m)
{
    if (m.kind == potential_kind::spiked_ho) {
        return std::pow(m.a * m.b / 2.0, 1.0 / (m.b + 2.0));
    }
    return 0.0;
}

struct SolveOptions
{
    double tol{1e-12};
    int panels{64};
    double upper_cap{1e6};
};

namespace detail {

/// F(q0) = sqrt(q0^3 V') - l + beta(q0); nullopt where w or the root is undefined.
inline std::optional<double> shift_residual(PotentialModel const& m, double l, int n_r, double q0)
{
    auto const jet = taylor_jet(m, q0, 2);
    double const v1 = jet.coeffs[1];
    double const v2 = 2.0 * jet.coeffs[2];
    if (!(v1 > 0.0)) {
        return std::nullopt;
    }
    double const radicand = 3.0 + q0 * v2 / v1;
    if (!(radicand > 0.0)) {
        return std::nullopt;
    }
    double const beta = -(0.5 + (n_r + 0.5) * std::sqrt(radicand));
    return std::sqrt(q0 * q0 * q0 * v1) - l + beta;
}

inline ExpansionPoint make_point(PotentialModel const& m, double l, int n_r, double q0)
{
    auto const jet = taylor_jet(m, q0, 2);
    ExpansionPoint pt;
    pt.q0 = q0;
    pt.l = l;
    pt.n_r = n_r;
    pt.w = frequency_w(jet);
    pt.beta = -(0.5 + (n_r + 0.5) * pt.w);
    pt.lbar = l - pt.beta;
    pt.bigQ = pt.lbar * pt.lbar;
    pt.e_minus2 = 1.0 / (2.0 * q0 * q0) + jet.coeffs[0] / pt.bigQ;
    pt.root_residual = pt.lbar - std::sqrt(q0 * q0 * q0 * jet.coeffs[1]);
    return pt;
}

} // namespace detail

/// Finds q0 solving l - beta(q0) = sqrt(q0^3 V'(q0)) with beta = -[1/2 + (n_r + 1/2) w(q0)].
///
/// The admissible interval is scanned on a logarithmic grid; every sign change is
/// refined by bisection and the root with the lowest E^(-2) is kept. Rejected roots
/// are listed in the returned point.
inline ExpansionPoint solve_q0(PotentialModel const& m, double l, int n_r, SolveOptions const& opt = {})
{
    validate(m);
    if (!(l >= 0.0) || n_r < 0 || !(opt.tol > 0.0)) {
        throw validation_error("expansion_setup", "solve_q0 requires l >= 0, n_r >= 0, tol > 0");
    }

    auto F = [&](double q) { return detail::shift_residual(m, l, n_r, q); };

    double const floor = admissible_q0_floor(m);
    double lo = floor > 0.0 ? floor * (1.0 + 1e-9) : 1e-6;
    // Move the lower end into the region where F is defined.
    {
        int guard = 0;
        while (!F(lo) && guard++ < 200) {
            lo *= 1.1;
        }
        if (!F(lo)) {
            throw no_harmonic_minimum_error("expansion_setup", "frequency undefined throughout the scanned domain");
        }
    }
    double hi = std::max(2.0 * lo, 1.0);
    while (true) {
        auto f = F(hi);
        if (f && *f > 0.0) {
            break;
        }
        hi *= 2.0;
        if (hi > opt.upper_cap) {
            throw no_bound_state_error("expansion_setup", "no sign change of the shift equation below q0 = 1e6");
        }
    }

    std::vector<double> roots;
    double const ratio = std::pow(hi / lo, 1.0 / opt.panels);
    double a = lo;
    auto fa = F(a);
    for (int i = 1; i <= opt.panels; ++i) {
        double const b = i == opt.panels ? hi : lo * std::pow(ratio, i);
        auto fb = F(b);
        if (fa && fb && (*fa == 0.0 || (*fa < 0.0) != (*fb < 0.0))) {
            double x0 = a, x1 = b;
            double f0 = *fa;
            if (f0 == 0.0) {
                roots.push_back(x0);
            } else {
                // Bisect to the resolution of double precision; later orders amplify any error in q0.
                while (x1 - x0 > 0.0) {
                    double const mid = 0.5 * (x0 + x1);
                    if (mid <= x0 || mid >= x1) {
                        break;
                    }
                    auto fm = F(mid);
                    if (!fm) {
                        break;
                    }
                    if ((*fm < 0.0) == (f0 < 0.0)) {
                        x0 = mid;
                        f0 = *fm;
                    } else {
                        x1 = mid;
                    }
                }
                roots.push_back(0.5 * (x0 + x1));
            }
        }
        a = b;
        fa = fb;
    }
    if (roots.empty()) {
        throw no_bound_state_error("expansion_setup", "shift equation has no root in the admissible domain");
    }

    // Curvature of E^(-2) at a root equals w^2 / q0^4 > 0, so every accepted root is a minimum.
    std::optional<ExpansionPoint> best;
    std::vector<double> rejected;
    for (double r : roots) {
        auto pt = detail::make_point(m, l, n_r, r);
        if (!(pt.lbar > 0.0)) {
            rejected.push_back(r);
            continue;
        }
        if (!best || pt.e_minus2 < best->e_minus2) {
            if (best) rejected.push_back(best->q0);
            best = pt;
        } else {
            rejected.push_back(r);
        }
    }
    if (!best) {
        throw no_bound_state_error("expansion_setup", "no root with positive shifted quantum number");
    }
    best->rejected_roots = std::move(rejected);
    // Bisection runs to the last representable bracket; tol only bounds what is accepted.
    double const allowed = std::max(10.0 * opt.tol, 1e-14) * std::max(1.0, best->lbar);
    if (!(std::abs(best->root_residual) <= allowed)) {
        throw internal_consistency_error("expansion_setup", "shift equation residual " +
                                                                std::to_string(best->root_residual) +
                                                                " exceeds tolerance");
    }
    return *best;
}

/// lbar^2 E^(-2) = lbar^2 / (2 q0^2) + V(q0): the energy of a classical particle with
/// angular momentum lbar on a circular orbit of radius q0.
inline double leading_energy(ExpansionPoint const& pt, PotentialModel const& m)
{
    if (!(pt.q0 > 0.0) || !(pt.lbar > 0.0)) {
        throw validation_error("expansion_setup", "invalid expansion point");
    }
    return pt.bigQ / (2.0 * pt.q0 * pt.q0) + eval_value(m, pt.q0);
}

} // namespace pslet
