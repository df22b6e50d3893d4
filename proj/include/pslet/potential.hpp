#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "pslet/error.hpp"

namespace pslet {

enum class potential_kind
{
    spiked_ho,         ///< V(q) = (q^2 + a q^-b) / 2
    truncated_coulomb, ///< V(q) = -(q^2 + c^2)^(-1/2)
    pure_ho,           ///< spiked_ho with a = 0
    pure_coulomb       ///< truncated_coulomb with c = 0
};

/// How energies are reported. The expansion itself always works with
/// H = -1/2 d^2/dq^2 + l(l+1)/(2q^2) + V(q); `doubled` multiplies final energies by 2,
/// i.e. reports eigenvalues of -d^2/dq^2 + l(l+1)/q^2 + 2V(q).
enum class scale_convention
{
    half_kinetic,
    doubled
};

inline double convention_factor(scale_convention c) noexcept
{
    return c == scale_convention::doubled ? 2.0 : 1.0;
}

inline std::string to_string(potential_kind k)
{
    switch (k) {
        case potential_kind::spiked_ho: return "spiked";
        case potential_kind::truncated_coulomb: return "tcoulomb";
        case potential_kind::pure_ho: return "ho";
        case potential_kind::pure_coulomb: return "coulomb";
    }
    return "?";
}

inline std::string to_string(scale_convention c)
{
    return c == scale_convention::doubled ? "doubled" : "half";
}

struct PotentialModel
{
    potential_kind kind{potential_kind::pure_ho};
    double a{0.0}; ///< spike strength
    double b{0.0}; ///< spike exponent
    double c{0.0}; ///< truncation length
    scale_convention convention{scale_convention::half_kinetic};

    double factor() const noexcept { return convention_factor(convention); }
};

/// Throws validation_error if the parameters violate the family constraints.
inline void validate(PotentialModel const& m)
{
    auto finite = [](double v) { return std::isfinite(v); };
    switch (m.kind) {
        case potential_kind::spiked_ho:
            if (!(finite(m.a) && m.a > 0.0) || !(finite(m.b) && m.b > 0.0)) {
                throw validation_error("potential_models", "spiked oscillator requires a > 0 and b > 0");
            }
            break;
        case potential_kind::truncated_coulomb:
            if (!(finite(m.c) && m.c > 0.0)) {
                throw validation_error("potential_models", "truncated Coulomb requires c > 0");
            }
            break;
        case potential_kind::pure_ho:
            if (m.a != 0.0) {
                throw validation_error("potential_models", "pure oscillator requires a = 0");
            }
            break;
        case potential_kind::pure_coulomb:
            if (m.c != 0.0) {
                throw validation_error("potential_models", "pure Coulomb requires c = 0");
            }
            break;
    }
}

inline PotentialModel spiked_ho(double a, double b, scale_convention conv = scale_convention::half_kinetic)
{
    PotentialModel m{potential_kind::spiked_ho, a, b, 0.0, conv};
    validate(m);
    return m;
}

inline PotentialModel truncated_coulomb(double c, scale_convention conv = scale_convention::half_kinetic)
{
    PotentialModel m{potential_kind::truncated_coulomb, 0.0, 0.0, c, conv};
    validate(m);
    return m;
}

inline PotentialModel pure_ho(scale_convention conv = scale_convention::half_kinetic)
{
    return PotentialModel{potential_kind::pure_ho, 0.0, 0.0, 0.0, conv};
}

inline PotentialModel pure_coulomb(scale_convention conv = scale_convention::half_kinetic)
{
    return PotentialModel{potential_kind::pure_coulomb, 0.0, 0.0, 0.0, conv};
}

inline bool is_oscillator_family(PotentialModel const& m) noexcept
{
    return m.kind == potential_kind::spiked_ho || m.kind == potential_kind::pure_ho;
}

inline double eval_value(PotentialModel const& m, double q)
{
    if (!(q > 0.0)) {
        throw domain_error("potential_models", "potential evaluated at q <= 0");
    }
    validate(m);
    if (is_oscillator_family(m)) {
        double v = 0.5 * q * q;
        if (m.a != 0.0) {
            v += 0.5 * m.a * std::pow(q, -m.b);
        }
        return v;
    }
    return -1.0 / std::sqrt(q * q + m.c * m.c);
}

/// Taylor data of V about `point`: coeffs[n] = V^(n)(point) / n!.
struct TaylorJet
{
    double point{0.0};
    std::vector<double> coeffs;

    int order() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
    double value() const { return coeffs.at(0); }

    /// n-th derivative reconstructed from the scaled coefficient.
    double derivative(int n) const
    {
        double d = coeffs.at(static_cast<std::size_t>(n));
        for (int k = 2; k <= n; ++k) {
            d *= k;
        }
        return d;
    }

    /// Degree-order() Taylor polynomial evaluated at point + h.
    double evaluate(double h) const
    {
        double s = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
            s = s * h + *it;
        }
        return s;
    }
};

inline constexpr int default_jet_cap = 64;

namespace detail {

inline void check_jet_request(double q0, int order, int cap)
{
    if (!(q0 > 0.0)) {
        throw domain_error("potential_models", "Taylor jet requested at q0 <= 0");
    }
    if (order < 0 || order > cap) {
        throw capacity_error("potential_models",
                             "jet order " + std::to_string(order) + " outside [0, " + std::to_string(cap) + "]");
    }
}

} // namespace detail

/// Scaled Taylor coefficients of q^-b about q0. Uses
/// t_n = t_{n-1} * (-(b + n - 1) / n) / q0, so no factorial is ever formed.
inline TaylorJet power_law_jet(double b, double q0, int order, int cap = default_jet_cap)
{
    detail::check_jet_request(q0, order, cap);
    TaylorJet jet{q0, std::vector<double>(static_cast<std::size_t>(order) + 1)};
    double t = std::pow(q0, -b);
    for (int n = 0; n <= order; ++n) {
        jet.coeffs[static_cast<std::size_t>(n)] = t;
        t *= -(b + n) / ((n + 1) * q0);
    }
    return jet;
}

/// Scaled Taylor coefficients of V about q0 from closed forms and exact recurrences.
///
/// For the Coulomb family f = -(q^2 + c^2)^(-1/2) satisfies (q^2 + c^2) f' + q f = 0;
/// matching powers of h in the expansion about q0 gives
///   (q0^2 + c^2)(n+1) t_{n+1} + (2n+1) q0 t_n + n t_{n-1} = 0.
inline TaylorJet taylor_jet(PotentialModel const& m, double q0, int order, int cap = default_jet_cap)
{
    detail::check_jet_request(q0, order, cap);
    validate(m);
    auto const size = static_cast<std::size_t>(order) + 1;

    if (is_oscillator_family(m)) {
        TaylorJet jet{q0, std::vector<double>(size, 0.0)};
        if (m.a != 0.0) {
            auto spike = power_law_jet(m.b, q0, order, cap);
            for (std::size_t n = 0; n < size; ++n) {
                jet.coeffs[n] = 0.5 * m.a * spike.coeffs[n];
            }
        }
        jet.coeffs[0] += 0.5 * q0 * q0;
        if (order >= 1) jet.coeffs[1] += q0;
        if (order >= 2) jet.coeffs[2] += 0.5;
        return jet;
    }

    double const s = q0 * q0 + m.c * m.c;
    TaylorJet jet{q0, std::vector<double>(size, 0.0)};
    jet.coeffs[0] = -1.0 / std::sqrt(s);
    for (int n = 0; n < order; ++n) {
        double const prev = n > 0 ? jet.coeffs[static_cast<std::size_t>(n - 1)] : 0.0;
        jet.coeffs[static_cast<std::size_t>(n + 1)] =
            -((2 * n + 1) * q0 * jet.coeffs[static_cast<std::size_t>(n)] + n * prev) / (s * (n + 1));
    }
    return jet;
}

} // namespace pslet
