#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pslet/error.hpp"
#include "pslet/expansion.hpp"
#include "pslet/parity_polynomial.hpp"
#include "pslet/potential.hpp"

namespace pslet {

/// Energy coefficients of E = lbar^2 E^(-2) + sum_n E^(n) lbar^-n (E^(-1) = 0 by choice of beta).
struct EnergySeries
{
    double e_minus2{0.0};
    std::vector<double> corrections; ///< E^(0), E^(1), ...
    double lbar{1.0};
    double q0{0.0};
    double convention_factor{1.0};

    /// lbar^2 E^(-2) before the convention factor.
    double leading() const noexcept { return lbar * lbar * e_minus2; }

    /// factor * (lbar^2 E^(-2) + sum_{n <= K} E^(n) / lbar^n).
    double truncated(int K) const
    {
        double s = leading();
        double scale = 1.0;
        int const top = std::min<int>(K, static_cast<int>(corrections.size()) - 1);
        for (int n = 0; n <= top; ++n) {
            s += corrections[static_cast<std::size_t>(n)] * scale;
            scale /= lbar;
        }
        return convention_factor * s;
    }

    /// Index n of the correction term E^(n)/lbar^n with the smallest magnitude.
    int smallest_term_index() const
    {
        int best = -1;
        double best_mag = 0.0;
        double scale = 1.0;
        for (std::size_t n = 0; n < corrections.size(); ++n) {
            double const mag = std::abs(corrections[n] * scale);
            if (best < 0 || mag < best_mag) {
                best = static_cast<int>(n);
                best_mag = mag;
            }
            scale /= lbar;
        }
        return best;
    }
};

/// Working state of the order-by-order recursion for the log-derivative of the
/// nodeless wavefunction,
///   d/dx ln Psi = sum_n U^(n)(x) lbar^(-n/2) + sum_n G^(n)(x) lbar^(-(n+1)/2).
///
/// Order k of the Riccati equation collects W_k = U^(k) + G^(k-1). Parity bookkeeping
/// makes W_k odd for even k and even for odd k, so U^(n) and G^(n) are empty for odd n.
struct RiccatiState
{
    PotentialModel model;
    ExpansionPoint pt;
    TaylorJet jet;
    std::vector<ParityPolynomial> U;    ///< odd polynomials, U[0] = -w x
    std::vector<ParityPolynomial> G;    ///< even polynomials
    std::vector<double> order_eigen;    ///< eigenvalue at power lbar^(-k/2) of the scaled equation
    std::vector<double> lambdas;        ///< lambda_0^(0), lambda_0^(1), ...
    std::vector<ParityPolynomial> vcache;
    std::vector<double> residuals;      ///< relative re-substitution residual per order
    int solved_order{0};

    double B1() const { return std::pow(pt.q0, 5) * jet.coeffs.at(3) / pt.bigQ - 2.0; }
    double B2() const { return 2.5 + std::pow(pt.q0, 6) * jet.coeffs.at(4) / pt.bigQ; }
};

namespace detail {

using dense_poly = std::vector<double>;

inline void axpy(dense_poly& y, double alpha, dense_poly const& x)
{
    if (y.size() < x.size()) {
        y.resize(x.size(), 0.0);
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] += alpha * x[i];
    }
}

inline dense_poly multiply(dense_poly const& a, dense_poly const& b)
{
    if (a.empty() || b.empty()) {
        return {};
    }
    dense_poly out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) {
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

inline dense_poly derivative(dense_poly const& a)
{
    if (a.size() <= 1) {
        return {};
    }
    dense_poly out(a.size() - 1);
    for (std::size_t i = 1; i < a.size(); ++i) {
        out[i - 1] = static_cast<double>(i) * a[i];
    }
    return out;
}

inline double max_abs(dense_poly const& a)
{
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

/// Combined order-i unknown W_i = U^(i) + G^(i-1) as a dense polynomial.
inline dense_poly order_term(RiccatiState const& s, int i)
{
    auto const idx = static_cast<std::size_t>(i);
    dense_poly out = s.U.at(idx).to_dense();
    if (i >= 1) {
        axpy(out, 1.0, s.G.at(idx - 1).to_dense());
    }
    return out;
}

inline void ensure_jet(RiccatiState& s, int order)
{
    if (s.jet.order() < order) {
        s.jet = taylor_jet(s.model, s.pt.q0, order);
    }
}

} // namespace detail

/// Order-n piece v^(n)(x) of the scaled effective potential.
///   v^(0) = w^2 x^2 / 2 + (2 beta + 1)/2
///   v^(1) = -(2 beta + 1) x + [q0^5 t_3 / Q - 2] x^3
///   v^(n) = (-1)^n [ beta(beta+1)(n-1)/2 x^(n-2) + (2 beta+1)(n+1)/2 x^n + (n+3)/2 x^(n+2) ]
///           + q0^(n+4) t_(n+2) / Q x^(n+2)                              (n >= 2)
/// with t_k the 1/k!-scaled jet coefficients.
inline ParityPolynomial build_v(RiccatiState const& s, int n)
{
    if (n < 0) {
        throw validation_error("riccati_engine", "negative order");
    }
    if (s.jet.order() < n + 2) {
        throw capacity_error("riccati_engine", "jet depth " + std::to_string(s.jet.order()) + " too shallow for v^(" +
                                                   std::to_string(n) + ")");
    }
    double const w = s.pt.w;
    double const beta = s.pt.beta;
    double const q0 = s.pt.q0;
    double const Q = s.pt.bigQ;
    auto const t = [&](int k) { return s.jet.coeffs[static_cast<std::size_t>(k)]; };

    if (n == 0) {
        return ParityPolynomial(parity::even, {(2.0 * beta + 1.0) / 2.0, 0.5 * w * w});
    }
    if (n == 1) {
        return ParityPolynomial(parity::odd, {-(2.0 * beta + 1.0), std::pow(q0, 5) * t(3) / Q - 2.0});
    }
    double const sign = n % 2 == 0 ? 1.0 : -1.0;
    std::vector<double> dense(static_cast<std::size_t>(n) + 3, 0.0);
    dense[static_cast<std::size_t>(n - 2)] = sign * beta * (beta + 1.0) * (n - 1) / 2.0;
    dense[static_cast<std::size_t>(n)] = sign * (2.0 * beta + 1.0) * (n + 1) / 2.0;
    dense[static_cast<std::size_t>(n + 2)] = sign * (n + 3) / 2.0 + std::pow(q0, n + 4) * t(n + 2) / Q;
    return ParityPolynomial::from_dense(n % 2 == 0 ? parity::even : parity::odd, dense);
}

/// Sets up the recursion at a solved expansion point with U^(0) = -w x installed.
/// `max_K` sizes the jet for corrections E^(0..max_K).
inline RiccatiState make_riccati_state(PotentialModel const& m, ExpansionPoint const& pt, int max_K = 7)
{
    if (pt.n_r != 0) {
        throw unsupported_state_error("riccati_engine", "the nodeless ansatz supports n_r = 0 only (got n_r = " +
                                                            std::to_string(pt.n_r) + ")");
    }
    RiccatiState s;
    s.model = m;
    s.pt = pt;
    s.jet = taylor_jet(m, pt.q0, 2 * std::max(max_K, 0) + 4);
    s.U.emplace_back(parity::odd, std::vector<double>{-pt.w});
    s.vcache.push_back(build_v(s, 0));
    // Order 0: -U0'/2 - U0^2/2 + v0 = w/2 + beta + 1/2, zero by the choice of beta.
    s.order_eigen.push_back(0.0);
    s.residuals.push_back(std::abs(0.5 * pt.w + pt.beta + 0.5) / std::max(1.0, std::abs(pt.beta)));
    return s;
}

/// Solves order k of the Riccati equation for W_k given W_0 .. W_(k-1).
///
/// Per power x^j the unknown coefficients a_j of W_k satisfy
///   -(j+1)/2 a_(j+1) + w a_(j-1) + r_j = eps_k [j = 0]
/// with r the known part of the order-k slice. Solving from the top power down
/// determines W_k; the constant equation yields the eigenvalue eps_k.
inline void solve_order(RiccatiState& s, int k)
{
    if (k < 1) {
        throw validation_error("riccati_engine", "solve_order needs k >= 1");
    }
    if (s.solved_order != k - 1) {
        throw validation_error("riccati_engine", "orders must be solved in sequence (next is " +
                                                     std::to_string(s.solved_order + 1) + ")");
    }
    detail::ensure_jet(s, k + 2);
    if (static_cast<int>(s.vcache.size()) <= k) {
        s.vcache.push_back(build_v(s, k));
    }

    double const w = s.pt.w;
    detail::dense_poly const v = s.vcache[static_cast<std::size_t>(k)].to_dense();
    detail::dense_poly r = v;
    double scale = detail::max_abs(v);
    for (int i = 1; i < k; ++i) {
        auto prod = detail::multiply(detail::order_term(s, i), detail::order_term(s, k - i));
        scale = std::max(scale, 0.5 * detail::max_abs(prod));
        detail::axpy(r, -0.5, prod);
    }

    std::size_t const top = static_cast<std::size_t>(k) + 2;
    r.resize(top + 1, 0.0);
    std::vector<double> a(top + 2, 0.0);
    for (std::size_t j = top; j >= 1; --j) {
        a[j - 1] = (-r[j] + 0.5 * static_cast<double>(j + 1) * a[j + 1]) / w;
    }
    double const eps = r[0] - 0.5 * a[1];
    a.resize(top);

    bool const even_k = k % 2 == 0;
    auto solved = ParityPolynomial::from_dense(even_k ? parity::odd : parity::even, a);
    if (!solved.all_finite() || !std::isfinite(eps)) {
        throw internal_consistency_error("riccati_engine", "non-finite coefficient at order " + std::to_string(k));
    }
    if (even_k) {
        s.U.push_back(std::move(solved));
        s.G.emplace_back(parity::even);
        s.order_eigen.push_back(eps);
        double const beta = s.pt.beta;
        s.lambdas.push_back(k == 2 ? eps - beta * (beta + 1.0) / 2.0 : eps);
    } else {
        s.U.emplace_back(parity::odd);
        s.G.push_back(std::move(solved));
        s.order_eigen.push_back(eps);
    }
    s.solved_order = k;

    // Re-substitute the full order-k slice: -W_k'/2 - (1/2) sum_{i+j=k} W_i W_j + v^(k) - eps_k.
    auto const Wk = detail::order_term(s, k);
    detail::dense_poly res = v;
    res.resize(top + 1, 0.0);
    res[0] -= eps;
    auto dW = detail::derivative(Wk);
    scale = std::max(scale, 0.5 * detail::max_abs(dW));
    detail::axpy(res, -0.5, dW);
    for (int i = 0; i <= k; ++i) {
        auto prod = detail::multiply(detail::order_term(s, i), detail::order_term(s, k - i));
        scale = std::max(scale, 0.5 * detail::max_abs(prod));
        detail::axpy(res, -0.5, prod);
    }
    double const rel = detail::max_abs(res) / std::max(scale, std::numeric_limits<double>::min());
    s.residuals.push_back(rel);
    if (!(rel <= 1e-10)) {
        throw internal_consistency_error("riccati_engine", "order " + std::to_string(k) +
                                                               " re-substitution residual " + std::to_string(rel));
    }
}

inline void solve_through(RiccatiState& s, int k)
{
    while (s.solved_order < k) {
        solve_order(s, s.solved_order + 1);
    }
}

/// E^(-2) and E^(0..K): E^(n) = eps_(2n+2) / q0^2, where eps_2 = beta(beta+1)/2 + lambda_0^(0).
inline EnergySeries energy_corrections(RiccatiState& s, int K)
{
    if (s.pt.n_r != 0) {
        throw unsupported_state_error("riccati_engine", "energy corrections need n_r = 0");
    }
    if (K < 0) {
        throw validation_error("riccati_engine", "negative correction order");
    }
    solve_through(s, 2 * K + 2);
    EnergySeries e;
    e.e_minus2 = s.pt.e_minus2;
    e.lbar = s.pt.lbar;
    e.q0 = s.pt.q0;
    e.convention_factor = s.model.factor();
    double const q02 = s.pt.q0 * s.pt.q0;
    for (int n = 0; n <= K; ++n) {
        e.corrections.push_back(s.order_eigen[static_cast<std::size_t>(2 * n + 2)] / q02);
    }
    return e;
}

/// ln Psi(q) - ln Psi(q0), with U^(n), G^(n) included for n <= K.
inline double log_wavefunction(RiccatiState const& s, double q, int K)
{
    if (!(q > 0.0)) {
        throw domain_error("riccati_engine", "wavefunction evaluated at q <= 0");
    }
    if (s.solved_order < K + 1) {
        throw capacity_error("riccati_engine", "wavefunction order " + std::to_string(K) + " needs order " +
                                                   std::to_string(K + 1) + " solved");
    }
    double const lbar = s.pt.lbar;
    double const x = std::sqrt(lbar) * (q - s.pt.q0) / s.pt.q0;
    double const step = 1.0 / std::sqrt(lbar);
    double sum = 0.0;
    double scale = 1.0;
    for (int n = 0; n <= K; ++n) {
        auto const idx = static_cast<std::size_t>(n);
        sum += s.U[idx].integral(x) * scale + s.G[idx].integral(x) * scale * step;
        scale *= step;
    }
    return sum;
}

/// Unnormalized nodeless wavefunction, equal to 1 at q = q0.
inline double wavefunction(RiccatiState const& s, double q, int K)
{
    return std::exp(log_wavefunction(s, q, K));
}

namespace detail {

inline double adaptive_simpson(std::function<double(double)> const& f, double a, double b, double fa, double fm,
                               double fb, double whole, double tol, int depth)
{
    double const m = 0.5 * (a + b);
    double const lm = 0.5 * (a + m);
    double const rm = 0.5 * (m + b);
    double const flm = f(lm);
    double const frm = f(rm);
    double const left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double const right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double const diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol) {
        return left + right + diff / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

/// Integral of Psi^2 over (0, q_max] by adaptive Simpson; the expansion itself never normalizes.
/// Panels split at q0 where Psi = 1, so `tol` is effectively relative to the peak.
/// Throws numerical_error when the truncated series overflows inside the range.
inline double wavefunction_norm2(RiccatiState const& s, int K, double q_max, double tol = 1e-10)
{
    if (!(q_max > 0.0) || !(tol > 0.0)) {
        throw validation_error("riccati_engine", "wavefunction_norm2 needs q_max > 0 and tol > 0");
    }
    auto f = [&](double q) {
        if (q <= 0.0) return 0.0;
        return std::exp(2.0 * log_wavefunction(s, q, K));
    };
    auto panel = [&](double a, double b) {
        double const fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
        double const whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        return detail::adaptive_simpson(f, a, b, fa, fm, fb, whole, tol * (b - a), 24);
    };
    double const q0 = s.pt.q0;
    double const total = q_max <= q0 ? panel(0.0, q_max) : panel(0.0, q0) + panel(q0, q_max);
    if (!std::isfinite(total)) {
        throw numerical_error("riccati_engine", "Psi^2 overflows on (0, " + std::to_string(q_max) +
                                                    "]; the series diverges there");
    }
    return total;
}

} // namespace pslet
