#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "pslet/error.hpp"
#include "pslet/riccati.hpp"

namespace pslet {

/// Rational function p(x) / q(x) with q(0) = 1.
struct PadeApproximant
{
    std::vector<double> num; ///< p_0 .. p_N
    std::vector<double> den; ///< 1, q_1 .. q_M
    int N{0};
    int M{0};
    double condition{1.0}; ///< 1-norm condition estimate of the denominator system

    double operator()(double x) const
    {
        auto horner = [x](std::vector<double> const& c) {
            double s = 0.0;
            for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * x + *it;
            return s;
        };
        return horner(num) / horner(den);
    }

    /// First `count` Maclaurin coefficients of p/q.
    std::vector<double> maclaurin(std::size_t count) const
    {
        std::vector<double> c(count, 0.0);
        for (std::size_t i = 0; i < count; ++i) {
            double v = i < num.size() ? num[i] : 0.0;
            for (std::size_t j = 1; j < den.size() && j <= i; ++j) {
                v -= den[j] * c[i - j];
            }
            c[i] = v;
        }
        return c;
    }
};

inline constexpr double pade_condition_limit = 1e12;

namespace detail {

/// Gaussian elimination with partial pivoting on an n x n row-major system.
/// Returns false on an exactly singular pivot.
inline bool solve_dense(std::vector<double> A, std::vector<double>& b, std::size_t n)
{
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(A[r * n + col]) > std::abs(A[piv * n + col])) piv = r;
        }
        if (A[piv * n + col] == 0.0) return false;
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(A[col * n + c], A[piv * n + c]);
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            double const f = A[r * n + col] / A[col * n + col];
            for (std::size_t c = col; c < n; ++c) A[r * n + c] -= f * A[col * n + c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= A[i * n + c] * b[c];
        b[i] = s / A[i * n + i];
    }
    return true;
}

inline double norm1(std::vector<double> const& A, std::size_t n)
{
    double best = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += std::abs(A[r * n + c]);
        best = std::max(best, s);
    }
    return best;
}

/// ||A||_1 ||A^-1||_1, with the inverse formed column by column (n <= 5 here).
inline double condition_1(std::vector<double> const& A, std::size_t n)
{
    std::vector<double> inv(n * n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<double> e(n, 0.0);
        e[c] = 1.0;
        if (!solve_dense(A, e, n)) return std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < n; ++r) inv[r * n + c] = e[r];
    }
    return norm1(A, n) * norm1(inv, n);
}

/// Largest relative violation of q(x) c(x) - p(x) = O(x^(N+M+1)), scaled by the size of the
/// terms in each coefficient. Equivalent to matching the Maclaurin expansion, but it does
/// not run the expansion recurrence, which amplifies roundoff by the size of q_j.
inline double expansion_mismatch(PadeApproximant const& p, std::span<double const> series, std::size_t count)
{
    double err = 0.0, big = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        double s = i < p.num.size() ? -p.num[i] : 0.0;
        double mag = std::abs(s);
        for (std::size_t j = 0; j < p.den.size() && j <= i; ++j) {
            s += p.den[j] * series[i - j];
            mag += std::abs(p.den[j] * series[i - j]);
        }
        err = std::max(err, std::abs(s));
        big = std::max(big, mag);
    }
    return big > 0.0 ? err / big : err;
}

inline PadeApproximant fit_exact_degree(std::span<double const> c, int N, int M, bool& ok)
{
    auto coef = [&](int i) { return i >= 0 ? c[static_cast<std::size_t>(i)] : 0.0; };
    PadeApproximant p;
    p.N = N;
    p.M = M;
    p.den.assign(static_cast<std::size_t>(M) + 1, 0.0);
    p.den[0] = 1.0;
    ok = true;
    if (M > 0) {
        auto const n = static_cast<std::size_t>(M);
        std::vector<double> A(n * n);
        std::vector<double> rhs(n);
        // sum_{j=1..M} q_j c_{N+i-j} = -c_{N+i},  i = 1..M
        for (int i = 1; i <= M; ++i) {
            for (int j = 1; j <= M; ++j) {
                A[static_cast<std::size_t>((i - 1) * M + (j - 1))] = coef(N + i - j);
            }
            rhs[static_cast<std::size_t>(i - 1)] = -coef(N + i);
        }
        p.condition = condition_1(A, n);
        if (!(p.condition <= pade_condition_limit) || !solve_dense(A, rhs, n)) {
            ok = false;
            return p;
        }
        for (std::size_t j = 0; j < n; ++j) p.den[j + 1] = rhs[j];
    }
    p.num.assign(static_cast<std::size_t>(N) + 1, 0.0);
    for (int i = 0; i <= N; ++i) {
        double s = 0.0;
        for (int j = 0; j <= std::min(i, M); ++j) s += p.den[static_cast<std::size_t>(j)] * coef(i - j);
        p.num[static_cast<std::size_t>(i)] = s;
    }
    return p;
}

} // namespace detail

/// [N/M] Pade approximant of the power series c_0 + c_1 x + ... (needs N+M+1 terms).
///
/// If the M x M Toeplitz system is singular or its condition estimate exceeds 1e12,
/// lower denominator degrees are tried; a reduced fit is accepted only when its
/// expansion still reproduces the series through order N+M. The all-zero series
/// therefore yields the zero function.
inline PadeApproximant fit_pade(std::span<double const> series, int N, int M)
{
    if (N < 0 || M < 0) {
        throw validation_error("resummation", "Pade degrees must be non-negative");
    }
    auto const need = static_cast<std::size_t>(N + M + 1);
    if (series.size() < need) {
        throw capacity_error("resummation", "[" + std::to_string(N) + "/" + std::to_string(M) + "] needs " +
                                                std::to_string(need) + " coefficients, have " +
                                                std::to_string(series.size()));
    }
    for (std::size_t i = 0; i < need; ++i) {
        if (!std::isfinite(series[i])) {
            throw validation_error("resummation", "non-finite series coefficient");
        }
    }
    auto const head = series.first(need);

    double best_mismatch = std::numeric_limits<double>::infinity();
    for (int m = M; m >= 0; --m) {
        bool ok = false;
        auto p = detail::fit_exact_degree(head, N, m, ok);
        if (!ok) continue;
        double const mismatch = detail::expansion_mismatch(p, head, need);
        if (mismatch <= 1e-9) {
            p.M = static_cast<int>(p.den.size()) - 1;
            return p;
        }
        best_mismatch = std::min(best_mismatch, mismatch);
        if (m == M) {
            // A regular full-degree system that fails the match is a precision problem, not degeneracy.
            break;
        }
    }
    throw degenerate_table_error("resummation",
                                 "[" + std::to_string(N) + "/" + std::to_string(M) + "] Pade table is degenerate",
                                 best_mismatch);
}

inline PadeApproximant fit_pade(std::vector<double> const& series, int N, int M)
{
    return fit_pade(std::span<double const>(series.data(), series.size()), N, M);
}

/// Corrections smaller than this fraction of the leading term are roundoff and are flushed to zero
/// before fitting.
inline constexpr double correction_flush_ratio = 1e-13;

/// factor * [lbar^2 E^(-2) + P_N^M(1/lbar)], P fitted to c_n = E^(n).
inline double resummed_energy(EnergySeries const& e, int N, int M, PadeApproximant* fitted = nullptr)
{
    std::vector<double> c = e.corrections;
    double const floor = correction_flush_ratio * std::max(1.0, std::abs(e.leading()));
    for (double& v : c) {
        if (std::abs(v) < floor) v = 0.0;
    }
    auto p = fit_pade(c, N, M);
    double const value = e.convention_factor * (e.leading() + p(1.0 / e.lbar));
    if (fitted) *fitted = std::move(p);
    return value;
}

} // namespace pslet
