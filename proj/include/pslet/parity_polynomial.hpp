#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace pslet {

enum class parity
{
    odd,
    even
};

/// Polynomial containing powers of a single parity only.
///
/// odd:  coeffs[m] multiplies x^(2m+1)   (m = 0, 1, ...)
/// even: coeffs[m] multiplies x^(2m)     (m = 0, 1, ...)
///
/// Powers of the other parity have no storage at all.
class ParityPolynomial
{
  public:
    ParityPolynomial() = default;

    explicit ParityPolynomial(parity p, std::vector<double> coeffs = {})
        : parity_(p)
        , coeffs_(std::move(coeffs))
    {
    }

    /// Takes the matching-parity entries of a dense coefficient vector (index = power).
    static ParityPolynomial from_dense(parity p, std::vector<double> const& dense)
    {
        ParityPolynomial out(p);
        for (std::size_t j = p == parity::odd ? 1 : 0; j < dense.size(); j += 2) {
            out.coeffs_.push_back(dense[j]);
        }
        out.trim();
        return out;
    }

    parity kind() const noexcept { return parity_; }
    std::vector<double> const& coeffs() const noexcept { return coeffs_; }
    bool empty() const noexcept { return coeffs_.empty(); }

    int power_of(std::size_t m) const noexcept
    {
        return static_cast<int>(2 * m) + (parity_ == parity::odd ? 1 : 0);
    }

    /// Coefficient of x^j (zero for powers of the other parity or beyond the degree).
    double coeff(int j) const noexcept
    {
        if (j < 0 || ((j % 2 == 1) != (parity_ == parity::odd))) {
            return 0.0;
        }
        auto const m = static_cast<std::size_t>(j / 2);
        return m < coeffs_.size() ? coeffs_[m] : 0.0;
    }

    /// Highest power present, -1 for the zero polynomial.
    int degree() const noexcept { return coeffs_.empty() ? -1 : power_of(coeffs_.size() - 1); }

    std::vector<double> to_dense() const
    {
        std::vector<double> dense(static_cast<std::size_t>(std::max(degree() + 1, 0)), 0.0);
        for (std::size_t m = 0; m < coeffs_.size(); ++m) {
            dense[static_cast<std::size_t>(power_of(m))] = coeffs_[m];
        }
        return dense;
    }

    double operator()(double x) const noexcept
    {
        double const x2 = x * x;
        double s = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
            s = s * x2 + *it;
        }
        return parity_ == parity::odd ? s * x : s;
    }

    /// Exact integral from 0 to x, taken termwise.
    double integral(double x) const noexcept
    {
        double s = 0.0;
        double xp = x;
        for (std::size_t m = 0; m < coeffs_.size(); ++m) {
            int const p = power_of(m);
            double const xpow = parity_ == parity::odd ? xp * x : xp;
            s += coeffs_[m] * xpow / (p + 1);
            xp *= x * x;
        }
        return s;
    }

    /// Drops trailing exact zeros.
    void trim()
    {
        while (!coeffs_.empty() && coeffs_.back() == 0.0) {
            coeffs_.pop_back();
        }
    }

    bool all_finite() const
    {
        return std::all_of(coeffs_.begin(), coeffs_.end(), [](double v) { return std::isfinite(v); });
    }

  private:
    parity parity_{parity::even};
    std::vector<double> coeffs_;
};

} // namespace pslet
