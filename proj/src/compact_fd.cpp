#include "romfsm/compact_fd.hpp"

#include <cmath>

namespace romfsm {

CompactDerivatives::CompactDerivatives(const Grid1D& grid) : n_(grid.n), dx_(grid.dx) {
    if (n_ < 6) throw ConfigError("CompactDerivatives: need at least 6 nodes");

    // First derivative: 1/4 f'_{i-1} + f'_i + 1/4 f'_{i+1} interior,
    // f'_0 + 3 f'_1 one-sided at the ends.
    {
        Vec sub = Vec::Constant(n_, 0.25), diag = Vec::Ones(n_), sup = Vec::Constant(n_, 0.25);
        sup(0) = 3.0;
        sub(n_ - 1) = 3.0;
        sub(0) = sup(n_ - 1) = 0.0;
        lu1_ = factorize(sub, diag, sup);
    }
    // Second derivative: 1/10 f''_{i-1} + f''_i + 1/10 f''_{i+1} interior,
    // f''_0 + 5 f''_1 one-sided at the ends.
    {
        Vec sub = Vec::Constant(n_, 0.1), diag = Vec::Ones(n_), sup = Vec::Constant(n_, 0.1);
        sup(0) = 5.0;
        sub(n_ - 1) = 5.0;
        sub(0) = sup(n_ - 1) = 0.0;
        lu2_ = factorize(sub, diag, sup);
    }
}

CompactDerivatives::ThomasFactors CompactDerivatives::factorize(const Vec& sub, const Vec& diag,
                                                                const Vec& sup) {
    const long n = diag.size();
    ThomasFactors f;
    f.cprime.resize(n);
    f.inv_pivot.resize(n);
    f.sub = sub;
    double pivot = diag(0);
    if (std::abs(pivot) < 1e-14) throw NumericalError("compact scheme: singular tridiagonal system");
    f.inv_pivot(0) = 1.0 / pivot;
    f.cprime(0) = sup(0) * f.inv_pivot(0);
    for (long i = 1; i < n; ++i) {
        pivot = diag(i) - sub(i) * f.cprime(i - 1);
        if (std::abs(pivot) < 1e-14)
            throw NumericalError("compact scheme: singular tridiagonal system");
        f.inv_pivot(i) = 1.0 / pivot;
        f.cprime(i) = sup(i) * f.inv_pivot(i);
    }
    return f;
}

Vec CompactDerivatives::solve(const ThomasFactors& lu, Vec rhs) {
    const long n = rhs.size();
    rhs(0) *= lu.inv_pivot(0);
    for (long i = 1; i < n; ++i)
        rhs(i) = (rhs(i) - lu.sub(i) * rhs(i - 1)) * lu.inv_pivot(i);
    for (long i = n - 2; i >= 0; --i) rhs(i) -= lu.cprime(i) * rhs(i + 1);
    return rhs;
}

Vec CompactDerivatives::first(const Vec& f) const {
    if (f.size() != n_) throw ConfigError("CompactDerivatives::first: field length mismatch");
    Vec rhs(n_);
    const double c = 0.75 / dx_;
    for (int i = 1; i < n_ - 1; ++i) rhs(i) = c * (f(i + 1) - f(i - 1));
    rhs(0) = (-17.0 * f(0) + 9.0 * f(1) + 9.0 * f(2) - f(3)) / (6.0 * dx_);
    rhs(n_ - 1) = (17.0 * f(n_ - 1) - 9.0 * f(n_ - 2) - 9.0 * f(n_ - 3) + f(n_ - 4)) / (6.0 * dx_);
    return solve(lu1_, std::move(rhs));
}

Vec CompactDerivatives::second(const Vec& f) const {
    if (f.size() != n_) throw ConfigError("CompactDerivatives::second: field length mismatch");
    Vec rhs(n_);
    const double c = 1.2 / (dx_ * dx_);
    for (int i = 1; i < n_ - 1; ++i) rhs(i) = c * (f(i + 1) - 2.0 * f(i) + f(i - 1));
    const double d2 = 12.0 * dx_ * dx_;
    rhs(0) = (95.0 * f(0) - 229.0 * f(1) + 194.0 * f(2) - 86.0 * f(3) + 31.0 * f(4) - 5.0 * f(5)) / d2;
    rhs(n_ - 1) = (95.0 * f(n_ - 1) - 229.0 * f(n_ - 2) + 194.0 * f(n_ - 3) - 86.0 * f(n_ - 4) +
                   31.0 * f(n_ - 5) - 5.0 * f(n_ - 6)) / d2;
    return solve(lu2_, std::move(rhs));
}

}  // namespace romfsm
