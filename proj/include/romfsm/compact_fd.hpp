#pragma once

#include "romfsm/types.hpp"

namespace romfsm {

/// Implicit (Pade) finite-difference derivatives on a uniform 1D grid.
/// Interior rows are the classical fourth-order tridiagonal schemes; the two
/// boundary rows use one-sided fourth-order closures, so the assembled
/// operators are exact on quartics (first derivative) and quintics (second
/// derivative). The tridiagonal left-hand sides are factorized once per grid.
class CompactDerivatives {
public:
    explicit CompactDerivatives(const Grid1D& grid);

    Vec first(const Vec& f) const;
    Vec second(const Vec& f) const;

private:
    struct ThomasFactors {
        Vec cprime;     // normalized superdiagonal after forward elimination
        Vec inv_pivot;  // 1 / (b_i - a_i * cprime_{i-1})
        Vec sub;        // original subdiagonal
    };

    static ThomasFactors factorize(const Vec& sub, const Vec& diag, const Vec& sup);
    static Vec solve(const ThomasFactors& lu, Vec rhs);

    int n_;
    double dx_;
    ThomasFactors lu1_;  // first-derivative LHS
    ThomasFactors lu2_;  // second-derivative LHS
};

}  // namespace romfsm
