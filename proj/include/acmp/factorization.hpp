#pragma once

#include "acmp/types.hpp"

namespace acmp {

/// Square root R (rows x m) of a symmetric positive semi-definite m x m
/// matrix, R^T R = G. Diagonal-pivoted Cholesky stopping once the largest
/// remaining pivot drops below tol.cholesky_pivot; switches to an
/// eigendecomposition when the pivoted factor does not reproduce G.
///
/// `rows < 0` keeps exactly rank(G) rows (at least one). Otherwise the
/// result is zero-padded to `rows`, and a rank above `rows` throws.
/// Eigenvalues below -tol.gram_negative throw RepresentabilityError.
Matrix psd_factor(const Matrix& gram, int rows = -1, const Tolerances& tol = default_tolerances);

/// Numerical rank used by psd_factor.
int psd_rank(const Matrix& gram, const Tolerances& tol = default_tolerances);

}  // namespace acmp
