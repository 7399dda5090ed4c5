#pragma once

#include <Eigen/Dense>

#include "sjkf/errors.hpp"

namespace sjkf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Lower-triangular square root S of a covariance, S*S^T = P. Canonical form:
// zero strictly above the diagonal, diagonal entries >= 0.
struct SqrtFactor {
    Matrix m;

    int dim() const { return static_cast<int>(m.rows()); }
    Matrix cov() const { return m * m.transpose(); }
};

// Cholesky factorization with a scale-relative pivot floor of
// 1e-12 * max|P_ij|. Throws NotPositiveDefinite with the failing pivot index.
SqrtFactor chol(const Matrix& p);

// Lower-triangular S with S*S^T = block^T * block, via QR of the r x c block
// (r >= c). Diagonal made nonnegative by column sign flips.
SqrtFactor qr_compress(const Matrix& block);

// S' with S'*S'^T = S*S^T + sign * v*v^T. sign=+1 uses Givens rotations,
// sign=-1 hyperbolic rotations; the downdate throws DowndateBreakdown when
// positive definiteness is lost. Result is in canonical form.
SqrtFactor rank1_update(const SqrtFactor& s, const Vector& v, int sign);

// In-place variants used by the filter's hot loop.
void rank1_update_inplace(Matrix& s, Vector v);
void rank1_downdate_inplace(Matrix& s, Vector v);

// Count of singular values exceeding tol * (largest singular value).
int numerical_rank(const Matrix& m, double tol);

// Eigenvalue-clip repair: factor of the nearest-in-spirit SPD matrix, with
// eigenvalues floored at 1e-12 * max(trace, 0). Used as downdate fallback.
SqrtFactor clipped_chol(const Matrix& p);

} // namespace sjkf
