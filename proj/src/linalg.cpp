#include "sjkf/linalg.hpp"

#include <cmath>

namespace sjkf {

SqrtFactor chol(const Matrix& p) {
    const int n = static_cast<int>(p.rows());
    const double floor = 1e-12 * p.cwiseAbs().maxCoeff();
    Matrix s = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        double d = p(j, j);
        for (int k = 0; k < j; ++k) d -= s(j, k) * s(j, k);
        if (d <= floor) throw NotPositiveDefinite(j, d);
        s(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double off = p(i, j);
            for (int k = 0; k < j; ++k) off -= s(i, k) * s(j, k);
            s(i, j) = off / s(j, j);
        }
    }
    return {s};
}

SqrtFactor qr_compress(const Matrix& block) {
    const int c = static_cast<int>(block.cols());
    Eigen::HouseholderQR<Matrix> qr(block);
    Matrix r = qr.matrixQR().topRows(c).triangularView<Eigen::Upper>();
    Matrix s = r.transpose();
    for (int j = 0; j < c; ++j)
        if (s(j, j) < 0.0) s.col(j) = -s.col(j);
    return {s};
}

void rank1_update_inplace(Matrix& s, Vector v) {
    const int n = static_cast<int>(v.size());
    for (int i = 0; i < n; ++i) {
        const double r = std::hypot(s(i, i), v(i));
        const double c = r > 0.0 ? s(i, i) / r : 1.0;
        const double sn = r > 0.0 ? v(i) / r : 0.0;
        s(i, i) = r;
        for (int k = i + 1; k < n; ++k) {
            const double col = s(k, i);
            s(k, i) = c * col + sn * v(k);
            v(k) = -sn * col + c * v(k);
        }
    }
}

void rank1_downdate_inplace(Matrix& s, Vector v) {
    const int n = static_cast<int>(v.size());
    for (int i = 0; i < n; ++i) {
        const double d = s(i, i) * s(i, i) - v(i) * v(i);
        if (d <= 1e-14 * std::max(s(i, i) * s(i, i), v(i) * v(i)))
            throw DowndateBreakdown(i);
        const double r = std::sqrt(d);
        const double c = r / s(i, i);
        const double sn = v(i) / s(i, i);
        s(i, i) = r;
        for (int k = i + 1; k < n; ++k) {
            s(k, i) = (s(k, i) - sn * v(k)) / c;
            v(k) = c * v(k) - sn * s(k, i);
        }
    }
}

SqrtFactor rank1_update(const SqrtFactor& s, const Vector& v, int sign) {
    Matrix out = s.m;
    if (sign >= 0)
        rank1_update_inplace(out, v);
    else
        rank1_downdate_inplace(out, v);
    return {out};
}

int numerical_rank(const Matrix& m, double tol) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const Vector& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    const double cutoff = tol * sv(0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++rank;
    return rank;
}

namespace {

// Cholesky without the scale-relative pivot floor, for use on matrices that
// were just eigenvalue-clipped (their smallest pivot is legitimately tiny).
Matrix chol_raw(const Matrix& p) {
    const int n = static_cast<int>(p.rows());
    Matrix s = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        double d = p(j, j);
        for (int k = 0; k < j; ++k) d -= s(j, k) * s(j, k);
        if (d <= 0.0) throw NotPositiveDefinite(j, d);
        s(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double off = p(i, j);
            for (int k = 0; k < j; ++k) off -= s(i, k) * s(j, k);
            s(i, j) = off / s(j, j);
        }
    }
    return s;
}

} // namespace

SqrtFactor clipped_chol(const Matrix& p) {
    Matrix sym = 0.5 * (p + p.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    double floor = 1e-12 * std::max(sym.trace(), 0.0) + 1e-300;
    for (;;) {
        Vector w = eig.eigenvalues().cwiseMax(floor);
        Matrix repaired = eig.eigenvectors() * w.asDiagonal() * eig.eigenvectors().transpose();
        try {
            return {chol_raw(repaired)};
        } catch (const NotPositiveDefinite&) {
            floor *= 100.0; // rounding ate the clip; raise it and retry
        }
    }
}

} // namespace sjkf
