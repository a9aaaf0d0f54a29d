#include "htau/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace htau {

CMat CMat::identity(std::size_t n) {
    CMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMat operator*(const CMat& a, const CMat& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix product shape mismatch");
    CMat c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            cplx aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

CMat operator+(CMat a, const CMat& b) {
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) += b(i, j);
    return a;
}

CMat operator-(CMat a, const CMat& b) {
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) -= b(i, j);
    return a;
}

CMat operator*(cplx s, CMat a) {
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) *= s;
    return a;
}

namespace {

// in-place LU with partial pivoting; returns permutation sign, 0 on singularity
int lu_factor(CMat& a, std::vector<std::size_t>& piv) {
    std::size_t n = a.rows();
    piv.resize(n);
    int sign = 1;
    for (std::size_t i = 0; i < n; ++i) piv[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t best = k;
        double mag = std::abs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > mag) { mag = std::abs(a(i, k)); best = i; }
        if (mag == 0.0) return 0;
        if (best != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(best, j));
            std::swap(piv[k], piv[best]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            a(i, k) /= a(k, k);
            cplx lik = a(i, k);
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= lik * a(k, j);
        }
    }
    return sign;
}

} // namespace

cplx mat_det(CMat a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("determinant of non-square matrix");
    std::vector<std::size_t> piv;
    int sign = lu_factor(a, piv);
    if (sign == 0) return 0.0;
    cplx d = double(sign);
    for (std::size_t k = 0; k < a.rows(); ++k) d *= a(k, k);
    return d;
}

std::vector<cplx> mat_solve(CMat a, std::vector<cplx> rhs) {
    std::size_t n = a.rows();
    if (a.cols() != n || rhs.size() != n) throw std::invalid_argument("solve shape mismatch");
    std::vector<std::size_t> piv;
    if (lu_factor(a, piv) == 0) throw std::runtime_error("singular linear system");
    std::vector<cplx> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = rhs[piv[i]];
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) x[i] -= a(i, j) * x[j];
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j < n; ++j) x[i] -= a(i, j) * x[j];
        x[i] /= a(i, i);
    }
    return x;
}

CMat mat_inverse(CMat a) {
    std::size_t n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("inverse of non-square matrix");
    std::vector<std::size_t> piv;
    CMat lu = a;
    if (lu_factor(lu, piv) == 0) throw std::runtime_error("singular matrix");
    CMat inv(n, n);
    for (std::size_t col = 0; col < n; ++col) {
        std::vector<cplx> x(n, cplx(0.0));
        for (std::size_t i = 0; i < n; ++i) x[i] = (piv[i] == col) ? 1.0 : 0.0;
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) x[i] -= lu(i, j) * x[j];
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu(i, j) * x[j];
            x[i] /= lu(i, i);
        }
        for (std::size_t i = 0; i < n; ++i) inv(i, col) = x[i];
    }
    return inv;
}

cplx mat_trace(const CMat& a) {
    cplx t = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
    return t;
}

double mat_max_abs(const CMat& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j)));
    return m;
}

std::vector<double> sym_eigenvalues(std::vector<std::vector<double>> a) {
    std::size_t n = a.size();
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
    std::sort(ev.begin(), ev.end());
    return ev;
}

} // namespace htau
