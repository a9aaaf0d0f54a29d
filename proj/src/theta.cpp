#include "htau/theta.hpp"

#include <algorithm>
#include <cmath>

namespace htau {

int HalfCharacteristic::parity() const {
    int s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return (s % 2 == 0) ? 1 : -1;
}

std::vector<HalfCharacteristic> enumerate_characteristics(int g) {
    std::vector<HalfCharacteristic> out;
    int total = 1 << (2 * g);
    for (int code = 0; code < total; ++code) {
        HalfCharacteristic chi;
        chi.a.resize(g);
        chi.b.resize(g);
        for (int i = 0; i < g; ++i) {
            chi.a[i] = (code >> (2 * g - 1 - i)) & 1;
            chi.b[i] = (code >> (g - 1 - i)) & 1;
        }
        out.push_back(std::move(chi));
    }
    return out;
}

std::vector<HalfCharacteristic> even_characteristics(int g) {
    std::vector<HalfCharacteristic> out;
    for (auto& chi : enumerate_characteristics(g))
        if (chi.parity() > 0) out.push_back(chi);
    return out;
}

std::vector<HalfCharacteristic> odd_characteristics(int g) {
    std::vector<HalfCharacteristic> out;
    for (auto& chi : enumerate_characteristics(g))
        if (chi.parity() < 0) out.push_back(chi);
    return out;
}

void validate_riemann_matrix(const CMat& B) {
    std::size_t g = B.rows();
    if (B.cols() != g) throw std::invalid_argument("period matrix must be square");
    double scale = std::max(1.0, mat_max_abs(B));
    for (std::size_t i = 0; i < g; ++i)
        for (std::size_t j = i + 1; j < g; ++j)
            if (std::abs(B(i, j) - B(j, i)) > 1e-10 * scale)
                throw std::invalid_argument("period matrix is not symmetric");
    std::vector<std::vector<double>> Y(g, std::vector<double>(g));
    for (std::size_t i = 0; i < g; ++i)
        for (std::size_t j = 0; j < g; ++j) Y[i][j] = B(i, j).imag();
    auto ev = sym_eigenvalues(Y);
    if (ev.front() <= 0.0)
        throw std::invalid_argument("imaginary part of the period matrix is not positive definite");
}

namespace {

double min_im_eigenvalue(const CMat& B) {
    std::size_t g = B.rows();
    std::vector<std::vector<double>> Y(g, std::vector<double>(g));
    for (std::size_t i = 0; i < g; ++i)
        for (std::size_t j = 0; j < g; ++j) Y[i][j] = 0.5 * (B(i, j).imag() + B(j, i).imag());
    return sym_eigenvalues(Y).front();
}

// bound on the sum of |term| (times the derivative monomial) over the box
// shell ||n + alpha||_inf in [k - 1/2, k + 1/2]
double shell_bound(int k, int g, double ymin, double zim, int dord) {
    double count = std::pow(2.0 * k + 1.0, g) - std::pow(std::max(2.0 * k - 1.0, 0.0), g);
    double rlow = std::max(k - 0.5, 0.0);
    double rhigh = std::sqrt(double(g)) * (k + 0.5);
    double mag = std::exp(-pi * ymin * rlow * rlow + 2.0 * pi * rhigh * zim);
    double dfac = std::pow(2.0 * pi * rhigh, dord);
    return count * mag * dfac;
}

} // namespace

ThetaValue riemann_theta(const std::vector<cplx>& z, const CMat& B, const HalfCharacteristic& chi,
                         double eps, const std::vector<int>& deriv, int min_radius) {
    validate_riemann_matrix(B);
    int g = int(B.rows());
    if (int(z.size()) != g || int(chi.a.size()) != g || int(chi.b.size()) != g)
        throw std::invalid_argument("theta argument dimension mismatch");
    int dord = 0;
    for (int d : deriv) dord += d;
    if (!deriv.empty() && int(deriv.size()) != g)
        throw std::invalid_argument("derivative multi-index dimension mismatch");

    double ymin = min_im_eigenvalue(B);
    double zim = 0.0;
    for (auto zi : z) zim += zi.imag() * zi.imag();
    zim = std::sqrt(zim);

    // box radius with a certified tail
    int R = 1;
    for (; R < 200; ++R) {
        double tail = 0.0, term = 1.0;
        int k = R + 1;
        for (; k < R + 400; ++k) {
            term = shell_bound(k, g, ymin, zim, dord);
            tail += term;
            double ratio = shell_bound(k + 1, g, ymin, zim, dord) / std::max(term, 1e-300);
            if (ratio < 0.5 && term < eps * 1e-4) {
                tail += term * ratio / (1.0 - ratio);
                break;
            }
        }
        if (tail < eps) break;
    }
    R = std::max(R, min_radius);

    double tail_bound = 0.0;
    {
        double term = 1.0;
        for (int k = R + 1; k < R + 400; ++k) {
            term = shell_bound(k, g, ymin, zim, dord);
            tail_bound += term;
            double ratio = shell_bound(k + 1, g, ymin, zim, dord) / std::max(term, 1e-300);
            if (ratio < 0.5 && term < eps * 1e-4) {
                tail_bound += term * ratio / (1.0 - ratio);
                break;
            }
        }
    }

    cplx sum = 0.0;
    std::vector<int> n(g, -R);
    while (true) {
        // q(n) = (n+alpha)^T B (n+alpha), l(n) = (n+alpha).(z+beta)
        cplx q = 0.0, l = 0.0;
        cplx mono = 1.0;
        for (int i = 0; i < g; ++i) {
            double ni = n[i] + 0.5 * chi.a[i];
            for (int j = 0; j < g; ++j) {
                double nj = n[j] + 0.5 * chi.a[j];
                q += B(std::size_t(i), std::size_t(j)) * ni * nj;
            }
            l += ni * (z[std::size_t(i)] + 0.5 * chi.b[i]);
            if (!deriv.empty())
                for (int d = 0; d < deriv[std::size_t(i)]; ++d) mono *= 2.0 * pi * iunit * ni;
        }
        sum += mono * std::exp(pi * iunit * q + 2.0 * pi * iunit * l);

        int i = 0;
        for (; i < g; ++i) {
            if (n[i] < R) { ++n[i]; break; }
            n[i] = -R;
        }
        if (i == g) break;
    }
    return {sum, R, tail_bound};
}

cplx theta_constant(const CMat& B, const HalfCharacteristic& chi, double eps) {
    std::vector<cplx> z(B.rows(), cplx(0.0));
    return riemann_theta(z, B, chi, eps).value;
}

cplx even_theta_product(const CMat& B, double eps) {
    int g = int(B.rows());
    auto evens = even_characteristics(g);
    std::vector<cplx> vals;
    double largest = 0.0;
    for (const auto& chi : evens) {
        cplx v = theta_constant(B, chi, eps);
        vals.push_back(v);
        largest = std::max(largest, std::abs(v));
    }
    cplx prod = 1.0;
    for (cplx v : vals) {
        if (std::abs(v) < 1e-8 * largest)
            throw VanishingThetaConstant("even theta constant vanishes at this period matrix");
        prod *= v;
    }
    return prod;
}

double heat_equation_residual(const CMat& B, const HalfCharacteristic& chi, double h, double eps) {
    int g = int(B.rows());
    std::vector<cplx> z0(g, cplx(0.0));
    double worst = 0.0;
    for (int j = 0; j < g; ++j)
        for (int k = j; k < g; ++k) {
            CMat Bp = B, Bm = B;
            Bp(j, k) += h;
            Bm(j, k) -= h;
            if (j != k) {
                Bp(k, j) += h;
                Bm(k, j) -= h;
            }
            cplx fd = (riemann_theta(z0, Bp, chi, eps).value -
                       riemann_theta(z0, Bm, chi, eps).value) / (2.0 * h);
            std::vector<int> d(g, 0);
            d[j] += 1;
            d[k] += 1;
            cplx dzz = riemann_theta(z0, B, chi, eps, d).value;
            double delta = (j == k) ? 1.0 : 0.0;
            cplx ref = dzz / (2.0 * pi * iunit * (1.0 + delta));
            worst = std::max(worst, std::abs(fd - ref) / std::max(1.0, std::abs(ref)));
        }
    return worst;
}

JacobiThetas jacobi_thetas(cplx mu, double eps) {
    CMat B(1, 1);
    B(0, 0) = mu;
    JacobiThetas out;
    out.t2 = theta_constant(B, {{1}, {0}}, eps);
    out.t3 = theta_constant(B, {{0}, {0}}, eps);
    out.t4 = theta_constant(B, {{0}, {1}}, eps);
    out.t1prime = -riemann_theta({cplx(0.0)}, B, {{1}, {1}}, eps, {1}).value;
    return out;
}

} // namespace htau
