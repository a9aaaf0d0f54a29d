#include "htau/jet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace htau {

Jet Jet::variable(std::size_t order, cplx c0) {
    Jet j(order, c0);
    if (order >= 1) j.c_[1] = 1.0;
    return j;
}

Jet Jet::from_coeffs(std::vector<cplx> c) {
    if (c.empty()) c.push_back(0.0);
    Jet j;
    j.c_ = std::move(c);
    return j;
}

Jet Jet::truncated(std::size_t order) const {
    std::vector<cplx> c(order + 1, cplx(0.0));
    for (std::size_t k = 0; k <= order && k < c_.size(); ++k) c[k] = c_[k];
    return from_coeffs(std::move(c));
}

Jet Jet::operator-() const {
    Jet j = *this;
    for (auto& x : j.c_) x = -x;
    return j;
}

Jet& Jet::operator+=(const Jet& o) {
    std::size_t n = std::min(c_.size(), o.c_.size());
    c_.resize(n);
    for (std::size_t k = 0; k < n; ++k) c_[k] += o.c_[k];
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    std::size_t n = std::min(c_.size(), o.c_.size());
    c_.resize(n);
    for (std::size_t k = 0; k < n; ++k) c_[k] -= o.c_[k];
    return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
    std::size_t n = std::min(a.c_.size(), b.c_.size());
    std::vector<cplx> c(n, cplx(0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; i + j < n && j < b.c_.size(); ++j)
            if (i < a.c_.size()) c[i + j] += a.c_[i] * b.c_[j];
    return Jet::from_coeffs(std::move(c));
}

Jet operator/(const Jet& a, const Jet& b) {
    if (std::abs(b[0]) == 0.0) throw std::domain_error("jet division by series with zero constant term");
    std::size_t n = std::min(a.c_.size(), b.c_.size());
    std::vector<cplx> q(n, cplx(0.0));
    for (std::size_t k = 0; k < n; ++k) {
        cplx s = a[k];
        for (std::size_t j = 0; j < k; ++j) s -= q[j] * b[k - j];
        q[k] = s / b[0];
    }
    return Jet::from_coeffs(std::move(q));
}

Jet operator*(cplx s, Jet a) {
    for (std::size_t k = 0; k <= a.order(); ++k) a.coeff(k) *= s;
    return a;
}

Jet operator+(cplx s, Jet a) {
    a.coeff(0) += s;
    return a;
}

Jet Jet::derivative() const {
    if (c_.size() == 1) return Jet(0);
    std::vector<cplx> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = double(k) * c_[k];
    return from_coeffs(std::move(d));
}

Jet Jet::antiderivative() const {
    std::vector<cplx> a(c_.size() + 1, cplx(0.0));
    for (std::size_t k = 0; k < c_.size(); ++k) a[k + 1] = c_[k] / double(k + 1);
    return from_coeffs(std::move(a));
}

Jet compose(const Jet& f, const Jet& g) {
    if (std::abs(g[0]) > 1e-14) throw std::domain_error("jet composition needs g(0) == 0");
    std::size_t n = std::min(f.order(), g.order());
    Jet gt = g.truncated(n);
    // Horner from the top coefficient down
    Jet acc(n, f[n]);
    for (std::size_t k = n; k-- > 0;) acc = acc * gt + Jet(n, f[k]);
    return acc;
}

Jet invert_series(const Jet& f) {
    if (std::abs(f[0]) > 1e-14) throw std::domain_error("series inversion needs f(0) == 0");
    if (std::abs(f[1]) == 0.0) throw std::domain_error("series inversion needs f'(0) != 0");
    std::size_t n = f.order();
    // Newton: h <- h - (f(h) - x) / f'(h), doubling the correct order each pass.
    Jet x = Jet::variable(n);
    Jet h = Jet::from_coeffs({0.0, 1.0 / f[1]}).truncated(n);
    Jet fp = f.derivative().truncated(n);
    for (std::size_t pass = 0; (std::size_t(1) << pass) <= n + 1; ++pass) {
        Jet err = compose(f.truncated(n), h) - x;
        Jet slope = compose(fp, h);
        h = h - err / slope;
    }
    return h;
}

Jet jet_log(const Jet& f) {
    if (std::abs(f[0]) == 0.0) throw std::domain_error("jet log of series with zero constant term");
    Jet l = (f.derivative() / f.truncated(f.order() == 0 ? 0 : f.order() - 1)).antiderivative();
    l.coeff(0) = std::log(f[0]);
    return l.truncated(f.order());
}

Jet jet_exp(const Jet& f) {
    std::size_t n = f.order();
    // y' = f' y with y(0) = exp(f(0)), coefficient recurrence.
    std::vector<cplx> y(n + 1, cplx(0.0));
    y[0] = std::exp(f[0]);
    for (std::size_t k = 1; k <= n; ++k) {
        cplx s = 0.0;
        for (std::size_t j = 1; j <= k; ++j) s += double(j) * f[j] * y[k - j];
        y[k] = s / double(k);
    }
    return Jet::from_coeffs(std::move(y));
}

Jet jet_pow(const Jet& f, cplx a) { return jet_exp(a * jet_log(f)); }

Jet jet_sqrt(const Jet& f) { return jet_pow(f, 0.5); }

Jet schwarzian_jet(const Jet& f) {
    if (f.order() < 3) throw std::domain_error("schwarzian needs jet order >= 3");
    Jet f1 = f.derivative();
    Jet f2 = f1.derivative();
    Jet f3 = f2.derivative();
    Jet r = f2.truncated(f3.order()) / f1.truncated(f3.order());
    return f3 / f1.truncated(f3.order()) - 1.5 * (r * r);
}

cplx schwarzian_at(const Jet& f) { return schwarzian_jet(f)[0]; }

} // namespace htau
