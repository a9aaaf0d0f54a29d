#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace htau {

using cplx = std::complex<double>;

constexpr double pi = 3.14159265358979323846;
inline const cplx iunit{0.0, 1.0};

// Truncated power series sum_{k<=K} c[k] x^k with complex coefficients.
// Binary operations truncate to the shorter of the two orders.
class Jet {
public:
    Jet() : c_(1, cplx(0.0)) {}
    explicit Jet(std::size_t order, cplx c0 = cplx(0.0)) : c_(order + 1, cplx(0.0)) { c_[0] = c0; }
    static Jet variable(std::size_t order, cplx c0 = cplx(0.0));
    static Jet from_coeffs(std::vector<cplx> c);

    std::size_t order() const { return c_.size() - 1; }
    cplx operator[](std::size_t k) const { return k < c_.size() ? c_[k] : cplx(0.0); }
    cplx& coeff(std::size_t k) { return c_.at(k); }
    const std::vector<cplx>& coeffs() const { return c_; }

    Jet truncated(std::size_t order) const;

    cplx eval(cplx t) const {
        cplx acc = c_.back();
        for (std::size_t k = c_.size() - 1; k-- > 0;) acc = acc * t + c_[k];
        return acc;
    }

    Jet operator-() const;
    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);

    friend Jet operator+(Jet a, const Jet& b) { a += b; return a; }
    friend Jet operator-(Jet a, const Jet& b) { a -= b; return a; }
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator/(const Jet& a, const Jet& b);
    friend Jet operator*(cplx s, Jet a);
    friend Jet operator+(cplx s, Jet a);

    Jet derivative() const;            // order drops by one
    Jet antiderivative() const;        // constant term zero, order grows by one

private:
    std::vector<cplx> c_;
};

// f(g(x)); requires g(0) == 0.
Jet compose(const Jet& f, const Jet& g);

// Functional inverse of f, f(0) == 0, f'(0) != 0.
Jet invert_series(const Jet& f);

Jet jet_log(const Jet& f);             // f(0) != 0, principal branch at the constant term
Jet jet_exp(const Jet& f);
Jet jet_pow(const Jet& f, cplx a);     // exp(a log f)
Jet jet_sqrt(const Jet& f);

// Schwarzian derivative {f, x} = f'''/f' - (3/2)(f''/f')^2 as a series in x.
// Input order must be at least 3; output order is input order minus 3.
Jet schwarzian_jet(const Jet& f);
cplx schwarzian_at(const Jet& f);

} // namespace htau
