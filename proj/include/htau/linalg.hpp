#pragma once

#include "htau/jet.hpp"

#include <vector>

namespace htau {

// Row-major dense complex matrix, sized for the tiny systems in this project.
class CMat {
public:
    CMat() = default;
    CMat(std::size_t rows, std::size_t cols, cplx fill = cplx(0.0))
        : r_(rows), c_(cols), a_(rows * cols, fill) {}
    static CMat identity(std::size_t n);

    std::size_t rows() const { return r_; }
    std::size_t cols() const { return c_; }
    cplx& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
    cplx operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }

    friend CMat operator*(const CMat& a, const CMat& b);
    friend CMat operator+(CMat a, const CMat& b);
    friend CMat operator-(CMat a, const CMat& b);
    friend CMat operator*(cplx s, CMat a);

private:
    std::size_t r_ = 0, c_ = 0;
    std::vector<cplx> a_;
};

cplx mat_det(CMat a);
CMat mat_inverse(CMat a);
std::vector<cplx> mat_solve(CMat a, std::vector<cplx> rhs);
cplx mat_trace(const CMat& a);
double mat_max_abs(const CMat& a);

// Eigenvalues of a small real symmetric matrix by cyclic Jacobi sweeps.
std::vector<double> sym_eigenvalues(std::vector<std::vector<double>> a);

} // namespace htau
