#pragma once

#include "htau/linalg.hpp"

#include <stdexcept>
#include <vector>

namespace htau {

// Half-integer characteristic; entries of a and b live in {0, 1} and stand
// for the numerators of alpha_i = a_i/2, beta_i = b_i/2.
struct HalfCharacteristic {
    std::vector<int> a, b;
    // +1 even, -1 odd: parity of 4 alpha . beta
    int parity() const;
};

// All 4^g characteristics in lexicographic (a, b) order.
std::vector<HalfCharacteristic> enumerate_characteristics(int g);
std::vector<HalfCharacteristic> even_characteristics(int g);
std::vector<HalfCharacteristic> odd_characteristics(int g);

// Throws unless B is symmetric to 1e-10 and Im B is positive definite.
void validate_riemann_matrix(const CMat& B);

struct ThetaValue {
    cplx value;
    int radius = 0;        // box truncation radius actually used
    double tail_bound = 0; // certified bound on the dropped tail
};

// theta[a,b](z | B) = sum over n of exp(pi i (n+alpha)^T B (n+alpha)
//                                      + 2 pi i (n+alpha) . (z+beta)),
// optionally term-differentiated in z by the multi-index deriv. min_radius
// widens the certified truncation box, for stability probes.
ThetaValue riemann_theta(const std::vector<cplx>& z, const CMat& B,
                         const HalfCharacteristic& chi, double eps = 1e-12,
                         const std::vector<int>& deriv = {}, int min_radius = 0);

// Largest relative defect, over all index pairs (j, k), between a central
// finite difference of theta in the period-matrix entry (symmetric pairs
// moved together off the diagonal) and the term-differentiated second
// z-derivative scaled by 1 / (2 pi i (1 + delta_jk)).
double heat_equation_residual(const CMat& B, const HalfCharacteristic& chi,
                              double h = 1e-5, double eps = 1e-13);

cplx theta_constant(const CMat& B, const HalfCharacteristic& chi, double eps = 1e-12);

struct VanishingThetaConstant : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Product of all even theta constants; throws VanishingThetaConstant when one
// of them is below 1e-8 times the largest.
cplx even_theta_product(const CMat& B, double eps = 1e-12);

struct JacobiThetas {
    cplx t2, t3, t4;
    cplx t1prime;  // d/dz theta_1 at z = 0
};

JacobiThetas jacobi_thetas(cplx mu, double eps = 1e-12);

} // namespace htau
