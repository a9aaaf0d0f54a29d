#pragma once

#include "htau/linalg.hpp"
#include "htau/quadrature.hpp"

#include <vector>

namespace htau {

// Curve nu^2 = prod_{k}(lambda - e_k) with 2g+2 distinct finite branch
// points. The order of the points fixes the homology convention: a_i is a
// positively oriented loop around the pair (e_{2i}, e_{2i+1}) (0-based), b_i
// a loop around the chain from e_{2i+1} to e_{2g}.
struct HyperellipticCurve {
    std::vector<cplx> e;

    explicit HyperellipticCurve(std::vector<cplx> points);
    int genus() const { return int(e.size()) / 2 - 1; }
};

struct PeriodConfig {
    double tol = 1e-12;       // quadrature tolerance
    double sym_tol = 1e-8;    // asymmetry of B that triggers the sign repair
    bool sign_search = true;
};

struct PeriodData {
    CMat A;      // A(a, b) = oint_{a_a} lambda^b dlambda / nu, b = 0..g-1
    CMat Bper;   // the same integrals over b_a
    CMat Ainv;
    CMat B;      // Riemann matrix of the a-normalized differentials
};

// Realizes the cycles as capsule contours around the branch-point pairs, with
// nu continued from a far anchor where nu ~ +lambda^{g+1}. Throws when the
// geometry leaves no room for clean capsules or the resulting matrix fails
// the symmetry / positivity checks.
PeriodData period_matrices(const HyperellipticCurve& curve, PeriodConfig cfg = {});

// Integral of lambda^beta dlambda / nu over an arbitrary closed contour that
// avoids the branch points, with nu continued from the same anchor convention
// as period_matrices. Throws if the square root fails to close up.
cplx tracked_period_integral(const HyperellipticCurve& curve, const Contour& cycle,
                             int beta, double tol = 1e-12);

// Jets in x = sqrt(lambda - e_m) of v_i / dx at branch point m (0-based);
// result[i] for i = 0..g-1. The overall sign is tied to the principal square
// root of prod_{n != m}(e_m - e_n); everything downstream is insensitive to it.
std::vector<Jet> local_expansions(const HyperellipticCurve& curve, const PeriodData& pd,
                                  std::size_t m, std::size_t order = 8);

// Jets in zeta = 1/lambda of v_i / dzeta at the two points over infinity;
// result[k][i] for sheet k = 0 (where nu ~ +lambda^{g+1}) and k = 1.
std::vector<std::vector<Jet>> infinity_expansions(const HyperellipticCurve& curve,
                                                  const PeriodData& pd,
                                                  std::size_t order = 8);

// dB_{ij} / de_m for the simple branch point m: pi i f_{m,i}(0) f_{m,j}(0).
cplx rauch_derivative(const HyperellipticCurve& curve, const PeriodData& pd,
                      std::size_t i, std::size_t j, std::size_t m);

} // namespace htau
