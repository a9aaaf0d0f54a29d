#pragma once

#include "htau/jet.hpp"

#include <cstdint>
#include <vector>

namespace htau {

// Dense univariate polynomials, coefficients in ascending degree order.
using Poly = std::vector<cplx>;

int poly_degree(const Poly& p, double drop_tol = 0.0);
Poly poly_trim(Poly p, double rel_tol = 1e-13);
Poly poly_add(const Poly& a, const Poly& b);
Poly poly_sub(const Poly& a, const Poly& b);
Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_scale(cplx s, Poly p);
Poly poly_derivative(const Poly& p);
cplx poly_eval(const Poly& p, cplx z);
// value and first derivative in one pass
void poly_eval2(const Poly& p, cplx z, cplx& v, cplx& d);
// Taylor jet of p about z0, up to the requested order
Jet poly_jet(const Poly& p, cplx z0, std::size_t order);

struct Root {
    cplx z;
    int multiplicity = 1;
};

struct RootConfig {
    double tol = 1e-13;          // relative stopping tolerance for the iteration
    double cluster = 1e-8;       // relative radius for multiplicity clustering
    int max_iter = 400;
    std::uint64_t seed = 0x9e3779b97f4a7c15ull;
};

// All roots of p with multiplicities, Aberth-Ehrlich iteration plus clustering.
// Throws on the zero polynomial; a constant polynomial has no roots.
std::vector<Root> polynomial_roots(const Poly& p, RootConfig cfg = {});

} // namespace htau
