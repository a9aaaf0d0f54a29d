#pragma once

#include "htau/poly.hpp"

#include <functional>
#include <vector>

namespace htau {

// Rational map lambda = P(z)/Q(z) of degree N with deg P = N, deg Q = N - 1,
// no common roots, simple poles only; z = infinity then sits over lambda =
// infinity with a simple pole, so the covering is unramified over infinity.
struct RationalCovering {
    Poly num;
    Poly den;

    int degree() const { return poly_degree(num); }
    cplx eval(cplx z) const { return poly_eval(num, z) / poly_eval(den, z); }
};

// Throws std::invalid_argument when the degree or gcd constraints fail.
RationalCovering make_covering(Poly num, Poly den);

// The two-fold covering with branch points lambda1, lambda2.
RationalCovering two_fold_covering(cplx lambda1, cplx lambda2);

struct BranchDatum {
    cplx lambda;       // branch point, the critical value
    cplx z_crit;       // ramification point in the z plane
    int r = 2;         // ramification index
    Jet z_of_x;        // local inverse z(x), lambda = lambda_m + x^r
};

// One entry per ramification point, sorted by (Re, Im) of the branch point,
// then of the critical point. Branch points with several preimages repeat.
std::vector<BranchDatum> branch_data(const RationalCovering& R, std::size_t jet_order = 10);

// Local inverse jet of an arbitrary polynomial map at a critical point; kept
// public for degenerate maps that fail the covering constructor.
BranchDatum local_inverse_at(const Poly& num, const Poly& den, cplx z_crit, std::size_t jet_order);

struct InfinityExpansion {
    int sheet = 1;
    bool pole = false;  // true on the branch where z itself blows up
    // pole == false: jet of z(zeta); pole == true: jet of 1/z as a function of
    // zeta = 1/lambda, vanishing at zeta = 0.
    Jet series;
};

struct SheetConfiguration {
    cplx basepoint;
    std::vector<cplx> roots;        // roots of P - lambda0 Q, sheet order
    std::vector<int> inf_attach;    // per sheet: -1 for the pole, else index into den roots
    std::vector<cplx> den_roots;
};

// Sheet 1 carries the pole at z = infinity (identified by continuation along
// a ray to large lambda); the remaining sheets sort lexicographically.
SheetConfiguration sheets_at(const RationalCovering& R, cplx lambda0);

InfinityExpansion infinity_series(const RationalCovering& R, const SheetConfiguration& cfg,
                                  int sheet, std::size_t jet_order = 10);

// All infinity expansions indexed by sheet.
std::vector<InfinityExpansion> infinity_series_all(const RationalCovering& R,
                                                   const SheetConfiguration& cfg,
                                                   std::size_t jet_order = 10);

// Continues the fibre {z : R(z) = path(t)} from t = 0 to t = 1 by
// predictor-corrector Newton steps; element i of the result is the endpoint
// of the branch that started at roots[i].
std::vector<cplx> continue_sheets(const RationalCovering& R,
                                  const std::function<cplx(double)>& path,
                                  std::vector<cplx> roots,
                                  const std::function<void(double, const std::vector<cplx>&)>&
                                      per_step = nullptr);

// Keyhole loop based at lambda0 around lambda_m: segment in, full circle, segment out.
std::function<cplx(double)> loop_path(cplx lambda0, cplx lambda_m, double radius);

// Permutation sigma with sigma[i] = j meaning the branch starting at sheet i
// ends at sheet j after the loop around branch point m.
std::vector<int> loop_permutation(const RationalCovering& R, const SheetConfiguration& cfg,
                                  cplx lambda_m, double radius);

struct DeformConfig {
    double tol = 1e-12;
    int max_newton = 40;
    int max_bisect = 24;
    std::size_t jet_order = 10;
    bool verify_monodromy = true;
};

// Moves the branch points of a covering with simple branch points to the
// target values by a homotopy of Newton solves on the critical-value map.
// Targets correspond index-wise to branch_data(R). The monodromy permutations
// around the deformed branch points are checked against the originals.
RationalCovering deform_to_branch_points(const RationalCovering& R,
                                         const std::vector<cplx>& targets,
                                         DeformConfig cfg = {});

} // namespace htau
