#pragma once

#include "htau/covering.hpp"
#include "htau/linalg.hpp"

#include <vector>

namespace htau {

// Psi_{jk} = (lambda - lambda0) sqrt(z'(lambda^(k))) sqrt(z'(lambda0^(j)))
//            / (z(lambda^(k)) - z(lambda0^(j)))
// with z' = dz/dlambda. Rows belong to the basepoint fibre, columns to the
// fibre over lambda, reached by continuation along the straight segment from
// lambda0; the square roots ride along the same segment. det Psi == 1 always
// and Psi -> I as lambda -> lambda0.
struct PsiMatrix {
    CMat psi;
    std::vector<cplx> fibre;   // z over lambda, column order
    std::vector<cplx> fibre0;  // z over lambda0, row order (sheets_at order)
};

PsiMatrix psi_matrix(const RationalCovering& R, cplx lambda, cplx lambda0);

// Relative defect of det{1/(z_j - mu_k)} against
// prod_{j<k}(z_j - z_k)(mu_k - mu_j) / prod_{j,k}(z_j - mu_k).
double cauchy_determinant_check(const std::vector<cplx>& z, const std::vector<cplx>& mu);

// Monodromy of Psi(., lambda0) around every distinct branch value. Loops are
// keyholes based at lambda0, circle radius 0.2 x the nearest-neighbour
// distance, listed counterclockwise by the argument of lambda_m - lambda0.
// Continuing Psi around loops[i] multiplies it by loops[i] on the right;
// loops[M-1] * ... * loops[0] == I is checked before returning.
struct MonodromyRep {
    std::vector<cplx> points;
    std::vector<CMat> loops;
    double entry_defect = 0.0;  // worst raw distance from an entry to {0, +1, -1}
};

MonodromyRep monodromy_rep(const RationalCovering& R, cplx lambda0);

// Residues A_m of Psi_lambda Psi^{-1} at the distinct branch values (sorted
// as in branch_data), by circular quadrature. The rational reconstruction
// sum A_m / (lambda - lambda_m) is probed off the circles and probe_defect
// records the worst relative mismatch; beyond 1e-7 the call throws.
struct SchlesingerData {
    std::vector<cplx> points;
    std::vector<CMat> residues;
    double probe_defect = 0.0;
};

SchlesingerData schlesinger_residues(const RationalCovering& R, cplx lambda0);

// d log tau_JM / d lambda_m for the branch_data entry m; equals -1/2 times
// the genus-zero connection coefficient, so tau_JM = tau_W^{-1/2}. The value
// is cross-checked against (1/2) res tr(Psi_lambda Psi^{-1})^2 computed by
// quadrature around lambda_m (summed over the fibre entries sharing the same
// branch value); a mismatch beyond 1e-6 throws.
cplx jm_log_derivative(const RationalCovering& R, std::size_t m);

} // namespace htau
