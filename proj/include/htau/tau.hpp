#pragma once

#include "htau/covering.hpp"
#include "htau/hyperelliptic.hpp"
#include "htau/theta.hpp"

#include <vector>

namespace htau {

// Tau functions are defined up to one global multiplicative constant; log_tau
// fixes principal branches factor by factor, tau_pow12 = exp(12 log_tau) is
// the single-valued object, and dlog holds d log tau / d lambda_m in the
// branch-point order of the input. Only dlog and ratios are test-stable.
struct TauResult {
    cplx log_tau{0.0};
    cplx tau_pow12{1.0};
    std::vector<cplx> dlog;
};

// ---- connection coefficients ----
// B_m multiplies dlambda_m in the flat connection whose horizontal section is
// the Bergmann tau function; A_m is the Wirtinger counterpart. For genus 0
// the two coincide.

// Genus 0: B_m = -(1/(6 r_m)) [x^{r_m-2}] {z(x), x} from the local inverse jet.
cplx connection_genus0(const RationalCovering& R, std::size_t m);
std::vector<cplx> connection_genus0_all(const RationalCovering& R);

// Genus 1 two-fold curves: (2/3) d ln theta_1' / d lambda_m plus the
// Schwarzian of the flat coordinate z = int v, with the theta factor
// differentiated in the modulus by finite differences and chained through the
// Rauch derivative of the modulus.
cplx connection_genus1(const HyperellipticCurve& curve, const PeriodData& pd, std::size_t m);

// Any genus >= 1, hyperelliptic: the projective connection from Fay's kernel
// formula S = -2T/H + {int H, x} built on an odd-characteristic theta with
// term-differentiated gradients; characteristics whose H degenerates at the
// point are skipped.
cplx connection_hyperelliptic_svfay(const HyperellipticCurve& curve, const PeriodData& pd,
                                    std::size_t m);
// Same, on one fixed odd characteristic; throws when its H degenerates at m.
cplx connection_hyperelliptic_svfay(const HyperellipticCurve& curve, const PeriodData& pd,
                                    std::size_t m, const HalfCharacteristic& chi);

// A_m = B_m - (1/(4^g+2^g)) sum_ij D_ij f_i(0) f_j(0) with
// D_ij = sum over even characteristics of Theta_{z_i z_j}(0)/Theta(0).
cplx connection_wirtinger(const HyperellipticCurve& curve, const PeriodData& pd, std::size_t m);

// ---- tau functions ----

// Genus 0: log tau = (1/6) sum_{sheets k >= 2} log(dz/dzeta_k|0)
//                  - sum_m ((r_m-1)/12) log(dz/dx_m|0).
// dlog is filled by central differences through deform_to_branch_points with
// per-factor ratio logs, so no branch of log is ever crossed.
TauResult tau_rational(const RationalCovering& R, double fd_step = 1e-5);

// Local data of a genus-1 covering: leading coefficients of the normalized
// holomorphic differential at the branch points (f, with ramification indices
// r) and over infinity (h), plus the modulus mu.
struct EllipticLocalData {
    std::vector<cplx> f;
    std::vector<int> r;
    std::vector<cplx> h;
    cplx mu;
};

EllipticLocalData elliptic_local_data(const HyperellipticCurve& curve, const PeriodData& pd);

// log tau_B = (2/3) log theta_1'(0|mu) + (1/6) sum log h_k
//           - sum ((r_m-1)/12) log f_m; the Wirtinger variant drops the theta
// factor. dlog is left empty: the data carries no branch-point positions.
TauResult tau_elliptic_bergmann(const EllipticLocalData& data);
TauResult tau_elliptic_wirtinger(const EllipticLocalData& data);

// log tau_B = log det A + (1/4) sum_{m<n} log(e_m - e_n); the determinant
// part of dlog comes from central differences through period_matrices, the
// product part is differentiated exactly.
TauResult tau_bergmann_hyperelliptic(const HyperellipticCurve& curve, const PeriodData& pd,
                                     bool with_dlog = true, double fd_step = 1e-5);

// tau_W = tau_B * (prod over even characteristics of Theta)^{-1/(4^{g-1}+2^{g-2})},
// genus <= 2 only; throws VanishingThetaConstant outside its domain. The theta
// part of dlog is exact via the heat equation and the Rauch derivatives.
TauResult tau_wirtinger(const HyperellipticCurve& curve, const PeriodData& pd,
                        bool with_dlog = true, double fd_step = 1e-5);

// The starred variant averages over the C(2g+2, g+1)/2 non-vanishing even
// characteristics with exponent -4/C(2g+2, g+1) and works in any genus.
TauResult tau_wirtinger_star(const HyperellipticCurve& curve, const PeriodData& pd,
                             bool with_dlog = true, double fd_step = 1e-5);

// ---- identity checks ----

// |dB_m/dlambda_n - dB_n/dlambda_m| by central differences; the genus-0
// version deforms the covering, the hyperelliptic one moves branch points
// directly (wirtinger = true checks the A_m instead).
double flatness_residual_genus0(const RationalCovering& R, std::size_t m, std::size_t n,
                                double step = 1e-5);
double flatness_residual_hyperelliptic(const HyperellipticCurve& curve, std::size_t m,
                                       std::size_t n, bool wirtinger = false,
                                       double step = 1e-5);

// |A_m - B_m + (4/(4^g+2^g)) d/dlambda_m log prod Theta| with the theta
// derivative taken by finite differences through a full period recomputation,
// independent of the heat-equation chain rule used elsewhere.
double dobavka_residual(const HyperellipticCurve& curve, std::size_t m, double step = 1e-5);

// Genus 0: |2 res_{lambda_m} (1/dlambda) sum_{j != k} B(lambda^(j), lambda^(k))
// - B_m| with the kernel dz dz'/(z-z')^2 evaluated on fresh fibres around a
// circle of the given scale times the default radius.
double residue_formula_check_genus0(const RationalCovering& R, std::size_t m,
                                    double radius_scale = 1.0);

} // namespace htau
