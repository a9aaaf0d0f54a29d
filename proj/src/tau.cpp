#include "htau/tau.hpp"

#include "htau/finitediff.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace htau {

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
    return r;
}

// -(1/(6 r (r-2)!)) (d/dx)^{r-2} {z, x}|_0 = -S[r-2] / (6 r)
cplx schwarzian_connection(const Jet& z_of_x, int r) {
    if (z_of_x.order() < std::size_t(r) + 1)
        throw std::invalid_argument("jet order too low for the connection coefficient");
    Jet s = schwarzian_jet(z_of_x);
    return -s[std::size_t(r) - 2] / (6.0 * double(r));
}

std::vector<BranchDatum> branch_data_for_connection(const RationalCovering& R) {
    auto bd = branch_data(R);
    std::size_t need = 0;
    for (const auto& d : bd) need = std::max(need, std::size_t(d.r) + 2);
    if (need > 10) bd = branch_data(R, need);
    return bd;
}

cplx theta_deriv0(const CMat& B, const HalfCharacteristic& chi, const std::vector<int>& counts) {
    std::vector<cplx> z0(std::size_t(B.rows()), cplx(0.0));
    return riemann_theta(z0, B, chi, 1e-12, counts).value;
}

// leading coefficients f_{m,i}(0) of the normalized differentials at branch point m
std::vector<cplx> f_at_zero(const HyperellipticCurve& curve, const PeriodData& pd,
                            std::size_t m) {
    auto fs = local_expansions(curve, pd, m, 2);
    std::vector<cplx> out(fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i) out[i] = fs[i][0];
    return out;
}

// Fay's formula S = -2T/H + {int H, x} on one odd characteristic; jets in
// x_m. Returns false when H degenerates at the point.
bool fay_jet_on_characteristic(const std::vector<Jet>& fs, const CMat& B,
                               const HalfCharacteristic& chi, std::size_t order, Jet& out) {
    int g = B.rows();
    std::vector<cplx> grad(std::size_t(g), cplx(0.0));
    double scale = 0.0;
    for (int i = 0; i < g; ++i) {
        std::vector<int> c(std::size_t(g), 0);
        c[std::size_t(i)] = 1;
        grad[std::size_t(i)] = theta_deriv0(B, chi, c);
        scale += std::abs(grad[std::size_t(i)] * fs[std::size_t(i)][0]);
    }
    Jet H(order);
    for (int i = 0; i < g; ++i) H += grad[std::size_t(i)] * fs[std::size_t(i)];
    if (std::abs(H[0]) < 1e-6 * scale) return false;

    std::map<std::vector<int>, cplx> cache;
    Jet T(order);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j)
            for (int k = 0; k < g; ++k) {
                std::vector<int> c(std::size_t(g), 0);
                ++c[std::size_t(i)];
                ++c[std::size_t(j)];
                ++c[std::size_t(k)];
                auto it = cache.find(c);
                if (it == cache.end()) it = cache.emplace(c, theta_deriv0(B, chi, c)).first;
                T += it->second * (fs[std::size_t(i)] * fs[std::size_t(j)] * fs[std::size_t(k)]);
            }
    out = -2.0 * (T / H) + schwarzian_jet(H.antiderivative());
    return true;
}

Jet fay_connection_jet(const HyperellipticCurve& curve, const PeriodData& pd, std::size_t m,
                       std::size_t order) {
    auto fs = local_expansions(curve, pd, m, order);
    Jet sb;
    for (const auto& chi : odd_characteristics(curve.genus()))
        if (fay_jet_on_characteristic(fs, pd.B, chi, order, sb)) return sb;
    throw std::runtime_error("no usable odd characteristic for the projective connection");
}

// sum over the selected characteristics of Theta_{z_i z_j}(0)/Theta(0), as a matrix
CMat theta_log_hessian_sum(const CMat& B, const std::vector<HalfCharacteristic>& chis) {
    int g = B.rows();
    CMat D(g, g);
    for (const auto& chi : chis) {
        cplx t0 = theta_constant(B, chi);
        for (int i = 0; i < g; ++i)
            for (int j = i; j < g; ++j) {
                std::vector<int> c(std::size_t(g), 0);
                ++c[std::size_t(i)];
                ++c[std::size_t(j)];
                cplx dij = theta_deriv0(B, chi, c) / t0;
                D(i, j) += dij;
                if (j != i) D(j, i) += dij;
            }
    }
    return D;
}

cplx quadratic_form(const CMat& D, const std::vector<cplx>& f) {
    cplx acc = 0.0;
    int g = D.rows();
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) acc += D(i, j) * f[std::size_t(i)] * f[std::size_t(j)];
    return acc;
}

// Even theta constants with the vanishing ones filtered out; throws when
// require_all is set and one of them vanishes.
struct EvenThetaData {
    std::vector<HalfCharacteristic> chis;
    std::vector<cplx> values;
};

EvenThetaData nonvanishing_even_thetas(const CMat& B, bool require_all) {
    EvenThetaData out;
    auto evens = even_characteristics(B.rows());
    std::vector<cplx> vals(evens.size());
    double top = 0.0;
    for (std::size_t k = 0; k < evens.size(); ++k) {
        vals[k] = theta_constant(B, evens[k]);
        top = std::max(top, std::abs(vals[k]));
    }
    for (std::size_t k = 0; k < evens.size(); ++k) {
        if (std::abs(vals[k]) < 1e-8 * top) {
            if (require_all)
                throw VanishingThetaConstant("even theta constant vanishes on this curve");
            continue;
        }
        out.chis.push_back(evens[k]);
        out.values.push_back(vals[k]);
    }
    return out;
}

// ---- genus-0 factor bookkeeping for tau_rational and its FD oracle ----

struct LogFactor {
    cplx pos;       // z-plane anchor used to match factors across deformations
    cplx c1;        // leading derivative entering log tau
    double weight;  // 1/6 for sheets, -(r-1)/12 for branch points
    int r = 1;      // root-of-unity ambiguity of c1 (branch factors only)
};

// c1 of a branch factor is fixed only up to an r-th root of unity by the
// local inverse; pick the representative nearest the reference value
cplx align_factor(cplx c, cplx ref, int r) {
    cplx best = c;
    for (int k = 1; k < r; ++k) {
        cplx w = c * std::polar(1.0, 2.0 * pi * k / r);
        if (std::abs(w - ref) < std::abs(best - ref)) best = w;
    }
    return best;
}

cplx far_basepoint(const std::vector<BranchDatum>& bd) {
    cplx c = 0.0;
    for (const auto& d : bd) c += d.lambda;
    c /= double(bd.size());
    double spread = 1.0;
    for (const auto& d : bd) spread = std::max(spread, std::abs(d.lambda - c));
    return c - iunit * (10.0 + 5.0 * spread);
}

std::vector<LogFactor> rational_factors(const RationalCovering& R, cplx base) {
    std::vector<LogFactor> out;
    auto cfg = sheets_at(R, base);
    for (const auto& ie : infinity_series_all(R, cfg)) {
        if (ie.pole) continue;  // the sheet mapped to infinity carries no factor
        out.push_back({ie.series[0], ie.series[1], 1.0 / 6.0, 1});
    }
    for (const auto& d : branch_data(R))
        out.push_back({d.z_crit, d.z_of_x[1], -double(d.r - 1) / 12.0, d.r});
    return out;
}

const LogFactor& match_factor(const std::vector<LogFactor>& fs, const LogFactor& ref) {
    const LogFactor* best = nullptr;
    double dist = 0.0;
    for (const auto& f : fs) {
        if ((f.weight > 0) != (ref.weight > 0)) continue;
        double d = std::abs(f.pos - ref.pos);
        if (!best || d < dist) {
            best = &f;
            dist = d;
        }
    }
    if (!best) throw std::runtime_error("factor matching failed across the deformation");
    return *best;
}

std::vector<cplx> branch_values(const std::vector<BranchDatum>& bd) {
    std::vector<cplx> out(bd.size());
    for (std::size_t i = 0; i < bd.size(); ++i) out[i] = bd[i].lambda;
    return out;
}

HyperellipticCurve shifted_curve(const HyperellipticCurve& curve, std::size_t m, cplx dv) {
    auto pts = curve.e;
    pts[m] += dv;
    return HyperellipticCurve(pts);
}

// d/dlambda_m of the sum of principal logs of the even theta constants, by
// central differences through a full period recomputation.
cplx fd_even_theta_logsum(const HyperellipticCurve& curve, std::size_t m, double step) {
    double h = step * std::max(1.0, std::abs(curve.e[m]));
    auto pdp = period_matrices(shifted_curve(curve, m, h));
    auto pdm = period_matrices(shifted_curve(curve, m, -h));
    auto evens = even_characteristics(pdp.B.rows());
    cplx acc = 0.0;
    for (const auto& chi : evens)
        acc += std::log(theta_constant(pdp.B, chi) / theta_constant(pdm.B, chi));
    return acc / (2.0 * h);
}

}  // namespace

// ---- connection coefficients ----

cplx connection_genus0(const RationalCovering& R, std::size_t m) {
    auto bd = branch_data_for_connection(R);
    if (m >= bd.size()) throw std::invalid_argument("branch point index out of range");
    return schwarzian_connection(bd[m].z_of_x, bd[m].r);
}

std::vector<cplx> connection_genus0_all(const RationalCovering& R) {
    auto bd = branch_data_for_connection(R);
    std::vector<cplx> out(bd.size());
    for (std::size_t m = 0; m < bd.size(); ++m)
        out[m] = schwarzian_connection(bd[m].z_of_x, bd[m].r);
    return out;
}

cplx connection_genus1(const HyperellipticCurve& curve, const PeriodData& pd, std::size_t m) {
    if (curve.genus() != 1) throw std::invalid_argument("connection_genus1 needs genus one");
    if (m >= curve.e.size()) throw std::invalid_argument("branch point index out of range");
    Jet f = local_expansions(curve, pd, m, 6)[0];
    cplx sch = schwarzian_jet(f.antiderivative())[0];  // {z, x}|_0, z = int v
    cplx mu = pd.B(0, 0);
    cplx t1p = jacobi_thetas(mu).t1prime;
    cplx dlog_t1p = fd_derivative([](cplx w) { return jacobi_thetas(w).t1prime; }, mu) / t1p;
    cplx dmu = rauch_derivative(curve, pd, 0, 0, m);
    return (2.0 / 3.0) * dlog_t1p * dmu - sch / 12.0;
}

cplx connection_hyperelliptic_svfay(const HyperellipticCurve& curve, const PeriodData& pd,
                                    std::size_t m) {
    if (m >= curve.e.size()) throw std::invalid_argument("branch point index out of range");
    Jet sb = fay_connection_jet(curve, pd, m, 4);
    return -sb[0] / 12.0;  // simple branch point: -(1/(6*2)) S(0)
}

cplx connection_hyperelliptic_svfay(const HyperellipticCurve& curve, const PeriodData& pd,
                                    std::size_t m, const HalfCharacteristic& chi) {
    if (m >= curve.e.size()) throw std::invalid_argument("branch point index out of range");
    if (chi.parity() != -1) throw std::invalid_argument("characteristic must be odd");
    auto fs = local_expansions(curve, pd, m, 4);
    Jet sb;
    if (!fay_jet_on_characteristic(fs, pd.B, chi, 4, sb))
        throw std::runtime_error("characteristic degenerates at this branch point");
    return -sb[0] / 12.0;
}

cplx connection_wirtinger(const HyperellipticCurve& curve, const PeriodData& pd, std::size_t m) {
    int g = curve.genus();
    auto evens = nonvanishing_even_thetas(pd.B, /*require_all=*/true);
    CMat D = theta_log_hessian_sum(pd.B, evens.chis);
    cplx corr = quadratic_form(D, f_at_zero(curve, pd, m));
    double denom = std::pow(4.0, g) + std::pow(2.0, g);
    return connection_hyperelliptic_svfay(curve, pd, m) - corr / denom;
}

// ---- tau functions ----

TauResult tau_rational(const RationalCovering& R, double fd_step) {
    auto bd = branch_data(R);
    cplx base = far_basepoint(bd);
    auto factors = rational_factors(R, base);

    TauResult out;
    for (const auto& f : factors) out.log_tau += f.weight * std::log(f.c1);
    out.tau_pow12 = std::exp(12.0 * out.log_tau);

    auto lambdas = branch_values(bd);
    out.dlog.resize(bd.size());
    for (std::size_t m = 0; m < bd.size(); ++m) {
        double h = fd_step * std::max(1.0, std::abs(lambdas[m]));
        auto tp = lambdas, tm = lambdas;
        tp[m] += h;
        tm[m] -= h;
        auto fp = rational_factors(deform_to_branch_points(R, tp), base);
        auto fm = rational_factors(deform_to_branch_points(R, tm), base);
        cplx acc = 0.0;
        for (const auto& f : factors) {
            cplx cp = align_factor(match_factor(fp, f).c1, f.c1, f.r);
            cplx cm = align_factor(match_factor(fm, f).c1, f.c1, f.r);
            acc += f.weight * std::log(cp / cm);
        }
        out.dlog[m] = acc / (2.0 * h);
    }
    return out;
}

EllipticLocalData elliptic_local_data(const HyperellipticCurve& curve, const PeriodData& pd) {
    if (curve.genus() != 1) throw std::invalid_argument("elliptic_local_data needs genus one");
    EllipticLocalData data;
    data.mu = pd.B(0, 0);
    for (std::size_t m = 0; m < curve.e.size(); ++m) {
        data.f.push_back(local_expansions(curve, pd, m, 2)[0][0]);
        data.r.push_back(2);
    }
    for (const auto& sheet : infinity_expansions(curve, pd, 2)) data.h.push_back(sheet[0][0]);
    return data;
}

namespace {

TauResult tau_elliptic_core(const EllipticLocalData& data, bool bergmann) {
    if (data.f.size() != data.r.size())
        throw std::invalid_argument("mismatched branch point data");
    if (data.mu.imag() <= 0.0)
        throw std::invalid_argument("modulus must have positive imaginary part");
    int rh = 0;
    for (int r : data.r) rh += r - 1;
    if (rh != 2 * int(data.h.size()))
        throw std::invalid_argument("branch data violates the genus-one degree count");

    TauResult out;
    if (bergmann) out.log_tau += (2.0 / 3.0) * std::log(jacobi_thetas(data.mu).t1prime);
    for (cplx h : data.h) {
        if (h == cplx(0.0)) throw std::invalid_argument("vanishing differential at infinity");
        out.log_tau += std::log(h) / 6.0;
    }
    for (std::size_t m = 0; m < data.f.size(); ++m) {
        if (data.f[m] == cplx(0.0))
            throw std::invalid_argument("vanishing differential at a branch point");
        out.log_tau -= double(data.r[m] - 1) / 12.0 * std::log(data.f[m]);
    }
    out.tau_pow12 = std::exp(12.0 * out.log_tau);
    return out;
}

}  // namespace

TauResult tau_elliptic_bergmann(const EllipticLocalData& data) {
    return tau_elliptic_core(data, true);
}

TauResult tau_elliptic_wirtinger(const EllipticLocalData& data) {
    return tau_elliptic_core(data, false);
}

TauResult tau_bergmann_hyperelliptic(const HyperellipticCurve& curve, const PeriodData& pd,
                                     bool with_dlog, double fd_step) {
    const auto& e = curve.e;
    cplx det = mat_det(pd.A);
    if (std::abs(det) < 1e-12)
        throw std::runtime_error("a-period matrix is numerically singular");

    TauResult out;
    out.log_tau = std::log(det);
    for (std::size_t m = 0; m < e.size(); ++m)
        for (std::size_t n = m + 1; n < e.size(); ++n)
            out.log_tau += 0.25 * std::log(e[m] - e[n]);
    out.tau_pow12 = std::exp(12.0 * out.log_tau);

    if (with_dlog) {
        out.dlog.resize(e.size());
        for (std::size_t m = 0; m < e.size(); ++m) {
            cplx acc = 0.0;
            for (std::size_t n = 0; n < e.size(); ++n)
                if (n != m) acc += 0.25 / (e[m] - e[n]);
            double h = fd_step * std::max(1.0, std::abs(e[m]));
            cplx detp = mat_det(period_matrices(shifted_curve(curve, m, h)).A);
            cplx detm = mat_det(period_matrices(shifted_curve(curve, m, -h)).A);
            out.dlog[m] = acc + std::log(detp / detm) / (2.0 * h);
        }
    }
    return out;
}

namespace {

TauResult tau_wirtinger_core(const HyperellipticCurve& curve, const PeriodData& pd,
                             bool with_dlog, double fd_step, bool starred) {
    int g = curve.genus();
    auto evens = nonvanishing_even_thetas(pd.B, /*require_all=*/!starred);
    double exponent;
    if (starred) {
        double count = binom(2 * g + 2, g + 1) / 2.0;
        if (double(evens.chis.size()) != count)
            throw std::runtime_error("unexpected number of non-vanishing even theta constants");
        exponent = -4.0 / binom(2 * g + 2, g + 1);
    } else {
        exponent = -1.0 / (std::pow(4.0, g - 1) + std::pow(2.0, g - 2));
    }

    TauResult out = tau_bergmann_hyperelliptic(curve, pd, with_dlog, fd_step);
    for (cplx t : evens.values) out.log_tau += exponent * std::log(t);
    out.tau_pow12 = std::exp(12.0 * out.log_tau);

    if (with_dlog) {
        // d/dlambda_m Theta = (1/4) sum_ij Theta_{z_i z_j} f_i f_j via the heat
        // equation and the Rauch derivative of the period matrix
        CMat D = theta_log_hessian_sum(pd.B, evens.chis);
        for (std::size_t m = 0; m < curve.e.size(); ++m)
            out.dlog[m] += exponent * 0.25 * quadratic_form(D, f_at_zero(curve, pd, m));
    }
    return out;
}

}  // namespace

TauResult tau_wirtinger(const HyperellipticCurve& curve, const PeriodData& pd, bool with_dlog,
                        double fd_step) {
    return tau_wirtinger_core(curve, pd, with_dlog, fd_step, false);
}

TauResult tau_wirtinger_star(const HyperellipticCurve& curve, const PeriodData& pd,
                             bool with_dlog, double fd_step) {
    return tau_wirtinger_core(curve, pd, with_dlog, fd_step, true);
}

// ---- identity checks ----

double flatness_residual_genus0(const RationalCovering& R, std::size_t m, std::size_t n,
                                double step) {
    auto bd = branch_data(R);
    if (m >= bd.size() || n >= bd.size() || m == n)
        throw std::invalid_argument("flatness check needs two distinct branch points");
    auto lambdas = branch_values(bd);

    auto coeff_after_shift = [&](std::size_t moved, double h, std::size_t probed) {
        auto t = lambdas;
        t[moved] += h;
        auto Rs = deform_to_branch_points(R, t);
        auto bds = branch_data_for_connection(Rs);
        std::size_t best = 0;
        for (std::size_t k = 1; k < bds.size(); ++k)
            if (std::abs(bds[k].z_crit - bd[probed].z_crit) <
                std::abs(bds[best].z_crit - bd[probed].z_crit))
                best = k;
        return schwarzian_connection(bds[best].z_of_x, bds[best].r);
    };

    double hn = step * std::max(1.0, std::abs(lambdas[n]));
    double hm = step * std::max(1.0, std::abs(lambdas[m]));
    cplx dn_bm = (coeff_after_shift(n, hn, m) - coeff_after_shift(n, -hn, m)) / (2.0 * hn);
    cplx dm_bn = (coeff_after_shift(m, hm, n) - coeff_after_shift(m, -hm, n)) / (2.0 * hm);
    return std::abs(dn_bm - dm_bn);
}

double flatness_residual_hyperelliptic(const HyperellipticCurve& curve, std::size_t m,
                                       std::size_t n, bool wirtinger, double step) {
    if (m >= curve.e.size() || n >= curve.e.size() || m == n)
        throw std::invalid_argument("flatness check needs two distinct branch points");

    auto coeff = [&](const HyperellipticCurve& c, std::size_t probed) {
        auto pd = period_matrices(c);
        return wirtinger ? connection_wirtinger(c, pd, probed)
                         : connection_hyperelliptic_svfay(c, pd, probed);
    };
    auto derivative = [&](std::size_t moved, std::size_t probed) {
        double h = step * std::max(1.0, std::abs(curve.e[moved]));
        return (coeff(shifted_curve(curve, moved, h), probed) -
                coeff(shifted_curve(curve, moved, -h), probed)) /
               (2.0 * h);
    };
    return std::abs(derivative(n, m) - derivative(m, n));
}

double dobavka_residual(const HyperellipticCurve& curve, std::size_t m, double step) {
    auto pd = period_matrices(curve);
    cplx am = connection_wirtinger(curve, pd, m);
    cplx bm = connection_hyperelliptic_svfay(curve, pd, m);
    int g = curve.genus();
    double c = 4.0 / (std::pow(4.0, g) + std::pow(2.0, g));
    return std::abs(am - bm + c * fd_even_theta_logsum(curve, m, step));
}

double residue_formula_check_genus0(const RationalCovering& R, std::size_t m,
                                    double radius_scale) {
    auto bd = branch_data(R);
    if (m >= bd.size()) throw std::invalid_argument("branch point index out of range");
    cplx lm = bd[m].lambda;

    double dist = 1e100;
    cplx expected = 0.0;
    for (std::size_t k = 0; k < bd.size(); ++k) {
        double d = std::abs(bd[k].lambda - lm);
        if (d < 1e-9 * std::max(1.0, std::abs(lm)))
            expected += connection_genus0(R, k);  // ramification points sharing the value
        else
            dist = std::min(dist, d);
    }
    double rho = radius_scale * 0.3 * std::min(dist, 1.0 + std::abs(lm));
    if (rho <= 0.0) throw std::runtime_error("no room for the residue contour");

    Poly dnum = poly_derivative(R.num), dden = poly_derivative(R.den);
    auto kernel_sum = [&](cplx lambda) {
        Poly p = poly_sub(R.num, poly_scale(lambda, R.den));
        auto roots = polynomial_roots(p);
        std::vector<cplx> z, zp;
        for (const auto& rt : roots) {
            cplx den = poly_eval(R.den, rt.z);
            cplx rp = (poly_eval(dnum, rt.z) * den - poly_eval(R.num, rt.z) * poly_eval(dden, rt.z)) /
                      (den * den);
            z.push_back(rt.z);
            zp.push_back(1.0 / rp);
        }
        // unordered sheet pairs; the symmetric kernel doubles them below
        cplx acc = 0.0;
        for (std::size_t j = 0; j < z.size(); ++j)
            for (std::size_t k = j + 1; k < z.size(); ++k) {
                cplx diff = z[j] - z[k];
                acc += zp[j] * zp[k] / (diff * diff);
            }
        return acc;
    };
    cplx res = contour_integral(circle_contour(lm, rho),
                                std::function<cplx(cplx)>(kernel_sum)) /
               (2.0 * pi * iunit);
    return std::abs(2.0 * res - expected);
}

} // namespace htau
