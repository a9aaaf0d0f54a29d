#include "htau/isomonodromy.hpp"

#include "htau/tau.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace htau {

namespace {

double points_scale(const std::vector<cplx>& pts) {
    double s = 1.0;
    for (cplx p : pts) s = std::max(s, std::abs(p));
    return s;
}

std::vector<cplx> distinct_branch_values(const std::vector<BranchDatum>& bd) {
    std::vector<cplx> vals;
    for (const auto& d : bd) vals.push_back(d.lambda);
    double tol = 1e-9 * points_scale(vals);
    std::vector<cplx> out;
    for (cplx v : vals) {
        bool seen = false;
        for (cplx w : out) seen = seen || std::abs(v - w) < tol;
        if (!seen) out.push_back(v);
    }
    return out;
}

double branch_clearance(const std::vector<cplx>& values, cplx lambda) {
    double d = 1e300;
    for (cplx v : values) d = std::min(d, std::abs(lambda - v));
    return d;
}

double nearest_neighbour(const std::vector<cplx>& values) {
    double d = 1e300;
    for (std::size_t i = 0; i + 1 < values.size(); ++i)
        for (std::size_t j = i + 1; j < values.size(); ++j)
            d = std::min(d, std::abs(values[i] - values[j]));
    return d;
}

// z(lambda) around a regular fibre point as a jet in the lambda displacement
Jet fibre_jet(const RationalCovering& R, cplx z0, std::size_t order) {
    Jet lam = poly_jet(R.num, z0, order + 1) / poly_jet(R.den, z0, order + 1);
    lam.coeff(0) = 0.0;
    return invert_series(lam).truncated(order);
}

// fibre over the current point plus continuously tracked sqrt(dz/dlambda)
struct Frame {
    std::vector<cplx> z;
    std::vector<cplx> sq;
};

Frame initial_frame(const RationalCovering& R, const std::vector<cplx>& roots) {
    Frame fr;
    fr.z = roots;
    for (cplx z0 : roots) fr.sq.push_back(std::sqrt(fibre_jet(R, z0, 1)[1]));
    return fr;
}

void continue_frame(const RationalCovering& R, const std::function<cplx(double)>& path,
                    Frame& fr) {
    auto per_step = [&](double, const std::vector<cplx>& roots) {
        for (std::size_t k = 0; k < roots.size(); ++k) {
            cplx s = std::sqrt(fibre_jet(R, roots[k], 1)[1]);
            if (std::abs(s - fr.sq[k]) > std::abs(s + fr.sq[k])) s = -s;
            fr.sq[k] = s;
        }
    };
    fr.z = continue_sheets(R, path, fr.z, per_step);
}

CMat psi_from_frame(cplx lambda, cplx lambda0, const Frame& fr, const Frame& base) {
    std::size_t n = base.z.size();
    CMat psi(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
            psi(j, k) = (lambda - lambda0) * fr.sq[k] * base.sq[j] / (fr.z[k] - base.z[j]);
    return psi;
}

// Psi_lambda Psi^{-1}; column k of Psi_lambda obeys
// (Psi_lambda)_jk = Psi_jk (1/(lambda-lambda0) + z''_k/(2 z'_k) - z'_k/(z_k - z0_j)).
CMat log_derivative_from_frame(const RationalCovering& R, cplx lambda, cplx lambda0,
                               const Frame& fr, const Frame& base) {
    std::size_t n = base.z.size();
    CMat psi = psi_from_frame(lambda, lambda0, fr, base);
    CMat dpsi(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        Jet g = fibre_jet(R, fr.z[k], 2);
        cplx zp = g[1];
        cplx w = g[2] / g[1];
        for (std::size_t j = 0; j < n; ++j)
            dpsi(j, k) = psi(j, k) * (1.0 / (lambda - lambda0) + w - zp / (fr.z[k] - base.z[j]));
    }
    return dpsi * mat_inverse(psi);
}

// Visits n equally spaced nodes counterclockwise, starting from the entry
// angle phi0; the frame is carried along the arcs between nodes.
void walk_circle(const RationalCovering& R, cplx center, double radius, double phi0,
                 Frame fr, int n, const std::function<void(int, cplx, const Frame&)>& visit) {
    visit(0, center + std::polar(radius, phi0), fr);
    for (int i = 1; i < n; ++i) {
        double a = phi0 + 2.0 * pi * (i - 1) / n;
        double b = phi0 + 2.0 * pi * i / n;
        auto arc = [=](double t) { return center + std::polar(radius, a + (b - a) * t); };
        continue_frame(R, arc, fr);
        visit(i, arc(1.0), fr);
    }
}

struct QuadratureSetup {
    cplx center;
    double radius = 0.0;
    double phi0 = 0.0;
    Frame entry;
};

QuadratureSetup circle_setup(const RationalCovering& R, const Frame& base, cplx lambda0,
                             cplx center, double radius) {
    QuadratureSetup q;
    q.center = center;
    q.radius = radius;
    q.phi0 = std::arg(lambda0 - center);
    cplx entry_pt = center + std::polar(radius, q.phi0);
    q.entry = base;
    continue_frame(R, [=](double t) { return lambda0 + t * (entry_pt - lambda0); }, q.entry);
    return q;
}

CMat residue_matrix(const RationalCovering& R, const Frame& base, cplx lambda0,
                    const QuadratureSetup& q) {
    std::size_t N = base.z.size();
    CMat prev(N, N);
    for (int n = 64; n <= 512; n *= 2) {
        CMat acc(N, N);
        walk_circle(R, q.center, q.radius, q.phi0, q.entry, n,
                    [&](int i, cplx lambda, const Frame& fr) {
                        CMat F = log_derivative_from_frame(R, lambda, lambda0, fr, base);
                        acc = acc + std::polar(q.radius / n, q.phi0 + 2.0 * pi * i / n) * F;
                    });
        if (n > 64 && mat_max_abs(acc - prev) < 1e-10 * std::max(1.0, mat_max_abs(acc)))
            return acc;
        prev = acc;
    }
    return prev;
}

cplx residue_half_tr_squared(const RationalCovering& R, const Frame& base, cplx lambda0,
                             const QuadratureSetup& q) {
    cplx prev(0.0);
    for (int n = 64; n <= 512; n *= 2) {
        cplx acc(0.0);
        walk_circle(R, q.center, q.radius, q.phi0, q.entry, n,
                    [&](int i, cplx lambda, const Frame& fr) {
                        CMat F = log_derivative_from_frame(R, lambda, lambda0, fr, base);
                        acc += std::polar(q.radius / n, q.phi0 + 2.0 * pi * i / n)
                               * (0.5 * mat_trace(F * F));
                    });
        if (n > 64 && std::abs(acc - prev) < 1e-11 * std::max(1.0, std::abs(acc)))
            return acc;
        prev = acc;
    }
    return prev;
}

cplx values_centroid(const std::vector<cplx>& values) {
    cplx c(0.0);
    for (cplx v : values) c += v;
    return c / double(values.size());
}

double values_spread(const std::vector<cplx>& values, cplx centroid) {
    double s = 0.0;
    for (cplx v : values) s = std::max(s, std::abs(v - centroid));
    return s;
}

bool segment_is_clear(const std::vector<cplx>& values, cplx a, cplx b, double clearance) {
    for (int s = 0; s <= 256; ++s) {
        cplx p = a + (double(s) / 256.0) * (b - a);
        if (branch_clearance(values, p) < clearance) return false;
    }
    return true;
}

} // namespace

PsiMatrix psi_matrix(const RationalCovering& R, cplx lambda, cplx lambda0) {
    auto values = distinct_branch_values(branch_data(R, 3));
    double scale = points_scale(values);
    if (branch_clearance(values, lambda) < 1e-6 * scale ||
        branch_clearance(values, lambda0) < 1e-6 * scale)
        throw std::domain_error("psi evaluation point sits on a branch point");

    auto cfg = sheets_at(R, lambda0);
    Frame base = initial_frame(R, cfg.roots);
    PsiMatrix out;
    out.fibre0 = base.z;
    if (lambda == lambda0) {
        out.psi = CMat::identity(base.z.size());
        out.fibre = base.z;
        return out;
    }
    if (!segment_is_clear(values, lambda0, lambda, 1e-6 * scale))
        throw std::domain_error("psi evaluation segment crosses a branch point");

    Frame fr = base;
    continue_frame(R, [=](double t) { return lambda0 + t * (lambda - lambda0); }, fr);
    out.fibre = fr.z;
    out.psi = psi_from_frame(lambda, lambda0, fr, base);
    if (std::abs(mat_det(out.psi) - 1.0) > 1e-8)
        throw std::runtime_error("psi determinant drifted off 1");
    return out;
}

double cauchy_determinant_check(const std::vector<cplx>& z, const std::vector<cplx>& mu) {
    if (z.empty() || z.size() != mu.size())
        throw std::invalid_argument("need two equally sized nonempty point sets");
    std::size_t n = z.size();
    double scale = std::max(points_scale(z), points_scale(mu));
    CMat K(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
            if (std::abs(z[j] - mu[k]) < 1e-13 * scale)
                throw std::invalid_argument("singular configuration");
            K(j, k) = 1.0 / (z[j] - mu[k]);
        }
    cplx det = mat_det(K);
    cplx rhs(1.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k) rhs *= (z[j] - z[k]) * (mu[k] - mu[j]);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) rhs /= z[j] - mu[k];
    return std::abs(det - rhs) / std::max({std::abs(det), std::abs(rhs), 1e-300});
}

MonodromyRep monodromy_rep(const RationalCovering& R, cplx lambda0) {
    auto values = distinct_branch_values(branch_data(R, 3));
    double scale = points_scale(values);
    if (branch_clearance(values, lambda0) < 1e-4 * scale)
        throw std::domain_error("monodromy basepoint too close to a branch point");
    double nn = nearest_neighbour(values);
    if (values.size() == 1) nn = std::abs(values[0] - lambda0);

    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::arg(values[a] - lambda0) < std::arg(values[b] - lambda0);
    });

    auto cfg = sheets_at(R, lambda0);
    Frame base = initial_frame(R, cfg.roots);
    std::size_t N = base.z.size();

    MonodromyRep rep;
    for (std::size_t idx : order) {
        cplx vm = values[idx];
        double radius = 0.2 * std::min(nn, std::abs(vm - lambda0));
        Frame fr = base;
        continue_frame(R, loop_path(lambda0, vm, radius), fr);

        CMat M(N, N);
        std::vector<char> used(N, 0);
        for (std::size_t k = 0; k < N; ++k) {
            std::size_t best = 0;
            double dist = 1e300;
            for (std::size_t j = 0; j < N; ++j) {
                double d = std::abs(fr.z[k] - base.z[j]);
                if (d < dist) {
                    dist = d;
                    best = j;
                }
            }
            if (used[best] || dist > 1e-6 * scale)
                throw std::runtime_error("monodromy loop failed to close on the fibre");
            used[best] = 1;
            cplx ratio = fr.sq[k] / base.sq[best];
            double sign = ratio.real() >= 0.0 ? 1.0 : -1.0;
            rep.entry_defect = std::max(rep.entry_defect, std::abs(ratio - sign));
            rep.entry_defect = std::max(rep.entry_defect, dist);
            M(best, k) = sign;
        }
        rep.points.push_back(vm);
        rep.loops.push_back(std::move(M));
    }

    CMat prod = CMat::identity(N);
    for (auto it = rep.loops.rbegin(); it != rep.loops.rend(); ++it) prod = prod * (*it);
    if (mat_max_abs(prod - CMat::identity(N)) > 1e-8)
        throw std::runtime_error("monodromy loop product is not the identity");
    return rep;
}

SchlesingerData schlesinger_residues(const RationalCovering& R, cplx lambda0) {
    auto values = distinct_branch_values(branch_data(R, 3));
    double scale = points_scale(values);
    if (branch_clearance(values, lambda0) < 1e-4 * scale)
        throw std::domain_error("basepoint too close to a branch point");
    double nn = nearest_neighbour(values);
    if (values.size() == 1) nn = std::abs(values[0] - lambda0);

    auto cfg = sheets_at(R, lambda0);
    Frame base = initial_frame(R, cfg.roots);

    SchlesingerData out;
    out.points = values;
    for (cplx vm : values) {
        double clear_others = 1e300;
        for (cplx w : values)
            if (std::abs(w - vm) > 1e-9 * scale) clear_others = std::min(clear_others, std::abs(w - vm));
        double radius = 0.25 * std::min(clear_others, std::abs(vm - lambda0));
        out.residues.push_back(
            residue_matrix(R, base, lambda0, circle_setup(R, base, lambda0, vm, radius)));
    }

    // probe the rational reconstruction away from the circles
    cplx c = values_centroid(values);
    double spread = std::max(values_spread(values, c), 0.5);
    int found = 0;
    for (double angle : {0.37, 1.9, 3.3, 4.8, 5.9, 0.9, 2.6}) {
        if (found == 3) break;
        cplx p = c + std::polar(1.7 * spread, angle);
        if (branch_clearance(values, p) < 0.15 * nn) continue;
        if (!segment_is_clear(values, lambda0, p, 0.05 * nn)) continue;
        ++found;
        Frame fr = base;
        continue_frame(R, [=](double t) { return lambda0 + t * (p - lambda0); }, fr);
        CMat F = log_derivative_from_frame(R, p, lambda0, fr, base);
        CMat recon(F.rows(), F.cols());
        for (std::size_t m = 0; m < values.size(); ++m)
            recon = recon + (1.0 / (p - values[m])) * out.residues[m];
        double defect = mat_max_abs(F - recon) / std::max(1.0, mat_max_abs(F));
        out.probe_defect = std::max(out.probe_defect, defect);
    }
    if (found == 0 || out.probe_defect > 1e-7)
        throw std::runtime_error("schlesinger residues fail to rebuild the connection");
    return out;
}

cplx jm_log_derivative(const RationalCovering& R, std::size_t m) {
    auto bd = branch_data(R);
    if (m >= bd.size()) throw std::out_of_range("branch point index");
    cplx value = -0.5 * connection_genus0(R, m);

    auto values = distinct_branch_values(bd);
    double scale = points_scale(values);
    cplx lam_m = bd[m].lambda;
    cplx expected(0.0);
    for (std::size_t n = 0; n < bd.size(); ++n)
        if (std::abs(bd[n].lambda - lam_m) < 1e-9 * scale)
            expected += -0.5 * connection_genus0(R, n);

    cplx c = values_centroid(values);
    double spread = std::max(values_spread(values, c), 0.5);
    cplx lambda0 = c - cplx(0.0, 1.0) * (2.5 * spread + 3.0);

    double clear_others = 1e300;
    for (cplx w : values)
        if (std::abs(w - lam_m) > 1e-9 * scale) clear_others = std::min(clear_others, std::abs(w - lam_m));
    double radius = 0.3 * std::min(clear_others, std::abs(lam_m - lambda0));

    auto cfg = sheets_at(R, lambda0);
    Frame base = initial_frame(R, cfg.roots);
    cplx quad =
        residue_half_tr_squared(R, base, lambda0, circle_setup(R, base, lambda0, lam_m, radius));
    if (std::abs(quad - expected) > 1e-6 * std::max(1.0, std::abs(expected)))
        throw std::runtime_error("quadrature residue disagrees with the jet value");
    return value;
}

} // namespace htau
