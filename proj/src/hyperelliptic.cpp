#include "htau/hyperelliptic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace htau {

namespace {

cplx ipow(cplx z, int k) {
    cplx acc(1.0);
    for (int i = 0; i < k; ++i) acc *= z;
    return acc;
}

cplx sqrt_prod(const std::vector<cplx>& e, cplx z) {
    cplx p(1.0);
    for (cplx ek : e) p *= z - ek;
    return std::sqrt(p);
}

// nu at a point far from the branch points, on the sheet where nu ~ +lambda^{g+1};
// summing principal logs factor by factor keeps the determination unambiguous.
cplx anchored_value(const std::vector<cplx>& e, cplx z) {
    cplx acc(0.0);
    for (cplx ek : e) acc += 0.5 * std::log(z - ek);
    return std::exp(acc);
}

double dist_to_segment(cplx p, cplx a, cplx b) {
    cplx d = b - a;
    double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(p - a);
    double t = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

Contour capsule(cplx a, cplx b, double rho) {
    cplx u = (b - a) / std::abs(b - a);
    cplx n = iunit * u;
    double phi = std::arg(u);
    return {Piece::seg(a - rho * n, b - rho * n),
            Piece::make_arc(b, rho, phi - pi / 2.0, phi + pi / 2.0),
            Piece::seg(b + rho * n, a + rho * n),
            Piece::make_arc(a, rho, phi + pi / 2.0, phi + 3.0 * pi / 2.0)};
}

cplx contour_point(const Contour& path, const std::vector<double>& cum, double frac) {
    auto it = std::upper_bound(cum.begin() + 1, cum.end(), frac);
    std::size_t k = std::min(std::size_t(it - cum.begin()) - 1, path.size() - 1);
    double span = cum[k + 1] - cum[k];
    double u = span > 0.0 ? (frac - cum[k]) / span : 0.0;
    return path[k].point(std::clamp(u, 0.0, 1.0));
}

std::vector<double> cumulative_fractions(const Contour& path) {
    std::vector<double> cum{0.0};
    double total = 0.0;
    for (const auto& p : path) total += p.length();
    double s = 0.0;
    for (const auto& p : path) {
        s += p.length();
        cum.push_back(s / total);
    }
    cum.back() = 1.0;
    return cum;
}

// continue nu along the straight segment z0 -> z1 starting from the value w0
cplx continue_sqrt(const std::vector<cplx>& e, cplx z0, cplx w0, cplx z1) {
    double t = 0.0, dt = 0.25;
    cplx w = w0;
    int guard = 0;
    while (t < 1.0) {
        if (++guard > 100000) throw std::runtime_error("square-root continuation stalled");
        double tn = std::min(1.0, t + dt);
        cplx p = sqrt_prod(e, z0 + tn * (z1 - z0));
        cplx cand = std::abs(p - w) <= std::abs(p + w) ? p : -p;
        if (std::abs(cand - w) > 0.4 * std::max(std::abs(w), std::abs(cand))) {
            dt *= 0.5;
            if (dt < 1e-10) throw std::runtime_error("square-root continuation step collapsed");
            continue;
        }
        w = cand;
        t = tn;
        dt = std::min(0.25, dt * 1.5);
    }
    return w;
}

// samples of nu along a closed contour, dense enough that the sign at any
// arc fraction can be recovered by comparing against the interpolated value
struct SqrtTable {
    std::vector<double> s;
    std::vector<cplx> w;

    cplx lookup(const std::vector<cplx>& e, cplx z, double frac) const {
        auto it = std::upper_bound(s.begin(), s.end(), frac);
        std::size_t hi = std::min(std::size_t(it - s.begin()), s.size() - 1);
        std::size_t lo = hi > 0 ? hi - 1 : 0;
        double span = s[hi] - s[lo];
        double u = span > 0.0 ? (frac - s[lo]) / span : 0.0;
        cplx ref = (1.0 - u) * w[lo] + u * w[hi];
        cplx p = sqrt_prod(e, z);
        return std::abs(p - ref) <= std::abs(p + ref) ? p : -p;
    }
};

SqrtTable build_sqrt_table(const Contour& path, const std::vector<double>& cum,
                           const std::vector<cplx>& e, cplx w_start) {
    SqrtTable tab;
    tab.s.push_back(0.0);
    tab.w.push_back(w_start);
    double t = 0.0, dt = 1.0 / 64.0;
    cplx w = w_start;
    int guard = 0;
    while (t < 1.0) {
        if (++guard > 2000000) throw std::runtime_error("square-root table build stalled");
        double tn = std::min(1.0, t + dt);
        cplx p = sqrt_prod(e, contour_point(path, cum, tn));
        cplx cand = std::abs(p - w) <= std::abs(p + w) ? p : -p;
        if (std::abs(cand - w) > 0.35 * std::max(std::abs(w), std::abs(cand))) {
            dt *= 0.5;
            if (dt < 1e-12) throw std::runtime_error("square-root table step collapsed");
            continue;
        }
        tab.s.push_back(tn);
        tab.w.push_back(cand);
        w = cand;
        t = tn;
        dt = std::min(1.0 / 64.0, dt * 1.5);
    }
    if (std::abs(tab.w.back() - w_start) > 1e-6 * std::abs(w_start))
        throw std::runtime_error("square-root branch tracking failed to close");
    return tab;
}

struct TrackedCycle {
    Contour path;
    std::vector<double> cum;
    SqrtTable table;
};

TrackedCycle track_cycle(const std::vector<cplx>& e, Contour path, cplx anchor, cplx w_anchor) {
    TrackedCycle tc;
    tc.cum = cumulative_fractions(path);
    cplx start = path.front().point(0.0);
    cplx w_start = continue_sqrt(e, anchor, w_anchor, start);
    tc.table = build_sqrt_table(path, tc.cum, e, w_start);
    tc.path = std::move(path);
    return tc;
}

cplx cycle_monomial_integral(const std::vector<cplx>& e, const TrackedCycle& tc, int beta,
                             double tol) {
    QuadConfig qc;
    qc.tol = tol;
    return contour_integral(
        tc.path, [&](cplx z, double s) { return ipow(z, beta) / tc.table.lookup(e, z, s); }, qc);
}

// anchor placed far out, rotated until the segments from it to every capsule
// start stay clear of the branch points
cplx pick_anchor(const std::vector<cplx>& e, const std::vector<cplx>& starts) {
    cplx center(0.0);
    for (cplx ek : e) center += ek / double(e.size());
    double spread = 1.0;
    for (cplx ek : e) spread = std::max(spread, std::abs(ek - center));
    double angle = 0.7310642;
    for (int attempt = 0; attempt < 20; ++attempt) {
        cplx anchor = center + 8.0 * spread * std::polar(1.0, angle);
        bool clear = true;
        for (cplx s : starts)
            for (cplx ek : e)
                if (dist_to_segment(ek, anchor, s) < 1e-8 * spread) clear = false;
        if (clear) return anchor;
        angle += 0.37;
    }
    throw std::runtime_error("could not place the square-root anchor");
}

double symmetry_defect(const CMat& m) {
    double defect = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            defect = std::max(defect, std::abs(m(i, j) - m(j, i)));
            scale = std::max(scale, std::abs(m(i, j)));
        }
    return scale > 0.0 ? defect / scale : 0.0;
}

// +1 for positive definite, -1 for negative definite, 0 otherwise
int definiteness(const CMat& m) {
    std::size_t g = m.rows();
    std::vector<std::vector<double>> im(g, std::vector<double>(g));
    for (std::size_t i = 0; i < g; ++i)
        for (std::size_t j = 0; j < g; ++j) im[i][j] = 0.5 * (m(i, j).imag() + m(j, i).imag());
    auto ev = sym_eigenvalues(im);
    if (ev.front() > 0.0) return 1;
    if (ev.back() < 0.0) return -1;
    return 0;
}

}  // namespace

HyperellipticCurve::HyperellipticCurve(std::vector<cplx> points) : e(std::move(points)) {
    if (e.size() < 4 || e.size() % 2 != 0)
        throw std::invalid_argument("a hyperelliptic curve needs an even number (>= 4) of branch points");
    double scale = 0.0;
    for (cplx ek : e) scale = std::max(scale, std::abs(ek));
    scale = std::max(scale, 1.0);
    for (std::size_t i = 0; i < e.size(); ++i)
        for (std::size_t j = i + 1; j < e.size(); ++j)
            if (std::abs(e[i] - e[j]) < 1e-12 * scale)
                throw std::invalid_argument("branch points collide");
}

PeriodData period_matrices(const HyperellipticCurve& curve, PeriodConfig cfg) {
    const auto& e = curve.e;
    std::size_t g = std::size_t(curve.genus());

    std::vector<std::pair<cplx, cplx>> spans;  // capsule segments, a-cycles then b-cycles
    for (std::size_t i = 0; i < g; ++i) spans.emplace_back(e[2 * i], e[2 * i + 1]);
    for (std::size_t i = 0; i < g; ++i) spans.emplace_back(e[2 * i + 1], e[2 * g]);

    // the capsule around each span must swallow the chain points that belong
    // to it and keep every other branch point outside
    std::vector<Contour> cycles;
    for (std::size_t c = 0; c < spans.size(); ++c) {
        auto [za, zb] = spans[c];
        double d_in = 0.0;
        double d_out = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < e.size(); ++k) {
            bool inside = c < g ? (k == 2 * c || k == 2 * c + 1)
                                : (k >= 2 * (c - g) + 1 && k <= 2 * g);
            double d = dist_to_segment(e[k], za, zb);
            if (inside)
                d_in = std::max(d_in, d);
            else
                d_out = std::min(d_out, d);
        }
        if (!(d_in < 0.6 * d_out))
            throw std::runtime_error("branch points too entangled for capsule cycles");
        cycles.push_back(capsule(za, zb, 0.5 * (d_in + d_out)));
    }

    std::vector<cplx> starts;
    for (const auto& c : cycles) starts.push_back(c.front().point(0.0));
    cplx anchor = pick_anchor(e, starts);
    cplx w_anchor = anchored_value(e, anchor);

    CMat A(g, g), Bper(g, g);
    for (std::size_t c = 0; c < cycles.size(); ++c) {
        TrackedCycle tc = track_cycle(e, cycles[c], anchor, w_anchor);
        for (std::size_t beta = 0; beta < g; ++beta) {
            cplx val = cycle_monomial_integral(e, tc, int(beta), cfg.tol);
            if (c < g)
                A(c, beta) = val;
            else
                Bper(c - g, beta) = val;
        }
    }

    auto assemble = [&](const CMat& Am, const CMat& Bm) {
        PeriodData pd;
        pd.A = Am;
        pd.Bper = Bm;
        pd.Ainv = mat_inverse(Am);
        pd.B = Bm * pd.Ainv;
        return pd;
    };

    PeriodData pd = assemble(A, Bper);
    int def = definiteness(pd.B);
    if (symmetry_defect(pd.B) <= cfg.sym_tol && def != 0) {
        if (def < 0) pd = assemble(A, cplx(-1.0) * Bper);
        return pd;
    }

    if (cfg.sign_search) {
        // anchored lifts of separate cycles may land on opposite sheets; the
        // orientation signs are recovered from symmetry + positivity of B
        CMat M = Bper * mat_inverse(A);
        for (unsigned mask = 0; mask < (1u << (2 * g)); ++mask) {
            CMat cand(g, g);
            for (std::size_t i = 0; i < g; ++i)
                for (std::size_t j = 0; j < g; ++j) {
                    double si = (mask >> i) & 1u ? -1.0 : 1.0;
                    double sj = (mask >> (g + j)) & 1u ? -1.0 : 1.0;
                    cand(i, j) = si * sj * M(i, j);
                }
            if (symmetry_defect(cand) > cfg.sym_tol || definiteness(cand) != 1) continue;
            CMat A2 = A, B2 = Bper;
            for (std::size_t j = 0; j < g; ++j) {
                double sj = (mask >> (g + j)) & 1u ? -1.0 : 1.0;
                double si = (mask >> j) & 1u ? -1.0 : 1.0;
                for (std::size_t beta = 0; beta < g; ++beta) {
                    A2(j, beta) = sj * A(j, beta);
                    B2(j, beta) = si * Bper(j, beta);
                }
            }
            return assemble(A2, B2);
        }
    }
    throw std::runtime_error("period matrix failed the symmetry / positivity checks");
}

cplx tracked_period_integral(const HyperellipticCurve& curve, const Contour& cycle, int beta,
                             double tol) {
    cplx start = cycle.front().point(0.0);
    cplx anchor = pick_anchor(curve.e, {start});
    TrackedCycle tc = track_cycle(curve.e, cycle, anchor, anchored_value(curve.e, anchor));
    return cycle_monomial_integral(curve.e, tc, beta, tol);
}

std::vector<Jet> local_expansions(const HyperellipticCurve& curve, const PeriodData& pd,
                                  std::size_t m, std::size_t order) {
    const auto& e = curve.e;
    std::size_t g = std::size_t(curve.genus());
    if (m >= e.size()) throw std::out_of_range("branch point index");

    Jet G(order, cplx(1.0));
    for (std::size_t n = 0; n < e.size(); ++n) {
        if (n == m) continue;
        Jet factor(order, e[m] - e[n]);
        if (order >= 2) factor.coeff(2) = 1.0;
        G = G * factor;
    }
    Jet base = Jet(order, cplx(2.0)) / jet_sqrt(G);

    Jet lam(order, e[m]);
    if (order >= 2) lam.coeff(2) = 1.0;
    std::vector<Jet> out;
    for (std::size_t i = 0; i < g; ++i) {
        Jet acc(order, cplx(0.0)), pw(order, cplx(1.0));
        for (std::size_t beta = 0; beta < g; ++beta) {
            acc += pd.Ainv(beta, i) * pw;
            pw = pw * lam;
        }
        out.push_back(acc * base);
    }
    return out;
}

std::vector<std::vector<Jet>> infinity_expansions(const HyperellipticCurve& curve,
                                                  const PeriodData& pd, std::size_t order) {
    const auto& e = curve.e;
    std::size_t g = std::size_t(curve.genus());

    Jet prod(order, cplx(1.0));
    for (cplx ek : e) {
        Jet factor(order, cplx(1.0));
        if (order >= 1) factor.coeff(1) = -ek;
        prod = prod * factor;
    }
    Jet unit = jet_sqrt(prod);  // = nu * zeta^{g+1} on the plus sheet

    std::vector<std::vector<Jet>> out(2);
    for (int sheet = 0; sheet < 2; ++sheet) {
        double sign = sheet == 0 ? -1.0 : 1.0;  // v/dzeta = -sigma * sum(...)
        for (std::size_t i = 0; i < g; ++i) {
            Jet acc(order, cplx(0.0));
            for (std::size_t beta = 0; beta < g; ++beta) {
                Jet mono(order, cplx(0.0));
                std::size_t k = g - 1 - beta;
                if (k <= order) mono.coeff(k) = pd.Ainv(beta, i);
                acc += mono;
            }
            out[sheet].push_back(cplx(sign) * (acc / unit));
        }
    }
    return out;
}

cplx rauch_derivative(const HyperellipticCurve& curve, const PeriodData& pd, std::size_t i,
                      std::size_t j, std::size_t m) {
    const auto& e = curve.e;
    std::size_t g = std::size_t(curve.genus());
    cplx w0(1.0);
    for (std::size_t n = 0; n < e.size(); ++n)
        if (n != m) w0 *= e[m] - e[n];
    w0 = std::sqrt(w0);
    cplx fi(0.0), fj(0.0);
    for (std::size_t beta = 0; beta < g; ++beta) {
        cplx mono = ipow(e[m], int(beta));
        fi += pd.Ainv(beta, i) * mono;
        fj += pd.Ainv(beta, j) * mono;
    }
    fi *= 2.0 / w0;
    fj *= 2.0 / w0;
    return pi * iunit * fi * fj;
}

} // namespace htau
