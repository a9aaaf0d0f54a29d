#include "htau/poly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace htau {

int poly_degree(const Poly& p, double drop_tol) {
    for (int k = int(p.size()) - 1; k >= 0; --k)
        if (std::abs(p[k]) > drop_tol) return k;
    return -1;
}

Poly poly_trim(Poly p, double rel_tol) {
    double m = 0.0;
    for (auto c : p) m = std::max(m, std::abs(c));
    int d = poly_degree(p, m * rel_tol);
    p.resize(std::size_t(std::max(d, 0)) + 1);
    if (d < 0) p[0] = 0.0;
    return p;
}

Poly poly_add(const Poly& a, const Poly& b) {
    Poly c(std::max(a.size(), b.size()), cplx(0.0));
    for (std::size_t k = 0; k < a.size(); ++k) c[k] += a[k];
    for (std::size_t k = 0; k < b.size(); ++k) c[k] += b[k];
    return c;
}

Poly poly_sub(const Poly& a, const Poly& b) {
    Poly c(std::max(a.size(), b.size()), cplx(0.0));
    for (std::size_t k = 0; k < a.size(); ++k) c[k] += a[k];
    for (std::size_t k = 0; k < b.size(); ++k) c[k] -= b[k];
    return c;
}

Poly poly_mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {cplx(0.0)};
    Poly c(a.size() + b.size() - 1, cplx(0.0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

Poly poly_scale(cplx s, Poly p) {
    for (auto& c : p) c *= s;
    return p;
}

Poly poly_derivative(const Poly& p) {
    if (p.size() <= 1) return {cplx(0.0)};
    Poly d(p.size() - 1);
    for (std::size_t k = 1; k < p.size(); ++k) d[k - 1] = double(k) * p[k];
    return d;
}

cplx poly_eval(const Poly& p, cplx z) {
    cplx v = 0.0;
    for (std::size_t k = p.size(); k-- > 0;) v = v * z + p[k];
    return v;
}

void poly_eval2(const Poly& p, cplx z, cplx& v, cplx& d) {
    v = 0.0;
    d = 0.0;
    for (std::size_t k = p.size(); k-- > 0;) {
        d = d * z + v;
        v = v * z + p[k];
    }
}

Jet poly_jet(const Poly& p, cplx z0, std::size_t order) {
    // synthetic division: repeated Horner at z0
    Poly work = p;
    std::vector<cplx> taylor(order + 1, cplx(0.0));
    for (std::size_t k = 0; k <= order; ++k) {
        if (work.empty()) break;
        cplx rem = 0.0;
        for (std::size_t j = work.size(); j-- > 0;) {
            cplx t = work[j] + rem * z0;
            rem = t;
            work[j] = t;
        }
        taylor[k] = work[0];
        work.erase(work.begin());
    }
    return Jet::from_coeffs(std::move(taylor));
}

namespace {

// xorshift-style deterministic generator for initial-guess jitter
double unit_rand(std::uint64_t& s) {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return double(s >> 11) * 0x1.0p-53;
}

} // namespace

std::vector<Root> polynomial_roots(const Poly& p_in, RootConfig cfg) {
    Poly p = poly_trim(p_in);
    int deg = poly_degree(p);
    if (deg < 0) throw std::domain_error("roots of the zero polynomial");
    if (deg == 0) return {};
    p.resize(std::size_t(deg) + 1);

    // Cauchy bound for the root radius
    double lead = std::abs(p.back());
    double bound = 0.0;
    for (int k = 0; k < deg; ++k) bound = std::max(bound, std::abs(p[k]) / lead);
    bound += 1.0;

    std::uint64_t rng = cfg.seed ? cfg.seed : 1;
    std::vector<cplx> z(deg);
    for (int k = 0; k < deg; ++k) {
        double ang = 2.0 * pi * (double(k) / deg) + 0.41 + 0.17 * unit_rand(rng);
        double rad = bound * (0.5 + 0.25 * unit_rand(rng));
        z[k] = std::polar(rad, ang);
    }

    double scale = std::max(1.0, bound);
    for (int it = 0; it < cfg.max_iter; ++it) {
        double moved = 0.0;
        for (int i = 0; i < deg; ++i) {
            cplx v, d;
            poly_eval2(p, z[i], v, d);
            cplx ratio;
            if (std::abs(v) == 0.0) continue;
            if (std::abs(d) == 0.0)
                ratio = v / (lead * 1e-30);
            else
                ratio = v / d;
            cplx sum = 0.0;
            for (int j = 0; j < deg; ++j)
                if (j != i) sum += 1.0 / (z[i] - z[j]);
            cplx denom = 1.0 - ratio * sum;
            cplx step = std::abs(denom) > 1e-300 ? ratio / denom : ratio;
            z[i] -= step;
            moved = std::max(moved, std::abs(step));
        }
        if (moved < cfg.tol * scale) break;
    }

    // multiplicity clustering: greedy union by distance
    double crad = cfg.cluster * scale;
    std::vector<std::vector<int>> groups;
    for (int i = 0; i < deg; ++i) {
        bool placed = false;
        for (std::size_t gidx = 0; gidx < groups.size() && !placed; ++gidx) {
            for (int j : groups[gidx]) {
                if (std::abs(z[i] - z[j]) < crad) {
                    groups[gidx].push_back(i);
                    placed = true;
                    break;
                }
            }
        }
        if (!placed) groups.push_back({i});
    }

    std::vector<Root> roots;
    for (auto& grp : groups) {
        cplx mean = 0.0;
        for (int j : grp) mean += z[j];
        mean /= double(grp.size());
        if (grp.size() == 1) {
            // Newton polish for simple roots
            cplx r = mean;
            for (int k = 0; k < 3; ++k) {
                cplx v, d;
                poly_eval2(p, r, v, d);
                if (std::abs(d) == 0.0) break;
                r -= v / d;
            }
            mean = r;
        }
        roots.push_back({mean, int(grp.size())});
    }
    std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) {
        if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
        return a.z.imag() < b.z.imag();
    });
    return roots;
}

} // namespace htau
