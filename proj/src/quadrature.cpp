#include "htau/quadrature.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace htau {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        std::vector<double> x(n), w(n);
        for (int i = 0; i < n; ++i) {
            // Chebyshev initial guess, Newton on P_n
            double t = std::cos(pi * (i + 0.75) / (n + 0.5));
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0, p1 = t;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                double dp = n * (t * p1 - p0) / (t * t - 1.0);
                double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-16) break;
            }
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (t * p1 - p0) / (t * t - 1.0);
            x[i] = t;
            w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        }
        it = cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first;
    }
    nodes = it->second.first;
    weights = it->second.second;
}

Piece Piece::seg(cplx a, cplx b) {
    Piece p;
    p.kind = segment;
    p.a = a;
    p.b = b;
    return p;
}

Piece Piece::make_arc(cplx center, double radius, double ang0, double ang1) {
    Piece p;
    p.kind = arc;
    p.center = center;
    p.radius = radius;
    p.ang0 = ang0;
    p.ang1 = ang1;
    return p;
}

cplx Piece::point(double u) const {
    if (kind == segment) return a + u * (b - a);
    return center + std::polar(radius, ang0 + u * (ang1 - ang0));
}

cplx Piece::velocity(double u) const {
    if (kind == segment) return b - a;
    return iunit * (ang1 - ang0) * std::polar(radius, ang0 + u * (ang1 - ang0));
}

double Piece::length() const {
    if (kind == segment) return std::abs(b - a);
    return radius * std::abs(ang1 - ang0);
}

Contour circle_contour(cplx center, double radius) {
    return {Piece::make_arc(center, radius, 0.0, 2.0 * pi)};
}

namespace {

struct PieceQuad {
    const Piece* piece;
    double s0, ds;  // global arc-length fraction of the piece start and extent

    cplx gl(const std::function<cplx(cplx, double)>& f, double u0, double u1, int n) const {
        std::vector<double> x, w;
        gauss_legendre(n, x, w);
        cplx acc = 0.0;
        double mid = 0.5 * (u0 + u1), half = 0.5 * (u1 - u0);
        for (int i = 0; i < n; ++i) {
            double u = mid + half * x[i];
            acc += w[i] * f(piece->point(u), s0 + ds * u) * piece->velocity(u);
        }
        return half * acc;
    }

    cplx adaptive(const std::function<cplx(cplx, double)>& f, double u0, double u1,
                  cplx coarse, const QuadConfig& cfg, double tol, int depth) const {
        double um = 0.5 * (u0 + u1);
        cplx left = gl(f, u0, um, cfg.nodes);
        cplx right = gl(f, um, u1, cfg.nodes);
        cplx fine = left + right;
        if (std::abs(fine - coarse) <= tol || depth >= cfg.max_depth) {
            if (depth >= cfg.max_depth && std::abs(fine - coarse) > tol * 16.0)
                throw std::runtime_error("contour quadrature failed to converge");
            return fine;
        }
        return adaptive(f, u0, um, left, cfg, 0.5 * tol, depth + 1) +
               adaptive(f, um, u1, right, cfg, 0.5 * tol, depth + 1);
    }
};

} // namespace

cplx contour_integral(const Contour& path, const std::function<cplx(cplx, double)>& f,
                      QuadConfig cfg) {
    double total_len = 0.0;
    for (const auto& p : path) total_len += p.length();
    if (total_len == 0.0) return 0.0;
    cplx acc = 0.0;
    double s = 0.0;
    for (const auto& p : path) {
        PieceQuad q{&p, s / total_len, p.length() / total_len};
        cplx coarse = q.gl(f, 0.0, 1.0, cfg.nodes);
        acc += q.adaptive(f, 0.0, 1.0, coarse, cfg, cfg.tol * std::max(1.0, q.ds), 0);
        s += p.length();
    }
    return acc;
}

cplx contour_integral(const Contour& path, const std::function<cplx(cplx)>& f, QuadConfig cfg) {
    return contour_integral(path, [&f](cplx z, double) { return f(z); }, cfg);
}

void walk_contour(const Contour& path, int samples, const std::function<void(cplx, double)>& visit) {
    double total_len = 0.0;
    for (const auto& p : path) total_len += p.length();
    if (total_len == 0.0) return;
    double s = 0.0;
    for (const auto& p : path) {
        int n = std::max(2, int(std::ceil(samples * p.length() / total_len)));
        for (int i = 0; i < n; ++i) {
            double u = double(i) / n;
            visit(p.point(u), (s + u * p.length()) / total_len);
        }
        s += p.length();
    }
}

} // namespace htau
