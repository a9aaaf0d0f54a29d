#pragma once

#include "htau/jet.hpp"

#include <functional>
#include <vector>

namespace htau {

// Gauss-Legendre nodes and weights on [-1, 1], cached per order.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Oriented contour piece: straight segment or circular arc.
struct Piece {
    enum Kind { segment, arc } kind = segment;
    cplx a, b;            // segment endpoints
    cplx center;          // arc data
    double radius = 0.0;
    double ang0 = 0.0, ang1 = 0.0;

    static Piece seg(cplx a, cplx b);
    static Piece make_arc(cplx center, double radius, double ang0, double ang1);

    cplx point(double u) const;      // u in [0, 1]
    cplx velocity(double u) const;   // d point / du
    double length() const;
};

using Contour = std::vector<Piece>;

Contour circle_contour(cplx center, double radius);  // counterclockwise

struct QuadConfig {
    double tol = 1e-12;
    int nodes = 24;
    int max_depth = 14;
};

// Integrand receives the point and the global arc-length fraction s in [0, 1);
// s lets branch-tracked integrands resolve signs from a precomputed walk.
cplx contour_integral(const Contour& path,
                      const std::function<cplx(cplx, double)>& f,
                      QuadConfig cfg = {});

cplx contour_integral(const Contour& path,
                      const std::function<cplx(cplx)>& f,
                      QuadConfig cfg = {});

// Walks the contour at uniform arc-length resolution and hands each sample to
// the visitor in order; used to seed sign tables for square-root tracking.
void walk_contour(const Contour& path, int samples,
                  const std::function<void(cplx, double)>& visit);

} // namespace htau
