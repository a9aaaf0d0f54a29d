#pragma once

#include "htau/jet.hpp"

#include <cmath>

namespace htau {

struct FdConfig {
    double step = 1e-4;   // relative to max(1, |at|)
    int levels = 3;       // Richardson extrapolation depth
};

// Derivative of a holomorphic map g at `at`, central differences along the
// real direction with Richardson extrapolation.
template <class F>
cplx fd_derivative(F&& g, cplx at, FdConfig cfg = {}) {
    double h0 = cfg.step * std::max(1.0, std::abs(at));
    int L = cfg.levels;
    std::vector<cplx> row(L);
    for (int k = 0; k < L; ++k) {
        double h = h0 / double(1 << k);
        row[k] = (g(at + h) - g(at - h)) / (2.0 * h);
    }
    // Richardson tableau, error order h^2 per level
    for (int j = 1; j < L; ++j) {
        double f = std::pow(4.0, j);
        for (int k = L - 1; k >= j; --k) row[k] = (f * row[k] - row[k - 1]) / (f - 1.0);
    }
    return row[L - 1];
}

// Second derivative, same scheme.  Roundoff grows like eps/h^2 here, so the
// base step is widened relative to the first-derivative default.
template <class F>
cplx fd_second_derivative(F&& g, cplx at, FdConfig cfg = {}) {
    double h0 = 10.0 * cfg.step * std::max(1.0, std::abs(at));
    int L = cfg.levels;
    std::vector<cplx> row(L);
    for (int k = 0; k < L; ++k) {
        double h = h0 / double(1 << k);
        row[k] = (g(at + h) - 2.0 * g(at) + g(at - h)) / (h * h);
    }
    for (int j = 1; j < L; ++j) {
        double f = std::pow(4.0, j);
        for (int k = L - 1; k >= j; --k) row[k] = (f * row[k] - row[k - 1]) / (f - 1.0);
    }
    return row[L - 1];
}

} // namespace htau
