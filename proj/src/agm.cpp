#include "htau/agm.hpp"

#include <cmath>
#include <stdexcept>

namespace htau {

cplx agm(cplx a, cplx b) {
    if (a == cplx(0.0) || b == cplx(0.0)) throw std::domain_error("agm of zero");
    for (int it = 0; it < 64; ++it) {
        if (std::abs(a - b) <= 1e-15 * std::abs(a)) return 0.5 * (a + b);
        cplx am = 0.5 * (a + b);
        cplx gm = std::sqrt(a * b);
        if ((gm / am).real() < 0.0) gm = -gm;  // right choice of the square root
        a = am;
        b = gm;
    }
    throw std::runtime_error("agm did not converge");
}

cplx elliptic_K(cplx k) {
    cplx kp = std::sqrt(cplx(1.0) - k * k);
    return pi / (2.0 * agm(cplx(1.0), kp));
}

} // namespace htau
