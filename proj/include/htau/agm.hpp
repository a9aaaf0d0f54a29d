#pragma once

#include "htau/jet.hpp"

namespace htau {

// Arithmetic-geometric mean with the standard branch rule Re(b/a) >= 0 at
// every geometric-mean step; used as an independent oracle for genus-one
// period and theta-constant values.
cplx agm(cplx a, cplx b);

// Complete elliptic integral K(k) = pi / (2 agm(1, sqrt(1 - k^2))).
cplx elliptic_K(cplx k);

} // namespace htau
