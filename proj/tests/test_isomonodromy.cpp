#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "htau/isomonodromy.hpp"
#include "htau/tau.hpp"

#include <random>

using namespace htau;

namespace {

RationalCovering joukowski() { return make_covering({1.0, 0.0, 1.0}, {0.0, 1.0}); }

// z^3 over z^2 + 0.3 z + 0.7: one triple point over 0 plus two simple points
RationalCovering triple_point_covering() {
    return make_covering({0.0, 0.0, 0.0, 1.0}, {0.7, 0.3, 1.0});
}

RationalCovering random_covering(std::size_t degree, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Poly num(degree + 1, cplx(0.0)), den(degree, cplx(0.0));
    for (auto& c : num) c = cplx(u(rng), u(rng));
    for (auto& c : den) c = cplx(u(rng), u(rng));
    num.back() += 3.0;
    den.back() += 3.0;
    return make_covering(num, den);
}

CMat fd_log_derivative(const RationalCovering& R, cplx lambda, cplx lambda0, double h = 1e-4) {
    auto mid = psi_matrix(R, lambda, lambda0);
    auto up = psi_matrix(R, lambda + h, lambda0);
    auto dn = psi_matrix(R, lambda - h, lambda0);
    CMat dpsi = (1.0 / (2.0 * h)) * (up.psi + (-1.0) * dn.psi);
    return dpsi * mat_inverse(mid.psi);
}

bool is_quasi_permutation(const CMat& M, double tol) {
    for (std::size_t i = 0; i < M.rows(); ++i) {
        std::size_t hits = 0;
        for (std::size_t j = 0; j < M.cols(); ++j) {
            double a = std::abs(M(i, j));
            if (a > tol && std::abs(a - 1.0) > tol) return false;
            if (a > tol) ++hits;
        }
        if (hits != 1) return false;
    }
    for (std::size_t j = 0; j < M.cols(); ++j) {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < M.rows(); ++i)
            if (std::abs(M(i, j)) > tol) ++hits;
        if (hits != 1) return false;
    }
    return true;
}

} // namespace

TEST_CASE("psi is the identity at the basepoint and keeps unit determinant") {
    cplx lam0(0.3, -2.1);
    auto at_base = psi_matrix(joukowski(), lam0, lam0);
    CHECK(mat_max_abs(at_base.psi + (-1.0) * CMat::identity(2)) == 0.0);
    CHECK(at_base.fibre == at_base.fibre0);

    struct Case {
        RationalCovering R;
        cplx lambda0;
        double tol;
    };
    std::vector<Case> cases = {{joukowski(), cplx(0.3, -2.1), 1e-12},
                               {triple_point_covering(), cplx(0.4, -1.7), 1e-10},
                               {random_covering(3, 17), cplx(0.2, -3.0), 1e-10}};
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const auto& c : cases) {
        std::size_t N = c.R.degree();
        for (int trial = 0; trial < 12; ++trial) {
            cplx p(2.2 * u(rng), 2.2 * u(rng));
            PsiMatrix P;
            try {
                P = psi_matrix(c.R, p, c.lambda0);
            } catch (const std::domain_error&) {
                continue; // point or segment fell on a branch point
            }
            REQUIRE(P.psi.rows() == N);
            CHECK(std::abs(mat_det(P.psi) - 1.0) < c.tol);
        }
    }
}

TEST_CASE("psi rejects evaluation on branch points") {
    auto bd = branch_data(joukowski());
    CHECK_THROWS_AS(psi_matrix(joukowski(), bd[0].lambda, cplx(0.3, -2.1)), std::domain_error);
    CHECK_THROWS_AS(psi_matrix(joukowski(), cplx(0.3, -2.1), bd[1].lambda), std::domain_error);
}

TEST_CASE("the logarithmic derivative does not depend on the basepoint") {
    // changing the basepoint relabels sheets, conjugating Psi_lambda Psi^{-1} by a
    // signed permutation; its spectral data must not move
    for (const auto& R : {joukowski(), random_covering(3, 17)}) {
        cplx p(1.9, 1.3);
        CMat Fa = fd_log_derivative(R, p, cplx(0.3, -2.6));
        CMat Fb = fd_log_derivative(R, p, cplx(-1.1, -3.4));
        CHECK(std::abs(mat_trace(Fa) - mat_trace(Fb)) < 1e-8);
        CHECK(std::abs(mat_trace(Fa * Fa) - mat_trace(Fb * Fb)) < 1e-8);
        CHECK(std::abs(mat_trace(Fa * Fa * Fa) - mat_trace(Fb * Fb * Fb)) < 1e-8);
        CHECK(std::abs(mat_det(Fa) - mat_det(Fb)) < 1e-8);
    }
}

TEST_CASE("cauchy determinant identity") {
    // frozen 2x2 case: det [[-1/2,-1/3],[-1,-1/2]] = -1/12 equals the product form
    std::vector<cplx> z = {cplx(0.0), cplx(1.0)};
    std::vector<cplx> mu = {cplx(2.0), cplx(3.0)};
    cplx det = (1.0 / (z[0] - mu[0])) * (1.0 / (z[1] - mu[1])) -
               (1.0 / (z[0] - mu[1])) * (1.0 / (z[1] - mu[0]));
    CHECK(std::abs(det - cplx(-1.0 / 12.0)) < 1e-15);
    CHECK(cauchy_determinant_check(z, mu) < 1e-12);

    CHECK(cauchy_determinant_check({cplx(5.0)}, {cplx(7.0)}) < 1e-15);

    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int done = 0;
    while (done < 6) {
        std::vector<cplx> zs, ms;
        for (int i = 0; i < 5; ++i) {
            zs.emplace_back(u(rng), u(rng));
            ms.emplace_back(u(rng) + 3.0, u(rng));
        }
        // keep the configuration well conditioned
        double sep = 1e300;
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = i + 1; j < 5; ++j)
                sep = std::min({sep, std::abs(zs[i] - zs[j]), std::abs(ms[i] - ms[j])});
        if (sep < 0.35) continue;
        ++done;
        CHECK(cauchy_determinant_check(zs, ms) < 1e-10);
    }

    CHECK_THROWS_AS(cauchy_determinant_check({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(cauchy_determinant_check({cplx(1.0)}, {cplx(1.0), cplx(2.0)}),
                    std::invalid_argument);
    CHECK_THROWS_AS(cauchy_determinant_check({cplx(1.0)}, {cplx(1.0)}), std::invalid_argument);
}

TEST_CASE("monodromy of a two-fold covering is a pair of signed transpositions") {
    auto rep = monodromy_rep(joukowski(), cplx(0.3, -2.1));
    REQUIRE(rep.loops.size() == 2);
    CHECK(rep.entry_defect < 1e-8);
    for (const auto& M : rep.loops) {
        CHECK(is_quasi_permutation(M, 1e-8));
        CHECK(std::abs(M(0, 0)) < 1e-8);
        CHECK(std::abs(M(1, 1)) < 1e-8);
        // the square is -1: the sqrt picks up a sign around a simple point
        CHECK(mat_max_abs(M * M + CMat::identity(2)) < 1e-8);
    }
    CMat prod = rep.loops[1] * rep.loops[0];
    CHECK(mat_max_abs(prod + (-1.0) * CMat::identity(2)) < 1e-8);
}

TEST_CASE("monodromy around a triple point is a signed three-cycle") {
    auto rep = monodromy_rep(triple_point_covering(), cplx(0.4, -1.7));
    REQUIRE(rep.loops.size() == 3);
    CHECK(rep.entry_defect < 1e-8);

    auto values = rep.points;
    std::size_t triple = 0;
    double best = 1e300;
    for (std::size_t m = 0; m < values.size(); ++m)
        if (std::abs(values[m]) < best) {
            best = std::abs(values[m]);
            triple = m;
        }
    REQUIRE(best < 1e-9); // the triple point of z^3/(z^2+0.3z+0.7) sits over 0

    CMat prod = CMat::identity(3);
    for (std::size_t m = 0; m < rep.loops.size(); ++m) {
        const CMat& M = rep.loops[rep.loops.size() - 1 - m];
        prod = prod * M;
        CHECK(is_quasi_permutation(M, 1e-8));
    }
    CHECK(mat_max_abs(prod + (-1.0) * CMat::identity(3)) < 1e-8);

    const CMat& T = rep.loops[triple];
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(T(j, j)) < 1e-8); // no fixed sheet
    for (std::size_t m = 0; m < 3; ++m) {
        if (m == triple) continue;
        // a simple point: one sheet is fixed with entry +1, the others swap
        const CMat& M = rep.loops[m];
        int fixed = 0;
        cplx offdiag = 1.0;
        for (std::size_t j = 0; j < 3; ++j)
            if (std::abs(M(j, j)) > 0.5) {
                ++fixed;
                CHECK(std::abs(M(j, j) - 1.0) < 1e-10);
            }
        CHECK(fixed == 1);
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 3; ++k)
                if (j != k && std::abs(M(j, k)) > 0.5) offdiag *= M(j, k);
        CHECK(std::abs(offdiag + 1.0) < 1e-10); // swapped pair carries signs with product -1
    }
}

TEST_CASE("monodromy entries stay in {0,+1,-1} for a random covering") {
    auto rep = monodromy_rep(random_covering(3, 17), cplx(0.2, -3.0));
    REQUIRE(rep.loops.size() == 4);
    CHECK(rep.entry_defect < 1e-8);
    for (const auto& M : rep.loops) CHECK(is_quasi_permutation(M, 1e-8));
}

TEST_CASE("schlesinger residues are traceless with quarter eigenvalues") {
    auto sd = schlesinger_residues(joukowski(), cplx(0.3, -2.1));
    REQUIRE(sd.residues.size() == 2);
    CHECK(sd.probe_defect < 1e-7);
    CMat sum(2, 2);
    for (const auto& A : sd.residues) {
        CHECK(std::abs(mat_trace(A)) < 1e-10);
        // eigenvalues +-1/4 for a simple branch point
        CHECK(std::abs(mat_trace(A * A) - cplx(0.125)) < 1e-8);
        sum = sum + A;
    }
    CHECK(mat_max_abs(sum) < 1e-8);
}

TEST_CASE("the residue at a triple point has eigenvalues -1/3, 0, 1/3") {
    auto sd = schlesinger_residues(triple_point_covering(), cplx(0.4, -1.7));
    REQUIRE(sd.residues.size() == 3);
    CHECK(sd.probe_defect < 1e-7);
    CMat sum(3, 3);
    for (std::size_t m = 0; m < sd.residues.size(); ++m) {
        const CMat& A = sd.residues[m];
        CHECK(std::abs(mat_trace(A)) < 1e-10);
        double want = std::abs(sd.points[m]) < 1e-9 ? 2.0 / 9.0 : 0.125;
        CHECK(std::abs(mat_trace(A * A) - cplx(want)) < 1e-8);
        sum = sum + A;
    }
    CHECK(mat_max_abs(sum) < 1e-8);
}

TEST_CASE("schlesinger residues of a random covering sum to zero") {
    auto sd = schlesinger_residues(random_covering(3, 17), cplx(0.2, -3.0));
    REQUIRE(sd.residues.size() == 4);
    CHECK(sd.probe_defect < 1e-7);
    CMat sum(3, 3);
    for (const auto& A : sd.residues) {
        CHECK(std::abs(mat_trace(A)) < 1e-10);
        sum = sum + A;
    }
    CHECK(mat_max_abs(sum) < 1e-8);
}

TEST_CASE("half the trace of the squared connection matches the pair sum") {
    RationalCovering R = random_covering(3, 17);
    cplx lambda0(0.2, -3.0);
    for (cplx p : {cplx(1.9, 1.3), cplx(-2.3, 0.9)}) {
        auto P = psi_matrix(R, p, lambda0);
        CMat F = fd_log_derivative(R, p, lambda0);
        cplx half_tr = 0.5 * mat_trace(F * F);

        Poly dnum = poly_derivative(R.num), dden = poly_derivative(R.den);
        cplx pair(0.0);
        std::vector<cplx> zp(P.fibre.size());
        for (std::size_t k = 0; k < P.fibre.size(); ++k)
            zp[k] = poly_eval(R.den, P.fibre[k]) /
                    (poly_eval(dnum, P.fibre[k]) - p * poly_eval(dden, P.fibre[k]));
        for (std::size_t j = 0; j < P.fibre.size(); ++j)
            for (std::size_t k = j + 1; k < P.fibre.size(); ++k)
                pair += zp[j] * zp[k] / ((P.fibre[j] - P.fibre[k]) * (P.fibre[j] - P.fibre[k]));
        CHECK(std::abs(half_tr + pair) < 1e-8);
    }
}

TEST_CASE("jm log derivative of a two-fold covering") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        cplx l1(2.0 * u(rng), 2.0 * u(rng));
        cplx l2 = l1 + cplx(1.0 + u(rng), u(rng));
        RationalCovering R = two_fold_covering(l1, l2);
        auto bd = branch_data(R);
        REQUIRE(bd.size() == 2);
        for (std::size_t m = 0; m < 2; ++m) {
            cplx other = bd[1 - m].lambda;
            cplx want = -1.0 / (8.0 * (bd[m].lambda - other));
            cplx got = jm_log_derivative(R, m);
            CHECK(std::abs(got - want) < 1e-9 * std::abs(want));
        }
    }
}

TEST_CASE("jm log derivative matches finite differences of the tau function") {
    // deformation targets one value per simple branch point, so only simple coverings here
    for (const auto& R : {joukowski(), random_covering(3, 17)}) {
        auto tw = tau_rational(R);
        auto bd = branch_data(R);
        REQUIRE(tw.dlog.size() == bd.size());
        for (std::size_t m = 0; m < bd.size(); ++m)
            CHECK(std::abs(jm_log_derivative(R, m) + 0.5 * tw.dlog[m]) < 1e-7);
    }
}
