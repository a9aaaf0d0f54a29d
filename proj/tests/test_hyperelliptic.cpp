#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "htau/agm.hpp"
#include "htau/hyperelliptic.hpp"
#include "htau/theta.hpp"

#include <algorithm>

using namespace htau;

namespace {

double cdist(cplx a, cplx b) { return std::abs(a - b); }

cplx prod_lambda(const std::vector<cplx>& e, cplx lam) {
    cplx p(1.0);
    for (cplx ek : e) p *= lam - ek;
    return p;
}

// nu on the sheet that behaves like +lambda^{g+1} far out
cplx nu_plus(const std::vector<cplx>& e, cplx lam) {
    cplx acc(0.0);
    for (cplx ek : e) acc += 0.5 * std::log(lam - ek);
    return std::exp(acc);
}

double im_defect(const CMat& b) {
    double defect = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            defect = std::max(defect, std::abs(b(i, j) - b(j, i)));
            scale = std::max(scale, std::abs(b(i, j)));
        }
    return defect / scale;
}

bool im_positive_definite(const CMat& b) {
    std::size_t g = b.rows();
    std::vector<std::vector<double>> im(g, std::vector<double>(g));
    for (std::size_t i = 0; i < g; ++i)
        for (std::size_t j = 0; j < g; ++j) im[i][j] = 0.5 * (b(i, j).imag() + b(j, i).imag());
    return sym_eigenvalues(im).front() > 0.0;
}

std::vector<double> sorted_even_theta_moduli(const CMat& B) {
    std::vector<double> out;
    for (const auto& chi : even_characteristics(int(B.rows())))
        out.push_back(std::abs(theta_constant(B, chi)));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("genus one modulus against the elliptic integral oracle") {
    HyperellipticCurve c({cplx(0.0), cplx(1.0), cplx(2.0), cplx(3.0)});
    auto pd = period_matrices(c);
    REQUIRE(pd.B.rows() == 1);
    cplx mu = pd.B(0, 0);
    CHECK(mu.imag() > 0.0);
    // cross-ratio modulus k^2 = ((e2-e1)(e4-e3)) / ((e3-e1)(e4-e2)) = 1/4
    double k = 0.5, kp = std::sqrt(0.75);
    cplx expected = iunit * elliptic_K(kp) / elliptic_K(k);
    CHECK(cdist(mu, expected) < 1e-10);
}

TEST_CASE("symmetric curve gives a purely imaginary modulus") {
    double a = 2.5;
    HyperellipticCurve c({cplx(-a), cplx(-1.0), cplx(1.0), cplx(a)});
    auto pd = period_matrices(c);
    cplx mu = pd.B(0, 0);
    CHECK(std::abs(mu.real()) < 1e-10);
    double k = (a - 1.0) / (a + 1.0), kp = std::sqrt(1.0 - k * k);
    CHECK(cdist(mu, iunit * elliptic_K(kp) / elliptic_K(k)) < 1e-10);
}

TEST_CASE("riemann matrix invariants in genus two") {
    HyperellipticCurve real_curve({cplx(0.0), cplx(1.0), cplx(2.0), cplx(3.0), cplx(4.0), cplx(5.0)});
    HyperellipticCurve bent_curve({cplx(0.0), cplx(1.0), cplx(2.0, 0.3), cplx(3.0), cplx(4.0, -0.2),
                                   cplx(5.5)});
    for (const auto& c : {real_curve, bent_curve}) {
        auto pd = period_matrices(c);
        CHECK(im_defect(pd.B) < 1e-10);
        CHECK(im_positive_definite(pd.B));
    }
}

TEST_CASE("a-normalization over independently constructed cycles") {
    HyperellipticCurve c({cplx(0.0), cplx(1.0), cplx(2.0), cplx(3.0), cplx(4.0), cplx(5.0)});
    auto pd = period_matrices(c);
    std::size_t g = 2;
    CMat P(g, g);
    for (std::size_t i = 0; i < g; ++i) {
        Contour circle = circle_contour(cplx(0.5 + 2.0 * double(i), 0.0), 0.75);
        for (std::size_t beta = 0; beta < g; ++beta)
            P(i, beta) = tracked_period_integral(c, circle, int(beta));
    }
    CMat N = P * pd.Ainv;
    for (std::size_t i = 0; i < g; ++i)
        for (std::size_t j = 0; j < g; ++j) {
            double want = i == j ? 1.0 : 0.0;
            CHECK(std::abs(std::abs(N(i, j)) - want) < 1e-9);
        }
}

TEST_CASE("local expansions at a branch point") {
    HyperellipticCurve c({cplx(0.0), cplx(1.0), cplx(2.0), cplx(3.0)});
    auto pd = period_matrices(c);
    auto f = local_expansions(c, pd, 0, 8);
    REQUIRE(f.size() == 1);

    cplx ainv = pd.Ainv(0, 0);
    // f^2 = 4 Ainv^2 / ((0-1)(0-2)(0-3)), sign-free comparison
    CHECK(cdist(f[0][0] * f[0][0], 4.0 * ainv * ainv / cplx(-6.0)) < 1e-12 * std::abs(ainv * ainv));
    for (std::size_t k = 1; k <= 7; k += 2) CHECK(std::abs(f[0][k]) < 1e-13);

    cplx x0(0.01, 0.003);
    cplx lam = x0 * x0;
    cplx direct2 = 4.0 * ainv * ainv * x0 * x0 / prod_lambda(c.e, lam);
    cplx series = f[0].eval(x0);
    CHECK(cdist(series * series, direct2) < 1e-10 * std::abs(direct2));
}

TEST_CASE("infinity expansions live on the plus sheet") {
    HyperellipticCurve c({cplx(0.0), cplx(1.0), cplx(2.0), cplx(3.0), cplx(4.0), cplx(5.0)});
    auto pd = period_matrices(c);
    auto inf = infinity_expansions(c, pd, 10);
    REQUIRE(inf.size() == 2);
    REQUIRE(inf[0].size() == 2);

    cplx zeta(1e-3, 2e-4);
    cplx lam = 1.0 / zeta;
    for (std::size_t i = 0; i < 2; ++i) {
        cplx direct(0.0);
        for (std::size_t beta = 0; beta < 2; ++beta)
            direct += pd.Ainv(beta, i) * std::pow(lam, double(beta));
        direct *= -1.0 / (zeta * zeta) / nu_plus(c.e, lam);
        CHECK(cdist(inf[0][i].eval(zeta), direct) < 1e-8 * std::abs(direct));
        CHECK(cdist(inf[1][i].eval(zeta), -direct) < 1e-8 * std::abs(direct));
    }

    // genus 1: the two leading coefficients are -Ainv and +Ainv
    HyperellipticCurve c1({cplx(0.0), cplx(1.0), cplx(2.0), cplx(3.0)});
    auto pd1 = period_matrices(c1);
    auto inf1 = infinity_expansions(c1, pd1, 4);
    CHECK(cdist(inf1[0][0][0], -pd1.Ainv(0, 0)) < 1e-12);
    CHECK(cdist(inf1[1][0][0], pd1.Ainv(0, 0)) < 1e-12);
}

TEST_CASE("rauch derivative against finite differences") {
    auto fd_matrix = [](std::vector<cplx> e, std::size_t m, double h) {
        std::vector<cplx> ep = e, em = e;
        ep[m] += h;
        em[m] -= h;
        auto bp = period_matrices(HyperellipticCurve(ep)).B;
        auto bm = period_matrices(HyperellipticCurve(em)).B;
        return (1.0 / (2.0 * h)) * (bp - bm);
    };

    HyperellipticCurve c1({cplx(0.0), cplx(1.0), cplx(2.0), cplx(3.0)});
    auto pd1 = period_matrices(c1);
    for (std::size_t m = 0; m < 4; ++m) {
        cplx fd = fd_matrix(c1.e, m, 1e-5)(0, 0);
        cplx rauch = rauch_derivative(c1, pd1, 0, 0, m);
        CHECK(cdist(fd, rauch) < 1e-6 * std::abs(rauch));
    }

    HyperellipticCurve c2({cplx(0.0), cplx(1.0), cplx(2.0, 0.3), cplx(3.0), cplx(4.0, -0.2),
                           cplx(5.5)});
    auto pd2 = period_matrices(c2);
    for (std::size_t m : {std::size_t(0), std::size_t(3)}) {
        CMat fd = fd_matrix(c2.e, m, 1e-5);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) {
                cplx rauch = rauch_derivative(c2, pd2, i, j, m);
                CHECK(cdist(fd(i, j), rauch) < 1e-6 * std::abs(rauch));
            }
    }
}

TEST_CASE("pair permutations preserve the theta constant set") {
    // pairs transverse to the span axis, so either member can anchor a b-capsule
    cplx e0(-0.25, -0.9), e1(0.25, 0.9), e2(2.2, -0.1), e3(2.2, 0.1), e4(4.4, 0.0), e5(5.4, -0.6);
    std::vector<cplx> base{e0, e1, e2, e3, e4, e5};
    std::vector<cplx> swap_first{e1, e0, e2, e3, e4, e5};
    std::vector<cplx> swap_middle{e0, e1, e3, e2, e4, e5};

    auto ref = sorted_even_theta_moduli(period_matrices(HyperellipticCurve(base)).B);
    for (const auto& pts : {swap_first, swap_middle}) {
        auto pd = period_matrices(HyperellipticCurve(pts));
        CHECK(im_positive_definite(pd.B));
        auto got = sorted_even_theta_moduli(pd.B);
        REQUIRE(got.size() == ref.size());
        for (std::size_t k = 0; k < ref.size(); ++k)
            CHECK(std::abs(got[k] - ref[k]) < 1e-7 * std::max(1.0, ref[k]));
    }

    // reordering whole pairs leaves no room for the b-capsules; that
    // geometry is rejected rather than silently mishandled
    std::vector<cplx> entangled{e2, e3, e0, e1, e4, e5};
    CHECK_THROWS_AS(period_matrices(HyperellipticCurve(entangled)), std::runtime_error);
}

TEST_CASE("curve validation") {
    CHECK_THROWS_AS(HyperellipticCurve({cplx(0.0), cplx(1.0), cplx(2.0)}), std::invalid_argument);
    CHECK_THROWS_AS(HyperellipticCurve({cplx(0.0), cplx(0.0), cplx(1.0), cplx(2.0)}),
                    std::invalid_argument);
}
