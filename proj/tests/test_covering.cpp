#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "htau/covering.hpp"

#include <algorithm>
#include <random>

using namespace htau;

namespace {

double cdist(cplx a, cplx b) { return std::abs(a - b); }

// Composes lambda = P/Q with the local inverse jet and strips the constant;
// the result must be exactly x^r through the jet order.
Jet pullback_minus_lambda(const RationalCovering& R, const BranchDatum& bd) {
    std::size_t n = bd.z_of_x.order();
    Jet u = bd.z_of_x - Jet(n, bd.z_of_x[0]);
    Jet p = compose(poly_jet(R.num, bd.z_of_x[0], n), u);
    Jet q = compose(poly_jet(R.den, bd.z_of_x[0], n), u);
    return p / q - Jet(n, bd.lambda);
}

RationalCovering random_covering(int degree, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Poly num(degree + 1), den(degree);
    for (auto& c : num) c = cplx(u(rng), u(rng));
    for (auto& c : den) c = cplx(u(rng), u(rng));
    num.back() += 3.0;  // keep the leading coefficients away from zero
    den.back() += 3.0;
    return make_covering(num, den);
}

}  // namespace

TEST_CASE("two-fold covering hits its branch points") {
    cplx l1(2.0, 1.0), l2(-1.0, 0.0);
    RationalCovering R = two_fold_covering(l1, l2);
    auto bd = branch_data(R, 8);
    REQUIRE(bd.size() == 2);
    CHECK(bd[0].r == 2);
    CHECK(bd[1].r == 2);
    // sorted by (Re, Im): l2 = -1 first
    CHECK(cdist(bd[0].lambda, l2) < 1e-12);
    CHECK(cdist(bd[1].lambda, l1) < 1e-12);
    for (const auto& b : bd) {
        CHECK(cdist(R.eval(b.z_crit), b.lambda) < 1e-12);
        Jet res = pullback_minus_lambda(R, b);
        for (std::size_t k = 0; k <= res.order(); ++k) {
            cplx want = (k == 2) ? cplx(1.0) : cplx(0.0);
            CHECK(cdist(res[k], want) < 1e-10);
        }
    }
}

TEST_CASE("two-fold covering expansion at the unramified infinity") {
    cplx l1(2.0, 1.0), l2(-1.0, 0.0);
    RationalCovering R = two_fold_covering(l1, l2);
    auto cfg = sheets_at(R, cplx(0.5, -7.0));
    auto all = infinity_series_all(R, cfg, 8);
    REQUIRE(all.size() == 2);
    CHECK(all[0].pole);
    CHECK_FALSE(all[1].pole);
    // z(zeta) = a + c1 zeta + ... with c1 = (l1 - l2)^2 / 16
    cplx a = 0.5 * (l1 + l2);
    CHECK(cdist(all[1].series[0], a) < 1e-12);
    CHECK(cdist(all[1].series[1], (l1 - l2) * (l1 - l2) / 16.0) < 1e-10);
}

TEST_CASE("infinity expansions invert lambda on every sheet") {
    RationalCovering R = random_covering(3, 11u);
    auto cfg = sheets_at(R, cplx(0.25, -5.0));
    auto all = infinity_series_all(R, cfg, 12);
    REQUIRE(all.size() == 3);
    int poles = 0;
    cplx zeta(1e-3, 4e-4);
    for (const auto& e : all) {
        cplx s = e.series.eval(zeta);
        cplx z = e.pole ? 1.0 / s : s;
        if (e.pole) ++poles;
        CHECK(cdist(R.eval(z), 1.0 / zeta) * std::abs(zeta) < 1e-9);
    }
    CHECK(poles == 1);
    CHECK(all[0].pole);
}

TEST_CASE("riemann-hurwitz count for generic coverings") {
    for (unsigned seed : {3u, 17u, 40u}) {
        for (int degree : {2, 3, 4}) {
            RationalCovering R = random_covering(degree, seed);
            auto bd = branch_data(R, 4);
            int total = 0;
            for (const auto& b : bd) total += b.r - 1;
            CHECK(total == 2 * degree - 2);
            for (const auto& b : bd) {
                Jet res = pullback_minus_lambda(R, b);
                CHECK(cdist(res[b.r], 1.0) < 1e-8);
                for (int k = 0; k < b.r; ++k) CHECK(std::abs(res[k]) < 1e-8);
            }
        }
    }
}

TEST_CASE("local inverse of a bare power map") {
    // z^2 and z^3 fall outside the covering constraints (branch point over
    // infinity) but the local inverse is still available directly.
    BranchDatum b2 = local_inverse_at({0, 0, 1}, {1}, cplx(0.0), 8);
    CHECK(b2.r == 2);
    CHECK(cdist(b2.lambda, 0.0) < 1e-14);
    for (std::size_t k = 0; k <= 8; ++k)
        CHECK(cdist(b2.z_of_x[k], k == 1 ? cplx(1.0) : cplx(0.0)) < 1e-12);

    BranchDatum b3 = local_inverse_at({0, 0, 0, 2}, {1}, cplx(0.0), 6);
    CHECK(b3.r == 3);
    // 2 z^3 = x^3 so z = x / cbrt(2) up to a cube root of unity
    CHECK(cdist(b3.z_of_x[1] * b3.z_of_x[1] * b3.z_of_x[1], cplx(0.5)) < 1e-12);
}

TEST_CASE("covering constructor rejects bad input") {
    CHECK_THROWS_AS(make_covering({1, 0, 1}, {1, 0, 1}), std::invalid_argument);     // equal degrees
    CHECK_THROWS_AS(make_covering({-1, 0, 1}, {-1, 1}), std::invalid_argument);      // common root
    CHECK_THROWS_AS(make_covering({0, 1, 0, 1}, {1, -2, 1}), std::invalid_argument); // double pole
}

TEST_CASE("sheet configuration and trivial loops") {
    RationalCovering R = random_covering(3, 11u);
    cplx l0(0.25, -5.0);
    auto cfg = sheets_at(R, l0);
    REQUIRE(cfg.roots.size() == 3);
    for (cplx z : cfg.roots) CHECK(cdist(R.eval(z), l0) < 1e-10);
    CHECK(cfg.inf_attach[0] == -1);

    // a small loop based at l0 enclosing no branch point returns every sheet home
    auto path = [l0](double t) { return l0 + 0.05 * (std::exp(2.0 * pi * iunit * t) - 1.0); };
    auto ends = continue_sheets(R, path, cfg.roots);
    for (std::size_t i = 0; i < ends.size(); ++i) CHECK(cdist(ends[i], cfg.roots[i]) < 1e-8);
}

TEST_CASE("monodromy of a generic covering") {
    RationalCovering R = random_covering(3, 11u);
    auto bd = branch_data(R, 4);
    REQUIRE(bd.size() == 4);
    cplx l0(0.25, -5.0);
    auto cfg = sheets_at(R, l0);

    double rmin = 1e9;
    for (const auto& a : bd)
        for (const auto& b : bd)
            if (cdist(a.lambda, b.lambda) > 1e-9) rmin = std::min(rmin, cdist(a.lambda, b.lambda));

    std::vector<std::vector<int>> perms;
    for (const auto& b : bd)
        perms.push_back(loop_permutation(R, cfg, b.lambda, 0.2 * rmin));

    // simple branch points give transpositions and together they act transitively
    std::vector<int> component{0, 1, 2};
    for (const auto& s : perms) {
        int moved = 0;
        for (int i = 0; i < 3; ++i)
            if (s[i] != i) ++moved;
        CHECK(moved == 2);
        for (int i = 0; i < 3; ++i)
            if (s[i] != i) component[std::max(i, s[i])] = component[std::min(i, s[i])];
    }
    CHECK(component == std::vector<int>{0, 0, 0});

    // the covering is unramified over infinity, so a loop around everything is trivial
    cplx centroid = 0.0;
    for (const auto& b : bd) centroid += b.lambda / double(bd.size());
    double big = 0.0;
    for (const auto& b : bd) big = std::max(big, cdist(b.lambda, centroid));
    cplx lb = centroid - iunit * (20.0 + 5.0 * big);
    auto cfgb = sheets_at(R, lb);
    auto ends = continue_sheets(R, loop_path(lb, centroid, 2.0 * big + 1.0), cfgb.roots);
    for (std::size_t i = 0; i < ends.size(); ++i) CHECK(cdist(ends[i], cfgb.roots[i]) < 1e-7);
}

TEST_CASE("deforming branch points tracks the targets") {
    RationalCovering R = two_fold_covering(cplx(0.0), cplx(1.0));
    std::vector<cplx> targets{cplx(-1.0, 0.5), cplx(2.0, -0.25)};
    RationalCovering S = deform_to_branch_points(R, targets);
    auto bd = branch_data(S, 4);
    REQUIRE(bd.size() == 2);
    CHECK(cdist(bd[0].lambda, targets[0]) < 1e-10);
    CHECK(cdist(bd[1].lambda, targets[1]) < 1e-10);

    RationalCovering G = random_covering(3, 11u);
    auto gbd = branch_data(G, 4);
    std::vector<cplx> gt;
    for (std::size_t m = 0; m < gbd.size(); ++m)
        gt.push_back(gbd[m].lambda + 0.1 * std::exp(iunit * (1.0 + double(m))));
    RationalCovering H = deform_to_branch_points(G, gt);
    auto hbd = branch_data(H, 4);
    REQUIRE(hbd.size() == gt.size());
    std::vector<cplx> sorted_gt = gt;
    std::sort(sorted_gt.begin(), sorted_gt.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    for (std::size_t m = 0; m < hbd.size(); ++m)
        CHECK(cdist(hbd[m].lambda, sorted_gt[m]) < 1e-9);
}
