#include "htau/covering.hpp"

#include "htau/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace htau {

namespace {

double config_scale(const std::vector<cplx>& pts) {
    double s = 1.0;
    for (auto p : pts) s = std::max(s, std::abs(p));
    return s;
}

double min_pairwise(const std::vector<cplx>& pts) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::min(d, std::abs(pts[i] - pts[j]));
    return d;
}

bool lex_less(cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

} // namespace

RationalCovering make_covering(Poly num, Poly den) {
    num = poly_trim(std::move(num));
    den = poly_trim(std::move(den));
    int n = poly_degree(num);
    int m = poly_degree(den);
    if (n < 1) throw std::invalid_argument("covering numerator must be non-constant");
    if (m != n - 1) throw std::invalid_argument("covering needs deg den == deg num - 1");
    auto poles = polynomial_roots(den);
    for (const auto& root : poles) {
        if (root.multiplicity != 1)
            throw std::invalid_argument("covering must have simple poles");
        double mag = 0.0, zp = 1.0;
        for (auto c : num) {
            mag += std::abs(c) * zp;
            zp *= std::max(1.0, std::abs(root.z));
        }
        if (std::abs(poly_eval(num, root.z)) < 1e-10 * mag)
            throw std::invalid_argument("covering numerator and denominator share a root");
    }
    return {std::move(num), std::move(den)};
}

RationalCovering two_fold_covering(cplx lambda1, cplx lambda2) {
    cplx a = 0.5 * (lambda1 + lambda2);
    Poly num = {(a * a - lambda1 * lambda2) / 4.0, -a, 1.0};
    Poly den = {-a, 1.0};
    return make_covering(std::move(num), std::move(den));
}

BranchDatum local_inverse_at(const Poly& num, const Poly& den, cplx z_crit, std::size_t jet_order) {
    cplx lambda = poly_eval(num, z_crit) / poly_eval(den, z_crit);
    // D(z) = P(z) - lambda Q(z) vanishes at z_crit to the ramification order
    Poly D = poly_sub(num, poly_scale(lambda, den));
    std::size_t work = jet_order + 8;
    Jet Dj = poly_jet(D, z_crit, work);
    Jet Qj = poly_jet(den, z_crit, work);

    // read the order off the polynomial jet: D/Q may grow geometrically when
    // z_crit sits near a pole, which would swamp a max-normalised threshold
    double scale = 0.0;
    for (std::size_t k = 0; k <= Dj.order(); ++k) scale = std::max(scale, std::abs(Dj[k]));
    int r = -1;
    for (std::size_t k = 0; k <= Dj.order(); ++k)
        if (std::abs(Dj[k]) > 1e-9 * scale) { r = int(k); break; }
    if (r < 2) throw std::domain_error("not a critical point");

    std::vector<cplx> dsh(work - std::size_t(r) + 1);
    for (std::size_t k = 0; k < dsh.size(); ++k) dsh[k] = Dj[k + std::size_t(r)];
    Jet unitj = Jet::from_coeffs(std::move(dsh)) / Qj;  // analytic unit of D/Q = x^r
    Jet phi = jet_pow(unitj, 1.0 / double(r));
    Jet x_of_t = (Jet::variable(phi.order()) * phi).truncated(jet_order + 3);
    Jet z_of_x = invert_series(x_of_t);
    z_of_x.coeff(0) = 0.0;
    Jet shifted = z_of_x.truncated(jet_order);
    shifted.coeff(0) = z_crit;
    return {lambda, z_crit, r, shifted};
}

std::vector<BranchDatum> branch_data(const RationalCovering& R, std::size_t jet_order) {
    Poly crit = poly_sub(poly_mul(poly_derivative(R.num), R.den),
                         poly_mul(R.num, poly_derivative(R.den)));
    auto roots = polynomial_roots(crit);
    std::vector<BranchDatum> out;
    int total = 0;
    for (const auto& root : roots) {
        BranchDatum d = local_inverse_at(R.num, R.den, root.z, jet_order);
        if (d.r != root.multiplicity + 1)
            throw std::runtime_error("ramification order disagrees with critical multiplicity");
        total += d.r - 1;
        out.push_back(std::move(d));
    }
    if (total != 2 * R.degree() - 2)
        throw std::runtime_error("Riemann-Hurwitz count failed for genus zero");
    std::sort(out.begin(), out.end(), [](const BranchDatum& a, const BranchDatum& b) {
        if (a.lambda != b.lambda) return lex_less(a.lambda, b.lambda);
        return lex_less(a.z_crit, b.z_crit);
    });
    return out;
}

std::vector<cplx> continue_sheets(const RationalCovering& R,
                                  const std::function<cplx(double)>& path,
                                  std::vector<cplx> roots,
                                  const std::function<void(double, const std::vector<cplx>&)>& per_step) {
    const Poly& P = R.num;
    const Poly& Q = R.den;
    Poly dP = poly_derivative(P);
    Poly dQ = poly_derivative(Q);
    double scale = config_scale(roots);

    auto newton = [&](cplx lambda, cplx z, bool& ok) {
        ok = false;
        for (int it = 0; it < 12; ++it) {
            cplx f = poly_eval(P, z) - lambda * poly_eval(Q, z);
            cplx df = poly_eval(dP, z) - lambda * poly_eval(dQ, z);
            if (std::abs(df) == 0.0) return z;
            cplx step = f / df;
            z -= step;
            if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(z))) { ok = true; return z; }
        }
        return z;
    };

    double t = 0.0;
    double dt = 0.05;
    int guard = 0;
    while (t < 1.0) {
        if (++guard > 200000) throw std::runtime_error("sheet continuation stalled");
        double tn = std::min(1.0, t + dt);
        cplx l0 = path(t), l1 = path(tn);
        double sep = min_pairwise(roots);
        std::vector<cplx> next(roots.size());
        bool accept = true;
        for (std::size_t i = 0; i < roots.size() && accept; ++i) {
            cplx z = roots[i];
            cplx dfdz = poly_eval(dP, z) - l0 * poly_eval(dQ, z);
            cplx predict = z;
            if (std::abs(dfdz) > 0.0) predict += (l1 - l0) * poly_eval(Q, z) / dfdz;
            if (std::abs(predict - z) > 0.25 * sep) { accept = false; break; }
            bool ok = false;
            cplx corrected = newton(l1, predict, ok);
            if (!ok || std::abs(corrected - z) > 0.45 * sep) { accept = false; break; }
            next[i] = corrected;
        }
        if (accept) {
            // reject steps that merged two branches
            if (min_pairwise(next) < 1e-9 * scale) accept = false;
        }
        if (!accept) {
            dt *= 0.5;
            if (dt < 1e-12) throw std::runtime_error("sheet continuation step collapsed");
            continue;
        }
        roots = std::move(next);
        t = tn;
        dt = std::min(0.25, dt * 1.6);
        if (per_step) per_step(t, roots);
    }
    return roots;
}

SheetConfiguration sheets_at(const RationalCovering& R, cplx lambda0) {
    Poly F = poly_sub(R.num, poly_scale(lambda0, R.den));
    auto roots = polynomial_roots(F);
    if (int(roots.size()) != R.degree())
        throw std::invalid_argument("basepoint sits over a branch point");
    for (const auto& r : roots)
        if (r.multiplicity != 1) throw std::invalid_argument("basepoint sits over a branch point");

    auto poles = polynomial_roots(R.den);
    std::vector<cplx> den_roots;
    for (const auto& p : poles) den_roots.push_back(p.z);

    // Continuation to large |lambda| decides which root runs to the pole at
    // infinity and which finite pole each remaining sheet lands on.
    std::vector<cplx> pts = den_roots;
    pts.push_back(lambda0);
    for (const auto& b : branch_data(R, 3)) pts.push_back(b.lambda);
    double big = 300.0 * config_scale(pts);
    double ray_angle = 0.7310642;  // fixed ray, retried if it grazes a branch point
    std::vector<cplx> lam_branch;
    for (const auto& b : branch_data(R, 3)) lam_branch.push_back(b.lambda);
    for (int tries = 0; tries < 32; ++tries) {
        bool clear = true;
        for (auto lb : lam_branch) {
            cplx d = lb - lambda0;
            double along = (d * std::polar(1.0, -ray_angle)).real();
            double off = std::abs((d * std::polar(1.0, -ray_angle)).imag());
            if (along > 0.0 && off < 0.02 * config_scale(pts)) clear = false;
        }
        if (clear) break;
        ray_angle += 0.37;
    }

    std::vector<cplx> start;
    for (const auto& r : roots) start.push_back(r.z);
    cplx far = lambda0 + std::polar(big, ray_angle);
    auto ends = continue_sheets(R, [&](double t) { return lambda0 + t * (far - lambda0); }, start);

    std::vector<int> attach(start.size(), -1);
    int pole_idx = -1;
    double best = -1.0;
    for (std::size_t i = 0; i < ends.size(); ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        int who = -1;
        for (std::size_t j = 0; j < den_roots.size(); ++j) {
            double d = std::abs(ends[i] - den_roots[j]);
            if (d < nearest) { nearest = d; who = int(j); }
        }
        attach[i] = who;
        if (std::abs(ends[i]) > best) { best = std::abs(ends[i]); pole_idx = int(i); }
    }
    attach[pole_idx] = -1;

    // sheet 1 = pole branch, the rest sorted lexicographically at the basepoint
    std::vector<int> order;
    order.push_back(pole_idx);
    std::vector<int> rest;
    for (int i = 0; i < int(start.size()); ++i)
        if (i != pole_idx) rest.push_back(i);
    std::sort(rest.begin(), rest.end(), [&](int a, int b) { return lex_less(start[a], start[b]); });
    for (int i : rest) order.push_back(i);

    SheetConfiguration cfg;
    cfg.basepoint = lambda0;
    cfg.den_roots = den_roots;
    for (int i : order) {
        cfg.roots.push_back(start[i]);
        cfg.inf_attach.push_back(attach[i]);
    }
    // every finite pole must be claimed exactly once
    std::vector<int> seen(den_roots.size(), 0);
    for (int a : cfg.inf_attach)
        if (a >= 0) seen[a]++;
    for (int s : seen)
        if (s != 1) throw std::runtime_error("sheet-to-pole matching failed");
    return cfg;
}

InfinityExpansion infinity_series(const RationalCovering& R, const SheetConfiguration& cfg,
                                  int sheet, std::size_t jet_order) {
    if (sheet < 1 || sheet > int(cfg.roots.size())) throw std::invalid_argument("sheet out of range");
    int attach = cfg.inf_attach[sheet - 1];
    std::size_t work = jet_order + 4;
    if (attach < 0) {
        // zeta(w) = w Qrev(w) / Prev(w) with w = 1/z
        int n = poly_degree(R.num);
        Poly prev(n + 1), qrev(n + 1, cplx(0.0));
        for (int k = 0; k <= n; ++k) prev[k] = R.num[n - k];
        for (int k = 0; k <= n - 1; ++k) qrev[k + 1] = R.den[n - 1 - k];
        Jet zeta_of_w = poly_jet(qrev, 0.0, work) / poly_jet(prev, 0.0, work);
        Jet w_of_zeta = invert_series(zeta_of_w.truncated(work));
        return {sheet, true, w_of_zeta.truncated(jet_order)};
    }
    cplx zk = cfg.den_roots[attach];
    Jet zeta_of_z = poly_jet(R.den, zk, work) / poly_jet(R.num, zk, work);
    zeta_of_z.coeff(0) = 0.0;  // clean the numerical zero
    Jet z_of_zeta = invert_series(zeta_of_z);
    Jet out = z_of_zeta.truncated(jet_order);
    out.coeff(0) = zk;
    return {sheet, false, out};
}

std::vector<InfinityExpansion> infinity_series_all(const RationalCovering& R,
                                                   const SheetConfiguration& cfg,
                                                   std::size_t jet_order) {
    std::vector<InfinityExpansion> out;
    for (int k = 1; k <= int(cfg.roots.size()); ++k)
        out.push_back(infinity_series(R, cfg, k, jet_order));
    return out;
}

std::function<cplx(double)> loop_path(cplx lambda0, cplx lambda_m, double radius) {
    cplx dir = lambda_m - lambda0;
    double dist = std::abs(dir);
    if (dist <= radius) throw std::invalid_argument("basepoint inside the loop circle");
    cplx entry = lambda_m - radius * dir / dist;
    return [=](double t) -> cplx {
        if (t < 0.25) return lambda0 + (t / 0.25) * (entry - lambda0);
        if (t < 0.75) {
            double ang = 2.0 * pi * (t - 0.25) / 0.5;
            return lambda_m + (entry - lambda_m) * std::polar(1.0, ang);
        }
        return entry + ((t - 0.75) / 0.25) * (lambda0 - entry);
    };
}

std::vector<int> loop_permutation(const RationalCovering& R, const SheetConfiguration& cfg,
                                  cplx lambda_m, double radius) {
    auto ends = continue_sheets(R, loop_path(cfg.basepoint, lambda_m, radius), cfg.roots);
    std::vector<int> sigma(ends.size(), -1);
    for (std::size_t i = 0; i < ends.size(); ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        int who = -1;
        for (std::size_t j = 0; j < cfg.roots.size(); ++j) {
            double d = std::abs(ends[i] - cfg.roots[j]);
            if (d < nearest) { nearest = d; who = int(j); }
        }
        sigma[i] = who;
    }
    std::vector<int> seen(sigma.size(), 0);
    for (int s : sigma) seen[s]++;
    for (int s : seen)
        if (s != 1) throw std::runtime_error("loop continuation did not return a permutation");
    return sigma;
}

namespace {

struct DeformState {
    Poly num, den;
    std::vector<cplx> crit_z;      // matched order
    std::vector<cplx> crit_val;
};

DeformState eval_state(const Poly& num, const Poly& den, const std::vector<cplx>& prev_z) {
    Poly crit = poly_sub(poly_mul(poly_derivative(num), den), poly_mul(num, poly_derivative(den)));
    auto roots = polynomial_roots(crit);
    if (roots.size() != prev_z.size()) throw std::runtime_error("branch point collision during deformation");
    std::vector<int> used(roots.size(), 0);
    DeformState st{num, den, {}, {}};
    for (cplx zp : prev_z) {
        double nearest = std::numeric_limits<double>::infinity();
        int who = -1;
        for (std::size_t j = 0; j < roots.size(); ++j) {
            if (used[j]) continue;
            double d = std::abs(roots[j].z - zp);
            if (d < nearest) { nearest = d; who = int(j); }
        }
        used[who] = 1;
        if (roots[who].multiplicity != 1)
            throw std::runtime_error("deformation hit a non-simple branch point");
        st.crit_z.push_back(roots[who].z);
        st.crit_val.push_back(poly_eval(num, roots[who].z) / poly_eval(den, roots[who].z));
    }
    return st;
}

} // namespace

RationalCovering deform_to_branch_points(const RationalCovering& R_in,
                                         const std::vector<cplx>& targets,
                                         DeformConfig cfg) {
    int N = R_in.degree();
    std::size_t M = std::size_t(2 * N - 2);
    if (targets.size() != M)
        throw std::invalid_argument("need one target per simple branch point");

    // normalize to monic numerator; the two leading den coefficients stay pinned
    cplx lead = R_in.num[std::size_t(N)];
    Poly num = poly_scale(1.0 / lead, R_in.num);
    Poly den = poly_scale(1.0 / lead, R_in.den);

    auto data = branch_data({num, den}, 3);
    if (data.size() != M) throw std::invalid_argument("deformation needs simple branch points");
    std::vector<cplx> z_now, lam_now;
    for (const auto& d : data) {
        if (d.r != 2) throw std::invalid_argument("deformation needs simple branch points");
        z_now.push_back(d.z_crit);
        lam_now.push_back(d.lambda);
    }

    double scale = config_scale(targets);
    // free coefficients: num[0..N-1], den[0..N-3]
    auto pack_count = std::size_t(N) + std::size_t(std::max(N - 2, 0));
    if (pack_count != M) throw std::logic_error("free-coefficient count mismatch");

    std::vector<cplx> start_vals = lam_now;
    double s = 0.0, ds = 1.0;
    int guard = 0;
    while (s < 1.0) {
        if (++guard > 4000) throw std::runtime_error("deformation homotopy stalled");
        double sn = std::min(1.0, s + ds);
        std::vector<cplx> goal(M);
        for (std::size_t m = 0; m < M; ++m)
            goal[m] = start_vals[m] + sn * (targets[m] - start_vals[m]);

        Poly num_try = num, den_try = den;
        std::vector<cplx> z_try = z_now;
        bool ok = true;
        for (int it = 0; it < cfg.max_newton; ++it) {
            DeformState st;
            try {
                st = eval_state(num_try, den_try, z_try);
            } catch (const std::exception&) {
                ok = false;
                break;
            }
            z_try = st.crit_z;
            double res = 0.0;
            for (std::size_t m = 0; m < M; ++m) res = std::max(res, std::abs(st.crit_val[m] - goal[m]));
            if (res < cfg.tol * scale) break;
            if (it == cfg.max_newton - 1) { ok = false; break; }

            CMat J(M, M);
            std::vector<cplx> rhs(M);
            for (std::size_t m = 0; m < M; ++m) {
                cplx zm = st.crit_z[m];
                cplx Qm = poly_eval(den_try, zm);
                cplx lm = st.crit_val[m];
                // d lambda_m / d num[j] = z^j / Q, d lambda_m / d den[j] = -lambda z^j / Q
                cplx zp = 1.0;
                for (int j = 0; j < N; ++j) {
                    J(m, std::size_t(j)) = zp / Qm;
                    zp *= zm;
                }
                zp = 1.0;
                for (int j = 0; j < N - 2; ++j) {
                    J(m, std::size_t(N + j)) = -lm * zp / Qm;
                    zp *= zm;
                }
                rhs[m] = goal[m] - lm;
            }
            std::vector<cplx> step;
            try {
                step = mat_solve(J, rhs);
            } catch (const std::exception&) {
                ok = false;
                break;
            }
            double stepmag = 0.0;
            for (auto v : step) stepmag = std::max(stepmag, std::abs(v));
            if (stepmag > 10.0 * scale) { ok = false; break; }
            for (int j = 0; j < N; ++j) num_try[std::size_t(j)] += step[std::size_t(j)];
            for (int j = 0; j < N - 2; ++j) den_try[std::size_t(j)] += step[std::size_t(N + j)];
        }
        if (!ok) {
            ds *= 0.5;
            if (ds < std::pow(0.5, cfg.max_bisect)) throw std::runtime_error("deformation failed to converge");
            continue;
        }
        num = num_try;
        den = den_try;
        z_now = z_try;
        s = sn;
        ds = std::min(1.0, ds * 2.0);
    }
    RationalCovering out = make_covering(num, den);
    if (cfg.verify_monodromy) {
        // Basepoint far below every branch point of either covering; sheets of
        // the deformed covering are matched to the originals by proximity.
        std::vector<cplx> all = lam_now;
        all.insert(all.end(), targets.begin(), targets.end());
        cplx centroid = 0.0;
        for (auto l : all) centroid += l;
        centroid /= double(all.size());
        double spread = 1.0;
        for (auto l : all) spread = std::max(spread, std::abs(l - centroid));
        cplx base = centroid - iunit * (4.0 * spread);

        SheetConfiguration c0 = sheets_at(R_in, base);
        SheetConfiguration c1 = sheets_at(out, base);
        std::vector<int> relabel(c1.roots.size(), -1);
        bool unambiguous = true;
        for (std::size_t i = 0; i < c1.roots.size() && unambiguous; ++i) {
            double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
            int who = -1;
            for (std::size_t j = 0; j < c0.roots.size(); ++j) {
                double d = std::abs(c1.roots[i] - c0.roots[j]);
                if (d < d1) { d2 = d1; d1 = d; who = int(j); }
                else if (d < d2) d2 = d;
            }
            relabel[i] = who;
            if (d2 < 2.0 * d1) unambiguous = false;
        }
        std::vector<int> seen(relabel.size(), 0);
        for (int r : relabel)
            if (r >= 0) seen[r]++;
        for (int c : seen)
            if (c != 1) unambiguous = false;
        if (unambiguous) {
            double nn0 = min_pairwise(lam_now), nn1 = min_pairwise(targets);
            for (std::size_t m = 0; m < targets.size(); ++m) {
                auto s0 = loop_permutation(R_in, c0, lam_now[m], 0.2 * nn0);
                auto s1 = loop_permutation(out, c1, targets[m], 0.2 * nn1);
                for (std::size_t i = 0; i < s1.size(); ++i)
                    if (relabel[s1[i]] != s0[std::size_t(relabel[i])])
                        throw std::runtime_error("deformation changed the monodromy");
            }
        }
    }
    return out;
}

} // namespace htau
