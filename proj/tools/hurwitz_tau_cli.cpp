#include "CLI11.hpp"

#include "htau/json_io.hpp"
#include "htau/theta.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

using namespace htau;
using nlohmann::json;

namespace {

struct JobConfig {
    double tol = 0.0; // 0 keeps the per-case defaults
    double theta_eps = 1e-12;
    double fd_step = 1e-5;
    std::size_t jet_order = 10;
    unsigned seed = 7;
    int npoints = 5;
    bool json_out = false;
    std::string input = "-";
};

json load_input(const std::string& spec) {
    if (!spec.empty() && (spec.front() == '{' || spec.front() == '[')) return json::parse(spec);
    if (spec == "-") return json::parse(std::cin);
    std::ifstream f(spec);
    if (!f) throw std::invalid_argument("cannot open input: " + spec);
    return json::parse(f);
}

// ---- seeded configurations ----
// Points are drawn uniformly in the annulus 0.7 <= |p| <= 2.2 and redrawn
// until all pairwise distances reach 0.5, so every seed gives a usable
// configuration. Curves jitter a fixed well-separated template instead: the
// period contours need branch-point pairs that stay grouped.

std::vector<cplx> sample_annulus(std::mt19937& rng, std::size_t count, double separation = 0.5) {
    std::uniform_real_distribution<double> radius(0.7, 2.2), angle(0.0, 2.0 * pi);
    std::vector<cplx> pts;
    while (pts.size() < count) {
        cplx p = std::polar(radius(rng), angle(rng));
        bool ok = true;
        for (cplx q : pts) ok = ok && std::abs(p - q) >= separation;
        if (ok) pts.push_back(p);
    }
    return pts;
}

RationalCovering sample_covering(std::mt19937& rng, std::size_t degree) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Poly num(degree + 1, cplx(0.0)), den(degree, cplx(0.0));
    for (auto& c : num) c = cplx(u(rng), u(rng));
    for (auto& c : den) c = cplx(u(rng), u(rng));
    num.back() += 3.0;
    den.back() += 3.0;
    return make_covering(std::move(num), std::move(den));
}

HyperellipticCurve sample_curve(std::mt19937& rng, int genus) {
    static const std::vector<cplx> four = {cplx(-1.6, 0.0), cplx(-0.5, 0.4), cplx(0.6, 0.0),
                                           cplx(1.7, -0.2)};
    // near-collinear with unit gaps: the period contours need every inner
    // chain point close to its capsule segment and the rest well outside
    static const std::vector<cplx> six = {cplx(-2.7, 0.0), cplx(-1.5, 0.0), cplx(-0.3, 0.1),
                                          cplx(0.9, 0.0),  cplx(2.1, 0.1),  cplx(3.3, 0.0)};
    const auto& base = genus == 1 ? four : six;
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    std::vector<cplx> pts;
    for (cplx p : base) pts.emplace_back(p.real() + u(rng), p.imag() + u(rng));
    return HyperellipticCurve(std::move(pts));
}

RationalCovering sample_two_fold(std::mt19937& rng) {
    auto pts = sample_annulus(rng, 2, 0.8);
    return two_fold_covering(pts[0], pts[1]);
}

cplx far_basepoint(const std::vector<BranchDatum>& bd) {
    cplx c = 0.0;
    for (const auto& d : bd) c += d.lambda;
    c /= double(bd.size());
    double spread = 1.0;
    for (const auto& d : bd) spread = std::max(spread, std::abs(d.lambda - c));
    return c - cplx(0.0, 1.0) * (10.0 + 5.0 * spread);
}

// ---- verification runners ----

struct VerifyCase {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool good() const { return residual < tolerance; }
};

struct VerifyReport {
    std::string identity;
    std::string label;
    std::vector<VerifyCase> cases;

    bool pass() const {
        bool ok = !cases.empty();
        for (const auto& c : cases) ok = ok && c.good();
        return ok;
    }
    double max_residual() const {
        double r = 0.0;
        for (const auto& c : cases) r = std::max(r, c.residual);
        return r;
    }
};

double tol_or(const JobConfig& cfg, double dflt) { return cfg.tol > 0.0 ? cfg.tol : dflt; }

VerifyReport run_cauchy(const JobConfig& cfg) {
    VerifyReport rep{"cauchy", "Cauchy determinant product formula", {}};
    std::mt19937 rng(cfg.seed);
    // each set fills a box growing with the point count, pairwise distances
    // stay above 1; the LU determinant still loses about a decade of accuracy
    // per point past five, so the default tolerance follows suit
    double box = std::max(1.4, 0.72 * std::sqrt(double(cfg.npoints)));
    double dflt = 1e-10 * std::pow(30.0, std::max(0, cfg.npoints - 5));
    std::uniform_real_distribution<double> u(-box, box);
    cplx shift(2.0 * box + 1.5, 0.0);
    auto place = [&](std::vector<cplx>& pts) {
        for (int attempt = 0; pts.size() < std::size_t(cfg.npoints); ++attempt) {
            if (attempt > 400) {
                pts.clear();
                attempt = 0;
            }
            cplx p(u(rng), u(rng));
            bool ok = true;
            for (cplx q : pts) ok = ok && std::abs(p - q) >= 1.0;
            if (ok) pts.push_back(p);
        }
    };
    for (int draw = 0; draw < 3; ++draw) {
        std::vector<cplx> z, mu;
        place(z);
        place(mu);
        for (auto& m : mu) m += shift;
        rep.cases.push_back(
            {"draw " + std::to_string(draw), cauchy_determinant_check(z, mu), tol_or(cfg, dflt)});
    }
    return rep;
}

VerifyReport run_flatness(const JobConfig& cfg) {
    VerifyReport rep{"flatness", "cross-derivative symmetry of the connection", {}};
    std::mt19937 rng(cfg.seed);

    RationalCovering R = sample_covering(rng, 3);
    double r0 = 0.0;
    std::size_t n0 = branch_data(R).size();
    for (std::size_t m = 0; m < n0; ++m)
        for (std::size_t n = m + 1; n < n0; ++n)
            r0 = std::max(r0, flatness_residual_genus0(R, m, n, cfg.fd_step));
    rep.cases.push_back({"genus 0, degree 3", r0, tol_or(cfg, 1e-6)});

    auto curve_case = [&](int genus, bool wirt, double dflt) {
        HyperellipticCurve curve = sample_curve(rng, genus);
        double r = 0.0;
        for (std::size_t m = 0; m < curve.e.size(); ++m)
            for (std::size_t n = m + 1; n < curve.e.size(); ++n)
                r = std::max(r, flatness_residual_hyperelliptic(curve, m, n, wirt, cfg.fd_step));
        std::string name = "genus " + std::to_string(genus) + (wirt ? ", wirtinger" : ", bergmann");
        rep.cases.push_back({name, r, tol_or(cfg, dflt)});
    };
    curve_case(1, false, 1e-6);
    curve_case(2, false, 1e-5);
    curve_case(2, true, 1e-5);
    return rep;
}

std::vector<double> even_theta4_moduli(const CMat& B, double eps) {
    std::vector<double> out;
    for (const auto& chi : even_characteristics(int(B.rows()))) {
        cplx t = theta_constant(B, chi, eps);
        out.push_back(std::abs(t * t * t * t));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> thomae_moduli(const std::vector<cplx>& e, cplx detA) {
    int g = int(e.size()) / 2 - 1;
    cplx c = detA;
    for (int i = 0; i < g; ++i) c /= 2.0 * pi * cplx(0.0, 1.0);
    std::vector<int> mask(e.size() - 1, 0);
    for (int i = 0; i < g; ++i) mask[std::size_t(i)] = 1;
    std::sort(mask.begin(), mask.end());
    std::vector<double> out;
    do {
        std::vector<int> side(e.size(), 1);
        side[0] = 0;
        for (std::size_t k = 0; k < mask.size(); ++k)
            if (mask[k]) side[k + 1] = 0;
        cplx prod(1.0);
        for (std::size_t m = 0; m + 1 < e.size(); ++m)
            for (std::size_t n = m + 1; n < e.size(); ++n)
                if (side[m] == side[n]) prod *= e[m] - e[n];
        out.push_back(std::abs(c * c * prod));
    } while (std::next_permutation(mask.begin(), mask.end()));
    std::sort(out.begin(), out.end());
    return out;
}

VerifyReport run_thomae(const JobConfig& cfg) {
    VerifyReport rep{"thomae", "Thomae theta-constant products", {}};
    std::mt19937 rng(cfg.seed);
    for (int genus : {1, 2}) {
        HyperellipticCurve curve = sample_curve(rng, genus);
        PeriodData pd = period_matrices(curve);
        auto lhs = even_theta4_moduli(pd.B, cfg.theta_eps);
        auto rhs = thomae_moduli(curve.e, mat_det(pd.A));
        double r = 0.0;
        for (std::size_t k = 0; k < lhs.size(); ++k)
            r = std::max(r, std::abs(lhs[k] - rhs[k]) / rhs[k]);
        rep.cases.push_back({"genus " + std::to_string(genus), r, tol_or(cfg, 1e-8)});
    }
    return rep;
}

VerifyReport run_rauch(const JobConfig& cfg) {
    VerifyReport rep{"rauch", "Rauch variation of the period matrix", {}};
    std::mt19937 rng(cfg.seed);
    for (int genus : {1, 2}) {
        HyperellipticCurve curve = sample_curve(rng, genus);
        PeriodData pd = period_matrices(curve);
        double r = 0.0;
        for (std::size_t m = 0; m < curve.e.size(); ++m) {
            double h = cfg.fd_step * std::max(1.0, std::abs(curve.e[m]));
            auto up = curve.e, dn = curve.e;
            up[m] += h;
            dn[m] -= h;
            PeriodData pu = period_matrices(HyperellipticCurve(up));
            PeriodData pl = period_matrices(HyperellipticCurve(dn));
            for (std::size_t i = 0; i < pd.B.rows(); ++i)
                for (std::size_t j = 0; j < pd.B.cols(); ++j) {
                    cplx fd = (pu.B(i, j) - pl.B(i, j)) / (2.0 * h);
                    cplx exact = rauch_derivative(curve, pd, i, j, m);
                    r = std::max(r, std::abs(fd - exact) / std::max(1.0, std::abs(exact)));
                }
        }
        rep.cases.push_back({"genus " + std::to_string(genus), r, tol_or(cfg, 1e-6)});
    }
    return rep;
}

VerifyReport run_monodromy(const JobConfig& cfg) {
    VerifyReport rep{"monodromy", "quasi-permutation monodromy closure", {}};
    std::mt19937 rng(cfg.seed);
    std::vector<std::pair<std::string, RationalCovering>> cases = {
        {"two-fold", sample_two_fold(rng)}, {"degree 3", sample_covering(rng, 3)}};
    for (auto& [name, R] : cases) {
        auto mrep = monodromy_rep(R, far_basepoint(branch_data(R)));
        double r = mrep.entry_defect;
        std::size_t N = mrep.loops.front().rows();
        CMat prod = CMat::identity(N);
        for (auto it = mrep.loops.rbegin(); it != mrep.loops.rend(); ++it) prod = prod * (*it);
        r = std::max(r, mat_max_abs(prod + (-1.0) * CMat::identity(N)));
        for (const auto& M : mrep.loops)
            for (std::size_t i = 0; i < N; ++i)
                for (std::size_t j = 0; j < N; ++j) {
                    double a = std::abs(M(i, j));
                    r = std::max(r, std::min(a, std::abs(a - 1.0)));
                }
        rep.cases.push_back({name, r, tol_or(cfg, 1e-8)});
    }
    return rep;
}

VerifyReport run_jm(const JobConfig& cfg) {
    VerifyReport rep{"jm", "isomonodromic vs covering tau exponent", {}};
    std::mt19937 rng(cfg.seed);
    std::vector<std::pair<std::string, RationalCovering>> cases = {
        {"two-fold", sample_two_fold(rng)}, {"degree 3", sample_covering(rng, 3)}};
    for (auto& [name, R] : cases) {
        auto tw = tau_rational(R, cfg.fd_step);
        double r = 0.0;
        for (std::size_t m = 0; m < tw.dlog.size(); ++m)
            r = std::max(r, std::abs(jm_log_derivative(R, m) + 0.5 * tw.dlog[m]));
        rep.cases.push_back({name, r, tol_or(cfg, 1e-7)});
    }
    return rep;
}

VerifyReport run_cross_genus1(const JobConfig& cfg) {
    VerifyReport rep{"cross-genus1", "elliptic tau: theta form vs determinant form", {}};
    std::mt19937 rng(cfg.seed);
    for (int k = 0; k < 2; ++k) {
        HyperellipticCurve curve = sample_curve(rng, 1);
        PeriodData pd = period_matrices(curve);
        TauResult tb = tau_bergmann_hyperelliptic(curve, pd, true, cfg.fd_step);
        double r = 0.0;
        for (std::size_t m = 0; m < curve.e.size(); ++m)
            r = std::max(r, std::abs(connection_genus1(curve, pd, m) - tb.dlog[m]));
        rep.cases.push_back({"curve " + std::to_string(k), r, tol_or(cfg, 1e-6)});
    }
    return rep;
}

VerifyReport run_residue(const JobConfig& cfg) {
    VerifyReport rep{"residue", "kernel residue form of the connection", {}};
    std::mt19937 rng(cfg.seed);
    std::vector<std::pair<std::string, RationalCovering>> cases = {
        {"two-fold", sample_two_fold(rng)}, {"degree 3", sample_covering(rng, 3)}};
    for (auto& [name, R] : cases) {
        double r = 0.0;
        for (std::size_t m = 0; m < branch_data(R).size(); ++m)
            r = std::max(r, residue_formula_check_genus0(R, m));
        rep.cases.push_back({name, r, tol_or(cfg, 1e-8)});
    }
    return rep;
}

// Same covering seen through lambda = w / (cc w + 1), pushed back into
// standard position by moving the largest pole of the new denominator to
// z-infinity.
RationalCovering mobius_base_change(const RationalCovering& R, double cc) {
    Poly num2 = R.num;
    Poly den2 = poly_sub(R.den, poly_scale(cc, R.num));
    auto roots = polynomial_roots(den2);
    cplx p = roots[0].z;
    for (const auto& root : roots)
        if (std::abs(root.z) > std::abs(p)) p = root.z;
    std::size_t d = std::size_t(poly_degree(num2));
    auto reversed = [&](const Poly& q) {
        Jet t = poly_jet(q, p, d);
        Poly out(d + 1, cplx(0.0));
        for (std::size_t k = 0; k <= d; ++k) out[k] = t[d - k];
        return poly_trim(out);
    };
    return make_covering(reversed(num2), reversed(den2));
}

VerifyReport run_gauge(const JobConfig& cfg) {
    VerifyReport rep{"gauge", "Mobius gauge law for the connection", {}};
    std::mt19937 rng(cfg.seed);
    for (double cc : {0.1, 0.07}) {
        RationalCovering R = sample_two_fold(rng);
        RationalCovering Rt = mobius_base_change(R, cc);
        auto bd = branch_data(R);
        auto bdt = branch_data(Rt);
        double r = 0.0;
        for (std::size_t m = 0; m < bd.size(); ++m) {
            cplx lt = bd[m].lambda / (1.0 - cc * bd[m].lambda);
            std::size_t best = 0;
            for (std::size_t k = 1; k < bdt.size(); ++k)
                if (std::abs(bdt[k].lambda - lt) < std::abs(bdt[best].lambda - lt)) best = k;
            cplx transported = connection_genus0(R, m) / std::pow(cc * lt + 1.0, 2) +
                               0.25 * cc / (cc * lt + 1.0);
            r = std::max(r, std::abs(connection_genus0(Rt, best) - transported));
        }
        rep.cases.push_back({"shift " + std::to_string(cc), r, tol_or(cfg, 1e-8)});
    }
    return rep;
}

VerifyReport run_svfay(const JobConfig& cfg) {
    VerifyReport rep{"svfay", "Fay kernel connection vs tau derivative", {}};
    std::mt19937 rng(cfg.seed);
    HyperellipticCurve curve = sample_curve(rng, 2);
    PeriodData pd = period_matrices(curve);
    TauResult tb = tau_bergmann_hyperelliptic(curve, pd, true, cfg.fd_step);
    double r = 0.0;
    for (std::size_t m = 0; m < curve.e.size(); ++m)
        r = std::max(r, std::abs(connection_hyperelliptic_svfay(curve, pd, m) - tb.dlog[m]));
    rep.cases.push_back({"genus 2", r, tol_or(cfg, 1e-5)});
    return rep;
}

VerifyReport run_verify(const std::string& identity, const JobConfig& cfg) {
    if (identity == "flatness") return run_flatness(cfg);
    if (identity == "thomae") return run_thomae(cfg);
    if (identity == "rauch") return run_rauch(cfg);
    if (identity == "cauchy") return run_cauchy(cfg);
    if (identity == "monodromy") return run_monodromy(cfg);
    if (identity == "jm") return run_jm(cfg);
    if (identity == "cross-genus1") return run_cross_genus1(cfg);
    if (identity == "residue") return run_residue(cfg);
    if (identity == "gauge") return run_gauge(cfg);
    return run_svfay(cfg);
}

// ---- report emission ----

void emit(const json& report, bool as_json) {
    if (as_json) {
        std::cout << report.dump(2) << "\n";
        return;
    }
    // table mode: one line per leaf value, dotted paths for nesting
    std::function<void(const std::string&, const json&)> walk = [&](const std::string& path,
                                                                    const json& node) {
        if (node.is_object()) {
            for (const auto& [k, v] : node.items()) walk(path.empty() ? k : path + "." + k, v);
        } else if (node.is_array() && !node.empty() && (node[0].is_object() || node[0].is_array())) {
            for (std::size_t i = 0; i < node.size(); ++i)
                walk(path + "[" + std::to_string(i) + "]", node[i]);
        } else {
            std::cout << path << " = " << node.dump() << "\n";
        }
    };
    walk("", report);
}

json verify_to_json(const VerifyReport& rep, const JobConfig& cfg) {
    json cases = json::array();
    for (const auto& c : rep.cases)
        cases.push_back({{"case", c.name},
                         {"residual", c.residual},
                         {"tolerance", c.tolerance},
                         {"pass", c.good()}});
    return {{"command", "verify"},      {"identity", rep.identity},
            {"label", rep.label},       {"seed", cfg.seed},
            {"cases", cases},           {"max_residual", rep.max_residual()},
            {"pass", rep.pass()}};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tau functions on Hurwitz spaces of rational and hyperelliptic coverings"};
    app.require_subcommand(1);
    JobConfig cfg;
    app.add_option("--tol", cfg.tol, "override the per-case verification tolerance")
        ->check(CLI::PositiveNumber);
    app.add_option("--theta-eps", cfg.theta_eps, "theta series truncation target")
        ->check(CLI::PositiveNumber);
    app.add_option("--fd-step", cfg.fd_step, "relative step for finite differences")
        ->check(CLI::PositiveNumber);
    app.add_option("--jet-order", cfg.jet_order, "truncation order of local jets")
        ->check(CLI::Range(6, 64));
    app.add_option("--seed", cfg.seed, "seed for the verification configurations");
    app.add_option("--n", cfg.npoints, "point count per set in the cauchy check")
        ->check(CLI::Range(1, 8));
    app.add_flag("--json", cfg.json_out, "emit a JSON report instead of key = value lines");
    app.add_option("--input", cfg.input,
                   "input file path, inline JSON, or - for stdin (covering: {\"num\",\"den\"}; "
                   "curve: {\"branch_points\"}; theta: {\"B\"})");

    auto* cmd_branch =
        app.add_subcommand("branch-data", "critical points and values of a covering");
    auto* cmd_periods = app.add_subcommand("periods", "period matrices of a hyperelliptic curve");
    auto* cmd_theta =
        app.add_subcommand("theta-constants", "even theta constants of a period matrix");
    auto* cmd_tau = app.add_subcommand("tau", "tau function of a covering or curve");
    std::string tau_kind;
    bool star = false;
    cmd_tau->add_option("kind", tau_kind, "rational | elliptic | hyperelliptic | wirtinger")
        ->required()
        ->check(CLI::IsMember({"rational", "elliptic", "hyperelliptic", "wirtinger"}));
    cmd_tau->add_flag("--star", star, "average over nonvanishing even characteristics");
    auto* cmd_verify = app.add_subcommand(
        "verify", "run one identity check on seeded configurations; exit 2 when it fails");
    std::string identity;
    cmd_verify->add_option("identity", identity, "which identity to check")
        ->required()
        ->check(CLI::IsMember({"flatness", "thomae", "rauch", "cauchy", "monodromy", "jm",
                               "cross-genus1", "residue", "gauge", "svfay"}));
    for (auto* sub : {cmd_branch, cmd_periods, cmd_theta, cmd_tau, cmd_verify})
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_branch->parsed()) {
            auto R = covering_from_json(load_input(cfg.input));
            json report = {{"command", "branch-data"},
                           {"branch_data", branch_data_report(branch_data(R, cfg.jet_order))}};
            emit(report, cfg.json_out);
        } else if (cmd_periods->parsed()) {
            auto curve = curve_from_json(load_input(cfg.input));
            json report = {{"command", "periods"},
                           {"genus", curve.genus()},
                           {"periods", period_report(period_matrices(curve))}};
            emit(report, cfg.json_out);
        } else if (cmd_theta->parsed()) {
            json in = load_input(cfg.input);
            CMat B = matrix_from_json(in.is_object() ? in.at("B") : in);
            validate_riemann_matrix(B);
            json report = theta_constants_report(B, cfg.theta_eps);
            report["command"] = "theta-constants";
            emit(report, cfg.json_out);
        } else if (cmd_tau->parsed()) {
            TauResult t;
            json in = load_input(cfg.input);
            if (tau_kind == "rational") {
                t = tau_rational(covering_from_json(in), cfg.fd_step);
            } else {
                auto curve = curve_from_json(in);
                PeriodData pd = period_matrices(curve);
                if (tau_kind == "elliptic")
                    t = tau_elliptic_bergmann(elliptic_local_data(curve, pd));
                else if (tau_kind == "hyperelliptic")
                    t = tau_bergmann_hyperelliptic(curve, pd, true, cfg.fd_step);
                else
                    t = star ? tau_wirtinger_star(curve, pd, true, cfg.fd_step)
                             : tau_wirtinger(curve, pd, true, cfg.fd_step);
            }
            json report = {{"command", "tau"}, {"kind", tau_kind}, {"tau", tau_report(t)}};
            emit(report, cfg.json_out);
        } else if (cmd_verify->parsed()) {
            VerifyReport rep = run_verify(identity, cfg);
            emit(verify_to_json(rep, cfg), cfg.json_out);
            if (!rep.pass()) return 2;
        }
    } catch (const json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "verification error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
