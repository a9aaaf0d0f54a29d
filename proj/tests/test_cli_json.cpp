#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "htau/json_io.hpp"
#include "htau/theta.hpp"

#include <cstdio>
#include <sys/wait.h>

using namespace htau;
using nlohmann::json;

namespace {

struct CliResult {
    int exit_code;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    std::string cmd = std::string(HURWITZ_TAU_BIN) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

const char* joukowski_json = R"({"num":[[1,0],[0,0],[1,0]],"den":[[0,0],[1,0]]})";

} // namespace

TEST_CASE("complex and matrix values round trip through json") {
    cplx v(1.25, -3.5);
    CHECK(complex_from_json(json_complex(v)) == v);

    std::vector<cplx> list = {cplx(0.0, 1.0), cplx(-2.0, 0.125)};
    CHECK(complex_list_from_json(json_complex_list(list)) == list);

    CMat M(2, 3);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j) M(i, j) = cplx(double(i), double(j));
    CMat back = matrix_from_json(json_matrix(M));
    REQUIRE(back.rows() == 2);
    REQUIRE(back.cols() == 3);
    CHECK(mat_max_abs(back + (-1.0) * M) == 0.0);

    CHECK_THROWS_AS(complex_from_json(json::array({1.0})), std::invalid_argument);
    CHECK_THROWS_AS(complex_from_json(json("text")), std::invalid_argument);
    CHECK_THROWS_AS(matrix_from_json(json::array()), std::invalid_argument);
    CHECK_THROWS_AS(matrix_from_json(json::parse("[[[1,0]],[[1,0],[2,0]]]")),
                    std::invalid_argument);
}

TEST_CASE("covering and curve inputs parse and validate") {
    RationalCovering R = covering_from_json(json::parse(joukowski_json));
    CHECK(R.degree() == 2);
    CHECK(std::abs(R.eval(cplx(1.0)) - cplx(2.0)) < 1e-15);

    CHECK_THROWS_AS(covering_from_json(json::parse("{\"num\":[[1,0]]}")), std::invalid_argument);
    CHECK_THROWS_AS(covering_from_json(json::parse("[1,2]")), std::invalid_argument);

    auto curve = curve_from_json(json::parse(R"({"branch_points":[[0,0],[1,0],[2,0],[3,0]]})"));
    CHECK(curve.genus() == 1);
    CHECK_THROWS_AS(curve_from_json(json::parse("{}")), std::invalid_argument);
}

TEST_CASE("reports carry the advertised fields") {
    RationalCovering R = covering_from_json(json::parse(joukowski_json));
    json bd = branch_data_report(branch_data(R));
    REQUIRE(bd.size() == 2);
    CHECK(bd[0]["r"] == 2);
    CHECK(std::abs(complex_from_json(bd[0]["lambda"]) - cplx(-2.0)) < 1e-12);
    CHECK(std::abs(complex_from_json(bd[1]["lambda"]) - cplx(2.0)) < 1e-12);

    TauResult t = tau_rational(R);
    json tr = tau_report(t);
    CHECK(complex_from_json(tr["log_tau"]) == t.log_tau);
    CHECK(complex_list_from_json(tr["dlog"]) == t.dlog);

    auto rep = monodromy_rep(R, cplx(0.3, -2.1));
    json mr = monodromy_report(rep);
    REQUIRE(mr["loops"].size() == 2);
    // integer sign matrices: the off-diagonal transposition entries are +-1
    for (const auto& loop : mr["loops"]) {
        CHECK(loop[0][0].get<int>() == 0);
        CHECK(loop[1][1].get<int>() == 0);
        CHECK(std::abs(loop[0][1].get<int>()) == 1);
        CHECK(std::abs(loop[1][0].get<int>()) == 1);
    }
    CHECK(mr["entry_defect"].get<double>() < 1e-8);
}

TEST_CASE("theta constant report enumerates the even characteristics") {
    CMat B(1, 1);
    B(0, 0) = cplx(0.0, 1.0);
    json rep = theta_constants_report(B, 1e-12);
    CHECK(rep["genus"] == 1);
    REQUIRE(rep["even_constants"].size() == 3);
    // theta[0,0](0 | i) = pi^{1/4} / Gamma(3/4)
    cplx t3 = complex_from_json(rep["even_constants"][0]["value"]);
    CHECK(std::abs(t3 - cplx(1.0864348112133080145)) < 1e-12);
}

TEST_CASE("cli computes branch data from inline json") {
    auto res = run_cli(std::string("branch-data --json --input '") + joukowski_json + "'");
    CHECK(res.exit_code == 0);
    json rep = json::parse(res.out);
    CHECK(rep["command"] == "branch-data");
    REQUIRE(rep["branch_data"].size() == 2);
    CHECK(std::abs(complex_from_json(rep["branch_data"][0]["lambda"]) + cplx(2.0)) < 1e-12);
}

TEST_CASE("cli tau rational reports the two-fold connection") {
    auto res = run_cli(std::string("tau rational --json --input '") + joukowski_json + "'");
    CHECK(res.exit_code == 0);
    json rep = json::parse(res.out);
    auto dlog = complex_list_from_json(rep["tau"]["dlog"]);
    REQUIRE(dlog.size() == 2);
    // branch points -2, 2: d log tau / d lambda_m = 1/(4 (lambda_m - lambda_other))
    CHECK(std::abs(dlog[0] - cplx(-1.0 / 16.0)) < 1e-7);
    CHECK(std::abs(dlog[1] - cplx(1.0 / 16.0)) < 1e-7);
}

TEST_CASE("cli periods emit a symmetric riemann matrix") {
    auto res = run_cli(R"(periods --json --input '{"branch_points":[[0,0],[1,0],[2,0.3],[3.2,0]]}')");
    CHECK(res.exit_code == 0);
    json rep = json::parse(res.out);
    CHECK(rep["genus"] == 1);
    CMat B = matrix_from_json(rep["periods"]["B"]);
    REQUIRE(B.rows() == 1);
    CHECK(B(0, 0).imag() > 0.0);
}

TEST_CASE("cli exit codes separate input errors from verification failures") {
    CHECK(run_cli("branch-data --input '{\"num\": [[1,0]'").exit_code == 1);
    CHECK(run_cli("periods --input /nonexistent/path.json").exit_code == 1);
    CHECK(run_cli("branch-data --input '{\"num\":[[1,0],[2,0]],\"den\":[[1,0],[3,0]]}'").exit_code ==
          1);
    CHECK(run_cli("verify cauchy --tol 1e-18").exit_code == 2);
    CHECK(run_cli("verify cauchy").exit_code == 0);
}

TEST_CASE("cli verify reports are deterministic and carry residuals") {
    auto first = run_cli("verify monodromy --json --seed 3");
    auto second = run_cli("verify monodromy --json --seed 3");
    CHECK(first.exit_code == 0);
    CHECK(first.out == second.out);

    json rep = json::parse(first.out);
    CHECK(rep["identity"] == "monodromy");
    CHECK(rep["pass"] == true);
    REQUIRE(rep["cases"].size() == 2);
    for (const auto& c : rep["cases"]) {
        CHECK(c["residual"].get<double>() < c["tolerance"].get<double>());
        CHECK(c["pass"] == true);
    }
}
