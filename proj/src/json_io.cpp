#include "htau/json_io.hpp"

#include "htau/theta.hpp"

#include <cmath>
#include <stdexcept>

namespace htau {

using nlohmann::json;

json json_complex(cplx v) { return json::array({v.real(), v.imag()}); }

json json_complex_list(const std::vector<cplx>& v) {
    json out = json::array();
    for (cplx x : v) out.push_back(json_complex(x));
    return out;
}

json json_matrix(const CMat& M) {
    json out = json::array();
    for (std::size_t i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < M.cols(); ++j) row.push_back(json_complex(M(i, j)));
        out.push_back(std::move(row));
    }
    return out;
}

json json_sign_matrix(const CMat& M) {
    json out = json::array();
    for (std::size_t i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < M.cols(); ++j) row.push_back(int(std::lround(M(i, j).real())));
        out.push_back(std::move(row));
    }
    return out;
}

cplx complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw std::invalid_argument("complex values must be [re, im] number pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<cplx> complex_list_from_json(const json& j) {
    if (!j.is_array()) throw std::invalid_argument("expected a list of complex values");
    std::vector<cplx> out;
    for (const auto& e : j) out.push_back(complex_from_json(e));
    return out;
}

CMat matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("expected a nonempty matrix");
    std::size_t rows = j.size();
    std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0) throw std::invalid_argument("expected a nonempty matrix");
    CMat M(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols)
            throw std::invalid_argument("matrix rows must have equal length");
        for (std::size_t k = 0; k < cols; ++k) M(i, k) = complex_from_json(j[i][k]);
    }
    return M;
}

RationalCovering covering_from_json(const json& j) {
    if (!j.is_object() || !j.contains("num") || !j.contains("den"))
        throw std::invalid_argument("covering input needs \"num\" and \"den\" coefficient lists");
    return make_covering(complex_list_from_json(j["num"]), complex_list_from_json(j["den"]));
}

HyperellipticCurve curve_from_json(const json& j) {
    if (!j.is_object() || !j.contains("branch_points"))
        throw std::invalid_argument("curve input needs a \"branch_points\" list");
    return HyperellipticCurve(complex_list_from_json(j["branch_points"]));
}

json branch_data_report(const std::vector<BranchDatum>& bd) {
    json out = json::array();
    for (const auto& d : bd)
        out.push_back({{"lambda", json_complex(d.lambda)},
                       {"z_crit", json_complex(d.z_crit)},
                       {"r", d.r}});
    return out;
}

json period_report(const PeriodData& pd) {
    return {{"A", json_matrix(pd.A)},
            {"B_periods", json_matrix(pd.Bper)},
            {"B", json_matrix(pd.B)}};
}

json theta_constants_report(const CMat& B, double eps) {
    json entries = json::array();
    for (const auto& chi : even_characteristics(B.rows()))
        entries.push_back(
            {{"a", chi.a}, {"b", chi.b}, {"value", json_complex(theta_constant(B, chi, eps))}});
    return {{"genus", B.rows()}, {"even_constants", entries}};
}

json tau_report(const TauResult& t) {
    return {{"log_tau", json_complex(t.log_tau)},
            {"tau_pow12", json_complex(t.tau_pow12)},
            {"dlog", json_complex_list(t.dlog)}};
}

json monodromy_report(const MonodromyRep& rep) {
    json loops = json::array();
    for (const auto& M : rep.loops) loops.push_back(json_sign_matrix(M));
    return {{"points", json_complex_list(rep.points)},
            {"loops", loops},
            {"entry_defect", rep.entry_defect}};
}

} // namespace htau
